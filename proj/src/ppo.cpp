// Copyright 2026 The qembed Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#include "qembed/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qembed/errors.hpp"

namespace qembed {

void Hyperparams::validate() const {
    const auto require = [](bool ok, const char* what) {
        if (!ok) throw ParameterError(std::string("invalid hyperparameter: ") + what);
    };
    require(learning_rate > 0.0, "learning_rate must be positive");
    require(gamma >= 0.0 && gamma <= 1.0, "gamma must lie in [0, 1]");
    require(gae_lambda >= 0.0 && gae_lambda <= 1.0, "gae_lambda must lie in [0, 1]");
    require(clip > 0.0, "clip must be positive");
    require(epochs >= 1, "epochs must be >= 1");
    require(minibatch >= 1, "minibatch must be >= 1");
    require(horizon >= 1, "horizon must be >= 1");
    require(entropy_coef >= 0.0, "entropy_coef must be >= 0");
    require(vf_coef >= 0.0, "vf_coef must be >= 0");
    require(grad_clip > 0.0, "grad_clip must be positive");
    require(total_steps >= 0, "total_steps must be >= 0");
    require(!hidden.empty(), "hidden layers must be non-empty");
}

nlohmann::json Hyperparams::to_json() const {
    return {{"learning_rate", learning_rate}, {"gamma", gamma},       {"gae_lambda", gae_lambda},
            {"clip", clip},                   {"epochs", epochs},     {"minibatch", minibatch},
            {"horizon", horizon},             {"entropy_coef", entropy_coef}, {"vf_coef", vf_coef},
            {"grad_clip", grad_clip},         {"total_steps", total_steps},   {"seed", seed},
            {"hidden", hidden}};
}

Hyperparams Hyperparams::from_json(const nlohmann::json& j) {
    Hyperparams hp;
    hp.learning_rate = j.value("learning_rate", hp.learning_rate);
    hp.gamma = j.value("gamma", hp.gamma);
    hp.gae_lambda = j.value("gae_lambda", hp.gae_lambda);
    hp.clip = j.value("clip", hp.clip);
    hp.epochs = j.value("epochs", hp.epochs);
    hp.minibatch = j.value("minibatch", hp.minibatch);
    hp.horizon = j.value("horizon", hp.horizon);
    hp.entropy_coef = j.value("entropy_coef", hp.entropy_coef);
    hp.vf_coef = j.value("vf_coef", hp.vf_coef);
    hp.grad_clip = j.value("grad_clip", hp.grad_clip);
    hp.total_steps = j.value("total_steps", hp.total_steps);
    hp.seed = j.value("seed", hp.seed);
    hp.hidden = j.value("hidden", hp.hidden);
    hp.validate();
    return hp;
}

RolloutBuffer::RolloutBuffer(int observation_size, int action_count, int capacity)
    : observation_size_(observation_size), action_count_(action_count), capacity_(capacity) {
    observations_.reserve(static_cast<std::size_t>(observation_size) * static_cast<std::size_t>(capacity));
    masks_.reserve(static_cast<std::size_t>(action_count) * static_cast<std::size_t>(capacity));
}

void RolloutBuffer::add(std::span<const float> observation, std::span<const std::uint8_t> mask, int action,
                        double log_prob, double reward, double value, bool terminal) {
    if (full()) throw ContractViolation("rollout buffer is full");
    if (observation.size() != static_cast<std::size_t>(observation_size_) ||
        mask.size() != static_cast<std::size_t>(action_count_)) {
        throw ContractViolation("rollout sample has the wrong shape");
    }
    observations_.insert(observations_.end(), observation.begin(), observation.end());
    masks_.insert(masks_.end(), mask.begin(), mask.end());
    actions_.push_back(action);
    log_probs_.push_back(log_prob);
    rewards_.push_back(reward);
    values_.push_back(value);
    terminals_.push_back(terminal ? 1 : 0);
    ++size_;
}

void RolloutBuffer::clear() {
    size_ = 0;
    observations_.clear();
    masks_.clear();
    actions_.clear();
    log_probs_.clear();
    rewards_.clear();
    values_.clear();
    terminals_.clear();
    advantages_.clear();
    returns_.clear();
}

std::span<const float> RolloutBuffer::observation(int t) const {
    return {observations_.data() + static_cast<std::size_t>(t) * static_cast<std::size_t>(observation_size_),
            static_cast<std::size_t>(observation_size_)};
}

std::span<const std::uint8_t> RolloutBuffer::mask(int t) const {
    return {masks_.data() + static_cast<std::size_t>(t) * static_cast<std::size_t>(action_count_),
            static_cast<std::size_t>(action_count_)};
}

void RolloutBuffer::finish(double bootstrap_value, double gamma, double lambda) {
    auto estimate = compute_returns_advantages(rewards_, values_, terminals_, bootstrap_value, gamma, lambda);
    advantages_ = std::move(estimate.advantages);
    returns_ = std::move(estimate.returns);
}

AdvantageEstimate compute_returns_advantages(std::span<const double> rewards, std::span<const double> values,
                                             std::span<const std::uint8_t> terminal, double bootstrap_value,
                                             double gamma, double lambda) {
    const std::size_t n = rewards.size();
    if (values.size() != n || terminal.size() != n) throw ParameterError("rollout arrays differ in length");
    AdvantageEstimate out;
    out.advantages.assign(n, 0.0);
    out.returns.assign(n, 0.0);
    double running = 0.0;
    for (std::size_t t = n; t-- > 0;) {
        const double next_value = t + 1 == n ? bootstrap_value : values[t + 1];
        const double live = terminal[t] ? 0.0 : 1.0;
        const double delta = rewards[t] + gamma * next_value * live - values[t];
        running = delta + gamma * lambda * live * running;
        out.advantages[t] = running;
        out.returns[t] = running + values[t];
    }
    return out;
}

PpoLearner::PpoLearner(int observation_size, int action_count, const Hyperparams& hp)
    : hp_(hp), nets_(observation_size, action_count, hp.hidden) {
    hp_.validate();
    Rng init_rng(hp.seed);
    nets_.init(init_rng);
    reset_optimizer();
}

PpoLearner::PpoLearner(ActorCritic<float> nets, const Hyperparams& hp) : hp_(hp), nets_(std::move(nets)) {
    hp_.validate();
    reset_optimizer();
}

void PpoLearner::reset_optimizer() {
    std::vector<MatrixX<float>> all = nets_.policy.tensors();
    all.insert(all.end(), nets_.value.tensors().begin(), nets_.value.tensors().end());
    optimizer_ = Adam<float>(all, hp_.learning_rate);
}

namespace {

MatrixX<float> column(std::span<const float> observation) {
    return Eigen::Map<const MatrixX<float>>(observation.data(), static_cast<Eigen::Index>(observation.size()), 1);
}

}  // namespace

Decision decide(const ActorCritic<float>& nets, std::span<const float> observation,
                std::span<const std::uint8_t> mask, Rng& rng, bool greedy) {
    if (std::find(mask.begin(), mask.end(), std::uint8_t{1}) == mask.end()) {
        throw ContractViolation("all actions are masked; the episode should have terminated");
    }
    const MatrixX<float> x = column(observation);
    MatrixX<float> m(static_cast<Eigen::Index>(mask.size()), 1);
    for (std::size_t i = 0; i < mask.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = mask[i];
    const MatrixX<float> log_probs = masked_log_softmax<float>(nets.policy.forward(x), m);

    Decision d;
    if (greedy) {
        float best = -std::numeric_limits<float>::infinity();
        for (std::size_t i = 0; i < mask.size(); ++i) {
            if (mask[i] && log_probs(static_cast<Eigen::Index>(i), 0) > best) {
                best = log_probs(static_cast<Eigen::Index>(i), 0);
                d.action = static_cast<int>(i);
            }
        }
    } else {
        const double u = rng.uniform01();
        double cumulative = 0.0;
        for (std::size_t i = 0; i < mask.size(); ++i) {
            if (!mask[i]) continue;
            d.action = static_cast<int>(i);
            cumulative += std::exp(static_cast<double>(log_probs(static_cast<Eigen::Index>(i), 0)));
            if (u < cumulative) break;
        }
    }
    d.log_prob = log_probs(d.action, 0);
    d.value = nets.value.forward(x)(0, 0);
    return d;
}

double PpoLearner::value(std::span<const float> observation) const {
    return nets_.value.forward(column(observation))(0, 0);
}

UpdateDiagnostics PpoLearner::update(const RolloutBuffer& buffer, Rng& rng) {
    UpdateDiagnostics diag;
    const int n = buffer.size();
    if (n == 0) return diag;
    if (buffer.advantages().size() != static_cast<std::size_t>(n)) {
        throw ContractViolation("rollout buffer must be finished before the update");
    }
    const PpoCoefficients coef{hp_.clip, hp_.entropy_coef, hp_.vf_coef, true};
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);

    PpoBatch<float> batch;
    for (int epoch = 0; epoch < hp_.epochs; ++epoch) {
        rng.shuffle(order);
        for (int start = 0; start < n; start += hp_.minibatch) {
            const int count = std::min(hp_.minibatch, n - start);
            batch.observations.resize(buffer.observation_size(), count);
            batch.masks.resize(buffer.action_count(), count);
            batch.actions.resize(static_cast<std::size_t>(count));
            batch.old_log_probs.resize(count);
            batch.advantages.resize(count);
            batch.returns.resize(count);
            for (int c = 0; c < count; ++c) {
                const int t = order[static_cast<std::size_t>(start + c)];
                const auto obs = buffer.observation(t);
                const auto mask = buffer.mask(t);
                for (int i = 0; i < buffer.observation_size(); ++i) batch.observations(i, c) = obs[static_cast<std::size_t>(i)];
                for (int i = 0; i < buffer.action_count(); ++i) batch.masks(i, c) = mask[static_cast<std::size_t>(i)];
                batch.actions[static_cast<std::size_t>(c)] = buffer.actions()[static_cast<std::size_t>(t)];
                batch.old_log_probs(c) = static_cast<float>(buffer.log_probs()[static_cast<std::size_t>(t)]);
                batch.advantages(c) = static_cast<float>(buffer.advantages()[static_cast<std::size_t>(t)]);
                batch.returns(c) = static_cast<float>(buffer.returns()[static_cast<std::size_t>(t)]);
            }
            auto loss = ppo_loss<float>(nets_, batch, coef);
            if (!std::isfinite(loss.total)) {
                diag.aborted = true;
                diag.abort_reason = "non-finite loss at epoch " + std::to_string(epoch);
                return diag;
            }
            std::vector<MatrixX<float>*> grads;
            std::vector<MatrixX<float>*> params;
            for (auto& g : loss.policy_grads) grads.push_back(&g);
            for (auto& g : loss.value_grads) grads.push_back(&g);
            for (auto& p : nets_.policy.tensors()) params.push_back(&p);
            for (auto& p : nets_.value.tensors()) params.push_back(&p);
            diag.grad_norm += clip_gradient_norm<float>(grads, hp_.grad_clip);
            optimizer_.step(params, {grads.begin(), grads.end()});

            diag.policy_loss += loss.policy;
            diag.value_loss += loss.value;
            diag.entropy += loss.entropy;
            diag.approx_kl += loss.approx_kl;
            diag.clip_fraction += loss.clip_fraction;
            ++diag.gradient_steps;
        }
    }
    const double steps = diag.gradient_steps;
    diag.policy_loss /= steps;
    diag.value_loss /= steps;
    diag.entropy /= steps;
    diag.approx_kl /= steps;
    diag.clip_fraction /= steps;
    diag.grad_norm /= steps;
    return diag;
}

}  // namespace qembed
