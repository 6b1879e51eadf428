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

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qembed/environment.hpp"
#include "qembed/mlp.hpp"
#include "qembed/rng.hpp"

namespace qembed {

/// PPO settings. Defaults follow the usual reference-library values.
struct Hyperparams {
    double learning_rate = 3e-4;
    double gamma = 0.99;
    double gae_lambda = 0.95;
    double clip = 0.2;
    int epochs = 10;
    int minibatch = 64;
    int horizon = 2048;
    double entropy_coef = 0.0;
    double vf_coef = 0.5;
    double grad_clip = 0.5;
    long total_steps = 1'000'000;
    std::uint64_t seed = 0;
    std::vector<int> hidden{64, 64};

    /// Throws ParameterError on out-of-range values.
    void validate() const;
    nlohmann::json to_json() const;
    static Hyperparams from_json(const nlohmann::json& j);
};

/// Per-step storage for one rollout. Observations and masks are flattened.
class RolloutBuffer {
  public:
    RolloutBuffer(int observation_size, int action_count, int capacity);

    void add(std::span<const float> observation, std::span<const std::uint8_t> mask, int action, double log_prob,
             double reward, double value, bool terminal);
    void clear();

    int size() const noexcept { return size_; }
    int capacity() const noexcept { return capacity_; }
    bool full() const noexcept { return size_ == capacity_; }
    int observation_size() const noexcept { return observation_size_; }
    int action_count() const noexcept { return action_count_; }

    std::span<const float> observation(int t) const;
    std::span<const std::uint8_t> mask(int t) const;
    const std::vector<int>& actions() const noexcept { return actions_; }
    const std::vector<double>& log_probs() const noexcept { return log_probs_; }
    const std::vector<double>& rewards() const noexcept { return rewards_; }
    const std::vector<double>& values() const noexcept { return values_; }
    const std::vector<std::uint8_t>& terminals() const noexcept { return terminals_; }

    /// Filled by finish().
    const std::vector<double>& advantages() const noexcept { return advantages_; }
    const std::vector<double>& returns() const noexcept { return returns_; }

    /// Computes GAE advantages and returns. `bootstrap_value` is v(s_T) for
    /// the state after the last stored step; ignored if that step was terminal.
    void finish(double bootstrap_value, double gamma, double lambda);

  private:
    int observation_size_;
    int action_count_;
    int capacity_;
    int size_ = 0;
    std::vector<float> observations_;
    std::vector<std::uint8_t> masks_;
    std::vector<int> actions_;
    std::vector<double> log_probs_;
    std::vector<double> rewards_;
    std::vector<double> values_;
    std::vector<std::uint8_t> terminals_;
    std::vector<double> advantages_;
    std::vector<double> returns_;
};

struct AdvantageEstimate {
    std::vector<double> advantages;
    std::vector<double> returns;
};

/// Generalised advantage estimation. terminal[t] marks that the episode ended
/// after step t; bootstrapping stops there.
AdvantageEstimate compute_returns_advantages(std::span<const double> rewards, std::span<const double> values,
                                             std::span<const std::uint8_t> terminal, double bootstrap_value,
                                             double gamma, double lambda);

struct UpdateDiagnostics {
    double policy_loss = 0.0;
    double value_loss = 0.0;
    double entropy = 0.0;
    double approx_kl = 0.0;
    double clip_fraction = 0.0;
    double grad_norm = 0.0;
    int gradient_steps = 0;
    bool aborted = false;
    std::string abort_reason;
};

struct Decision {
    int action = -1;
    double log_prob = 0.0;
    double value = 0.0;
};

/// Samples an action from the masked policy, or takes the arg-max when
/// `greedy`. Throws ContractViolation if every action is masked.
Decision decide(const ActorCritic<float>& nets, std::span<const float> observation,
                std::span<const std::uint8_t> mask, Rng& rng, bool greedy = false);

/// Network pair plus optimizer state.
class PpoLearner {
  public:
    PpoLearner(int observation_size, int action_count, const Hyperparams& hp);
    /// Continues from existing networks with a fresh optimizer.
    PpoLearner(ActorCritic<float> nets, const Hyperparams& hp);

    ActorCritic<float>& nets() noexcept { return nets_; }
    const ActorCritic<float>& nets() const noexcept { return nets_; }
    const Hyperparams& hyperparams() const noexcept { return hp_; }

    Decision act(std::span<const float> observation, std::span<const std::uint8_t> mask, Rng& rng,
                 bool greedy = false) const {
        return decide(nets_, observation, mask, rng, greedy);
    }
    double value(std::span<const float> observation) const;

    /// epochs x minibatch passes over a finished buffer. Non-finite losses
    /// abort the update before any parameter changes from that minibatch.
    UpdateDiagnostics update(const RolloutBuffer& buffer, Rng& rng);

  private:
    void reset_optimizer();

    Hyperparams hp_;
    ActorCritic<float> nets_;
    Adam<float> optimizer_;
};

/// Clips the joint L2 norm of all gradient tensors to `max_norm`; returns the
/// norm before clipping.
template <typename T>
double clip_gradient_norm(std::vector<MatrixX<T>*> grads, double max_norm) {
    double sq = 0.0;
    for (const auto* g : grads) sq += static_cast<double>(g->squaredNorm());
    const double norm = std::sqrt(sq);
    if (norm > max_norm) {
        const T scale = T(max_norm / (norm + 1e-6));
        for (auto* g : grads) *g *= scale;
    }
    return norm;
}

}  // namespace qembed
