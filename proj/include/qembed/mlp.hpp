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

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qembed/rng.hpp"

namespace qembed {

template <typename T>
using MatrixX = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using VectorX = Eigen::Matrix<T, Eigen::Dynamic, 1>;

/// Additive logit penalty for masked actions.
inline constexpr double kMaskedLogit = -1e8;

/// Fully connected network, tanh on hidden layers, linear output.
/// Samples are columns: forward maps (in x B) to (out x B).
template <typename T>
class Mlp {
  public:
    Mlp() = default;

    explicit Mlp(std::vector<int> dims) : dims_(std::move(dims)) {
        if (dims_.size() < 2) throw std::invalid_argument("mlp needs at least input and output sizes");
        for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
            tensors_.push_back(MatrixX<T>::Zero(dims_[l + 1], dims_[l]));
            tensors_.push_back(MatrixX<T>::Zero(dims_[l + 1], 1));
        }
    }

    const std::vector<int>& dims() const noexcept { return dims_; }
    std::size_t layer_count() const noexcept { return dims_.size() - 1; }
    int input_size() const { return dims_.front(); }
    int output_size() const { return dims_.back(); }

    /// Weights and biases alternate: W0, b0, W1, b1, ...
    std::vector<MatrixX<T>>& tensors() noexcept { return tensors_; }
    const std::vector<MatrixX<T>>& tensors() const noexcept { return tensors_; }
    MatrixX<T>& weight(std::size_t l) { return tensors_[2 * l]; }
    const MatrixX<T>& weight(std::size_t l) const { return tensors_[2 * l]; }
    MatrixX<T>& bias(std::size_t l) { return tensors_[2 * l + 1]; }
    const MatrixX<T>& bias(std::size_t l) const { return tensors_[2 * l + 1]; }

    /// Orthogonal weights scaled by `hidden_gain` (hidden layers) and
    /// `output_gain` (last layer); zero biases.
    void orthogonal_init(Rng& rng, double hidden_gain, double output_gain) {
        for (std::size_t l = 0; l < layer_count(); ++l) {
            const double gain = l + 1 == layer_count() ? output_gain : hidden_gain;
            weight(l) = orthogonal(dims_[l + 1], dims_[l], rng, gain).template cast<T>();
            bias(l).setZero();
        }
    }

    /// Post-activation values of every layer, input first.
    struct Cache {
        std::vector<MatrixX<T>> activations;
    };

    MatrixX<T> forward(const MatrixX<T>& input, Cache* cache = nullptr) const {
        MatrixX<T> x = input;
        if (cache != nullptr) {
            cache->activations.clear();
            cache->activations.push_back(x);
        }
        for (std::size_t l = 0; l < layer_count(); ++l) {
            MatrixX<T> z = weight(l) * x;
            z.colwise() += bias(l).col(0);
            if (l + 1 < layer_count()) z = z.array().tanh().matrix();
            x = std::move(z);
            if (cache != nullptr) cache->activations.push_back(x);
        }
        return x;
    }

    /// Accumulates dLoss/dparams into `grads` (same layout as tensors()) given
    /// dLoss/doutput for the batch recorded in `cache`.
    void backward(const Cache& cache, const MatrixX<T>& grad_output, std::vector<MatrixX<T>>& grads) const {
        MatrixX<T> delta = grad_output;
        for (std::size_t l = layer_count(); l-- > 0;) {
            const MatrixX<T>& input = cache.activations[l];
            grads[2 * l].noalias() += delta * input.transpose();
            grads[2 * l + 1].noalias() += delta.rowwise().sum();
            if (l == 0) break;
            MatrixX<T> upstream = weight(l).transpose() * delta;
            // tanh' = 1 - a^2 on the previous layer's output
            const MatrixX<T>& a = cache.activations[l];
            delta = (upstream.array() * (T(1) - a.array().square())).matrix();
        }
    }

    std::vector<MatrixX<T>> zero_like() const {
        std::vector<MatrixX<T>> out;
        out.reserve(tensors_.size());
        for (const auto& t : tensors_) out.push_back(MatrixX<T>::Zero(t.rows(), t.cols()));
        return out;
    }

    std::size_t parameter_count() const {
        std::size_t total = 0;
        for (const auto& t : tensors_) total += static_cast<std::size_t>(t.size());
        return total;
    }

    template <typename U>
    Mlp<U> cast() const {
        Mlp<U> out(dims_);
        for (std::size_t i = 0; i < tensors_.size(); ++i) out.tensors()[i] = tensors_[i].template cast<U>();
        return out;
    }

  private:
    static Eigen::MatrixXd orthogonal(int rows, int cols, Rng& rng, double gain) {
        // QR of a Gaussian matrix with sign correction gives a Haar-distributed
        // orthogonal factor; wide matrices use the transpose
        const bool wide = rows < cols;
        const int big = wide ? cols : rows;
        const int small = wide ? rows : cols;
        Eigen::MatrixXd gaussian(big, small);
        for (int c = 0; c < small; ++c) {
            for (int r = 0; r < big; ++r) gaussian(r, c) = rng.normal();
        }
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian);
        Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(big, small);
        const Eigen::MatrixXd r = qr.matrixQR();
        for (int c = 0; c < small; ++c) {
            if (r(c, c) < 0) q.col(c) *= -1.0;
        }
        Eigen::MatrixXd w = wide ? Eigen::MatrixXd(q.transpose()) : q;
        return gain * w;
    }

    std::vector<int> dims_;
    std::vector<MatrixX<T>> tensors_;
};

/// Separate policy and value networks over the same observation.
template <typename T>
struct ActorCritic {
    Mlp<T> policy;
    Mlp<T> value;

    ActorCritic() = default;
    ActorCritic(int input, int actions, const std::vector<int>& hidden) {
        std::vector<int> pi{input};
        pi.insert(pi.end(), hidden.begin(), hidden.end());
        std::vector<int> vf = pi;
        pi.push_back(actions);
        vf.push_back(1);
        policy = Mlp<T>(pi);
        value = Mlp<T>(vf);
    }

    int input_size() const { return policy.input_size(); }
    int action_count() const { return policy.output_size(); }

    /// Gains sqrt(2) on hidden layers, 0.01 on the policy head, 1 on the value head.
    void init(Rng& rng) {
        policy.orthogonal_init(rng, std::sqrt(2.0), 0.01);
        value.orthogonal_init(rng, std::sqrt(2.0), 1.0);
    }

    template <typename U>
    ActorCritic<U> cast() const {
        ActorCritic<U> out;
        out.policy = policy.template cast<U>();
        out.value = value.template cast<U>();
        return out;
    }
};

/// Column-wise masked log-softmax: masked entries (mask == 0) get the
/// kMaskedLogit penalty before normalisation.
template <typename T>
MatrixX<T> masked_log_softmax(const MatrixX<T>& logits, const MatrixX<T>& mask) {
    MatrixX<T> z = logits + ((mask.array() - T(1)) * T(-kMaskedLogit)).matrix();
    for (Eigen::Index c = 0; c < z.cols(); ++c) {
        const T top = z.col(c).maxCoeff();
        const T lse = top + std::log((z.col(c).array() - top).exp().sum());
        z.col(c).array() -= lse;
    }
    return z;
}

/// Probabilities of one observation under the masked policy.
template <typename T>
VectorX<T> masked_probabilities(const Mlp<T>& policy, std::span<const float> observation,
                                std::span<const std::uint8_t> mask) {
    MatrixX<T> x(static_cast<Eigen::Index>(observation.size()), 1);
    for (std::size_t i = 0; i < observation.size(); ++i) x(static_cast<Eigen::Index>(i), 0) = T(observation[i]);
    MatrixX<T> m(static_cast<Eigen::Index>(mask.size()), 1);
    for (std::size_t i = 0; i < mask.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = T(mask[i]);
    // Eigen's exp clamps very negative inputs to a tiny positive value, so zero masked entries explicitly
    return (masked_log_softmax<T>(policy.forward(x), m).col(0).array().exp() * m.col(0).array()).matrix();
}

/// One minibatch of PPO training data. Columns are samples.
template <typename T>
struct PpoBatch {
    MatrixX<T> observations;  // input x B
    MatrixX<T> masks;         // actions x B, 1 = admissible
    std::vector<int> actions;
    VectorX<T> old_log_probs;
    VectorX<T> advantages;
    VectorX<T> returns;
};

struct PpoCoefficients {
    double clip = 0.2;
    double entropy = 0.0;
    double value = 0.5;
    bool normalize_advantage = true;
};

template <typename T>
struct PpoLoss {
    T total = 0;
    T policy = 0;
    T value = 0;
    T entropy = 0;  // mean entropy (the loss term is -entropy)
    T clip_fraction = 0;
    T approx_kl = 0;
    std::vector<MatrixX<T>> policy_grads;
    std::vector<MatrixX<T>> value_grads;
};

/// Clipped-surrogate PPO loss and its gradient for both networks:
///   L = -mean(min(r A, clip(r, 1-e, 1+e) A)) - c_ent mean(H) + c_vf mean((v - R)^2)
template <typename T>
PpoLoss<T> ppo_loss(const ActorCritic<T>& nets, const PpoBatch<T>& batch, const PpoCoefficients& coef,
                    bool with_gradients = true) {
    const Eigen::Index n = batch.observations.cols();
    const T inv_n = T(1) / T(n);
    PpoLoss<T> out;

    VectorX<T> adv = batch.advantages;
    if (coef.normalize_advantage && n > 1) {
        const T mean = adv.mean();
        const T var = (adv.array() - mean).square().sum() / T(n - 1);
        adv = ((adv.array() - mean) / (std::sqrt(var) + T(1e-8))).matrix();
    }

    typename Mlp<T>::Cache pcache;
    typename Mlp<T>::Cache vcache;
    const MatrixX<T> logits = nets.policy.forward(batch.observations, with_gradients ? &pcache : nullptr);
    const MatrixX<T> values = nets.value.forward(batch.observations, with_gradients ? &vcache : nullptr);
    const MatrixX<T> log_probs = masked_log_softmax<T>(logits, batch.masks);
    const MatrixX<T> probs = (log_probs.array().exp() * batch.masks.array()).matrix();

    MatrixX<T> grad_logits = MatrixX<T>::Zero(logits.rows(), n);
    MatrixX<T> grad_values(1, n);
    const T lo = T(1 - coef.clip);
    const T hi = T(1 + coef.clip);
    for (Eigen::Index b = 0; b < n; ++b) {
        const int a = batch.actions[static_cast<std::size_t>(b)];
        const T logp = log_probs(a, b);
        const T log_ratio = logp - batch.old_log_probs(b);
        const T ratio = std::exp(log_ratio);
        const T surr1 = ratio * adv(b);
        const T clipped = std::min(std::max(ratio, lo), hi);
        const T surr2 = clipped * adv(b);
        out.policy -= std::min(surr1, surr2) * inv_n;
        if (ratio < lo || ratio > hi) out.clip_fraction += inv_n;
        out.approx_kl += ((ratio - T(1)) - log_ratio) * inv_n;

        // entropy over admissible actions only
        T entropy = 0;
        for (Eigen::Index j = 0; j < probs.rows(); ++j) {
            if (probs(j, b) > T(0)) entropy -= probs(j, b) * log_probs(j, b);
        }
        out.entropy += entropy * inv_n;

        const T diff = values(0, b) - batch.returns(b);
        out.value += diff * diff * inv_n;

        if (!with_gradients) continue;
        // the min picks the unclipped term unless the clipped one is smaller,
        // which only happens outside the trust region where its slope is 0
        const T dlogp = surr1 <= surr2 ? -ratio * adv(b) * inv_n : T(0);
        for (Eigen::Index j = 0; j < probs.rows(); ++j) {
            T g = -dlogp * probs(j, b);
            if (j == a) g += dlogp;
            // d(-H)/dz_j = p_j (log p_j + H)
            if (probs(j, b) > T(0)) g += T(coef.entropy) * inv_n * probs(j, b) * (log_probs(j, b) + entropy);
            grad_logits(j, b) = g;
        }
        grad_values(0, b) = T(coef.value) * T(2) * diff * inv_n;
    }
    out.total = out.policy - T(coef.entropy) * out.entropy + T(coef.value) * out.value;
    if (with_gradients) {
        out.policy_grads = nets.policy.zero_like();
        out.value_grads = nets.value.zero_like();
        nets.policy.backward(pcache, grad_logits, out.policy_grads);
        nets.value.backward(vcache, grad_values, out.value_grads);
    }
    return out;
}

/// Adam over a list of tensors.
template <typename T>
class Adam {
  public:
    Adam() = default;
    Adam(const std::vector<MatrixX<T>>& params, double lr, double eps = 1e-5, double beta1 = 0.9,
         double beta2 = 0.999)
        : lr_(lr), eps_(eps), beta1_(beta1), beta2_(beta2) {
        for (const auto& p : params) {
            m_.push_back(MatrixX<T>::Zero(p.rows(), p.cols()));
            v_.push_back(MatrixX<T>::Zero(p.rows(), p.cols()));
        }
    }

    void step(std::vector<MatrixX<T>*> params, const std::vector<const MatrixX<T>*>& grads) {
        ++t_;
        const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
        const T step_size = T(lr_ / bc1);
        const T sqrt_bc2 = T(std::sqrt(bc2));
        for (std::size_t i = 0; i < params.size(); ++i) {
            m_[i] = T(beta1_) * m_[i] + T(1 - beta1_) * *grads[i];
            v_[i] = T(beta2_) * v_[i] + T(1 - beta2_) * grads[i]->cwiseProduct(*grads[i]);
            const MatrixX<T> denom = ((v_[i].array().sqrt() / sqrt_bc2) + T(eps_)).matrix();
            *params[i] -= (step_size * m_[i].array() / denom.array()).matrix();
        }
    }

    long steps() const noexcept { return t_; }

  private:
    double lr_ = 3e-4;
    double eps_ = 1e-5;
    double beta1_ = 0.9;
    double beta2_ = 0.999;
    long t_ = 0;
    std::vector<MatrixX<T>> m_;
    std::vector<MatrixX<T>> v_;
};

}  // namespace qembed
