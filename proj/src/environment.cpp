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

#include "qembed/environment.hpp"

#include <algorithm>
#include <numeric>

#include <nlohmann/json.hpp>

#include "qembed/errors.hpp"

namespace qembed {

EmbeddingEnv::EmbeddingEnv(const HardwareGraph& h, int max_g) : h_(&h), layout_{max_g, h.node_count()} {
    if (max_g < 2) throw ParameterError("max_g must be at least 2");
}

Observation EmbeddingEnv::reset(const ProblemGraph& g) {
    const int n = g.node_count();
    if (n > layout_.max_g) {
        throw ParameterError("problem graph has " + std::to_string(n) + " nodes, environment accepts at most " +
                             std::to_string(layout_.max_g));
    }
    if (n < 2 || !g.is_connected()) throw ParameterError("problem graph must be connected with at least 2 nodes");
    g_ = g;
    embedding_.chains.assign(static_cast<std::size_t>(n), {});
    owner_.assign(static_cast<std::size_t>(h_->node_count()), -1);
    missing_.resize(static_cast<std::size_t>(n));
    total_missing_ = 0;
    for (int i = 0; i < n; ++i) {
        missing_[static_cast<std::size_t>(i)] = g.degree(i);
        total_missing_ += g.degree(i);
    }
    linked_.assign(static_cast<std::size_t>(n * n), 0);
    current_ = 0;
    steps_ = 0;
    terminated_ = false;
    success_ = false;
    recompute_mask();
    return observation();
}

void EmbeddingEnv::attach(int node, int q) {
    const int n = g_.node_count();
    owner_[static_cast<std::size_t>(q)] = node;
    embedding_.chains[static_cast<std::size_t>(node)].push_back(q);
    for (int p : h_->neighbors(q)) {
        const int other = owner_[static_cast<std::size_t>(p)];
        if (other < 0 || other == node) continue;
        auto& link = linked_[static_cast<std::size_t>(node * n + other)];
        if (link) continue;
        link = 1;
        linked_[static_cast<std::size_t>(other * n + node)] = 1;
        if (g_.adjacent(node, other)) {
            --missing_[static_cast<std::size_t>(node)];
            --missing_[static_cast<std::size_t>(other)];
            total_missing_ -= 2;
        }
    }
}

void EmbeddingEnv::recompute_mask() {
    mask_.assign(static_cast<std::size_t>(h_->node_count()), 0);
    const auto& chain = embedding_.chains[static_cast<std::size_t>(current_)];
    if (chain.empty()) {
        for (std::size_t q = 0; q < mask_.size(); ++q) mask_[q] = owner_[q] < 0 ? 1 : 0;
        return;
    }
    for (int c : chain) {
        for (int p : h_->neighbors(c)) {
            if (owner_[static_cast<std::size_t>(p)] < 0) mask_[static_cast<std::size_t>(p)] = 1;
        }
    }
}

void EmbeddingEnv::advance_pointer() {
    const int n = g_.node_count();
    for (int offset = 1; offset <= n; ++offset) {
        const int candidate = (current_ + offset) % n;
        if (missing_[static_cast<std::size_t>(candidate)] > 0) {
            current_ = candidate;
            return;
        }
    }
}

StepOutcome EmbeddingEnv::step(int action) {
    if (terminated_) throw ContractViolation("step called on a terminated episode");
    if (!h_->contains(action) || !mask_[static_cast<std::size_t>(action)]) {
        throw ContractViolation("action " + std::to_string(action) + " is masked");
    }
    attach(current_, action);
    ++steps_;
    StepOutcome out;
    out.reward = kStepReward;
    if (total_missing_ == 0) {
        terminated_ = true;
        success_ = true;
        mask_.assign(mask_.size(), 0);
    } else {
        advance_pointer();
        recompute_mask();
        if (mask_popcount() == 0) terminated_ = true;
    }
    out.terminated = terminated_;
    out.success = success_;
    out.observation = observation();
    return out;
}

Observation EmbeddingEnv::observation() const {
    Observation obs(static_cast<std::size_t>(layout_.size()), 0.0F);
    const int n = g_.node_count();
    for (int i = 0; i < n; ++i) {
        obs[static_cast<std::size_t>(layout_.missing_offset() + i)] = static_cast<float>(missing_[static_cast<std::size_t>(i)]);
    }
    if (!terminated_ || !success_) obs[static_cast<std::size_t>(layout_.current_offset() + current_)] = 1.0F;
    for (std::size_t q = 0; q < mask_.size(); ++q) {
        obs[static_cast<std::size_t>(layout_.available_offset()) + q] = mask_[q];
    }
    if (n > 0) {
        for (int q : embedding_.chains[static_cast<std::size_t>(current_)]) {
            obs[static_cast<std::size_t>(layout_.chain_offset() + q)] = 1.0F;
        }
    }
    return obs;
}

int EmbeddingEnv::mask_popcount() const noexcept {
    return static_cast<int>(std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
}

bool EmbeddingEnv::is_success() const {
    if (!terminated_) throw ContractViolation("is_success queried on a live episode");
    const bool validator = validate_embedding(g_, *h_, embedding_).valid();
    if (validator != success_) throw std::logic_error("validator and missing-link counters disagree");
    return validator;
}

void EmbeddingEnv::check_invariants() const {
    const int n = g_.node_count();
    std::vector<int> owner(owner_.size(), -1);
    std::size_t assigned = 0;
    for (int i = 0; i < n; ++i) {
        for (int q : embedding_.chains[static_cast<std::size_t>(i)]) {
            if (owner[static_cast<std::size_t>(q)] != -1) throw std::logic_error("qubit in two chains");
            owner[static_cast<std::size_t>(q)] = i;
            ++assigned;
        }
    }
    if (owner != owner_) throw std::logic_error("owner table out of sync");
    if (assigned != static_cast<std::size_t>(steps_)) throw std::logic_error("assigned qubits != step count");

    int total = 0;
    for (int i = 0; i < n; ++i) {
        int missing = 0;
        for (int j : g_.neighbors(i)) {
            bool linked = false;
            for (int p : embedding_.chains[static_cast<std::size_t>(i)]) {
                for (int q : h_->neighbors(p)) linked = linked || owner[static_cast<std::size_t>(q)] == j;
            }
            if (!linked) ++missing;
        }
        if (missing != missing_[static_cast<std::size_t>(i)]) throw std::logic_error("missing-link counter drifted");
        total += missing;
    }
    if (total != total_missing_) throw std::logic_error("total missing-link counter drifted");

    for (int i = 0; i < n; ++i) {
        const auto& chain = embedding_.chains[static_cast<std::size_t>(i)];
        if (chain.size() <= 1) continue;
        // connectivity by flood fill inside the chain
        std::vector<int> stack{chain.front()};
        std::vector<int> seen{chain.front()};
        while (!stack.empty()) {
            const int q = stack.back();
            stack.pop_back();
            for (int p : h_->neighbors(q)) {
                if (owner[static_cast<std::size_t>(p)] == i && std::find(seen.begin(), seen.end(), p) == seen.end()) {
                    seen.push_back(p);
                    stack.push_back(p);
                }
            }
        }
        if (seen.size() != chain.size()) throw std::logic_error("chain lost connectivity");
    }

    if (!terminated_ && missing_[static_cast<std::size_t>(current_)] == 0) {
        throw std::logic_error("live pointer on a complete node");
    }
}

void TrajectoryRecorder::record(int step, int action, double reward, int mask_popcount, bool success) {
    nlohmann::ordered_json line;
    line["step"] = step;
    line["action"] = action;
    line["reward"] = reward;
    line["mask_popcount"] = mask_popcount;
    line["success"] = success;
    text_ += line.dump();
    text_ += '\n';
}

}  // namespace qembed
