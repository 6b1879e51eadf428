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

#include "qembed/embedding.hpp"
#include "qembed/problem_graph.hpp"
#include "qembed/topology.hpp"

namespace qembed {

/// Offsets of the four observation sections [S_G | S_R | S_H | S_C].
struct ObservationLayout {
    int max_g = 0;
    int hardware = 0;

    int size() const noexcept { return 2 * max_g + 2 * hardware; }
    int missing_offset() const noexcept { return 0; }
    int current_offset() const noexcept { return max_g; }
    int available_offset() const noexcept { return 2 * max_g; }
    int chain_offset() const noexcept { return 2 * max_g + hardware; }
};

using Observation = std::vector<float>;
using ActionMask = std::vector<std::uint8_t>;

struct StepOutcome {
    Observation observation;
    double reward = 0.0;
    bool terminated = false;
    bool success = false;
};

/// Episodic minor-embedding environment.
///
/// Problem nodes are visited round-robin; each action appends one free qubit
/// to the chain of the current node. Once a chain is nonempty it may only
/// grow into free neighbours, so chains stay connected by construction.
/// Every step costs kStepReward. The episode ends with success when no
/// problem edge is missing a coupler, and with failure when the next
/// node has no admissible qubit.
///
/// The hardware graph must outlive the environment.
class EmbeddingEnv {
  public:
    static constexpr double kStepReward = -0.1;

    EmbeddingEnv(const HardwareGraph& h, int max_g);

    const ObservationLayout& layout() const noexcept { return layout_; }
    const HardwareGraph& hardware() const noexcept { return *h_; }
    const ProblemGraph& problem() const noexcept { return g_; }

    /// Clears all chains and points at node 0. Throws ParameterError if g has
    /// more than max_g nodes, fewer than two nodes, or is disconnected.
    Observation reset(const ProblemGraph& g);

    /// Applies an action. Throws ContractViolation if the action is masked
    /// or the episode has already terminated.
    StepOutcome step(int action);

    Observation observation() const;
    const ActionMask& mask() const noexcept { return mask_; }
    int mask_popcount() const noexcept;

    int current_node() const noexcept { return current_; }
    const std::vector<int>& missing_links() const noexcept { return missing_; }
    int total_missing() const noexcept { return total_missing_; }
    const Embedding& embedding() const noexcept { return embedding_; }
    bool is_assigned(int q) const { return owner_.at(static_cast<std::size_t>(q)) >= 0; }
    int step_count() const noexcept { return steps_; }
    bool terminated() const noexcept { return terminated_; }
    bool succeeded() const noexcept { return success_; }

    /// Success as judged by the independent validator. Throws
    /// ContractViolation before termination, and std::logic_error if the
    /// validator and the missing-link counters disagree.
    bool is_success() const;

    /// Recomputes every derived quantity from the chains and throws
    /// std::logic_error on any mismatch. Test hook.
    void check_invariants() const;

  private:
    void attach(int node, int q);
    void recompute_mask();
    void advance_pointer();

    const HardwareGraph* h_;
    ObservationLayout layout_;
    ProblemGraph g_;
    Embedding embedding_;
    std::vector<int> owner_;
    std::vector<int> missing_;
    std::vector<std::uint8_t> linked_;  // n x n chain adjacency
    ActionMask mask_;
    int current_ = 0;
    int total_missing_ = 0;
    int steps_ = 0;
    bool terminated_ = true;
    bool success_ = false;
};

/// Debug trajectory dump, one JSON object per step:
/// {"step", "action", "reward", "mask_popcount", "success"}.
class TrajectoryRecorder {
  public:
    void record(int step, int action, double reward, int mask_popcount, bool success);
    const std::string& jsonl() const noexcept { return text_; }

  private:
    std::string text_;
};

}  // namespace qembed
