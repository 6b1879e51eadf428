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
#include <vector>

#include "qembed/embedding.hpp"
#include "qembed/problem_graph.hpp"
#include "qembed/topology.hpp"

namespace qembed {

struct BaselineConfig {
    int tries = 100;
    int improvement_passes = 10;
    /// Qubit weight is weight_base^usage; 0 selects |V(H)|.
    double weight_base = 0.0;
    std::uint64_t seed = 0;

    /// Throws ParameterError if tries < 1, passes < 0 or weight_base in (0, 1].
    void validate() const;
};

struct TryDiagnostics {
    bool success = false;
    int qubits = 0;
    /// Sum over qubits of (usage - 1) for shared qubits at the end of the try.
    int overlap = 0;
    int passes = 0;
};

struct BaselineResult {
    bool success = false;
    Embedding embedding;
    int qubits = 0;
    int best_try = -1;
    std::vector<TryDiagnostics> tries;
};

/// Randomized chain growth over vertex-weighted shortest paths followed by
/// re-routing passes. Each try draws from its own sub-seed, so the best of
/// the first N tries never gets worse as N grows. Only embeddings that pass
/// validate_embedding are returned.
BaselineResult heuristic_embed(const ProblemGraph& g, const HardwareGraph& h, const BaselineConfig& cfg);

/// A single try with the given generator; exposed for tests.
TryDiagnostics heuristic_try(const ProblemGraph& g, const HardwareGraph& h, int passes, double weight_base,
                             Rng& rng, Embedding& out);

}  // namespace qembed
