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

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qembed/problem_graph.hpp"
#include "qembed/topology.hpp"

namespace qembed {

using Chain = std::vector<int>;

/// One chain of hardware qubits per problem-graph node.
struct Embedding {
    std::vector<Chain> chains;

    std::size_t qubit_count() const;
    friend bool operator==(const Embedding&, const Embedding&) = default;
};

std::size_t qubit_count(const Embedding& e);

enum class ValidityClause {
    None,          // valid
    EmptyChain,    // (a)
    SharedQubit,   // (b)
    DisconnectedChain,  // (c)
    MissingCoupler,     // (d)
};

std::string_view clause_name(ValidityClause clause);

struct ValidationResult {
    ValidityClause clause = ValidityClause::None;
    /// Problem nodes (and, for SharedQubit, the qubit) involved in the first violation.
    std::vector<int> nodes;
    std::string message;

    bool valid() const noexcept { return clause == ValidityClause::None; }
    explicit operator bool() const noexcept { return valid(); }
};

/// Checks the four minor conditions in order and reports the first violation.
/// Throws StructuralError when the chain count differs from |G| or a chain
/// names a qubit outside H.
ValidationResult validate_embedding(const ProblemGraph& g, const HardwareGraph& h, const Embedding& e);

struct Coupling {
    int p = 0;
    int q = 0;
    double value = 0.0;
};

/// Physical Ising parameters of an embedded problem.
struct EmbeddedIsing {
    /// h' per hardware qubit (zero off the embedding).
    std::vector<double> bias;
    /// Intra-chain ferromagnetic couplers, all negative.
    std::vector<Coupling> chain_couplings;
    /// One coupler per problem edge, aligned with g.edges().
    std::vector<Coupling> problem_couplings;

    /// Energy of a physical spin configuration (+1/-1 per hardware qubit).
    double energy(std::span<const int> spins) const;
};

/// Splits h_i uniformly over C_i, puts -chain_strength on a BFS spanning tree
/// of each chain, and places J_ij on the lexicographically smallest coupler
/// between C_i and C_j. Throws ParameterError for an invalid embedding, a
/// non-positive chain strength, or a graph without coefficients.
EmbeddedIsing embed_parameters(const ProblemGraph& g, const HardwareGraph& h, const Embedding& e,
                               double chain_strength);

/// Logical Ising energy sum h_i s_i + sum J_ij s_i s_j.
double ising_energy(const ProblemGraph& g, std::span<const int> spins);

/// {"graph_id", "topology": {"family", "m"}, "chains"}.
nlohmann::json embedding_to_json(const Embedding& e, int graph_id, const HardwareGraph& h);
Embedding embedding_from_json(const nlohmann::json& j);

}  // namespace qembed
