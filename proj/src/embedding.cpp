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

#include "qembed/embedding.hpp"

#include <algorithm>
#include <limits>
#include <queue>

#include "qembed/errors.hpp"

namespace qembed {

namespace {

/// BFS over the subgraph of H induced by `chain`; returns the tree edges in
/// discovery order. Fewer than |chain| - 1 edges means disconnected.
std::vector<Edge> chain_spanning_tree(const HardwareGraph& h, const Chain& chain) {
    std::vector<Edge> tree;
    if (chain.empty()) return tree;
    std::vector<int> sorted = chain;
    std::sort(sorted.begin(), sorted.end());
    std::vector<char> seen(sorted.size(), 0);
    const auto slot = [&](int q) {
        const auto it = std::lower_bound(sorted.begin(), sorted.end(), q);
        return (it != sorted.end() && *it == q) ? static_cast<std::ptrdiff_t>(it - sorted.begin()) : -1;
    };
    std::queue<int> frontier;
    frontier.push(chain.front());
    seen[static_cast<std::size_t>(slot(chain.front()))] = 1;
    while (!frontier.empty()) {
        const int q = frontier.front();
        frontier.pop();
        for (int p : h.neighbors(q)) {
            const auto s = slot(p);
            if (s < 0 || seen[static_cast<std::size_t>(s)]) continue;
            seen[static_cast<std::size_t>(s)] = 1;
            tree.emplace_back(q, p);
            frontier.push(p);
        }
    }
    return tree;
}

void check_structure(const ProblemGraph& g, const HardwareGraph& h, const Embedding& e) {
    if (e.chains.size() != static_cast<std::size_t>(g.node_count())) {
        throw StructuralError("embedding has " + std::to_string(e.chains.size()) + " chains for a graph with " +
                              std::to_string(g.node_count()) + " nodes");
    }
    for (std::size_t i = 0; i < e.chains.size(); ++i) {
        for (int q : e.chains[i]) {
            if (!h.contains(q)) {
                throw StructuralError("chain " + std::to_string(i) + " references qubit " + std::to_string(q) +
                                      " outside the hardware graph");
            }
        }
    }
}

}  // namespace

std::size_t Embedding::qubit_count() const {
    std::size_t total = 0;
    for (const auto& c : chains) total += c.size();
    return total;
}

std::size_t qubit_count(const Embedding& e) { return e.qubit_count(); }

std::string_view clause_name(ValidityClause clause) {
    switch (clause) {
        case ValidityClause::None: return "valid";
        case ValidityClause::EmptyChain: return "empty chain";
        case ValidityClause::SharedQubit: return "shared qubit";
        case ValidityClause::DisconnectedChain: return "disconnected chain";
        case ValidityClause::MissingCoupler: return "missing coupler";
    }
    return "unknown";
}

ValidationResult validate_embedding(const ProblemGraph& g, const HardwareGraph& h, const Embedding& e) {
    check_structure(g, h, e);
    const int n = g.node_count();

    for (int i = 0; i < n; ++i) {
        if (e.chains[static_cast<std::size_t>(i)].empty()) {
            return {ValidityClause::EmptyChain, {i}, "chain of node " + std::to_string(i) + " is empty"};
        }
    }

    std::vector<int> owner(static_cast<std::size_t>(h.node_count()), -1);
    for (int i = 0; i < n; ++i) {
        for (int q : e.chains[static_cast<std::size_t>(i)]) {
            int& slot = owner[static_cast<std::size_t>(q)];
            if (slot != -1) {
                return {ValidityClause::SharedQubit,
                        {slot, i, q},
                        "qubit " + std::to_string(q) + " is used by nodes " + std::to_string(slot) + " and " +
                            std::to_string(i)};
            }
            slot = i;
        }
    }

    for (int i = 0; i < n; ++i) {
        const auto& chain = e.chains[static_cast<std::size_t>(i)];
        if (chain_spanning_tree(h, chain).size() + 1 != chain.size()) {
            return {ValidityClause::DisconnectedChain, {i},
                    "chain of node " + std::to_string(i) + " is not connected in H"};
        }
    }

    for (const auto& [a, b] : g.edges()) {
        bool coupled = false;
        for (int p : e.chains[static_cast<std::size_t>(a)]) {
            for (int q : h.neighbors(p)) {
                if (owner[static_cast<std::size_t>(q)] == b) {
                    coupled = true;
                    break;
                }
            }
            if (coupled) break;
        }
        if (!coupled) {
            return {ValidityClause::MissingCoupler, {a, b},
                    "no coupler between the chains of nodes " + std::to_string(a) + " and " + std::to_string(b)};
        }
    }
    return {};
}

double EmbeddedIsing::energy(std::span<const int> spins) const {
    double total = 0.0;
    for (std::size_t q = 0; q < bias.size(); ++q) total += bias[q] * spins[q];
    for (const auto& c : chain_couplings) {
        total += c.value * spins[static_cast<std::size_t>(c.p)] * spins[static_cast<std::size_t>(c.q)];
    }
    for (const auto& c : problem_couplings) {
        total += c.value * spins[static_cast<std::size_t>(c.p)] * spins[static_cast<std::size_t>(c.q)];
    }
    return total;
}

EmbeddedIsing embed_parameters(const ProblemGraph& g, const HardwareGraph& h, const Embedding& e,
                               double chain_strength) {
    if (!(chain_strength > 0.0)) throw ParameterError("chain strength must be positive");
    if (!g.has_coefficients()) throw ParameterError("problem graph carries no Ising coefficients");
    const auto verdict = validate_embedding(g, h, e);
    if (!verdict) throw ParameterError("cannot embed parameters: " + verdict.message);

    EmbeddedIsing out;
    out.bias.assign(static_cast<std::size_t>(h.node_count()), 0.0);
    for (int i = 0; i < g.node_count(); ++i) {
        const auto& chain = e.chains[static_cast<std::size_t>(i)];
        const double share = g.linear()[static_cast<std::size_t>(i)] / static_cast<double>(chain.size());
        for (int q : chain) out.bias[static_cast<std::size_t>(q)] = share;
        for (const auto& [p, q] : chain_spanning_tree(h, chain)) {
            out.chain_couplings.push_back({std::min(p, q), std::max(p, q), -chain_strength});
        }
    }

    const auto& edges = g.edges();
    for (std::size_t idx = 0; idx < edges.size(); ++idx) {
        const auto [a, b] = edges[idx];
        Edge best{std::numeric_limits<int>::max(), std::numeric_limits<int>::max()};
        for (int p : e.chains[static_cast<std::size_t>(a)]) {
            for (int q : e.chains[static_cast<std::size_t>(b)]) {
                if (!h.adjacent(p, q)) continue;
                best = std::min(best, Edge{std::min(p, q), std::max(p, q)});
            }
        }
        out.problem_couplings.push_back({best.first, best.second, g.quadratic()[idx]});
    }
    return out;
}

double ising_energy(const ProblemGraph& g, std::span<const int> spins) {
    double total = 0.0;
    for (int i = 0; i < g.node_count(); ++i) total += g.linear()[static_cast<std::size_t>(i)] * spins[static_cast<std::size_t>(i)];
    const auto& edges = g.edges();
    for (std::size_t idx = 0; idx < edges.size(); ++idx) {
        total += g.quadratic()[idx] * spins[static_cast<std::size_t>(edges[idx].first)] *
                 spins[static_cast<std::size_t>(edges[idx].second)];
    }
    return total;
}

nlohmann::json embedding_to_json(const Embedding& e, int graph_id, const HardwareGraph& h) {
    return {{"graph_id", graph_id},
            {"topology", {{"family", family_name(h.family())}, {"m", h.size()}}},
            {"chains", e.chains}};
}

Embedding embedding_from_json(const nlohmann::json& j) {
    Embedding e;
    e.chains = j.at("chains").get<std::vector<Chain>>();
    return e;
}

}  // namespace qembed
