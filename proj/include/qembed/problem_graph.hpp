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
#include <optional>
#include <string>
#include <vector>

#include "qembed/rng.hpp"
#include "qembed/topology.hpp"

namespace qembed {

/// Small undirected problem graph with optional Ising coefficients.
///
/// Edges are stored as (u, v) with u < v in sorted order; `linear` is indexed
/// by node and `quadratic` is aligned with `edges()`.
class ProblemGraph {
  public:
    static constexpr int kMaxNodes = 64;
    static constexpr int kMaxKeyNodes = 11;  // edge_key packs the upper triangle into 64 bits

    ProblemGraph() = default;
    /// Throws ParameterError on self-loops, out-of-range or duplicate edges.
    ProblemGraph(int n, std::vector<Edge> edges);

    int node_count() const noexcept { return n_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const std::vector<int>& neighbors(int v) const { return adjacency_.at(static_cast<std::size_t>(v)); }
    int degree(int v) const { return static_cast<int>(neighbors(v).size()); }
    bool adjacent(int a, int b) const;
    bool is_connected() const;

    /// Sorted degree sequence (descending).
    std::vector<int> degree_sequence() const;
    int triangle_count() const;

    /// Bit (u, v) set for every edge, numbered over the upper triangle.
    /// Identical edge sets produce identical keys. Throws ParameterError
    /// above kMaxKeyNodes nodes.
    std::uint64_t edge_key() const;

    /// Relabels nodes: node v becomes perm[v].
    ProblemGraph permuted(const std::vector<int>& perm) const;

    bool has_coefficients() const noexcept { return linear_.has_value(); }
    const std::vector<double>& linear() const { return linear_.value(); }
    const std::vector<double>& quadratic() const { return quadratic_.value(); }
    void set_coefficients(std::vector<double> linear, std::vector<double> quadratic);
    /// h_i = J_ij = -1 everywhere.
    ProblemGraph with_default_coefficients() const;

    friend bool operator==(const ProblemGraph& a, const ProblemGraph& b) {
        return a.n_ == b.n_ && a.edges_ == b.edges_;
    }

  private:
    int n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> adjacency_;
    std::optional<std::vector<double>> linear_;
    std::optional<std::vector<double>> quadratic_;
};

/// K_n, n >= 3.
ProblemGraph complete_graph(int n);

/// Approximate isomorphism screen: two graphs with different keys are surely
/// non-isomorphic. Equal keys are treated as "same class".
struct ScreenKey {
    std::vector<int> degrees;
    int triangles = 0;
    friend auto operator<=>(const ScreenKey&, const ScreenKey&) = default;
};
ScreenKey screen_key(const ProblemGraph& g);

/// Every connected labelled graph reachable from K_n by single-edge removals,
/// down to n-1 edges. 3 <= n <= 5.
std::vector<ProblemGraph> generate_small_family(int n);

struct FamilyMember {
    ProblemGraph graph;
    /// Stratum used by the holdout split: isomorphism-class index for
    /// medium graphs, edge count for large ones, 0 for small ones.
    int stratum = 0;
};

struct GeneratedFamily {
    int n = 0;
    std::vector<FamilyMember> members;
    /// Human-readable notes about slots that could not be filled.
    std::vector<std::string> stalls;
};

/// One representative per screen class reachable by edge removal from K_n.
std::vector<ProblemGraph> medium_class_representatives(int n);

/// Class representatives plus random relabelings up to target_total. 6 <= n <= 8.
GeneratedFamily generate_medium_family(int n, int target_total, std::uint64_t seed);

/// Uniform random connected graph with exactly m edges.
ProblemGraph random_connected_graph(int n, int m, Rng& rng);

/// target_total spread evenly over edge counts [n-1, n(n-1)/2], screen-deduplicated. n >= 9.
GeneratedFamily generate_large_family(int n, int target_total, std::uint64_t seed);

/// Dispatches on n to the small / medium / large generator.
GeneratedFamily generate_family(int n, int target_total, std::uint64_t seed);

}  // namespace qembed
