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

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace qembed {

enum class Family { Chimera, Zephyr };

std::string_view family_name(Family family);
/// Parses "chimera" / "zephyr"; throws ParameterError otherwise.
Family parse_family(std::string_view name);

/// Chimera qubit: cell (row, col), orientation u (0 vertical, 1 horizontal),
/// shore index k.
struct ChimeraCoord {
    int row = 0;
    int col = 0;
    int u = 0;
    int k = 0;
    friend bool operator==(const ChimeraCoord&, const ChimeraCoord&) = default;
};

/// Zephyr qubit: orientation u, perpendicular offset w in [0, 2m], shore k,
/// half offset j, parallel offset z in [0, m).
struct ZephyrCoord {
    int u = 0;
    int w = 0;
    int k = 0;
    int j = 0;
    int z = 0;
    friend bool operator==(const ZephyrCoord&, const ZephyrCoord&) = default;
};

using Edge = std::pair<int, int>;

/// Immutable hardware topology with sorted adjacency lists.
///
/// Node numbering is fixed:
///   Chimera  index = 8 (row m + col) + 4 u + k
///   Zephyr   index enumerates (u, w, k, j, z) lexicographically
class HardwareGraph {
  public:
    static constexpr int kShore = 4;
    static constexpr int kMaxChimeraSize = 16;
    static constexpr int kMaxZephyrSize = 8;

    static HardwareGraph chimera(int m);
    static HardwareGraph zephyr(int m);
    static HardwareGraph build(Family family, int m);

    Family family() const noexcept { return family_; }
    int size() const noexcept { return size_; }
    int node_count() const noexcept { return static_cast<int>(adjacency_.size()); }
    std::size_t edge_count() const noexcept { return edge_count_; }
    int max_degree() const noexcept;

    const std::vector<int>& neighbors(int q) const { return adjacency_.at(static_cast<std::size_t>(q)); }
    bool adjacent(int a, int b) const;
    bool contains(int q) const noexcept { return q >= 0 && q < node_count(); }

    /// All edges (i, j) with i < j, lexicographically sorted.
    std::vector<Edge> edges() const;

    ChimeraCoord chimera_coord(int q) const;
    int chimera_index(const ChimeraCoord& c) const;
    ZephyrCoord zephyr_coord(int q) const;
    int zephyr_index(const ZephyrCoord& c) const;

    bool is_connected() const;

    friend bool operator==(const HardwareGraph& a, const HardwareGraph& b) {
        return a.family_ == b.family_ && a.size_ == b.size_ && a.adjacency_ == b.adjacency_;
    }

    /// Builds a graph of the given family/size from an explicit edge list.
    /// Used by the importer; the edge list is not checked against the family rules.
    static HardwareGraph from_edges(Family family, int m, int node_count, const std::vector<Edge>& edges);

  private:
    HardwareGraph(Family family, int m, int node_count);
    void add_edge(int a, int b);
    void finalize();

    Family family_;
    int size_;
    std::vector<std::vector<int>> adjacency_;
    std::size_t edge_count_ = 0;
};

int chimera_node_count(int m);
int zephyr_node_count(int m);

/// One "i j" line per edge (i < j), sorted lexicographically.
std::string export_adjacency(const HardwareGraph& h);
HardwareGraph import_adjacency(Family family, int m, std::string_view text);

/// {"family", "m", "node_count"} descriptor written next to exports.
nlohmann::json topology_descriptor(const HardwareGraph& h);

}  // namespace qembed
