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

#include "qembed/topology.hpp"

#include <algorithm>
#include <charconv>
#include <queue>
#include <sstream>

#include "qembed/errors.hpp"

namespace qembed {

std::string_view family_name(Family family) {
    return family == Family::Chimera ? "chimera" : "zephyr";
}

Family parse_family(std::string_view name) {
    if (name == "chimera") return Family::Chimera;
    if (name == "zephyr") return Family::Zephyr;
    throw ParameterError("unknown topology family '" + std::string(name) + "'");
}

int chimera_node_count(int m) { return 8 * m * m; }
int zephyr_node_count(int m) { return 16 * m * (2 * m + 1); }

HardwareGraph::HardwareGraph(Family family, int m, int node_count)
    : family_(family), size_(m), adjacency_(static_cast<std::size_t>(node_count)) {}

void HardwareGraph::add_edge(int a, int b) {
    adjacency_[static_cast<std::size_t>(a)].push_back(b);
    adjacency_[static_cast<std::size_t>(b)].push_back(a);
}

void HardwareGraph::finalize() {
    std::size_t half_edges = 0;
    for (auto& nbrs : adjacency_) {
        std::sort(nbrs.begin(), nbrs.end());
        nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
        half_edges += nbrs.size();
    }
    edge_count_ = half_edges / 2;
}

HardwareGraph HardwareGraph::chimera(int m) {
    if (m < 1 || m > kMaxChimeraSize) {
        throw ParameterError("chimera size must be in [1, 16], got " + std::to_string(m));
    }
    HardwareGraph h(Family::Chimera, m, chimera_node_count(m));
    for (int row = 0; row < m; ++row) {
        for (int col = 0; col < m; ++col) {
            for (int k = 0; k < kShore; ++k) {
                const int vertical = h.chimera_index({row, col, 0, k});
                const int horizontal = h.chimera_index({row, col, 1, k});
                for (int kk = 0; kk < kShore; ++kk) {
                    h.add_edge(vertical, h.chimera_index({row, col, 1, kk}));
                }
                if (row + 1 < m) h.add_edge(vertical, h.chimera_index({row + 1, col, 0, k}));
                if (col + 1 < m) h.add_edge(horizontal, h.chimera_index({row, col + 1, 1, k}));
            }
        }
    }
    h.finalize();
    return h;
}

HardwareGraph HardwareGraph::zephyr(int m) {
    if (m < 1 || m > kMaxZephyrSize) {
        throw ParameterError("zephyr size must be in [1, 8], got " + std::to_string(m));
    }
    HardwareGraph h(Family::Zephyr, m, zephyr_node_count(m));
    for (int u = 0; u < 2; ++u) {
        for (int w = 0; w <= 2 * m; ++w) {
            for (int k = 0; k < kShore; ++k) {
                for (int j = 0; j < 2; ++j) {
                    for (int z = 0; z < m; ++z) {
                        const int q = h.zephyr_index({u, w, k, j, z});
                        if (z + 1 < m) h.add_edge(q, h.zephyr_index({u, w, k, j, z + 1}));
                        if (j == 0) {
                            h.add_edge(q, h.zephyr_index({u, w, k, 1, z}));
                        } else if (z + 1 < m) {
                            h.add_edge(q, h.zephyr_index({u, w, k, 0, z + 1}));
                        }
                        if (u != 0) continue;
                        // internal couplers: a vertical qubit spanning rows
                        // {2z+j, 2z+j+1} meets horizontals on those rows whose
                        // column span contains w
                        for (int w2 = 2 * z + j; w2 <= 2 * z + j + 1; ++w2) {
                            for (int pos = w - 1; pos <= w; ++pos) {
                                if (pos < 0 || pos > 2 * m - 1) continue;
                                const int j2 = pos % 2;
                                const int z2 = pos / 2;
                                for (int k2 = 0; k2 < kShore; ++k2) {
                                    h.add_edge(q, h.zephyr_index({1, w2, k2, j2, z2}));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    h.finalize();
    return h;
}

HardwareGraph HardwareGraph::build(Family family, int m) {
    return family == Family::Chimera ? chimera(m) : zephyr(m);
}

HardwareGraph HardwareGraph::from_edges(Family family, int m, int node_count, const std::vector<Edge>& edges) {
    HardwareGraph h(family, m, node_count);
    for (const auto& [a, b] : edges) {
        if (a < 0 || b < 0 || a >= node_count || b >= node_count) {
            throw StructuralError("edge (" + std::to_string(a) + ", " + std::to_string(b) + ") out of range");
        }
        if (a == b) throw StructuralError("self-loop on node " + std::to_string(a));
        h.add_edge(a, b);
    }
    h.finalize();
    return h;
}

int HardwareGraph::max_degree() const noexcept {
    std::size_t best = 0;
    for (const auto& nbrs : adjacency_) best = std::max(best, nbrs.size());
    return static_cast<int>(best);
}

bool HardwareGraph::adjacent(int a, int b) const {
    const auto& nbrs = neighbors(a);
    return std::binary_search(nbrs.begin(), nbrs.end(), b);
}

std::vector<Edge> HardwareGraph::edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count_);
    for (int a = 0; a < node_count(); ++a) {
        for (int b : adjacency_[static_cast<std::size_t>(a)]) {
            if (a < b) out.emplace_back(a, b);
        }
    }
    return out;
}

ChimeraCoord HardwareGraph::chimera_coord(int q) const {
    if (family_ != Family::Chimera || !contains(q)) throw ParameterError("not a chimera qubit index");
    const int cell = q / 8;
    return {cell / size_, cell % size_, (q / 4) % 2, q % 4};
}

int HardwareGraph::chimera_index(const ChimeraCoord& c) const {
    if (family_ != Family::Chimera || c.row < 0 || c.row >= size_ || c.col < 0 || c.col >= size_ || c.u < 0 ||
        c.u > 1 || c.k < 0 || c.k >= kShore) {
        throw ParameterError("chimera coordinate out of range");
    }
    return 8 * (c.row * size_ + c.col) + 4 * c.u + c.k;
}

ZephyrCoord HardwareGraph::zephyr_coord(int q) const {
    if (family_ != Family::Zephyr || !contains(q)) throw ParameterError("not a zephyr qubit index");
    const int m = size_;
    ZephyrCoord c;
    c.z = q % m;
    q /= m;
    c.j = q % 2;
    q /= 2;
    c.k = q % kShore;
    q /= kShore;
    c.w = q % (2 * m + 1);
    c.u = q / (2 * m + 1);
    return c;
}

int HardwareGraph::zephyr_index(const ZephyrCoord& c) const {
    const int m = size_;
    if (family_ != Family::Zephyr || c.u < 0 || c.u > 1 || c.w < 0 || c.w > 2 * m || c.k < 0 || c.k >= kShore ||
        c.j < 0 || c.j > 1 || c.z < 0 || c.z >= m) {
        throw ParameterError("zephyr coordinate out of range");
    }
    return (((c.u * (2 * m + 1) + c.w) * kShore + c.k) * 2 + c.j) * m + c.z;
}

bool HardwareGraph::is_connected() const {
    if (adjacency_.empty()) return true;
    std::vector<char> seen(adjacency_.size(), 0);
    std::queue<int> frontier;
    frontier.push(0);
    seen[0] = 1;
    std::size_t reached = 1;
    while (!frontier.empty()) {
        const int q = frontier.front();
        frontier.pop();
        for (int p : neighbors(q)) {
            if (!seen[static_cast<std::size_t>(p)]) {
                seen[static_cast<std::size_t>(p)] = 1;
                ++reached;
                frontier.push(p);
            }
        }
    }
    return reached == adjacency_.size();
}

std::string export_adjacency(const HardwareGraph& h) {
    std::string out;
    out.reserve(h.edge_count() * 10);
    for (const auto& [a, b] : h.edges()) {
        out += std::to_string(a);
        out += ' ';
        out += std::to_string(b);
        out += '\n';
    }
    return out;
}

HardwareGraph import_adjacency(Family family, int m, std::string_view text) {
    const int node_count = family == Family::Chimera ? chimera_node_count(m) : zephyr_node_count(m);
    std::vector<Edge> edges;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        ++line_no;
        if (line.empty()) continue;
        int a = 0;
        int b = 0;
        const auto space = line.find(' ');
        const bool ok = space != std::string_view::npos &&
                        std::from_chars(line.data(), line.data() + space, a).ec == std::errc{} &&
                        std::from_chars(line.data() + space + 1, line.data() + line.size(), b).ec == std::errc{};
        if (!ok) throw StructuralError("malformed edge on line " + std::to_string(line_no));
        edges.emplace_back(a, b);
    }
    return HardwareGraph::from_edges(family, m, node_count, edges);
}

nlohmann::json topology_descriptor(const HardwareGraph& h) {
    return {{"family", family_name(h.family())}, {"m", h.size()}, {"node_count", h.node_count()}};
}

}  // namespace qembed
