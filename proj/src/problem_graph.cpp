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

#include "qembed/problem_graph.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <set>
#include <unordered_set>

#include "qembed/errors.hpp"

namespace qembed {

namespace {

int pair_index(int n, int a, int b) {
    // position of (a, b), a < b, in row-major upper-triangle order
    return a * n - a * (a + 1) / 2 + (b - a - 1);
}

std::vector<Edge> all_pairs(int n) {
    std::vector<Edge> pairs;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) pairs.emplace_back(a, b);
    }
    return pairs;
}

ProblemGraph from_key(int n, std::uint64_t key) {
    std::vector<Edge> edges;
    const auto pairs = all_pairs(n);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (key >> i & 1U) edges.push_back(pairs[i]);
    }
    return ProblemGraph(n, std::move(edges));
}

bool key_connected(int n, std::uint64_t key) {
    std::uint32_t adj[ProblemGraph::kMaxKeyNodes] = {};
    for (int a = 0, idx = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b, ++idx) {
            if (key >> idx & 1U) {
                adj[a] |= 1U << b;
                adj[b] |= 1U << a;
            }
        }
    }
    std::uint32_t seen = 1;
    std::uint32_t frontier = 1;
    while (frontier != 0) {
        std::uint32_t next = 0;
        for (int v = 0; v < n; ++v) {
            if (frontier >> v & 1U) next |= adj[v];
        }
        frontier = next & ~seen;
        seen |= next;
    }
    return seen == (1U << n) - 1U;
}

struct KeyGraph {
    int n = 0;
    std::uint32_t adj[ProblemGraph::kMaxKeyNodes] = {};
};

KeyGraph key_graph(int n, std::uint64_t key) {
    KeyGraph g;
    g.n = n;
    for (int a = 0, idx = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b, ++idx) {
            if (key >> idx & 1U) {
                g.adj[a] |= 1U << b;
                g.adj[b] |= 1U << a;
            }
        }
    }
    return g;
}

// degree, triangles through v and the sorted neighbour degrees, packed
std::vector<std::uint64_t> vertex_signatures(const KeyGraph& g) {
    std::vector<std::uint64_t> sig(static_cast<std::size_t>(g.n));
    for (int v = 0; v < g.n; ++v) {
        std::vector<int> nd;
        int tri = 0;
        for (int u = 0; u < g.n; ++u) {
            if (!(g.adj[v] >> u & 1U)) continue;
            nd.push_back(std::popcount(g.adj[u]));
            tri += std::popcount(g.adj[u] & g.adj[v]);
        }
        std::sort(nd.begin(), nd.end());
        std::uint64_t packed = 0;
        for (int d : nd) packed = packed << 4 | static_cast<std::uint64_t>(d);
        sig[static_cast<std::size_t>(v)] = static_cast<std::uint64_t>(std::popcount(g.adj[v])) |
                                           static_cast<std::uint64_t>(tri / 2) << 4 | packed << 12;
    }
    return sig;
}

bool key_isomorphic(const KeyGraph& a, const std::vector<std::uint64_t>& sa, const KeyGraph& b,
                    const std::vector<std::uint64_t>& sb) {
    const int n = a.n;
    int map[ProblemGraph::kMaxKeyNodes];
    std::uint32_t used = 0;
    const auto extend = [&](auto&& self, int v) -> bool {
        if (v == n) return true;
        for (int w = 0; w < n; ++w) {
            if (used >> w & 1U || sa[static_cast<std::size_t>(v)] != sb[static_cast<std::size_t>(w)]) continue;
            bool ok = true;
            for (int u = 0; u < v && ok; ++u) ok = (a.adj[v] >> u & 1U) == (b.adj[w] >> map[u] & 1U);
            if (!ok) continue;
            map[v] = w;
            used |= 1U << w;
            if (self(self, v + 1)) return true;
            used &= ~(1U << w);
        }
        return false;
    };
    return extend(extend, 0);
}

void check_order(int n) {
    if (n < 1 || n > ProblemGraph::kMaxNodes) {
        throw ParameterError("problem graph order must be in [1, " + std::to_string(ProblemGraph::kMaxNodes) + "]");
    }
}

std::vector<int> random_permutation(int n, Rng& rng) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    return perm;
}

ProblemGraph random_tree(int n, Rng& rng) {
    if (n == 1) return ProblemGraph(1, {});
    if (n == 2) return ProblemGraph(2, {{0, 1}});
    // decode a uniform Prufer sequence
    std::vector<int> prufer(static_cast<std::size_t>(n - 2));
    for (auto& x : prufer) x = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));
    std::vector<int> degree(static_cast<std::size_t>(n), 1);
    for (int x : prufer) ++degree[static_cast<std::size_t>(x)];
    std::vector<Edge> edges;
    std::set<int> leaves;
    for (int v = 0; v < n; ++v) {
        if (degree[static_cast<std::size_t>(v)] == 1) leaves.insert(v);
    }
    for (int x : prufer) {
        const int leaf = *leaves.begin();
        leaves.erase(leaves.begin());
        edges.emplace_back(std::min(leaf, x), std::max(leaf, x));
        if (--degree[static_cast<std::size_t>(x)] == 1) leaves.insert(x);
    }
    const int a = *leaves.begin();
    const int b = *std::next(leaves.begin());
    edges.emplace_back(a, b);
    return ProblemGraph(n, std::move(edges));
}

}  // namespace

ProblemGraph::ProblemGraph(int n, std::vector<Edge> edges) : n_(n) {
    check_order(n);
    adjacency_.resize(static_cast<std::size_t>(n));
    for (auto& [a, b] : edges) {
        if (a == b) throw ParameterError("self-loop on node " + std::to_string(a));
        if (a < 0 || b < 0 || a >= n || b >= n) throw ParameterError("edge endpoint out of range");
        if (a > b) std::swap(a, b);
    }
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
        throw ParameterError("duplicate edge in problem graph");
    }
    edges_ = std::move(edges);
    for (const auto& [a, b] : edges_) {
        adjacency_[static_cast<std::size_t>(a)].push_back(b);
        adjacency_[static_cast<std::size_t>(b)].push_back(a);
    }
    for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
}

bool ProblemGraph::adjacent(int a, int b) const {
    const auto& nbrs = neighbors(a);
    return std::binary_search(nbrs.begin(), nbrs.end(), b);
}

bool ProblemGraph::is_connected() const {
    if (n_ == 0) return true;
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(n_), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (const int u : adjacency_[static_cast<std::size_t>(v)]) {
            if (!seen[static_cast<std::size_t>(u)]) {
                seen[static_cast<std::size_t>(u)] = 1;
                ++reached;
                stack.push_back(u);
            }
        }
    }
    return reached == n_;
}

std::vector<int> ProblemGraph::degree_sequence() const {
    std::vector<int> degrees;
    degrees.reserve(adjacency_.size());
    for (const auto& nbrs : adjacency_) degrees.push_back(static_cast<int>(nbrs.size()));
    std::sort(degrees.rbegin(), degrees.rend());
    return degrees;
}

int ProblemGraph::triangle_count() const {
    int count = 0;
    for (const auto& [a, b] : edges_) {
        for (int c : adjacency_[static_cast<std::size_t>(b)]) {
            if (c > b && adjacent(a, c)) ++count;
        }
    }
    return count;
}

std::uint64_t ProblemGraph::edge_key() const {
    if (n_ > kMaxKeyNodes) throw ParameterError("edge_key supports at most 11 nodes");
    std::uint64_t key = 0;
    for (const auto& [a, b] : edges_) key |= std::uint64_t{1} << pair_index(n_, a, b);
    return key;
}

ProblemGraph ProblemGraph::permuted(const std::vector<int>& perm) const {
    std::vector<Edge> edges;
    edges.reserve(edges_.size());
    for (const auto& [a, b] : edges_) {
        edges.emplace_back(perm.at(static_cast<std::size_t>(a)), perm.at(static_cast<std::size_t>(b)));
    }
    return ProblemGraph(n_, std::move(edges));
}

void ProblemGraph::set_coefficients(std::vector<double> linear, std::vector<double> quadratic) {
    if (linear.size() != static_cast<std::size_t>(n_) || quadratic.size() != edges_.size()) {
        throw ParameterError("coefficient vector sizes do not match the graph");
    }
    linear_ = std::move(linear);
    quadratic_ = std::move(quadratic);
}

ProblemGraph ProblemGraph::with_default_coefficients() const {
    ProblemGraph g = *this;
    g.set_coefficients(std::vector<double>(static_cast<std::size_t>(n_), -1.0),
                       std::vector<double>(edges_.size(), -1.0));
    return g;
}

ProblemGraph complete_graph(int n) {
    if (n < 3) throw ParameterError("complete graph needs n >= 3, got " + std::to_string(n));
    return ProblemGraph(n, all_pairs(n));
}

ScreenKey screen_key(const ProblemGraph& g) { return {g.degree_sequence(), g.triangle_count()}; }

std::vector<ProblemGraph> generate_small_family(int n) {
    if (n < 3 || n > 5) throw ParameterError("small family covers n in [3, 5]");
    const int pairs = n * (n - 1) / 2;
    const std::uint64_t full = (std::uint64_t{1} << pairs) - 1;
    std::vector<std::uint64_t> order{full};
    std::unordered_set<std::uint64_t> seen{full};
    for (std::size_t head = 0; head < order.size(); ++head) {
        const std::uint64_t key = order[head];
        if (std::popcount(key) <= n - 1) continue;
        for (int bit = 0; bit < pairs; ++bit) {
            if (!(key >> bit & 1U)) continue;
            const std::uint64_t next = key & ~(std::uint64_t{1} << bit);
            if (!key_connected(n, next) || !seen.insert(next).second) continue;
            order.push_back(next);
        }
    }
    std::vector<ProblemGraph> out;
    out.reserve(order.size());
    for (auto key : order) out.push_back(from_key(n, key));
    return out;
}

std::vector<ProblemGraph> medium_class_representatives(int n) {
    if (n < 3 || n > 10) throw ParameterError("class enumeration supports n in [3, 10]");
    const int pairs = n * (n - 1) / 2;
    const std::uint64_t full = (std::uint64_t{1} << pairs) - 1;
    std::set<ScreenKey> classes;
    std::vector<ProblemGraph> reps{from_key(n, full)};
    classes.insert(screen_key(reps.front()));
    // walk exact isomorphism classes level by level; a screen class can be
    // reachable only through a member that is not its own representative
    std::map<std::vector<std::uint64_t>, std::vector<std::uint64_t>> buckets;
    std::vector<std::uint64_t> level{full};
    for (int edges = pairs; edges > n - 1; --edges) {
        std::vector<std::uint64_t> next_level;
        for (auto key : level) {
            for (int bit = 0; bit < pairs; ++bit) {
                if (!(key >> bit & 1U)) continue;
                const std::uint64_t next = key & ~(std::uint64_t{1} << bit);
                if (!key_connected(n, next)) continue;
                const KeyGraph kg = key_graph(n, next);
                const auto sig = vertex_signatures(kg);
                auto invariant = sig;
                std::sort(invariant.begin(), invariant.end());
                auto& bucket = buckets[invariant];
                const bool known = std::any_of(bucket.begin(), bucket.end(), [&](std::uint64_t other) {
                    const KeyGraph og = key_graph(n, other);
                    return key_isomorphic(kg, sig, og, vertex_signatures(og));
                });
                if (known) continue;
                bucket.push_back(next);
                next_level.push_back(next);
                ProblemGraph g = from_key(n, next);
                if (classes.insert(screen_key(g)).second) reps.push_back(std::move(g));
            }
        }
        level = std::move(next_level);
    }
    return reps;
}

GeneratedFamily generate_medium_family(int n, int target_total, std::uint64_t seed) {
    if (n < 6 || n > 8) throw ParameterError("medium family covers n in [6, 8]");
    constexpr int kAttemptsPerSlot = 200;
    Rng rng(seed);
    const auto reps = medium_class_representatives(n);
    GeneratedFamily family{n, {}, {}};
    std::unordered_set<std::uint64_t> seen;
    std::vector<char> exhausted(reps.size(), 0);
    std::size_t live = reps.size();
    const auto full = [&] { return static_cast<int>(family.members.size()) >= target_total; };
    // the representative itself is each class's first instance
    for (std::size_t c = 0; c < reps.size() && !full(); ++c) {
        seen.insert(reps[c].edge_key());
        family.members.push_back({reps[c], static_cast<int>(c)});
    }
    while (!full() && live > 0) {
        for (std::size_t c = 0; c < reps.size() && !full(); ++c) {
            if (exhausted[c]) continue;
            bool added = false;
            for (int attempt = 0; attempt < kAttemptsPerSlot && !added; ++attempt) {
                ProblemGraph g = reps[c].permuted(random_permutation(n, rng));
                if (seen.insert(g.edge_key()).second) {
                    family.members.push_back({std::move(g), static_cast<int>(c)});
                    added = true;
                }
            }
            if (!added) {
                exhausted[c] = 1;
                --live;
            }
        }
    }
    if (!full()) {
        family.stalls.push_back("n=" + std::to_string(n) + ": only " + std::to_string(family.members.size()) +
                                " distinct graphs for target " + std::to_string(target_total));
    }
    return family;
}

ProblemGraph random_connected_graph(int n, int m, Rng& rng) {
    check_order(n);
    const int pairs = n * (n - 1) / 2;
    if (m < n - 1 || m > pairs) throw ParameterError("edge count outside [n-1, n(n-1)/2]");
    if (m == n - 1) return random_tree(n, rng);
    auto candidates = all_pairs(n);
    for (;;) {
        // partial Fisher-Yates picks a uniform m-subset of the pairs
        for (int i = 0; i < m; ++i) {
            const auto j = static_cast<std::size_t>(i) + rng.uniform_index(static_cast<std::uint64_t>(pairs - i));
            std::swap(candidates[static_cast<std::size_t>(i)], candidates[j]);
        }
        ProblemGraph g(n, std::vector<Edge>(candidates.begin(), candidates.begin() + m));
        if (g.is_connected()) return g;
    }
}

GeneratedFamily generate_large_family(int n, int target_total, std::uint64_t seed) {
    if (n < 9) throw ParameterError("large family needs n >= 9");
    check_order(n);
    constexpr int kAttemptsPerSlot = 500;
    Rng rng(seed);
    const int lo = n - 1;
    const int hi = n * (n - 1) / 2;
    const auto buckets = static_cast<std::size_t>(hi - lo + 1);
    GeneratedFamily family{n, {}, {}};
    std::vector<std::set<ScreenKey>> seen(buckets);
    std::vector<char> stalled(buckets, 0);
    std::size_t live = buckets;
    const auto full = [&] { return static_cast<int>(family.members.size()) >= target_total; };
    // round-robin keeps bucket sizes within one of each other until a bucket
    // runs out of screen classes; its share then flows to the others
    while (!full() && live > 0) {
        for (std::size_t b = 0; b < buckets && !full(); ++b) {
            if (stalled[b]) continue;
            const int m = lo + static_cast<int>(b);
            bool added = false;
            for (int attempt = 0; attempt < kAttemptsPerSlot && !added; ++attempt) {
                ProblemGraph g = random_connected_graph(n, m, rng);
                if (seen[b].insert(screen_key(g)).second) {
                    family.members.push_back({std::move(g), m});
                    added = true;
                }
            }
            if (!added) {
                stalled[b] = 1;
                --live;
                family.stalls.push_back("n=" + std::to_string(n) + " m=" + std::to_string(m) + ": stalled after " +
                                        std::to_string(seen[b].size()) + " graphs");
            }
        }
    }
    return family;
}

GeneratedFamily generate_family(int n, int target_total, std::uint64_t seed) {
    if (n >= 3 && n <= 5) {
        GeneratedFamily family{n, {}, {}};
        auto graphs = generate_small_family(n);
        if (static_cast<int>(graphs.size()) > target_total) {
            Rng rng(seed);
            rng.shuffle(graphs);
            graphs.resize(static_cast<std::size_t>(target_total));
        }
        for (auto& g : graphs) family.members.push_back({std::move(g), 0});
        return family;
    }
    if (n >= 6 && n <= 8) return generate_medium_family(n, target_total, seed);
    return generate_large_family(n, target_total, seed);
}

}  // namespace qembed
