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

#include "qembed/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <utility>

#include "qembed/errors.hpp"

namespace qembed {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// (shared-qubit excess, total qubits); smaller is better.
using Objective = std::pair<int, int>;

class Router {
  public:
    Router(const ProblemGraph& g, const HardwareGraph& h, double base)
        : g_(g), h_(h), base_(base), usage_(static_cast<std::size_t>(h.node_count()), 0),
          chains_(static_cast<std::size_t>(g.node_count())) {}

    const std::vector<Chain>& chains() const noexcept { return chains_; }

    Objective objective() const {
        int overlap = 0;
        int qubits = 0;
        for (const int u : usage_) {
            if (u > 1) overlap += u - 1;
            qubits += u;
        }
        return {overlap, qubits};
    }

    void remove(int v) {
        for (const int q : chains_[static_cast<std::size_t>(v)]) --usage_[static_cast<std::size_t>(q)];
        chains_[static_cast<std::size_t>(v)].clear();
    }

    void place(int v, Chain chain) {
        for (const int q : chain) ++usage_[static_cast<std::size_t>(q)];
        chains_[static_cast<std::size_t>(v)] = std::move(chain);
    }

    /// Chain for v given every other chain; v's own chain must be empty.
    Chain route(int v, Rng& rng) {
        const int nq = h_.node_count();
        std::vector<int> anchors;
        for (const int u : g_.neighbors(v)) {
            if (!chains_[static_cast<std::size_t>(u)].empty()) anchors.push_back(u);
        }
        if (anchors.empty()) {
            double best = kInf;
            std::vector<int> ties;
            for (int q = 0; q < nq; ++q) {
                const double w = weight(q);
                if (w < best) {
                    best = w;
                    ties.clear();
                }
                if (w == best) ties.push_back(q);
            }
            return {ties[rng.uniform_index(ties.size())]};
        }

        const std::size_t k = anchors.size();
        dist_.assign(k, {});
        pred_.assign(k, {});
        for (std::size_t i = 0; i < k; ++i) {
            shortest_paths(chains_[static_cast<std::size_t>(anchors[i])], dist_[i], pred_[i]);
        }
        // root cost: its own weight once plus the interior of every path
        double best = kInf;
        std::vector<int> ties;
        for (int q = 0; q < nq; ++q) {
            const double w = weight(q);
            double cost = w;
            for (std::size_t i = 0; i < k && cost < kInf; ++i) {
                const double d = dist_[i][static_cast<std::size_t>(q)];
                if (d > 0.0) cost += d - w;
                if (d == kInf) cost = kInf;
            }
            if (cost < best) {
                best = cost;
                ties.clear();
            }
            if (cost == best && cost < kInf) ties.push_back(q);
        }
        if (ties.empty()) throw StructuralError("hardware graph is disconnected");
        const int root = ties[rng.uniform_index(ties.size())];

        Chain chain{root};
        for (std::size_t i = 0; i < k; ++i) {
            int x = root;
            while (dist_[i][static_cast<std::size_t>(x)] > 0.0) {
                x = pred_[i][static_cast<std::size_t>(x)];
                if (dist_[i][static_cast<std::size_t>(x)] > 0.0) chain.push_back(x);
            }
        }
        std::sort(chain.begin(), chain.end());
        chain.erase(std::unique(chain.begin(), chain.end()), chain.end());
        return chain;
    }

  private:
    double weight(int q) const { return std::pow(base_, usage_[static_cast<std::size_t>(q)]); }

    /// Multi-source Dijkstra where entering qubit q costs weight(q).
    void shortest_paths(const Chain& sources, std::vector<double>& dist, std::vector<int>& pred) const {
        const auto nq = static_cast<std::size_t>(h_.node_count());
        dist.assign(nq, kInf);
        pred.assign(nq, -1);
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        for (const int s : sources) {
            dist[static_cast<std::size_t>(s)] = 0.0;
            heap.emplace(0.0, s);
        }
        while (!heap.empty()) {
            const auto [d, x] = heap.top();
            heap.pop();
            if (d > dist[static_cast<std::size_t>(x)]) continue;
            for (const int y : h_.neighbors(x)) {
                const double nd = d + weight(y);
                if (nd < dist[static_cast<std::size_t>(y)]) {
                    dist[static_cast<std::size_t>(y)] = nd;
                    pred[static_cast<std::size_t>(y)] = x;
                    heap.emplace(nd, y);
                }
            }
        }
    }

    const ProblemGraph& g_;
    const HardwareGraph& h_;
    double base_;
    std::vector<int> usage_;
    std::vector<Chain> chains_;
    std::vector<std::vector<double>> dist_;
    std::vector<std::vector<int>> pred_;
};

}  // namespace

void BaselineConfig::validate() const {
    if (tries < 1) throw ParameterError("tries must be >= 1");
    if (improvement_passes < 0) throw ParameterError("improvement_passes must be >= 0");
    if (weight_base != 0.0 && !(weight_base > 1.0)) throw ParameterError("weight_base must exceed 1");
}

TryDiagnostics heuristic_try(const ProblemGraph& g, const HardwareGraph& h, int passes, double weight_base,
                             Rng& rng, Embedding& out) {
    std::vector<int> order(static_cast<std::size_t>(g.node_count()));
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return g.degree(a) > g.degree(b); });

    Router router(g, h, weight_base);
    for (const int v : order) router.place(v, router.route(v, rng));

    TryDiagnostics diag;
    Objective best = router.objective();
    std::vector<Chain> best_chains = router.chains();
    for (int pass = 0; pass < passes; ++pass) {
        const Objective before = router.objective();
        for (const int v : order) {
            router.remove(v);
            router.place(v, router.route(v, rng));
        }
        ++diag.passes;
        const Objective after = router.objective();
        if (after < best) {
            best = after;
            best_chains = router.chains();
        }
        if (!(after < before)) break;
    }

    out.chains = std::move(best_chains);
    diag.overlap = best.first;
    diag.qubits = best.second;
    diag.success = best.first == 0 && validate_embedding(g, h, out).valid();
    return diag;
}

BaselineResult heuristic_embed(const ProblemGraph& g, const HardwareGraph& h, const BaselineConfig& cfg) {
    cfg.validate();
    const double base = cfg.weight_base == 0.0 ? static_cast<double>(h.node_count()) : cfg.weight_base;
    BaselineResult result;
    for (int t = 0; t < cfg.tries; ++t) {
        Rng rng(splitmix64(cfg.seed ^ splitmix64(static_cast<std::uint64_t>(t))));
        Embedding candidate;
        const auto diag = heuristic_try(g, h, cfg.improvement_passes, base, rng, candidate);
        result.tries.push_back(diag);
        if (diag.success && (!result.success || diag.qubits < result.qubits)) {
            result.success = true;
            result.qubits = diag.qubits;
            result.best_try = t;
            result.embedding = std::move(candidate);
        }
    }
    return result;
}

}  // namespace qembed
