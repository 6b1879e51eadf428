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

#include <gtest/gtest.h>

#include <map>
#include <set>

#include "oracles.hpp"
#include "qembed/errors.hpp"
#include "qembed/problem_graph.hpp"

namespace qembed {
namespace {

TEST(ProblemGraph, CompleteGraphEdgeCounts) {
    EXPECT_EQ(complete_graph(3).edge_count(), 3u);
    EXPECT_EQ(complete_graph(10).edge_count(), 45u);
    EXPECT_EQ(complete_graph(12).edge_count(), 66u);
    for (int n = 3; n <= 12; ++n) {
        const auto g = complete_graph(n);
        for (int v = 0; v < n; ++v) EXPECT_EQ(g.degree(v), n - 1);
    }
    EXPECT_THROW(complete_graph(2), ParameterError);
}

TEST(ProblemGraph, RejectsMalformedEdges) {
    EXPECT_THROW(ProblemGraph(3, {{0, 0}}), ParameterError);
    EXPECT_THROW(ProblemGraph(3, {{0, 3}}), ParameterError);
    EXPECT_THROW(ProblemGraph(3, {{0, 1}, {1, 0}}), ParameterError);
}

TEST(ProblemGraph, EdgesAreNormalisedAndSorted) {
    const ProblemGraph g(4, {{3, 1}, {2, 0}, {1, 0}});
    const std::vector<Edge> expected{{0, 1}, {0, 2}, {1, 3}};
    EXPECT_EQ(g.edges(), expected);
    EXPECT_TRUE(g.adjacent(3, 1));
    EXPECT_FALSE(g.adjacent(2, 3));
}

TEST(ProblemGraph, ConnectivityAndTriangles) {
    EXPECT_TRUE(ProblemGraph(4, {{0, 1}, {1, 2}, {2, 3}}).is_connected());
    EXPECT_FALSE(ProblemGraph(4, {{0, 1}, {2, 3}}).is_connected());
    EXPECT_EQ(complete_graph(5).triangle_count(), 10);
    EXPECT_EQ(ProblemGraph(4, {{0, 1}, {1, 2}, {0, 2}, {2, 3}}).triangle_count(), 1);
}

TEST(ProblemGraph, DefaultCoefficientsAreMinusOne) {
    const auto g = complete_graph(4).with_default_coefficients();
    ASSERT_TRUE(g.has_coefficients());
    for (double h : g.linear()) EXPECT_EQ(h, -1.0);
    ASSERT_EQ(g.quadratic().size(), 6u);
    for (double j : g.quadratic()) EXPECT_EQ(j, -1.0);
}

TEST(ProblemGraph, PermutationPreservesStructure) {
    const ProblemGraph g(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 2}});
    const auto p = g.permuted({4, 3, 2, 1, 0});
    EXPECT_TRUE(oracle::isomorphic(g, p));
    EXPECT_TRUE(p.adjacent(4, 3));
    EXPECT_TRUE(p.adjacent(4, 2));
    EXPECT_EQ(screen_key(g), screen_key(p));
}

TEST(ProblemGraph, EdgeKeyLimitedToElevenNodes) {
    EXPECT_NO_THROW(complete_graph(11).edge_key());
    EXPECT_THROW(complete_graph(12).edge_key(), ParameterError);
    EXPECT_NE(ProblemGraph(3, {{0, 1}}).edge_key(), ProblemGraph(3, {{0, 2}}).edge_key());
}

// Independent count: enumerate every edge subset and keep the connected ones.
std::size_t count_connected_labelled(int n) {
    std::vector<Edge> pairs;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) pairs.emplace_back(a, b);
    }
    std::size_t count = 0;
    for (std::uint32_t mask = 0; mask < (1U << pairs.size()); ++mask) {
        std::vector<Edge> edges;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            if (mask >> i & 1U) edges.push_back(pairs[i]);
        }
        if (ProblemGraph(n, edges).is_connected()) ++count;
    }
    return count;
}

TEST(SmallFamily, CountsMatchExhaustiveEnumeration) {
    const std::map<int, std::size_t> expected{{3, 4}, {4, 38}, {5, 728}};
    for (const auto& [n, size] : expected) {
        const auto family = generate_small_family(n);
        EXPECT_EQ(family.size(), size) << n;
        EXPECT_EQ(count_connected_labelled(n), size) << n;
        std::set<std::uint64_t> keys;
        for (const auto& g : family) {
            EXPECT_TRUE(g.is_connected());
            EXPECT_GE(static_cast<int>(g.edge_count()), n - 1);
            EXPECT_LE(static_cast<int>(g.edge_count()), n * (n - 1) / 2);
            keys.insert(g.edge_key());
        }
        EXPECT_EQ(keys.size(), family.size()) << "duplicate labelled graph at n=" << n;
    }
}

TEST(MediumFamily, FillsTargetWithDistinctConnectedGraphs) {
    const auto family = generate_medium_family(6, 1250, 7);
    EXPECT_EQ(family.members.size(), 1250u);
    EXPECT_TRUE(family.stalls.empty());
    std::set<std::uint64_t> keys;
    for (const auto& m : family.members) {
        EXPECT_TRUE(m.graph.is_connected());
        keys.insert(m.graph.edge_key());
    }
    EXPECT_EQ(keys.size(), family.members.size());
}

TEST(MediumFamily, OneRepresentativePerScreenClass) {
    // exhaustive: screen keys of every connected labelled graph on six nodes
    const int n = 6;
    std::vector<Edge> pairs;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) pairs.emplace_back(a, b);
    }
    std::set<ScreenKey> keys;
    for (std::uint32_t mask = 0; mask < (1U << pairs.size()); ++mask) {
        std::vector<Edge> edges;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            if (mask >> i & 1U) edges.push_back(pairs[i]);
        }
        ProblemGraph g(n, edges);
        if (g.is_connected()) keys.insert(screen_key(g));
    }
    const auto reps = medium_class_representatives(n);
    EXPECT_EQ(reps.size(), keys.size());
    // the screen can only merge classes: 112 connected graphs on six vertices up to isomorphism
    EXPECT_LE(reps.size(), 112u);
    for (std::size_t i = 0; i < reps.size(); ++i) {
        for (std::size_t j = i + 1; j < reps.size(); ++j) EXPECT_FALSE(oracle::isomorphic(reps[i], reps[j]));
    }
}

TEST(MediumFamily, MembersBelongToTheirStratumClass) {
    const auto reps = medium_class_representatives(6);
    const auto family = generate_medium_family(6, 400, 3);
    for (std::size_t i = 0; i < family.members.size(); i += 7) {
        const auto& m = family.members[i];
        EXPECT_TRUE(oracle::isomorphic(m.graph, reps.at(static_cast<std::size_t>(m.stratum))));
    }
}

TEST(LargeFamily, BucketsStayWithinOneUnlessStalled) {
    const int n = 9;
    const auto family = generate_large_family(n, 1250, 11);
    EXPECT_EQ(family.members.size(), 1250u);
    std::set<int> stalled;
    for (const auto& s : family.stalls) {
        const auto pos = s.find(" m=");
        ASSERT_NE(pos, std::string::npos) << s;
        stalled.insert(std::stoi(s.substr(pos + 3)));
    }
    std::map<int, int> sizes;
    for (const auto& m : family.members) {
        EXPECT_TRUE(m.graph.is_connected());
        EXPECT_EQ(static_cast<int>(m.graph.edge_count()), m.stratum);
        ++sizes[m.stratum];
    }
    int lo = 1 << 30;
    int hi = 0;
    for (int m = n - 1; m <= n * (n - 1) / 2; ++m) {
        if (stalled.contains(m)) continue;
        lo = std::min(lo, sizes[m]);
        hi = std::max(hi, sizes[m]);
    }
    EXPECT_LE(hi - lo, 1);
}

TEST(LargeFamily, TreeBucketHoldsTrees) {
    Rng rng(5);
    for (int i = 0; i < 50; ++i) {
        const auto g = random_connected_graph(10, 9, rng);
        EXPECT_TRUE(g.is_connected());
        EXPECT_EQ(g.edge_count(), 9u);
    }
    EXPECT_THROW(random_connected_graph(10, 8, rng), ParameterError);
    EXPECT_THROW(random_connected_graph(10, 46, rng), ParameterError);
}

TEST(Families, SameSeedSameOutput) {
    const auto a = generate_family(9, 300, 42);
    const auto b = generate_family(9, 300, 42);
    ASSERT_EQ(a.members.size(), b.members.size());
    for (std::size_t i = 0; i < a.members.size(); ++i) EXPECT_EQ(a.members[i].graph, b.members[i].graph);
}

}  // namespace
}  // namespace qembed
