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

#include <set>

#include "qembed/augmentation.hpp"
#include "qembed/environment.hpp"
#include "qembed/errors.hpp"

namespace qembed {
namespace {

// Edge-set check written against the raw edge list, not is_automorphism.
bool preserves_edges(const HardwareGraph& h, const Permutation& pi) {
    if (pi.size() != h.node_count()) return false;
    std::set<int> image;
    for (int q = 0; q < h.node_count(); ++q) image.insert(pi(q));
    if (static_cast<int>(image.size()) != h.node_count()) return false;
    const auto list = h.edges();
    const std::set<Edge> edges(list.begin(), list.end());
    for (const auto& [a, b] : list) {
        const int x = pi(a);
        const int y = pi(b);
        if (!edges.contains({std::min(x, y), std::max(x, y)})) return false;
    }
    return true;
}

TEST(Transforms, AllEightAreAutomorphisms) {
    Rng rng(9);
    for (const auto& h : {HardwareGraph::chimera(2), HardwareGraph::chimera(4), HardwareGraph::zephyr(2),
                          HardwareGraph::zephyr(3)}) {
        for (int rep = 0; rep < 5; ++rep) {
            const auto transforms = enumerate_transforms(h, rng);
            for (const auto& t : transforms) {
                EXPECT_TRUE(preserves_edges(h, t.permutation)) << transform_name(t.kind);
                EXPECT_TRUE(is_automorphism(h, t.permutation));
            }
            // geometric transforms move something on every grid larger than one cell
            for (int k = 0; k < 6; ++k) EXPECT_FALSE(transforms[static_cast<std::size_t>(k)].permutation.is_identity());
            for (int s = 0; s < 10; ++s) EXPECT_TRUE(preserves_edges(h, sample_transform_set(transforms, rng)));
        }
    }
}

TEST(Transforms, RotationsComposeToIdentity) {
    Rng rng(1);
    for (const auto& h : {HardwareGraph::chimera(3), HardwareGraph::zephyr(2)}) {
        const auto t = enumerate_transforms(h, rng);
        const auto& cw = t[static_cast<int>(TransformKind::RotateCw)].permutation;
        const auto& ccw = t[static_cast<int>(TransformKind::RotateCcw)].permutation;
        EXPECT_TRUE(cw.then(ccw).is_identity());
        EXPECT_TRUE(cw.then(cw).then(cw).then(cw).is_identity());
        for (int k : {2, 3, 4, 5}) {
            const auto& mirror = t[static_cast<std::size_t>(k)].permutation;
            EXPECT_TRUE(mirror.then(mirror).is_identity()) << k;
        }
    }
}

TEST(Transforms, RejectsNonAutomorphism) {
    const auto h = HardwareGraph::chimera(1);
    // swapping one vertical and one horizontal qubit breaks the bipartition
    std::vector<int> map{4, 1, 2, 3, 0, 5, 6, 7};
    EXPECT_FALSE(is_automorphism(h, Permutation(map)));
    EXPECT_FALSE(preserves_edges(h, Permutation(map)));
    EXPECT_THROW(Permutation(std::vector<int>{0, 0, 1}), ParameterError);
}

TEST(Transforms, ObservationExampleOnOneCell) {
    const auto h = HardwareGraph::chimera(1);
    // qubit order[i] moves to position i
    const std::vector<int> order{7, 4, 6, 5, 0, 1, 2, 3};
    std::vector<int> map(8);
    for (int i = 0; i < 8; ++i) map[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i;
    const Permutation pi(map);
    ASSERT_TRUE(is_automorphism(h, pi));

    const ObservationLayout layout{3, 8};
    Observation obs(static_cast<std::size_t>(layout.size()), 0.0f);
    obs[0] = 1;
    obs[1] = 2;
    obs[4] = 1;
    const std::vector<float> available{1, 0, 0, 0, 1, 0, 1, 1};
    const std::vector<float> chain{0, 0, 1, 0, 0, 0, 0, 0};
    std::copy(available.begin(), available.end(), obs.begin() + layout.available_offset());
    std::copy(chain.begin(), chain.end(), obs.begin() + layout.chain_offset());

    const auto out = apply_to_observation(obs, layout, pi);
    EXPECT_EQ(std::vector<float>(out.begin(), out.begin() + 6), std::vector<float>(obs.begin(), obs.begin() + 6));
    EXPECT_EQ(std::vector<float>(out.begin() + 6, out.begin() + 14), (std::vector<float>{1, 1, 1, 0, 1, 0, 0, 0}));
    EXPECT_EQ(std::vector<float>(out.begin() + 14, out.end()), (std::vector<float>{0, 0, 0, 0, 0, 0, 1, 0}));

    const ActionMask mask{1, 0, 0, 0, 1, 0, 1, 1};
    EXPECT_EQ(apply_to_mask(mask, pi), (ActionMask{1, 1, 1, 0, 1, 0, 0, 0}));
    // choosing position 2 in the permuted view selects qubit 6
    EXPECT_EQ(map_action(2, pi), 6);
}

TEST(Transforms, ActionMappingInvertsPermutation) {
    Rng rng(4);
    const auto h = HardwareGraph::zephyr(2);
    const auto transforms = enumerate_transforms(h, rng);
    for (int s = 0; s < 20; ++s) {
        const auto pi = sample_transform_set(transforms, rng);
        for (int q = 0; q < h.node_count(); ++q) {
            EXPECT_EQ(map_action(pi(q), pi), q);
            EXPECT_EQ(pi.inverted()(pi(q)), q);
        }
    }
}

TEST(Transforms, EnvironmentIsEquivariant) {
    Rng rng(123);
    const std::vector<HardwareGraph> hardware{HardwareGraph::chimera(2), HardwareGraph::zephyr(1)};
    for (int trial = 0; trial < 100; ++trial) {
        const auto& h = hardware[static_cast<std::size_t>(trial) % 2];
        const auto transforms = enumerate_transforms(h, rng);
        const auto pi = sample_transform_set(transforms, rng);
        const int n = 3 + static_cast<int>(rng.uniform_index(3));
        const auto pool = generate_small_family(n);
        const auto& g = pool[rng.uniform_index(pool.size())];

        EmbeddingEnv base(h, 5);
        EmbeddingEnv moved(h, 5);
        auto obs = base.reset(g);
        auto obs_moved = moved.reset(g);
        for (;;) {
            ASSERT_EQ(apply_to_observation(obs, base.layout(), pi), obs_moved);
            ASSERT_EQ(apply_to_mask(base.mask(), pi), moved.mask());
            if (base.terminated()) break;
            std::vector<int> valid;
            for (int q = 0; q < h.node_count(); ++q) {
                if (base.mask()[static_cast<std::size_t>(q)]) valid.push_back(q);
            }
            const int a = valid[rng.uniform_index(valid.size())];
            const auto r1 = base.step(a);
            const auto r2 = moved.step(pi(a));
            EXPECT_EQ(r1.reward, r2.reward);
            EXPECT_EQ(r1.terminated, r2.terminated);
            EXPECT_EQ(r1.success, r2.success);
            obs = r1.observation;
            obs_moved = r2.observation;
        }
    }
}

TEST(Transforms, ModeNamesRoundTrip) {
    for (auto mode : {AugmentMode::Off, AugmentMode::Train, AugmentMode::TrainTest}) {
        EXPECT_EQ(parse_augment_mode(augment_mode_name(mode)), mode);
    }
    EXPECT_THROW(parse_augment_mode("sometimes"), ParameterError);
}

}  // namespace
}  // namespace qembed
