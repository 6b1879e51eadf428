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

#include <nlohmann/json.hpp>
#include <sstream>

#include "oracles.hpp"
#include "qembed/environment.hpp"
#include "qembed/errors.hpp"

namespace qembed {
namespace {

std::vector<float> section(const Observation& obs, int offset, int size) {
    return {obs.begin() + offset, obs.begin() + offset + size};
}

std::vector<int> ones(const ActionMask& mask) {
    std::vector<int> out;
    for (std::size_t q = 0; q < mask.size(); ++q) {
        if (mask[q]) out.push_back(static_cast<int>(q));
    }
    return out;
}

TEST(Environment, ResetStateForK4OnOneCell) {
    const auto h = HardwareGraph::chimera(1);
    EmbeddingEnv env(h, 4);
    const auto obs = env.reset(complete_graph(4));
    ASSERT_EQ(obs.size(), 24u);
    EXPECT_EQ(section(obs, 0, 4), (std::vector<float>{3, 3, 3, 3}));
    EXPECT_EQ(section(obs, 4, 4), (std::vector<float>{1, 0, 0, 0}));
    // an empty chain may start anywhere
    EXPECT_EQ(section(obs, 8, 8), std::vector<float>(8, 1.0f));
    EXPECT_EQ(section(obs, 16, 8), std::vector<float>(8, 0.0f));
    EXPECT_EQ(env.mask_popcount(), 8);
}

TEST(Environment, FourStepK4Trajectory) {
    const auto h = HardwareGraph::chimera(1);
    EmbeddingEnv env(h, 4);
    env.reset(complete_graph(4));
    StepOutcome out;
    for (int a : {5, 2, 1, 3}) {
        out = env.step(a);
        EXPECT_DOUBLE_EQ(out.reward, -0.1);
        EXPECT_FALSE(out.terminated);
    }
    const auto& obs = out.observation;
    EXPECT_EQ(section(obs, 0, 4), (std::vector<float>{0, 2, 2, 2}));
    EXPECT_EQ(section(obs, 4, 4), (std::vector<float>{0, 1, 0, 0}));
    EXPECT_EQ(section(obs, 8, 8), (std::vector<float>{0, 0, 0, 0, 1, 0, 1, 1}));
    EXPECT_EQ(section(obs, 16, 8), (std::vector<float>{0, 0, 1, 0, 0, 0, 0, 0}));
    EXPECT_EQ(ones(env.mask()), (std::vector<int>{4, 6, 7}));
    EXPECT_EQ(env.current_node(), 1);
    // counted once per endpoint
    EXPECT_EQ(env.total_missing(), 6);
}

TEST(Environment, K3SuccessTrajectory) {
    const auto h = HardwareGraph::chimera(1);
    EmbeddingEnv env(h, 3);
    env.reset(complete_graph(3));
    double total = 0.0;
    StepOutcome out;
    const std::vector<int> actions{1, 0, 4, 5};
    for (std::size_t i = 0; i < actions.size(); ++i) {
        out = env.step(actions[i]);
        total += out.reward;
        EXPECT_EQ(out.terminated, i + 1 == actions.size());
    }
    EXPECT_TRUE(out.success);
    EXPECT_TRUE(env.is_success());
    EXPECT_NEAR(total, -0.4, 1e-12);
    EXPECT_EQ(env.embedding(), (Embedding{{{1, 5}, {0}, {4}}}));
    // terminal observation: nothing missing, no current node, empty mask
    EXPECT_EQ(section(out.observation, 0, 3), std::vector<float>(3, 0.0f));
    EXPECT_EQ(section(out.observation, 3, 3), std::vector<float>(3, 0.0f));
    EXPECT_EQ(env.mask_popcount(), 0);
    EXPECT_TRUE(oracle::is_minor_by_contraction(complete_graph(3), h, env.embedding()));
}

TEST(Environment, FailsWhenCurrentChainIsBoxedIn) {
    // K6 is not a minor of K_{4,4}: two contractions leave at most 14 edges
    const auto h = HardwareGraph::chimera(1);
    EmbeddingEnv env(h, 6);
    env.reset(complete_graph(6));
    Rng rng(3);
    StepOutcome out;
    while (!env.terminated()) {
        const auto valid = ones(env.mask());
        out = env.step(valid[rng.uniform_index(valid.size())]);
    }
    EXPECT_FALSE(out.success);
    EXPECT_FALSE(env.is_success());
    EXPECT_EQ(env.mask_popcount(), 0);
}

TEST(Environment, ContractViolations) {
    const auto h = HardwareGraph::chimera(1);
    EmbeddingEnv env(h, 3);
    EXPECT_THROW(env.step(0), ContractViolation);
    env.reset(complete_graph(3));
    EXPECT_THROW(env.is_success(), ContractViolation);
    env.step(1);
    // node 1 is empty, so only the taken qubit is masked
    EXPECT_THROW(env.step(1), ContractViolation);
    env.step(0);
    env.step(4);
    // node 0 holds {1}; 2 is on the same shore and therefore not admissible
    EXPECT_THROW(env.step(2), ContractViolation);
    env.step(5);
    EXPECT_TRUE(env.terminated());
    EXPECT_THROW(env.step(6), ContractViolation);
}

TEST(Environment, RejectsUnsuitableGraphs) {
    const auto h = HardwareGraph::chimera(1);
    EmbeddingEnv env(h, 4);
    EXPECT_THROW(env.reset(complete_graph(5)), ParameterError);
    EXPECT_THROW(env.reset(ProblemGraph(4, {{0, 1}, {2, 3}})), ParameterError);
    EXPECT_THROW(EmbeddingEnv(h, 1), ParameterError);
}

TEST(Environment, RandomTrajectoryInvariants) {
    Rng rng(77);
    const std::vector<HardwareGraph> hardware{HardwareGraph::chimera(1), HardwareGraph::chimera(2),
                                              HardwareGraph::zephyr(1)};
    int successes = 0;
    int failures = 0;
    for (int episode = 0; episode < 300; ++episode) {
        const auto& h = hardware[static_cast<std::size_t>(episode) % hardware.size()];
        const int n = 3 + static_cast<int>(rng.uniform_index(3));
        const auto pool = generate_small_family(n);
        const auto& g = pool[rng.uniform_index(pool.size())];
        EmbeddingEnv env(h, 6);
        env.reset(g);
        int steps = 0;
        while (!env.terminated()) {
            const int node = env.current_node();
            const auto& chain = env.embedding().chains[static_cast<std::size_t>(node)];
            // mask = free qubits, restricted to neighbours of the chain once it is nonempty
            for (int q = 0; q < h.node_count(); ++q) {
                bool expected = !env.is_assigned(q);
                if (expected && !chain.empty()) {
                    expected = std::any_of(chain.begin(), chain.end(), [&](int c) { return h.adjacent(c, q); });
                }
                ASSERT_EQ(env.mask()[static_cast<std::size_t>(q)] != 0, expected) << q;
            }
            EXPECT_GT(env.missing_links()[static_cast<std::size_t>(node)], 0);
            const auto obs = env.observation();
            EXPECT_EQ(obs[static_cast<std::size_t>(env.layout().current_offset() + node)], 1.0f);
            const auto valid = ones(env.mask());
            const auto out = env.step(valid[rng.uniform_index(valid.size())]);
            ++steps;
            EXPECT_DOUBLE_EQ(out.reward, EmbeddingEnv::kStepReward);
            env.check_invariants();
            EXPECT_EQ(static_cast<int>(env.embedding().qubit_count()), steps);
        }
        EXPECT_EQ(env.step_count(), steps);
        if (env.succeeded()) {
            ++successes;
            EXPECT_EQ(env.total_missing(), 0);
            EXPECT_TRUE(oracle::is_minor_by_contraction(g, h, env.embedding()));
        } else {
            ++failures;
            EXPECT_GT(env.total_missing(), 0);
            EXPECT_EQ(env.mask_popcount(), 0);
        }
        EXPECT_EQ(env.is_success(), env.succeeded());
        // every chain is connected by construction, even on failure
        for (const auto& chain : env.embedding().chains) {
            if (chain.size() < 2) continue;
            Embedding single{{chain}};
            EXPECT_TRUE(oracle::is_minor_by_contraction(ProblemGraph(1, {}), h, single));
        }
    }
    EXPECT_GT(successes, 0);
    EXPECT_GT(failures, 0);
}

TEST(Recorder, OneJsonLinePerStep) {
    TrajectoryRecorder rec;
    rec.record(0, 5, -0.1, 4, false);
    rec.record(1, 2, -0.1, 0, true);
    std::istringstream in(rec.jsonl());
    std::string line;
    std::vector<nlohmann::json> rows;
    while (std::getline(in, line)) rows.push_back(nlohmann::json::parse(line));
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].at("action"), 5);
    EXPECT_EQ(rows[0].at("mask_popcount"), 4);
    EXPECT_EQ(rows[1].at("step"), 1);
    EXPECT_EQ(rows[1].at("success"), true);
    EXPECT_DOUBLE_EQ(rows[1].at("reward").get<double>(), -0.1);
}

}  // namespace
}  // namespace qembed
