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

#include <atomic>
#include <cmath>
#include <filesystem>
#include <map>

#include <unistd.h>

#include "qembed/errors.hpp"
#include "qembed/experiments.hpp"

namespace qembed {
namespace {

MetricsRecord rec(int graph, std::uint64_t seed, int episode, bool success, int qubits) {
    return {graph, seed, episode, success, qubits};
}

TEST(Metrics, SuccessRateIsPercentage) {
    const std::vector<MetricsRecord> r{rec(0, 0, 0, true, 5), rec(0, 0, 1, false, 0), rec(0, 0, 2, true, 7),
                                       rec(0, 0, 3, true, 6)};
    EXPECT_DOUBLE_EQ(success_rate(r), 75.0);
    EXPECT_THROW(success_rate(std::span<const MetricsRecord>{}), ParameterError);
}

TEST(Metrics, AggregateOverSuccessesOnly) {
    const std::vector<MetricsRecord> r{rec(0, 0, 0, true, 4), rec(0, 0, 1, false, 30), rec(0, 1, 0, true, 8)};
    const auto a = aggregate(r);
    EXPECT_EQ(a.total, 3);
    EXPECT_EQ(a.successes, 2);
    EXPECT_NEAR(a.success_rate, 200.0 / 3.0, 1e-12);
    EXPECT_DOUBLE_EQ(a.mean_qubits, 6.0);
    EXPECT_DOUBLE_EQ(a.std_qubits, 2.0);
    EXPECT_EQ(a.best_qubits, 4);
    const auto none = aggregate(std::vector<MetricsRecord>{rec(0, 0, 0, false, 0)});
    EXPECT_FALSE(none.best_qubits.has_value());
    EXPECT_EQ(none.mean_qubits, 0.0);
}

TEST(Metrics, QubitEfficiencyRatio) {
    const std::vector<MetricsRecord> rl{rec(0, 0, 0, true, 50), rec(0, 0, 1, true, 44), rec(0, 0, 2, false, 3)};
    const auto q = qubit_efficiency_ratio(rl, 22);
    ASSERT_TRUE(q.has_value());
    EXPECT_DOUBLE_EQ(*q, 0.5);
    EXPECT_FALSE(qubit_efficiency_ratio(rl, std::nullopt).has_value());
    EXPECT_FALSE(qubit_efficiency_ratio(std::vector<MetricsRecord>{rec(0, 0, 0, false, 0)}, 22).has_value());
    // the RL agent beating the baseline gives a ratio above one
    EXPECT_DOUBLE_EQ(*qubit_efficiency_ratio(std::vector<MetricsRecord>{rec(0, 0, 0, true, 20)}, 30), 1.5);
}

TEST(Metrics, CsvRoundTrip) {
    const std::vector<MetricsRecord> r{rec(60012, 3, 0, true, 17), rec(60012, 3, 1, false, 0),
                                       rec(7, 18446744073709551615ULL, 9, true, 1)};
    const auto csv = records_to_csv(r);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "graph_id,agent_seed,episode,success,qubits");
    EXPECT_EQ(records_from_csv(csv), r);
    EXPECT_THROW(records_from_csv("graph_id,agent_seed,episode,success,qubits\n1,2,3\n"), ConfigError);
}

TEST(Metrics, EvaluationSeedsAreDistinct) {
    EXPECT_EQ(evaluation_seed(3, 5), 3u * 10007u + 5u);
    std::set<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 10; ++s) {
        for (int g : {0, 1, 30002, 100249}) seen.insert(evaluation_seed(s, g));
    }
    EXPECT_EQ(seen.size(), 40u);
}

std::vector<Agent> untrained_agents(int count, int max_g, const HardwareGraph& h) {
    std::vector<Agent> agents;
    for (int s = 0; s < count; ++s) {
        Hyperparams hp;
        hp.seed = static_cast<std::uint64_t>(s);
        Agent a;
        a.family = h.family();
        a.m = h.size();
        a.max_g = max_g;
        a.hp = hp;
        a.nets = PpoLearner(ObservationLayout{max_g, h.node_count()}.size(), h.node_count(), hp).nets();
        agents.push_back(std::move(a));
    }
    return agents;
}

TEST(Evaluate, HundredRowsPerGraphAndDeterministic) {
    const auto h = HardwareGraph::chimera(2);
    const auto agents = untrained_agents(10, 4, h);
    const std::vector<EvalGraph> graphs{{0, complete_graph(3)}, {1, complete_graph(4)}};
    const auto a = evaluate(agents, graphs, h, 10, AugmentMode::Off);
    ASSERT_EQ(a.size(), 200u);
    std::map<int, int> per_graph;
    for (const auto& r : a) {
        ++per_graph[r.graph_id];
        if (r.success) EXPECT_GE(r.qubits, r.graph_id == 0 ? 4 : 6);
    }
    EXPECT_EQ(per_graph[0], 100);
    EXPECT_EQ(per_graph[1], 100);
    EXPECT_EQ(evaluate(agents, graphs, h, 10, AugmentMode::Off), a);
    EXPECT_EQ(evaluate(agents, graphs, h, 10, AugmentMode::Off, false, 3), a);
    // aggregates recomputed from the written CSV match the in-memory ones
    const auto back = records_from_csv(records_to_csv(a));
    const auto x = aggregate(a);
    const auto y = aggregate(back);
    EXPECT_EQ(x.successes, y.successes);
    EXPECT_EQ(x.best_qubits, y.best_qubits);
    EXPECT_DOUBLE_EQ(x.mean_qubits, y.mean_qubits);
}

TEST(Evaluate, AugmentedTestModeDiffersOnlyInSampling) {
    const auto h = HardwareGraph::chimera(2);
    const auto agents = untrained_agents(2, 3, h);
    const std::vector<EvalGraph> graphs{{0, complete_graph(3)}};
    const auto plain = evaluate(agents, graphs, h, 5, AugmentMode::Train);
    EXPECT_EQ(plain, evaluate(agents, graphs, h, 5, AugmentMode::Off));
    const auto augmented = evaluate(agents, graphs, h, 5, AugmentMode::TrainTest);
    EXPECT_EQ(augmented.size(), plain.size());
    EXPECT_EQ(augmented, evaluate(agents, graphs, h, 5, AugmentMode::TrainTest));
}

TEST(Evaluate, IncompatibleAgentsAreRejectedUpFront) {
    const auto h = HardwareGraph::chimera(2);
    const auto agents = untrained_agents(1, 3, h);
    EXPECT_THROW(evaluate(agents, {{0, complete_graph(4)}}, h, 1, AugmentMode::Off), ConfigError);
    EXPECT_THROW(evaluate(agents, {{0, complete_graph(3)}}, HardwareGraph::zephyr(1), 1, AugmentMode::Off),
                 ConfigError);
    EXPECT_THROW(evaluate(agents, {{0, complete_graph(3)}}, HardwareGraph::chimera(3), 1, AugmentMode::Off),
                 ConfigError);
    EXPECT_THROW(check_compatible(agents[0], h, 5), ConfigError);
    EXPECT_NO_THROW(check_compatible(agents[0], h, 3));
}

TEST(RunConfigTest, JsonRoundTripAndDefaults) {
    RunConfig cfg;
    EXPECT_EQ(cfg.effective_steps(), 1'000'000);
    EXPECT_EQ(cfg.effective_baseline_tries(), 100);
    EXPECT_EQ(cfg.effective_seeds().size(), 10u);
    cfg.scenario = Scenario::Dataset;
    cfg.dataset = "/data/x";
    EXPECT_EQ(cfg.effective_steps(), 3'000'000);
    EXPECT_EQ(cfg.effective_baseline_tries(), 10);
    EXPECT_EQ(cfg.max_g(), 10);
    cfg.family = Family::Zephyr;
    cfg.m = 2;
    cfg.steps = 5000;
    cfg.augment = AugmentMode::TrainTest;
    cfg.seeds = {4, 5};
    cfg.agents = 2;
    cfg.hp.learning_rate = 1e-3;
    const auto back = RunConfig::from_json(cfg.to_json());
    EXPECT_EQ(back.to_json(), cfg.to_json());
    EXPECT_EQ(back.hardware().node_count(), 160);

    auto j = cfg.to_json();
    j["stepz"] = 10;
    EXPECT_THROW(RunConfig::from_json(j), ConfigError);
}

TEST(RunConfigTest, ValidationErrors) {
    RunConfig cfg;
    cfg.m = 17;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = {};
    cfg.scenario = Scenario::Dataset;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = {};
    cfg.seeds = {1, 2, 3};
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = {};
    cfg.hp.clip = -1;
    EXPECT_THROW(cfg.validate(), ConfigError);
    EXPECT_NO_THROW(RunConfig{}.validate());
}

TEST(Report, QerRowsPairBaselineWithRecords) {
    RunConfig cfg;
    cfg.family = Family::Chimera;
    cfg.m = 2;
    cfg.g_size = 4;
    cfg.baseline_tries = 10;
    const std::vector<MetricsRecord> r{rec(0, 0, 0, true, 12), rec(0, 0, 1, true, 8), rec(0, 1, 0, false, 0)};
    const auto rows = qer_report(cfg, r);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].n, 4);
    EXPECT_EQ(rows[0].baseline_best, 6);
    ASSERT_TRUE(rows[0].qer.has_value());
    EXPECT_DOUBLE_EQ(*rows[0].qer, 6.0 / 8.0);
    const auto csv = qer_report_to_csv(rows);
    EXPECT_EQ(csv.substr(0, csv.find('\n')),
              "graph_id,n,episodes,successes,sr,mean_qubits,std_qubits,best_rl,best_baseline,qer");
    EXPECT_NE(csv.find("0,4,3,2,"), std::string::npos);
}

TEST(Report, MissingRlSuccessIsUndefined) {
    QerRow row;
    row.rl = aggregate(std::vector<MetricsRecord>{rec(0, 0, 0, false, 0)});
    row.baseline_best = 6;
    const auto csv = qer_report_to_csv({row});
    EXPECT_NE(csv.find("undefined,6,undefined"), std::string::npos);
}

TEST(Parallel, RunsEveryIndexOnceAndRethrows) {
    std::vector<std::atomic<int>> hits(50);
    parallel_for(50, 4, [&](int i) { hits[static_cast<std::size_t>(i)]++; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
    EXPECT_THROW(parallel_for(10, 3,
                              [](int i) {
                                  if (i == 7) throw ParameterError("boom");
                              }),
                 ParameterError);
}

TEST(TrainAgents, DatasetScenarioEndToEnd) {
    const auto dir = std::filesystem::temp_directory_path() / ("qembed_exp_" + std::to_string(::getpid()));
    DatasetOptions opt;
    opt.min_n = 3;
    opt.max_n = 4;
    write_dataset(generate_dataset(opt), dir);
    RunConfig cfg;
    cfg.scenario = Scenario::Dataset;
    cfg.dataset = dir.string();
    cfg.max_n = 4;
    cfg.m = 1;
    cfg.agents = 2;
    cfg.steps = 256;
    cfg.episodes = 2;
    cfg.episodes_per_size = 5;
    cfg.hp.horizon = 128;
    cfg.hp.minibatch = 32;
    cfg.hp.epochs = 1;
    const auto results = train_agents(cfg, 2);
    ASSERT_EQ(results.size(), 2u);
    std::vector<Agent> agents;
    for (const auto& r : results) {
        EXPECT_FALSE(r.aborted);
        EXPECT_EQ(r.agent.trained_steps, 256);
        EXPECT_EQ(r.agent.max_g, 4);
        agents.push_back(r.agent);
    }
    EXPECT_NE(serialize_checkpoint(agents[0]), serialize_checkpoint(agents[1]));
    const auto graphs = evaluation_graphs(cfg);
    // one test graph at n = 3 and eight at n = 4
    ASSERT_EQ(graphs.size(), 9u);
    EXPECT_EQ(graphs.front().id / 10000, 3);
    EXPECT_EQ(graphs.back().id / 10000, 4);
    EXPECT_EQ(training_graphs(cfg).size(), 33u);
    const auto records = evaluate(agents, graphs, cfg.hardware(), cfg.episodes, cfg.augment);
    EXPECT_EQ(records.size(), 2u * 9u * 2u);
    std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace qembed
