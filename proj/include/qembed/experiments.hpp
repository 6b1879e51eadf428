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
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qembed/agent.hpp"
#include "qembed/augmentation.hpp"
#include "qembed/baseline.hpp"
#include "qembed/dataset.hpp"
#include "qembed/topology.hpp"

namespace qembed {

enum class Scenario { Complete, Dataset };

/// Everything needed to train and evaluate one experiment.
struct RunConfig {
    Scenario scenario = Scenario::Complete;
    Family family = Family::Chimera;
    int m = 2;
    /// Complete scenario: K_n.
    int g_size = 6;
    /// Dataset scenario: directory written by write_dataset.
    std::string dataset;
    /// Dataset scenario: largest node count used for training and testing.
    int max_n = 10;
    /// 0 selects the scenario default (1M complete, 3M dataset).
    long steps = 0;
    int agents = 10;
    int episodes = 10;
    AugmentMode augment = AugmentMode::Off;
    /// Empty selects 0..agents-1.
    std::vector<std::uint64_t> seeds;
    /// 0 selects the scenario default (100 complete, 10 dataset).
    int baseline_tries = 0;
    long episodes_per_size = 1000;
    bool greedy = false;
    Hyperparams hp;

    long effective_steps() const;
    int effective_baseline_tries() const;
    std::vector<std::uint64_t> effective_seeds() const;
    /// Width of the S_G / S_R observation sections.
    int max_g() const;
    HardwareGraph hardware() const;

    /// Throws ConfigError.
    void validate() const;
    nlohmann::json to_json() const;
    /// Unknown keys are rejected; missing keys keep their defaults.
    static RunConfig from_json(const nlohmann::json& j);
};

std::string_view scenario_name(Scenario s);
Scenario parse_scenario(std::string_view name);

struct EvalGraph {
    /// Complete scenario: 0. Dataset scenario: n * 10000 + record id.
    int id = 0;
    ProblemGraph graph;
};

/// Training graphs (dataset train split or the single K_n).
std::vector<ProblemGraph> training_graphs(const RunConfig& cfg);
/// Evaluation graphs (dataset test split or the single K_n).
std::vector<EvalGraph> evaluation_graphs(const RunConfig& cfg);

struct MetricsRecord {
    int graph_id = 0;
    std::uint64_t agent_seed = 0;
    int episode = 0;
    bool success = false;
    int qubits = 0;

    friend bool operator==(const MetricsRecord&, const MetricsRecord&) = default;
};

/// 100 * successes / records. Throws ParameterError on an empty input.
double success_rate(std::span<const MetricsRecord> records);

struct Aggregate {
    int total = 0;
    int successes = 0;
    double success_rate = 0.0;
    /// Over successful episodes only; zero when there are none.
    double mean_qubits = 0.0;
    double std_qubits = 0.0;
    std::optional<int> best_qubits;
};

Aggregate aggregate(std::span<const MetricsRecord> records);

/// min baseline qubits / min RL qubits; nullopt without an RL success or
/// without a baseline success.
std::optional<double> qubit_efficiency_ratio(std::span<const MetricsRecord> rl, std::optional<int> baseline_best);

std::uint64_t evaluation_seed(std::uint64_t agent_seed, int graph_id);

/// Rolls out `episodes` episodes per (agent, graph), seeding each pair with
/// evaluation_seed(agent.hp.seed, graph id). Every agent is checked against
/// every graph before the first rollout; incompatibilities throw ConfigError.
/// Agents are processed by up to `workers` threads; output order is fixed.
std::vector<MetricsRecord> evaluate(const std::vector<Agent>& agents, const std::vector<EvalGraph>& graphs,
                                    const HardwareGraph& h, int episodes, AugmentMode mode, bool greedy = false,
                                    int workers = 1);

/// graph_id,agent_seed,episode,success,qubits
std::string records_to_csv(std::span<const MetricsRecord> records);
std::vector<MetricsRecord> records_from_csv(const std::string& text);

/// Trains one agent per seed; agents run on up to `workers` threads.
std::vector<TrainResult> train_agents(const RunConfig& cfg, int workers = 1);

struct QerRow {
    int graph_id = 0;
    int n = 0;
    Aggregate rl;
    std::optional<int> baseline_best;
    std::optional<double> qer;
};

/// Runs the baseline on every evaluated graph and pairs it with the RL
/// records of that graph.
std::vector<QerRow> qer_report(const RunConfig& cfg, std::span<const MetricsRecord> records);
std::string qer_report_to_csv(const std::vector<QerRow>& rows);

/// Runs fn(0..count-1) on up to `workers` threads; rethrows the first error.
void parallel_for(int count, int workers, const std::function<void(int)>& fn);

}  // namespace qembed
