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

#include "qembed/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "qembed/errors.hpp"

namespace qembed {

namespace {

constexpr int kGraphIdStride = 10000;

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
}

}  // namespace

std::string_view scenario_name(Scenario s) { return s == Scenario::Complete ? "complete" : "dataset"; }

Scenario parse_scenario(std::string_view name) {
    if (name == "complete") return Scenario::Complete;
    if (name == "dataset") return Scenario::Dataset;
    throw ConfigError("unknown scenario '" + std::string(name) + "'");
}

long RunConfig::effective_steps() const {
    if (steps > 0) return steps;
    return scenario == Scenario::Complete ? 1'000'000 : 3'000'000;
}

int RunConfig::effective_baseline_tries() const {
    if (baseline_tries > 0) return baseline_tries;
    return scenario == Scenario::Complete ? 100 : 10;
}

std::vector<std::uint64_t> RunConfig::effective_seeds() const {
    if (!seeds.empty()) return seeds;
    std::vector<std::uint64_t> out(static_cast<std::size_t>(agents));
    std::iota(out.begin(), out.end(), std::uint64_t{0});
    return out;
}

int RunConfig::max_g() const { return scenario == Scenario::Complete ? g_size : max_n; }

HardwareGraph RunConfig::hardware() const {
    try {
        return HardwareGraph::build(family, m);
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
}

void RunConfig::validate() const {
    const auto require = [](bool ok, const std::string& what) {
        if (!ok) throw ConfigError(what);
    };
    const int max_m = family == Family::Chimera ? HardwareGraph::kMaxChimeraSize : HardwareGraph::kMaxZephyrSize;
    require(m >= 1 && m <= max_m, "topology size m out of range");
    if (scenario == Scenario::Complete) {
        require(g_size >= 3 && g_size <= ProblemGraph::kMaxNodes, "g_size must be at least 3");
    } else {
        require(!dataset.empty(), "dataset scenario needs a dataset directory");
        require(max_n >= 3, "max_n must be at least 3");
    }
    require(steps >= 0, "steps must be >= 0");
    require(agents >= 1, "agents must be >= 1");
    require(episodes >= 1, "episodes must be >= 1");
    require(baseline_tries >= 0, "baseline_tries must be >= 0");
    require(episodes_per_size >= 1, "episodes_per_size must be >= 1");
    require(seeds.empty() || seeds.size() == static_cast<std::size_t>(agents), "seeds must list one seed per agent");
    try {
        hp.validate();
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
}

nlohmann::json RunConfig::to_json() const {
    return {{"scenario", scenario_name(scenario)},
            {"family", family_name(family)},
            {"m", m},
            {"g_size", g_size},
            {"dataset", dataset},
            {"max_n", max_n},
            {"steps", steps},
            {"agents", agents},
            {"episodes", episodes},
            {"augment", augment_mode_name(augment)},
            {"seeds", seeds},
            {"baseline_tries", baseline_tries},
            {"episodes_per_size", episodes_per_size},
            {"greedy", greedy},
            {"hyperparams", hp.to_json()}};
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    static const std::set<std::string> known = {"scenario", "family",  "m",      "g_size",         "dataset",
                                                "max_n",    "steps",   "agents", "episodes",       "augment",
                                                "seeds",    "baseline_tries",    "episodes_per_size", "greedy",
                                                "hyperparams"};
    if (!j.is_object()) throw ConfigError("run config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) throw ConfigError("unknown run config key '" + key + "'");
    }
    RunConfig cfg;
    try {
        if (j.contains("scenario")) cfg.scenario = parse_scenario(j.at("scenario").get<std::string>());
        if (j.contains("family")) cfg.family = parse_family(j.at("family").get<std::string>());
        if (j.contains("augment")) cfg.augment = parse_augment_mode(j.at("augment").get<std::string>());
        cfg.m = j.value("m", cfg.m);
        cfg.g_size = j.value("g_size", cfg.g_size);
        cfg.dataset = j.value("dataset", cfg.dataset);
        cfg.max_n = j.value("max_n", cfg.max_n);
        cfg.steps = j.value("steps", cfg.steps);
        cfg.agents = j.value("agents", cfg.agents);
        cfg.episodes = j.value("episodes", cfg.episodes);
        cfg.seeds = j.value("seeds", cfg.seeds);
        cfg.baseline_tries = j.value("baseline_tries", cfg.baseline_tries);
        cfg.episodes_per_size = j.value("episodes_per_size", cfg.episodes_per_size);
        cfg.greedy = j.value("greedy", cfg.greedy);
        if (j.contains("hyperparams")) cfg.hp = Hyperparams::from_json(j.at("hyperparams"));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad run config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("bad run config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

std::vector<ProblemGraph> training_graphs(const RunConfig& cfg) {
    if (cfg.scenario == Scenario::Complete) return {complete_graph(cfg.g_size)};
    const Dataset ds = read_dataset(cfg.dataset);
    std::vector<ProblemGraph> out;
    for (const auto& family : ds.families) {
        if (family.n > cfg.max_n) continue;
        for (auto& g : family.graphs(Split::Train)) out.push_back(std::move(g));
    }
    if (out.empty()) throw ConfigError("dataset has no training graphs with at most max_n nodes");
    return out;
}

std::vector<EvalGraph> evaluation_graphs(const RunConfig& cfg) {
    if (cfg.scenario == Scenario::Complete) return {{0, complete_graph(cfg.g_size)}};
    const Dataset ds = read_dataset(cfg.dataset);
    std::vector<EvalGraph> out;
    for (const auto& family : ds.families) {
        if (family.n > cfg.max_n) continue;
        for (const auto& r : family.records) {
            if (r.split == Split::Test) out.push_back({family.n * kGraphIdStride + r.id, r.graph});
        }
    }
    if (out.empty()) throw ConfigError("dataset has no test graphs with at most max_n nodes");
    return out;
}

double success_rate(std::span<const MetricsRecord> records) {
    if (records.empty()) throw ParameterError("success rate of an empty record set");
    const auto successes = std::count_if(records.begin(), records.end(), [](const auto& r) { return r.success; });
    return 100.0 * static_cast<double>(successes) / static_cast<double>(records.size());
}

Aggregate aggregate(std::span<const MetricsRecord> records) {
    Aggregate a;
    a.total = static_cast<int>(records.size());
    std::vector<int> qubits;
    for (const auto& r : records) {
        if (!r.success) continue;
        qubits.push_back(r.qubits);
        if (!a.best_qubits || r.qubits < *a.best_qubits) a.best_qubits = r.qubits;
    }
    a.successes = static_cast<int>(qubits.size());
    if (a.total > 0) a.success_rate = success_rate(records);
    if (!qubits.empty()) {
        const double n = static_cast<double>(qubits.size());
        a.mean_qubits = std::accumulate(qubits.begin(), qubits.end(), 0.0) / n;
        double sq = 0.0;
        for (const int q : qubits) sq += (q - a.mean_qubits) * (q - a.mean_qubits);
        a.std_qubits = std::sqrt(sq / n);
    }
    return a;
}

std::optional<double> qubit_efficiency_ratio(std::span<const MetricsRecord> rl, std::optional<int> baseline_best) {
    const auto best = aggregate(rl).best_qubits;
    if (!best || !baseline_best) return std::nullopt;
    return static_cast<double>(*baseline_best) / static_cast<double>(*best);
}

std::uint64_t evaluation_seed(std::uint64_t agent_seed, int graph_id) {
    return agent_seed * 10007u + static_cast<std::uint64_t>(graph_id);
}

void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
    workers = std::max(1, std::min(workers, count));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    const std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

std::vector<MetricsRecord> evaluate(const std::vector<Agent>& agents, const std::vector<EvalGraph>& graphs,
                                    const HardwareGraph& h, int episodes, AugmentMode mode, bool greedy,
                                    int workers) {
    if (episodes < 1) throw ConfigError("episodes must be >= 1");
    for (const auto& agent : agents) {
        for (const auto& g : graphs) check_compatible(agent, h, g.graph.node_count());
    }
    const bool augment = mode == AugmentMode::TrainTest;
    std::vector<std::vector<MetricsRecord>> per_agent(agents.size());
    parallel_for(static_cast<int>(agents.size()), workers, [&](int a) {
        const Agent& agent = agents[static_cast<std::size_t>(a)];
        EmbeddingEnv env(h, agent.max_g);
        auto& out = per_agent[static_cast<std::size_t>(a)];
        for (const auto& g : graphs) {
            Rng rng(evaluation_seed(agent.hp.seed, g.id));
            for (int e = 0; e < episodes; ++e) {
                const auto result = run_episode(agent, env, g.graph, rng, augment, greedy);
                out.push_back({g.id, agent.hp.seed, e, result.success, result.qubits});
            }
        }
    });
    std::vector<MetricsRecord> records;
    for (auto& part : per_agent) records.insert(records.end(), part.begin(), part.end());
    return records;
}

std::string records_to_csv(std::span<const MetricsRecord> records) {
    std::ostringstream out;
    out << "graph_id,agent_seed,episode,success,qubits\n";
    for (const auto& r : records) {
        out << r.graph_id << ',' << r.agent_seed << ',' << r.episode << ',' << (r.success ? 1 : 0) << ',' << r.qubits
            << '\n';
    }
    return out.str();
}

std::vector<MetricsRecord> records_from_csv(const std::string& text) {
    std::stringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "graph_id,agent_seed,episode,success,qubits") {
        throw ConfigError("results CSV has an unexpected header");
    }
    std::vector<MetricsRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_line(line);
        if (fields.size() != 5) throw ConfigError("malformed results row: " + line);
        try {
            out.push_back({std::stoi(fields[0]), std::stoull(fields[1]), std::stoi(fields[2]), fields[3] == "1",
                           std::stoi(fields[4])});
        } catch (const std::logic_error&) {
            throw ConfigError("malformed results row: " + line);
        }
    }
    return out;
}

std::vector<TrainResult> train_agents(const RunConfig& cfg, int workers) {
    cfg.validate();
    const HardwareGraph h = cfg.hardware();
    const auto graphs = training_graphs(cfg);
    const auto seeds = cfg.effective_seeds();
    std::vector<TrainResult> results(seeds.size());
    parallel_for(static_cast<int>(seeds.size()), workers, [&](int i) {
        TrainOptions options;
        options.hp = cfg.hp;
        options.hp.seed = seeds[static_cast<std::size_t>(i)];
        options.hp.total_steps = cfg.effective_steps();
        options.augment = cfg.augment;
        options.max_g = cfg.max_g();
        GraphSource source = cfg.scenario == Scenario::Complete
                                 ? GraphSource::single(graphs.front())
                                 : GraphSource::curriculum(graphs, cfg.episodes_per_size);
        results[static_cast<std::size_t>(i)] = train(source, h, options);
    });
    return results;
}

std::vector<QerRow> qer_report(const RunConfig& cfg, std::span<const MetricsRecord> records) {
    const HardwareGraph h = cfg.hardware();
    std::map<int, std::vector<MetricsRecord>> by_graph;
    for (const auto& r : records) by_graph[r.graph_id].push_back(r);
    std::vector<QerRow> rows;
    for (const auto& g : evaluation_graphs(cfg)) {
        const auto it = by_graph.find(g.id);
        if (it == by_graph.end()) continue;
        BaselineConfig bc;
        bc.tries = cfg.effective_baseline_tries();
        bc.seed = static_cast<std::uint64_t>(g.id);
        const auto baseline = heuristic_embed(g.graph, h, bc);
        QerRow row;
        row.graph_id = g.id;
        row.n = g.graph.node_count();
        row.rl = aggregate(it->second);
        if (baseline.success) row.baseline_best = baseline.qubits;
        row.qer = qubit_efficiency_ratio(it->second, row.baseline_best);
        rows.push_back(row);
    }
    return rows;
}

std::string qer_report_to_csv(const std::vector<QerRow>& rows) {
    std::ostringstream out;
    out.precision(10);
    out << "graph_id,n,episodes,successes,sr,mean_qubits,std_qubits,best_rl,best_baseline,qer\n";
    const auto opt = [](const auto& v) {
        std::ostringstream s;
        s.precision(10);
        if (v) s << *v; else s << "undefined";
        return s.str();
    };
    for (const auto& r : rows) {
        out << r.graph_id << ',' << r.n << ',' << r.rl.total << ',' << r.rl.successes << ',' << r.rl.success_rate
            << ',' << r.rl.mean_qubits << ',' << r.rl.std_qubits << ',' << opt(r.rl.best_qubits) << ','
            << opt(r.baseline_best) << ',' << opt(r.qer) << '\n';
    }
    return out.str();
}

}  // namespace qembed
