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

// Command-line front end. Exit codes: 0 success, 2 configuration error,
// 3 run failure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

#include "qembed/agent.hpp"
#include "qembed/baseline.hpp"
#include "qembed/dataset.hpp"
#include "qembed/embedding.hpp"
#include "qembed/errors.hpp"
#include "qembed/experiments.hpp"
#include "qembed/topology.hpp"

namespace fs = std::filesystem;
using namespace qembed;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRun = 3;

/// A failure after the configuration was accepted.
struct RunFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw RunFailure("cannot write " + path.string());
}

void emit(const std::string& out, const std::string& text) {
    if (out.empty() || out == "-") {
        std::cout << text;
    } else {
        write_file(out, text);
    }
}

nlohmann::json parse_json(const std::string& text, const std::string& what) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("cannot parse " + what + ": " + e.what());
    }
}

/// "chimera:2" or "zephyr:3".
HardwareGraph parse_topology(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw ConfigError("topology must look like family:m, got '" + spec + "'");
    try {
        return HardwareGraph::build(parse_family(spec.substr(0, colon)), std::stoi(spec.substr(colon + 1)));
    } catch (const std::logic_error& e) {
        throw ConfigError("bad topology '" + spec + "': " + e.what());
    }
}

/// "K<n>" or a JSON file holding {"n", "edges"}.
ProblemGraph parse_graph(const std::string& spec) {
    if (spec.size() > 1 && (spec[0] == 'K' || spec[0] == 'k') && !fs::exists(spec)) {
        try {
            return complete_graph(std::stoi(spec.substr(1)));
        } catch (const std::logic_error& e) {
            throw ConfigError("bad graph '" + spec + "': " + e.what());
        }
    }
    const auto j = parse_json(read_file(spec), spec);
    try {
        return ProblemGraph(j.at("n").get<int>(), j.at("edges").get<std::vector<Edge>>());
    } catch (const std::exception& e) {
        throw ConfigError("bad graph file " + spec + ": " + e.what());
    }
}

RunConfig load_config(const std::string& path) {
    if (path.empty()) throw ConfigError("--config is required");
    return RunConfig::from_json(parse_json(read_file(path), path));
}

fs::path checkpoint_path(const fs::path& dir, std::uint64_t seed) {
    return dir / ("agent_seed" + std::to_string(seed) + ".qrle");
}

int default_workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reinforcement-learning minor embedding for Chimera and Zephyr hardware graphs"};
    app.require_subcommand(1);

    // topo gen
    auto* topo = app.add_subcommand("topo", "Hardware topologies");
    topo->require_subcommand(1);
    auto* topo_gen = topo->add_subcommand("gen", "Write the edge list of a hardware graph");
    std::string topo_family;
    int topo_size = 0;
    std::string topo_format = "adjacency";
    std::string topo_out;
    topo_gen->add_option("--family", topo_family, "chimera or zephyr")->required();
    topo_gen->add_option("--size", topo_size, "Cells per side m")->required();
    topo_gen->add_option("--format", topo_format, "adjacency or json")->check(CLI::IsMember({"adjacency", "json"}));
    topo_gen->add_option("--out", topo_out, "Edge list file (default stdout); a descriptor JSON is written next to it");

    // dataset gen
    auto* dataset = app.add_subcommand("dataset", "Random connected graph datasets");
    dataset->require_subcommand(1);
    auto* dataset_gen = dataset->add_subcommand("gen", "Generate and split the graph families");
    DatasetOptions ds_opts;
    std::string ds_out;
    dataset_gen->add_option("--out", ds_out, "Output directory")->required();
    dataset_gen->add_option("--seed", ds_opts.seed, "Generator seed");
    dataset_gen->add_option("--min-n", ds_opts.min_n, "Smallest node count");
    dataset_gen->add_option("--max-n", ds_opts.max_n, "Largest node count");
    dataset_gen->add_option("--train", ds_opts.train_per_n, "Training graphs per node count");
    dataset_gen->add_option("--test", ds_opts.test_per_n, "Test graphs per node count");

    // train
    auto* train_cmd = app.add_subcommand("train", "Train one agent per seed");
    std::string train_config;
    std::string train_out;
    std::vector<std::uint64_t> train_seeds;
    long train_steps = 0;
    std::string train_augment;
    int train_workers = default_workers();
    train_cmd->add_option("--config", train_config, "Run config JSON")->required();
    train_cmd->add_option("--out", train_out, "Directory for checkpoints and traces")->required();
    train_cmd->add_option("--seed", train_seeds, "Agent seed(s); overrides the config");
    train_cmd->add_option("--steps", train_steps, "Environment steps per agent; overrides the config");
    train_cmd->add_option("--augment", train_augment, "off, train or train+test");
    train_cmd->add_option("--workers", train_workers, "Agents trained in parallel");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate trained agents");
    std::string eval_config;
    std::string eval_checkpoints;
    std::string eval_out;
    std::vector<std::uint64_t> eval_seeds;
    int eval_episodes = 0;
    std::string eval_augment;
    bool eval_greedy = false;
    int eval_workers = default_workers();
    eval_cmd->add_option("--config", eval_config, "Run config JSON")->required();
    eval_cmd->add_option("--checkpoints", eval_checkpoints, "Directory written by train")->required();
    eval_cmd->add_option("--out", eval_out, "Results CSV (default stdout)");
    eval_cmd->add_option("--seed", eval_seeds, "Agent seed(s); overrides the config");
    eval_cmd->add_option("--episodes", eval_episodes, "Episodes per graph and agent");
    eval_cmd->add_option("--augment", eval_augment, "off, train or train+test");
    eval_cmd->add_flag("--greedy", eval_greedy, "Arg-max actions instead of sampling");
    eval_cmd->add_option("--workers", eval_workers, "Agents evaluated in parallel");

    // baseline embed
    auto* baseline = app.add_subcommand("baseline", "Heuristic embedder");
    baseline->require_subcommand(1);
    auto* baseline_embed = baseline->add_subcommand("embed", "Embed one graph with the heuristic");
    std::string bl_graph;
    std::string bl_topology;
    std::string bl_out;
    BaselineConfig bl_cfg;
    baseline_embed->add_option("--graph", bl_graph, "K<n> or graph JSON {n, edges}")->required();
    baseline_embed->add_option("--topology", bl_topology, "family:m")->required();
    baseline_embed->add_option("--tries", bl_cfg.tries, "Restarts");
    baseline_embed->add_option("--passes", bl_cfg.improvement_passes, "Maximum refinement passes");
    baseline_embed->add_option("--weight-base", bl_cfg.weight_base, "Congestion base (0 = |V(H)|)");
    baseline_embed->add_option("--seed", bl_cfg.seed, "Seed");
    baseline_embed->add_option("--out", bl_out, "Embedding JSON (default stdout)");

    // embed validate
    auto* embed = app.add_subcommand("embed", "Embedding utilities");
    embed->require_subcommand(1);
    auto* embed_validate = embed->add_subcommand("validate", "Check an embedding against G and H");
    std::string ev_graph;
    std::string ev_topology;
    std::string ev_embedding;
    embed_validate->add_option("--graph", ev_graph, "K<n> or graph JSON {n, edges}")->required();
    embed_validate->add_option("--topology", ev_topology, "family:m (default: from the embedding file)");
    embed_validate->add_option("--embedding", ev_embedding, "Embedding JSON")->required();

    // report qer
    auto* report = app.add_subcommand("report", "Reports");
    report->require_subcommand(1);
    auto* report_qer = report->add_subcommand("qer", "Success rate and qubit efficiency per graph");
    std::string rq_config;
    std::string rq_results;
    std::string rq_out;
    report_qer->add_option("--config", rq_config, "Run config JSON")->required();
    report_qer->add_option("--results", rq_results, "Results CSV written by eval")->required();
    report_qer->add_option("--out", rq_out, "Report CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitConfig;
    }

    try {
        if (*topo_gen) {
            const HardwareGraph h = parse_topology(topo_family + ":" + std::to_string(topo_size));
            if (topo_format == "json") {
                nlohmann::json j = topology_descriptor(h);
                j["edges"] = h.edges();
                emit(topo_out, j.dump() + "\n");
            } else {
                emit(topo_out, export_adjacency(h));
                if (!topo_out.empty() && topo_out != "-") {
                    fs::path descriptor = fs::path(topo_out).replace_extension(".json");
                    if (descriptor == fs::path(topo_out)) descriptor += ".descriptor.json";
                    write_file(descriptor, topology_descriptor(h).dump() + "\n");
                }
            }
        } else if (*dataset_gen) {
            Dataset ds;
            try {
                ds = generate_dataset(ds_opts);
            } catch (const ParameterError& e) {
                throw ConfigError(e.what());
            }
            write_dataset(ds, ds_out);
            for (const auto& stall : ds.stalls) std::cerr << "note: " << stall << "\n";
            std::cout << ds.manifest().dump(2) << "\n";
        } else if (*train_cmd) {
            RunConfig cfg = load_config(train_config);
            if (!train_seeds.empty()) {
                cfg.seeds = train_seeds;
                cfg.agents = static_cast<int>(train_seeds.size());
            }
            if (train_steps > 0) cfg.steps = train_steps;
            if (!train_augment.empty()) cfg.augment = parse_augment_mode(train_augment);
            cfg.validate();
            const auto results = train_agents(cfg, train_workers);
            const auto seeds = cfg.effective_seeds();
            fs::create_directories(train_out);
            bool aborted = false;
            for (std::size_t i = 0; i < results.size(); ++i) {
                save_checkpoint(results[i].agent, checkpoint_path(train_out, seeds[i]));
                write_file(fs::path(train_out) / ("trace_seed" + std::to_string(seeds[i]) + ".csv"),
                           trace_to_csv(results[i].trace));
                std::cout << "seed " << seeds[i] << ": " << results[i].agent.trained_steps << " steps, "
                          << results[i].episodes << " episodes";
                if (!results[i].trace.empty()) std::cout << ", final mean length " << results[i].trace.back().mean_len;
                std::cout << "\n";
                if (results[i].aborted) {
                    std::cerr << "seed " << seeds[i] << " aborted: " << results[i].abort_reason << "\n";
                    aborted = true;
                }
            }
            write_file(fs::path(train_out) / "run_config.json", cfg.to_json().dump(2) + "\n");
            if (aborted) return kExitRun;
        } else if (*eval_cmd) {
            RunConfig cfg = load_config(eval_config);
            if (!eval_seeds.empty()) {
                cfg.seeds = eval_seeds;
                cfg.agents = static_cast<int>(eval_seeds.size());
            }
            if (eval_episodes > 0) cfg.episodes = eval_episodes;
            if (!eval_augment.empty()) cfg.augment = parse_augment_mode(eval_augment);
            cfg.validate();
            std::vector<Agent> agents;
            for (const auto seed : cfg.effective_seeds()) {
                try {
                    agents.push_back(load_checkpoint(checkpoint_path(eval_checkpoints, seed)));
                } catch (const CheckpointError& e) {
                    throw ConfigError(e.what());
                }
            }
            const auto records = evaluate(agents, evaluation_graphs(cfg), cfg.hardware(), cfg.episodes, cfg.augment,
                                          eval_greedy || cfg.greedy, eval_workers);
            emit(eval_out, records_to_csv(records));
            const auto agg = aggregate(records);
            std::cerr << "episodes " << agg.total << ", SR " << agg.success_rate << "%";
            if (agg.best_qubits) std::cerr << ", best " << *agg.best_qubits << " qubits";
            std::cerr << "\n";
        } else if (*baseline_embed) {
            const ProblemGraph g = parse_graph(bl_graph);
            const HardwareGraph h = parse_topology(bl_topology);
            BaselineResult result;
            try {
                result = heuristic_embed(g, h, bl_cfg);
            } catch (const ParameterError& e) {
                throw ConfigError(e.what());
            }
            if (!result.success) {
                nlohmann::json tries = nlohmann::json::array();
                for (const auto& t : result.tries) tries.push_back({{"overlap", t.overlap}, {"qubits", t.qubits}});
                std::cerr << "no valid embedding in " << result.tries.size() << " tries: " << tries.dump() << "\n";
                return kExitRun;
            }
            nlohmann::json j = embedding_to_json(result.embedding, 0, h);
            j["qubits"] = result.qubits;
            j["best_try"] = result.best_try;
            emit(bl_out, j.dump() + "\n");
        } else if (*embed_validate) {
            const ProblemGraph g = parse_graph(ev_graph);
            const auto j = parse_json(read_file(ev_embedding), ev_embedding);
            const auto load = [&] {
                try {
                    return std::pair{ev_topology.empty()
                                         ? HardwareGraph::build(parse_family(j.at("topology").at("family").get<std::string>()),
                                                                j.at("topology").at("m").get<int>())
                                         : parse_topology(ev_topology),
                                     embedding_from_json(j)};
                } catch (const ConfigError&) {
                    throw;
                } catch (const std::exception& ex) {
                    throw ConfigError(std::string("bad embedding file: ") + ex.what());
                }
            };
            const auto [h, e] = load();
            ValidationResult v;
            try {
                v = validate_embedding(g, h, e);
            } catch (const StructuralError& ex) {
                throw ConfigError(ex.what());
            }
            nlohmann::json out = {{"valid", v.valid()},
                                  {"clause", clause_name(v.clause)},
                                  {"nodes", v.nodes},
                                  {"message", v.message},
                                  {"qubits", qubit_count(e)}};
            std::cout << out.dump() << "\n";
            if (!v.valid()) return kExitRun;
        } else if (*report_qer) {
            const RunConfig cfg = load_config(rq_config);
            const auto records = records_from_csv(read_file(rq_results));
            if (records.empty()) throw ConfigError("results file has no rows");
            emit(rq_out, qer_report_to_csv(qer_report(cfg, records)));
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ParameterError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "run failed: " << e.what() << "\n";
        return kExitRun;
    }
    return 0;
}
