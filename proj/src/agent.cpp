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

#include "qembed/agent.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

#include "qembed/errors.hpp"

namespace qembed {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

std::uint32_t get_u32(const std::string& in, std::size_t at) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
    return v;
}

struct NamedTensor {
    std::string name;
    MatrixX<float>* tensor;
};

std::vector<NamedTensor> named_tensors(ActorCritic<float>& nets) {
    std::vector<NamedTensor> out;
    for (auto [prefix, net] : {std::pair{"policy", &nets.policy}, std::pair{"value", &nets.value}}) {
        auto& tensors = net->tensors();
        for (std::size_t i = 0; i < tensors.size(); ++i) {
            const std::string kind = i % 2 == 0 ? "W" : "b";
            out.push_back({std::string(prefix) + "." + kind + std::to_string(i / 2), &tensors[i]});
        }
    }
    return out;
}

std::vector<int> hidden_dims(const Mlp<float>& net) {
    const auto& dims = net.dims();
    return {dims.begin() + 1, dims.end() - 1};
}

/// Draws one set of shore permutations per episode and a random subset of
/// the eight transforms per step.
class Augmenter {
  public:
    Augmenter(const HardwareGraph& h, Rng& rng) : transforms_(enumerate_transforms(h, rng)) {}

    Permutation sample(Rng& rng) const { return sample_transform_set(transforms_, rng); }

  private:
    std::array<Transform, kTransformCount> transforms_;
};

}  // namespace

std::string serialize_checkpoint(const Agent& agent) {
    Agent copy = agent;
    const auto tensors = named_tensors(copy.nets);
    nlohmann::json listing = nlohmann::json::array();
    for (const auto& t : tensors) listing.push_back({{"name", t.name}, {"shape", {t.tensor->rows(), t.tensor->cols()}}});
    const nlohmann::json header = {
        {"topology", {{"family", family_name(agent.family)}, {"m", agent.m}}},
        {"max_g", agent.max_g},
        {"input", agent.nets.input_size()},
        {"actions", agent.nets.action_count()},
        {"hidden", hidden_dims(agent.nets.policy)},
        {"hyperparams", agent.hp.to_json()},
        {"seed", agent.hp.seed},
        {"steps", agent.trained_steps},
        {"augment", augment_mode_name(agent.augment)},
        {"tensors", listing},
    };
    const std::string text = header.dump();

    std::string out(kCheckpointMagic, sizeof kCheckpointMagic);
    put_u32(out, kCheckpointVersion);
    put_u32(out, static_cast<std::uint32_t>(text.size()));
    out += text;
    for (const auto& t : tensors) {
        const auto& w = *t.tensor;
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index c = 0; c < w.cols(); ++c) put_u32(out, std::bit_cast<std::uint32_t>(w(r, c)));
        }
    }
    return out;
}

Agent parse_checkpoint(const std::string& bytes) {
    if (bytes.size() < 12 || !std::equal(std::begin(kCheckpointMagic), std::end(kCheckpointMagic), bytes.begin())) {
        throw CheckpointError("not a checkpoint: bad magic");
    }
    const std::uint32_t version = get_u32(bytes, 4);
    if (version != kCheckpointVersion) {
        throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
    }
    const std::size_t header_len = get_u32(bytes, 8);
    if (bytes.size() < 12 + header_len) throw CheckpointError("checkpoint truncated inside the header");

    Agent agent;
    std::size_t expected_floats = 0;
    try {
        const auto header = nlohmann::json::parse(bytes.substr(12, header_len));
        agent.family = parse_family(header.at("topology").at("family").get<std::string>());
        agent.m = header.at("topology").at("m").get<int>();
        agent.max_g = header.at("max_g").get<int>();
        agent.hp = Hyperparams::from_json(header.at("hyperparams"));
        agent.hp.seed = header.at("seed").get<std::uint64_t>();
        agent.trained_steps = header.at("steps").get<long>();
        agent.augment = parse_augment_mode(header.at("augment").get<std::string>());
        agent.nets = ActorCritic<float>(header.at("input").get<int>(), header.at("actions").get<int>(),
                                        header.at("hidden").get<std::vector<int>>());
        const auto tensors = named_tensors(agent.nets);
        const auto& listing = header.at("tensors");
        if (listing.size() != tensors.size()) throw CheckpointError("tensor count does not match the architecture");
        for (std::size_t i = 0; i < tensors.size(); ++i) {
            const auto shape = listing[i].at("shape").get<std::vector<long>>();
            if (listing[i].at("name").get<std::string>() != tensors[i].name || shape.size() != 2 ||
                shape[0] != tensors[i].tensor->rows() || shape[1] != tensors[i].tensor->cols()) {
                throw CheckpointError("tensor " + std::to_string(i) + " does not match the architecture");
            }
            expected_floats += static_cast<std::size_t>(tensors[i].tensor->size());
        }
    } catch (const nlohmann::json::exception& e) {
        throw CheckpointError(std::string("bad checkpoint header: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw CheckpointError(std::string("bad checkpoint header: ") + e.what());
    }

    const std::size_t data_at = 12 + header_len;
    if (bytes.size() != data_at + 4 * expected_floats) {
        throw CheckpointError(bytes.size() < data_at + 4 * expected_floats ? "checkpoint truncated in tensor data"
                                                                            : "trailing bytes after tensor data");
    }
    std::size_t at = data_at;
    for (const auto& t : named_tensors(agent.nets)) {
        auto& w = *t.tensor;
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index c = 0; c < w.cols(); ++c, at += 4) w(r, c) = std::bit_cast<float>(get_u32(bytes, at));
        }
    }
    return agent;
}

void save_checkpoint(const Agent& agent, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot open " + path.string() + " for writing");
    const std::string bytes = serialize_checkpoint(agent);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw CheckpointError("failed writing " + path.string());
}

Agent load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_checkpoint(buffer.str());
}

GraphSource GraphSource::single(ProblemGraph g) {
    GraphSource s;
    s.max_nodes_ = g.node_count();
    s.buckets_.push_back({std::move(g)});
    s.order_ = {0};
    return s;
}

GraphSource GraphSource::curriculum(std::vector<ProblemGraph> graphs, long episodes_per_size) {
    if (graphs.empty()) throw ParameterError("graph source needs at least one graph");
    if (episodes_per_size < 1) throw ParameterError("episodes_per_size must be >= 1");
    std::map<int, std::vector<ProblemGraph>> by_size;
    for (auto& g : graphs) by_size[g.node_count()].push_back(std::move(g));
    GraphSource s;
    for (auto& [n, bucket] : by_size) s.buckets_.push_back(std::move(bucket));
    s.max_nodes_ = by_size.rbegin()->first;
    s.episodes_per_size_ = episodes_per_size;
    return s;
}

const ProblemGraph& GraphSource::next(Rng& rng) {
    if (episodes_per_size_ > 0 && episodes_in_bucket_ == episodes_per_size_) {
        bucket_ = (bucket_ + 1) % buckets_.size();
        episodes_in_bucket_ = 0;
        order_.clear();
    }
    const auto& bucket = buckets_[bucket_];
    if (order_.empty() || cursor_ == order_.size()) {
        order_.resize(bucket.size());
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        rng.shuffle(order_);
        cursor_ = 0;
    }
    ++episodes_in_bucket_;
    return bucket[order_[cursor_++]];
}

void check_compatible(const Agent& agent, const HardwareGraph& h, int n) {
    if (h.family() != agent.family || h.size() != agent.m || h.node_count() != agent.nets.action_count()) {
        throw ConfigError("agent was trained for " + std::string(family_name(agent.family)) + " m=" +
                          std::to_string(agent.m) + ", not " + std::string(family_name(h.family())) + " m=" +
                          std::to_string(h.size()));
    }
    if (n > agent.max_g) {
        throw ConfigError("graph with " + std::to_string(n) + " nodes exceeds the agent's max_g of " +
                          std::to_string(agent.max_g));
    }
}

TrainResult train(GraphSource& source, const HardwareGraph& h, const TrainOptions& options) {
    const Hyperparams& hp = options.hp;
    hp.validate();
    const int max_g = options.max_g > 0 ? options.max_g : source.max_nodes();
    if (max_g < source.max_nodes()) throw ConfigError("max_g is smaller than the largest training graph");

    EmbeddingEnv env(h, max_g);
    const int obs_size = env.layout().size();
    const int actions = h.node_count();
    PpoLearner learner(obs_size, actions, hp);
    // the initial weights use the seed directly; the rollout stream is offset
    Rng rng(hp.seed * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL);
    const bool augment = options.augment != AugmentMode::Off;

    TrainResult result;
    std::optional<Augmenter> augmenter;
    Observation obs = env.reset(source.next(rng));
    if (augment) augmenter.emplace(h, rng);
    long steps = 0;
    int batch = 0;
    std::vector<int> finished;
    while (steps < hp.total_steps) {
        const int capacity = static_cast<int>(std::min<long>(hp.horizon, hp.total_steps - steps));
        RolloutBuffer buffer(obs_size, actions, capacity);
        finished.clear();
        while (!buffer.full()) {
            Permutation pi;
            Observation view = obs;
            ActionMask view_mask = env.mask();
            if (augment) {
                pi = augmenter->sample(rng);
                view = apply_to_observation(obs, env.layout(), pi);
                view_mask = apply_to_mask(view_mask, pi);
            }
            const Decision d = learner.act(view, view_mask, rng);
            const int action = augment ? map_action(d.action, pi) : d.action;
            const StepOutcome out = env.step(action);
            buffer.add(view, view_mask, d.action, d.log_prob, out.reward, d.value, out.terminated);
            if (out.terminated) {
                finished.push_back(env.step_count());
                ++result.episodes;
                obs = env.reset(source.next(rng));
                if (augment) augmenter.emplace(h, rng);
            } else {
                obs = out.observation;
            }
        }
        steps += capacity;
        buffer.finish(learner.value(obs), hp.gamma, hp.gae_lambda);
        auto diag = learner.update(buffer, rng);
        const bool aborted = diag.aborted;
        if (aborted) {
            result.aborted = true;
            result.abort_reason = diag.abort_reason + " in update " + std::to_string(batch);
        }
        result.updates.push_back(std::move(diag));

        const TraceRow* row = nullptr;
        if (!finished.empty()) {
            const double n = static_cast<double>(finished.size());
            const double mean = std::accumulate(finished.begin(), finished.end(), 0.0) / n;
            double sq = 0.0;
            for (const int len : finished) sq += (len - mean) * (len - mean);
            result.trace.push_back({batch, mean, std::sqrt(sq / n)});
            row = &result.trace.back();
        }
        if (options.progress) options.progress(steps, row);
        ++batch;
        if (aborted) break;
    }

    result.agent.family = h.family();
    result.agent.m = h.size();
    result.agent.max_g = max_g;
    result.agent.hp = hp;
    result.agent.augment = options.augment;
    result.agent.trained_steps = steps;
    result.agent.nets = learner.nets();
    return result;
}

std::string trace_to_csv(const std::vector<TraceRow>& trace) {
    std::ostringstream out;
    out << "batch_index,mean_len,std_len\n";
    out.precision(10);
    for (const auto& row : trace) out << row.batch_index << ',' << row.mean_len << ',' << row.std_len << '\n';
    return out.str();
}

EpisodeResult run_episode(const Agent& agent, EmbeddingEnv& env, const ProblemGraph& g, Rng& rng, bool augment,
                          bool greedy) {
    check_compatible(agent, env.hardware(), g.node_count());
    if (env.layout().max_g != agent.max_g) throw ConfigError("environment max_g differs from the agent's");
    Observation obs = env.reset(g);
    std::optional<Augmenter> augmenter;
    if (augment) augmenter.emplace(env.hardware(), rng);
    while (!env.terminated()) {
        int action;
        if (augment) {
            const Permutation pi = augmenter->sample(rng);
            const auto d = decide(agent.nets, apply_to_observation(obs, env.layout(), pi),
                                  apply_to_mask(env.mask(), pi), rng, greedy);
            action = map_action(d.action, pi);
        } else {
            action = decide(agent.nets, obs, env.mask(), rng, greedy).action;
        }
        obs = env.step(action).observation;
    }
    EpisodeResult result;
    result.success = env.is_success();
    result.embedding = env.embedding();
    result.qubits = static_cast<int>(qubit_count(result.embedding));
    result.steps = env.step_count();
    return result;
}

}  // namespace qembed
