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
#include <string>
#include <vector>

#include "qembed/augmentation.hpp"
#include "qembed/environment.hpp"
#include "qembed/ppo.hpp"
#include "qembed/problem_graph.hpp"
#include "qembed/topology.hpp"

namespace qembed {

/// A trained (or freshly initialised) policy together with the setting it
/// was trained for.
struct Agent {
    Family family = Family::Chimera;
    int m = 1;
    int max_g = 0;
    Hyperparams hp;
    AugmentMode augment = AugmentMode::Off;
    long trained_steps = 0;
    ActorCritic<float> nets;

    int observation_size() const { return ObservationLayout{max_g, nets.action_count()}.size(); }
};

inline constexpr char kCheckpointMagic[4] = {'Q', 'R', 'L', 'E'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

/// "QRLE", u32 version, u32 header length, JSON header, then every tensor as
/// row-major little-endian f32 in the order listed by the header.
std::string serialize_checkpoint(const Agent& agent);
/// Throws CheckpointError on bad magic, version, header or truncated data.
Agent parse_checkpoint(const std::string& bytes);
void save_checkpoint(const Agent& agent, const std::filesystem::path& path);
Agent load_checkpoint(const std::filesystem::path& path);

/// Supplies training graphs. A single graph repeats forever; a dataset
/// walks node counts in ascending order, `episodes_per_size` episodes each,
/// cycling through a shuffled copy of each size's graphs, and starts over
/// from the smallest size after the largest.
class GraphSource {
  public:
    static GraphSource single(ProblemGraph g);
    static GraphSource curriculum(std::vector<ProblemGraph> graphs, long episodes_per_size = 1000);

    int max_nodes() const noexcept { return max_nodes_; }
    const ProblemGraph& next(Rng& rng);

  private:
    std::vector<std::vector<ProblemGraph>> buckets_;
    std::vector<std::size_t> order_;
    std::size_t cursor_ = 0;
    std::size_t bucket_ = 0;
    long episodes_in_bucket_ = 0;
    long episodes_per_size_ = 0;
    int max_nodes_ = 0;
};

/// Mean and population standard deviation of the lengths of episodes that
/// finished during one rollout.
struct TraceRow {
    int batch_index = 0;
    double mean_len = 0.0;
    double std_len = 0.0;
};

struct TrainResult {
    Agent agent;
    std::vector<TraceRow> trace;
    std::vector<UpdateDiagnostics> updates;
    long episodes = 0;
    bool aborted = false;
    std::string abort_reason;
};

struct TrainOptions {
    Hyperparams hp;
    AugmentMode augment = AugmentMode::Off;
    /// Observation width for S_G and S_R; 0 means source.max_nodes().
    int max_g = 0;
    /// Called after every update with (steps so far, last trace row or null).
    std::function<void(long, const TraceRow*)> progress;
};

/// Runs collect/update rounds until exactly hp.total_steps environment steps
/// have been taken (the last rollout is shortened if needed).
TrainResult train(GraphSource& source, const HardwareGraph& h, const TrainOptions& options);

std::string trace_to_csv(const std::vector<TraceRow>& trace);

struct EpisodeResult {
    bool success = false;
    int qubits = 0;
    int steps = 0;
    Embedding embedding;
};

/// One stochastic (or greedy) episode. With augmentation a fresh random
/// transform set is drawn per step, as during training. Success is the
/// independent validator's verdict.
EpisodeResult run_episode(const Agent& agent, EmbeddingEnv& env, const ProblemGraph& g, Rng& rng,
                          bool augment, bool greedy = false);

/// Throws ConfigError if the agent cannot act on `h` or on graphs of `n` nodes.
void check_compatible(const Agent& agent, const HardwareGraph& h, int n);

}  // namespace qembed
