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
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qembed/problem_graph.hpp"

namespace qembed {

enum class Split { Train, Test };

struct GraphRecord {
    int id = 0;
    ProblemGraph graph;
    Split split = Split::Train;
};

/// Train/test records for one node count.
struct SplitFamily {
    int n = 0;
    std::vector<GraphRecord> records;

    std::size_t count(Split split) const;
    std::vector<ProblemGraph> graphs(Split split) const;
};

/// 80/20 holdout stratified on FamilyMember::stratum, with the per-stratum
/// test quota rounded so the global quota is round(0.2 N) exactly.
/// Records keep the family order; ids are 0..N-1.
SplitFamily split_holdout(const GeneratedFamily& family, std::uint64_t seed);

struct DatasetOptions {
    int min_n = 3;
    int max_n = 10;
    int train_per_n = 1000;
    int test_per_n = 250;
    std::uint64_t seed = 0;
};

struct Dataset {
    DatasetOptions options;
    std::vector<SplitFamily> families;
    std::vector<std::string> stalls;

    const SplitFamily* family(int n) const;
    nlohmann::ordered_json manifest() const;
};

/// Generates every family with sub-seed seed + n and splits it.
Dataset generate_dataset(const DatasetOptions& options);

/// {"id", "n", "edges", "split"} per line.
std::string to_jsonl(const SplitFamily& family);
SplitFamily from_jsonl(const std::string& text);

/// Writes graphs_n<N>.jsonl per family plus manifest.json.
void write_dataset(const Dataset& dataset, const std::filesystem::path& dir);
/// Reads manifest.json and the JSONL files it lists.
Dataset read_dataset(const std::filesystem::path& dir);

}  // namespace qembed
