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

#include "qembed/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "qembed/errors.hpp"

namespace qembed {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string split_name(Split split) { return split == Split::Train ? "train" : "test"; }

Split parse_split(const std::string& name) {
    if (name == "train") return Split::Train;
    if (name == "test") return Split::Test;
    throw StructuralError("unknown split '" + name + "'");
}

std::string family_file(int n) { return "graphs_n" + std::to_string(n) + ".jsonl"; }

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StructuralError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw StructuralError("cannot write " + path.string());
    out << text;
}

}  // namespace

std::size_t SplitFamily::count(Split split) const {
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [split](const GraphRecord& r) { return r.split == split; }));
}

std::vector<ProblemGraph> SplitFamily::graphs(Split split) const {
    std::vector<ProblemGraph> out;
    for (const auto& r : records) {
        if (r.split == split) out.push_back(r.graph);
    }
    return out;
}

SplitFamily split_holdout(const GeneratedFamily& family, std::uint64_t seed) {
    Rng rng(seed);
    const std::size_t total = family.members.size();
    // round(0.2 N) in integers
    const std::size_t test_total = (2 * total + 5) / 10;

    std::map<int, std::vector<std::size_t>> strata;
    for (std::size_t i = 0; i < total; ++i) strata[family.members[i].stratum].push_back(i);

    // floor of each stratum's exact share, then hand out the remainder by
    // largest fractional part (ties broken by stratum order)
    struct Share {
        int stratum;
        std::size_t quota;
        std::size_t remainder_tenths;
    };
    std::vector<Share> shares;
    std::size_t assigned = 0;
    for (const auto& [stratum, members] : strata) {
        const std::size_t scaled = 2 * members.size();
        shares.push_back({stratum, scaled / 10, scaled % 10});
        assigned += scaled / 10;
    }
    std::vector<std::size_t> order(shares.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return shares[a].remainder_tenths > shares[b].remainder_tenths;
    });
    for (std::size_t i = 0; assigned < test_total && i < order.size(); ++i) {
        ++shares[order[i]].quota;
        ++assigned;
    }

    SplitFamily out;
    out.n = family.n;
    out.records.resize(total);
    for (std::size_t i = 0; i < total; ++i) out.records[i] = {static_cast<int>(i), family.members[i].graph, Split::Train};
    for (const auto& share : shares) {
        auto members = strata[share.stratum];
        rng.shuffle(members);
        for (std::size_t i = 0; i < share.quota; ++i) out.records[members[i]].split = Split::Test;
    }
    return out;
}

const SplitFamily* Dataset::family(int n) const {
    for (const auto& f : families) {
        if (f.n == n) return &f;
    }
    return nullptr;
}

nlohmann::ordered_json Dataset::manifest() const {
    ordered_json m;
    m["seed"] = options.seed;
    m["min_n"] = options.min_n;
    m["max_n"] = options.max_n;
    m["train_per_n"] = options.train_per_n;
    m["test_per_n"] = options.test_per_n;
    ordered_json fams = ordered_json::array();
    for (const auto& f : families) {
        ordered_json entry;
        entry["n"] = f.n;
        entry["file"] = family_file(f.n);
        entry["train"] = f.count(Split::Train);
        entry["test"] = f.count(Split::Test);
        fams.push_back(entry);
    }
    m["families"] = fams;
    m["stalls"] = stalls;
    return m;
}

Dataset generate_dataset(const DatasetOptions& options) {
    if (options.min_n < 3 || options.max_n > 10 || options.min_n > options.max_n) {
        throw ParameterError("dataset node range must lie within [3, 10]");
    }
    if (options.train_per_n < 0 || options.test_per_n < 0) throw ParameterError("negative dataset size");
    Dataset dataset;
    dataset.options = options;
    const int target = options.train_per_n + options.test_per_n;
    for (int n = options.min_n; n <= options.max_n; ++n) {
        const std::uint64_t sub_seed = options.seed + static_cast<std::uint64_t>(n);
        auto family = generate_family(n, target, sub_seed);
        dataset.stalls.insert(dataset.stalls.end(), family.stalls.begin(), family.stalls.end());
        dataset.families.push_back(split_holdout(family, sub_seed));
    }
    return dataset;
}

std::string to_jsonl(const SplitFamily& family) {
    std::string out;
    for (const auto& r : family.records) {
        ordered_json line;
        line["id"] = r.id;
        line["n"] = r.graph.node_count();
        ordered_json edges = ordered_json::array();
        for (const auto& [a, b] : r.graph.edges()) edges.push_back({a, b});
        line["edges"] = edges;
        line["split"] = split_name(r.split);
        out += line.dump();
        out += '\n';
    }
    return out;
}

SplitFamily from_jsonl(const std::string& text) {
    SplitFamily family;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        const int n = j.at("n").get<int>();
        std::vector<Edge> edges;
        for (const auto& e : j.at("edges")) edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        if (family.records.empty()) family.n = n;
        if (n != family.n) throw StructuralError("mixed node counts in one JSONL file");
        family.records.push_back({j.at("id").get<int>(), ProblemGraph(n, std::move(edges)),
                                  parse_split(j.at("split").get<std::string>())});
    }
    return family;
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& f : dataset.families) write_file(dir / family_file(f.n), to_jsonl(f));
    write_file(dir / "manifest.json", dataset.manifest().dump(2) + "\n");
}

Dataset read_dataset(const std::filesystem::path& dir) {
    const auto manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
    Dataset dataset;
    dataset.options.seed = manifest.at("seed").get<std::uint64_t>();
    dataset.options.min_n = manifest.at("min_n").get<int>();
    dataset.options.max_n = manifest.at("max_n").get<int>();
    dataset.options.train_per_n = manifest.at("train_per_n").get<int>();
    dataset.options.test_per_n = manifest.at("test_per_n").get<int>();
    for (const auto& entry : manifest.at("families")) {
        auto family = from_jsonl(read_file(dir / entry.at("file").get<std::string>()));
        family.n = entry.at("n").get<int>();
        dataset.families.push_back(std::move(family));
    }
    if (manifest.contains("stalls")) dataset.stalls = manifest.at("stalls").get<std::vector<std::string>>();
    return dataset;
}

}  // namespace qembed
