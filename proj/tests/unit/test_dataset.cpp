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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include <unistd.h>

#include "qembed/dataset.hpp"
#include "qembed/errors.hpp"

namespace qembed {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("qembed_test_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    return dir;
}

TEST(Split, GlobalTestQuotaIsRoundedFifth) {
    GeneratedFamily family{4, {}, {}};
    for (const auto& g : generate_small_family(4)) family.members.push_back({g, 0});
    const auto split = split_holdout(family, 1);
    EXPECT_EQ(split.count(Split::Test), 8u);
    EXPECT_EQ(split.count(Split::Train), 30u);
    EXPECT_EQ(split.records.size(), 38u);
}

TEST(Split, StratifiedQuotasFollowStratumSizes) {
    const auto family = generate_family(7, 1250, 9);
    const auto split = split_holdout(family, 9);
    EXPECT_EQ(split.count(Split::Test), 250u);
    std::map<int, std::pair<int, int>> per;  // stratum -> (total, test)
    for (std::size_t i = 0; i < split.records.size(); ++i) {
        auto& [total, test] = per[family.members[i].stratum];
        ++total;
        test += split.records[i].split == Split::Test ? 1 : 0;
    }
    for (const auto& [stratum, counts] : per) {
        EXPECT_LE(std::abs(counts.second - 0.2 * counts.first), 1.0) << stratum;
    }
}

TEST(Dataset, SameSeedIsByteIdentical) {
    DatasetOptions opt;
    opt.min_n = 3;
    opt.max_n = 7;
    opt.seed = 5;
    const auto a = scratch_dir("a");
    const auto b = scratch_dir("b");
    write_dataset(generate_dataset(opt), a);
    write_dataset(generate_dataset(opt), b);
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
        EXPECT_EQ(slurp(entry.path()), slurp(b / entry.path().filename())) << entry.path();
        ++files;
    }
    EXPECT_EQ(files, 6u);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Dataset, SplitCountsAndDisjointness) {
    DatasetOptions opt;
    opt.min_n = 3;
    opt.max_n = 7;
    opt.seed = 0;
    const auto ds = generate_dataset(opt);
    const std::map<int, std::pair<std::size_t, std::size_t>> expected{
        {3, {3, 1}}, {4, {30, 8}}, {5, {582, 146}}, {6, {1000, 250}}, {7, {1000, 250}}};
    for (const auto& [n, counts] : expected) {
        const auto* f = ds.family(n);
        ASSERT_NE(f, nullptr);
        EXPECT_EQ(f->count(Split::Train), counts.first) << n;
        EXPECT_EQ(f->count(Split::Test), counts.second) << n;
        std::set<std::uint64_t> train;
        for (const auto& g : f->graphs(Split::Train)) train.insert(g.edge_key());
        for (const auto& g : f->graphs(Split::Test)) EXPECT_FALSE(train.contains(g.edge_key())) << n;
    }
    EXPECT_EQ(ds.family(8), nullptr);
}

TEST(Dataset, DifferentSeedsDiffer) {
    DatasetOptions a;
    a.min_n = a.max_n = 6;
    DatasetOptions b = a;
    b.seed = 1;
    EXPECT_NE(to_jsonl(generate_dataset(a).families[0]), to_jsonl(generate_dataset(b).families[0]));
}

TEST(Dataset, JsonlRoundTrip) {
    DatasetOptions opt;
    opt.min_n = 3;
    opt.max_n = 4;
    const auto ds = generate_dataset(opt);
    for (const auto& f : ds.families) {
        const auto text = to_jsonl(f);
        const auto back = from_jsonl(text);
        EXPECT_EQ(back.n, f.n);
        ASSERT_EQ(back.records.size(), f.records.size());
        for (std::size_t i = 0; i < f.records.size(); ++i) {
            EXPECT_EQ(back.records[i].id, f.records[i].id);
            EXPECT_EQ(back.records[i].graph, f.records[i].graph);
            EXPECT_EQ(back.records[i].split, f.records[i].split);
        }
        EXPECT_EQ(to_jsonl(back), text);
    }
}

TEST(Dataset, DirectoryRoundTrip) {
    DatasetOptions opt;
    opt.min_n = 4;
    opt.max_n = 5;
    opt.seed = 3;
    const auto ds = generate_dataset(opt);
    const auto dir = scratch_dir("rt");
    write_dataset(ds, dir);
    const auto back = read_dataset(dir);
    EXPECT_EQ(back.options.seed, 3u);
    ASSERT_EQ(back.families.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(to_jsonl(back.families[i]), to_jsonl(ds.families[i]));
    fs::remove_all(dir);
}

TEST(Dataset, RejectsBadRanges) {
    DatasetOptions opt;
    opt.min_n = 2;
    EXPECT_THROW(generate_dataset(opt), ParameterError);
    opt.min_n = 3;
    opt.max_n = 11;
    EXPECT_THROW(generate_dataset(opt), ParameterError);
}

}  // namespace
}  // namespace qembed
