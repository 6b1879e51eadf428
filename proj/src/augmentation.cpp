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

#include "qembed/augmentation.hpp"

#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>

#include "qembed/errors.hpp"

namespace qembed {

namespace {

using ShoreTable = std::vector<std::array<int, HardwareGraph::kShore>>;

ShoreTable random_shore_table(std::size_t lines, Rng& rng) {
    ShoreTable table(lines);
    for (auto& sigma : table) {
        std::iota(sigma.begin(), sigma.end(), 0);
        rng.shuffle(std::span<int>{sigma});
    }
    return table;
}

Permutation chimera_transform(const HardwareGraph& h, TransformKind kind, Rng& rng) {
    const int m = h.size();
    const int last = m - 1;
    ShoreTable shores;
    if (kind == TransformKind::PermuteVertical || kind == TransformKind::PermuteHorizontal) {
        shores = random_shore_table(static_cast<std::size_t>(m), rng);
    }
    std::vector<int> map(static_cast<std::size_t>(h.node_count()));
    for (int q = 0; q < h.node_count(); ++q) {
        const auto [r, c, u, k] = h.chimera_coord(q);
        ChimeraCoord t{r, c, u, k};
        switch (kind) {
            case TransformKind::RotateCw: t = {c, last - r, 1 - u, k}; break;
            case TransformKind::RotateCcw: t = {last - c, r, 1 - u, k}; break;
            case TransformKind::MirrorVertical: t = {r, last - c, u, k}; break;
            case TransformKind::MirrorHorizontal: t = {last - r, c, u, k}; break;
            case TransformKind::MirrorDiagonal: t = {c, r, 1 - u, k}; break;
            case TransformKind::MirrorAntidiagonal: t = {last - c, last - r, 1 - u, k}; break;
            case TransformKind::PermuteVertical:
                // vertical qubits of one cell column share couplers along the column
                if (u == 0) t.k = shores[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)];
                break;
            case TransformKind::PermuteHorizontal:
                if (u == 1) t.k = shores[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)];
                break;
        }
        map[static_cast<std::size_t>(q)] = h.chimera_index(t);
    }
    return Permutation(std::move(map));
}

Permutation zephyr_transform(const HardwareGraph& h, TransformKind kind, Rng& rng) {
    const int m = h.size();
    const int span = 2 * m;  // w in [0, span], position p = 2z + j in [0, span - 1]
    ShoreTable shores;
    if (kind == TransformKind::PermuteVertical || kind == TransformKind::PermuteHorizontal) {
        shores = random_shore_table(static_cast<std::size_t>(span + 1), rng);
    }
    std::vector<int> map(static_cast<std::size_t>(h.node_count()));
    for (int q = 0; q < h.node_count(); ++q) {
        const auto c = h.zephyr_coord(q);
        const int p = 2 * c.z + c.j;
        // a u=0 qubit sits on column w spanning rows p..p+1; u=1 is the transpose
        int u = c.u;
        int w = c.w;
        int pos = p;
        int k = c.k;
        const bool vertical = c.u == 0;
        switch (kind) {
            case TransformKind::MirrorVertical:
                if (vertical) w = span - w; else pos = span - 1 - p;
                break;
            case TransformKind::MirrorHorizontal:
                if (vertical) pos = span - 1 - p; else w = span - w;
                break;
            case TransformKind::MirrorDiagonal: u = 1 - u; break;
            case TransformKind::MirrorAntidiagonal:
                u = 1 - u;
                w = span - w;
                pos = span - 1 - p;
                break;
            case TransformKind::RotateCw:
                // transpose, then mirror about the vertical axis
                u = 1 - u;
                if (vertical) pos = span - 1 - p; else w = span - w;
                break;
            case TransformKind::RotateCcw:
                // transpose, then mirror about the horizontal axis
                u = 1 - u;
                if (vertical) w = span - w; else pos = span - 1 - p;
                break;
            case TransformKind::PermuteVertical:
                if (vertical) k = shores[static_cast<std::size_t>(w)][static_cast<std::size_t>(k)];
                break;
            case TransformKind::PermuteHorizontal:
                if (!vertical) k = shores[static_cast<std::size_t>(w)][static_cast<std::size_t>(k)];
                break;
        }
        map[static_cast<std::size_t>(q)] = h.zephyr_index({u, w, k, pos % 2, pos / 2});
    }
    return Permutation(std::move(map));
}

}  // namespace

std::string_view transform_name(TransformKind kind) {
    switch (kind) {
        case TransformKind::RotateCw: return "rot_cw";
        case TransformKind::RotateCcw: return "rot_ccw";
        case TransformKind::MirrorVertical: return "mirror_v";
        case TransformKind::MirrorHorizontal: return "mirror_h";
        case TransformKind::MirrorDiagonal: return "mirror_diag";
        case TransformKind::MirrorAntidiagonal: return "mirror_antidiag";
        case TransformKind::PermuteVertical: return "perm_vertical";
        case TransformKind::PermuteHorizontal: return "perm_horizontal";
    }
    return "unknown";
}

Permutation::Permutation(std::vector<int> map) : map_(std::move(map)), inverse_(map_.size(), -1) {
    for (std::size_t q = 0; q < map_.size(); ++q) {
        const int target = map_[q];
        if (target < 0 || static_cast<std::size_t>(target) >= map_.size() ||
            inverse_[static_cast<std::size_t>(target)] != -1) {
            throw ParameterError("permutation is not a bijection");
        }
        inverse_[static_cast<std::size_t>(target)] = static_cast<int>(q);
    }
}

Permutation Permutation::identity(int n) {
    std::vector<int> map(static_cast<std::size_t>(n));
    std::iota(map.begin(), map.end(), 0);
    return Permutation(std::move(map));
}

bool Permutation::is_identity() const {
    for (std::size_t q = 0; q < map_.size(); ++q) {
        if (map_[q] != static_cast<int>(q)) return false;
    }
    return true;
}

Permutation Permutation::then(const Permutation& next) const {
    if (next.size() != size()) throw ParameterError("permutation sizes differ");
    std::vector<int> map(map_.size());
    for (std::size_t q = 0; q < map_.size(); ++q) map[q] = next(map_[q]);
    return Permutation(std::move(map));
}

Permutation Permutation::inverted() const { return Permutation(inverse_); }

bool is_automorphism(const HardwareGraph& h, const Permutation& pi) {
    if (pi.size() != h.node_count()) return false;
    // pi is a bijection, so mapping every edge onto an edge is enough
    for (const auto& [a, b] : h.edges()) {
        if (!h.adjacent(pi(a), pi(b))) return false;
    }
    return true;
}

std::array<Transform, kTransformCount> enumerate_transforms(const HardwareGraph& h, Rng& rng) {
    std::array<Transform, kTransformCount> out;
    for (int i = 0; i < kTransformCount; ++i) {
        const auto kind = static_cast<TransformKind>(i);
        auto pi = h.family() == Family::Chimera ? chimera_transform(h, kind, rng) : zephyr_transform(h, kind, rng);
        if (!is_automorphism(h, pi)) {
            throw std::logic_error(std::string(transform_name(kind)) + " is not an automorphism of " +
                                   std::string(family_name(h.family())) + " m=" + std::to_string(h.size()));
        }
        out[static_cast<std::size_t>(i)] = {kind, std::move(pi)};
    }
    return out;
}

Permutation sample_transform_set(const std::array<Transform, kTransformCount>& transforms, Rng& rng,
                                 std::vector<TransformKind>* chosen) {
    Permutation result = Permutation::identity(transforms.front().permutation.size());
    if (chosen != nullptr) chosen->clear();
    for (const auto& t : transforms) {
        if (!rng.coin()) continue;
        result = result.then(t.permutation);
        if (chosen != nullptr) chosen->push_back(t.kind);
    }
    return result;
}

Observation apply_to_observation(const Observation& obs, const ObservationLayout& layout, const Permutation& pi) {
    if (pi.size() != layout.hardware || obs.size() != static_cast<std::size_t>(layout.size())) {
        throw ParameterError("observation and permutation sizes differ");
    }
    Observation out = obs;
    for (const int offset : {layout.available_offset(), layout.chain_offset()}) {
        for (int q = 0; q < layout.hardware; ++q) {
            out[static_cast<std::size_t>(offset + pi(q))] = obs[static_cast<std::size_t>(offset + q)];
        }
    }
    return out;
}

ActionMask apply_to_mask(const ActionMask& mask, const Permutation& pi) {
    ActionMask out(mask.size());
    for (std::size_t q = 0; q < mask.size(); ++q) out[static_cast<std::size_t>(pi(static_cast<int>(q)))] = mask[q];
    return out;
}

int map_action(int permuted_action, const Permutation& pi) { return pi.inverse(permuted_action); }

std::string_view augment_mode_name(AugmentMode mode) {
    switch (mode) {
        case AugmentMode::Off: return "off";
        case AugmentMode::Train: return "train";
        case AugmentMode::TrainTest: return "train+test";
    }
    return "off";
}

AugmentMode parse_augment_mode(std::string_view name) {
    if (name == "off") return AugmentMode::Off;
    if (name == "train") return AugmentMode::Train;
    if (name == "train+test") return AugmentMode::TrainTest;
    throw ParameterError("unknown augment mode '" + std::string(name) + "'");
}

}  // namespace qembed
