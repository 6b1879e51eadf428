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

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "qembed/environment.hpp"
#include "qembed/rng.hpp"
#include "qembed/topology.hpp"

namespace qembed {

enum class TransformKind : int {
    RotateCw,
    RotateCcw,
    MirrorVertical,
    MirrorHorizontal,
    MirrorDiagonal,
    MirrorAntidiagonal,
    PermuteVertical,
    PermuteHorizontal,
};

inline constexpr int kTransformCount = 8;

std::string_view transform_name(TransformKind kind);

/// Node relabelling of H: qubit q moves to position `map[q]`.
class Permutation {
  public:
    Permutation() = default;
    explicit Permutation(std::vector<int> map);
    static Permutation identity(int n);

    int size() const noexcept { return static_cast<int>(map_.size()); }
    int operator()(int q) const { return map_[static_cast<std::size_t>(q)]; }
    int inverse(int q) const { return inverse_[static_cast<std::size_t>(q)]; }
    const std::vector<int>& map() const noexcept { return map_; }
    bool is_identity() const;

    /// (*this then next): q -> next(this(q)).
    Permutation then(const Permutation& next) const;
    Permutation inverted() const;

    friend bool operator==(const Permutation& a, const Permutation& b) { return a.map_ == b.map_; }

  private:
    std::vector<int> map_;
    std::vector<int> inverse_;
};

/// (i, j) in E(H) <=> (pi(i), pi(j)) in E(H).
bool is_automorphism(const HardwareGraph& h, const Permutation& pi);

struct Transform {
    TransformKind kind;
    Permutation permutation;
};

/// The eight symmetry transforms of H. The two shore permutations draw one
/// random permutation of the shore index per line of qubits (cell column /
/// cell row on Chimera, (u, w) track on Zephyr). Throws std::logic_error if
/// any candidate fails the automorphism check.
std::array<Transform, kTransformCount> enumerate_transforms(const HardwareGraph& h, Rng& rng);

/// Uniform random subset of the transforms, composed in enum order.
Permutation sample_transform_set(const std::array<Transform, kTransformCount>& transforms, Rng& rng,
                                 std::vector<TransformKind>* chosen = nullptr);

/// Moves the H-indexed sections (S_H, S_C) so that entry q lands on pi(q).
Observation apply_to_observation(const Observation& obs, const ObservationLayout& layout, const Permutation& pi);
ActionMask apply_to_mask(const ActionMask& mask, const Permutation& pi);
/// Action chosen in the permuted view, mapped back to an environment qubit.
int map_action(int permuted_action, const Permutation& pi);

enum class AugmentMode { Off, Train, TrainTest };

std::string_view augment_mode_name(AugmentMode mode);
AugmentMode parse_augment_mode(std::string_view name);

}  // namespace qembed
