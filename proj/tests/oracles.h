// Copyright 2026 The knowbal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef KNOWBAL_TESTS_ORACLES_H
#define KNOWBAL_TESTS_ORACLES_H

// Test-side reference models. Nothing here calls the validity, transforms or
// measurements modules.
//
// An ontic index, read in binary, is the bit string z1 x1 z2 x2 ... where
// label d = 2z + x + 1. Valid states are the solution sets of linear
// constraints f(v) = c, f ranging over an isotropic subspace of functionals
// under the form sum_i (z_i x'_i + x_i z'_i).

#include <cstdint>
#include <set>
#include <vector>

namespace oracle {

// Members as bit masks over the 4^N ontic indices, N <= 3.
std::set<uint64_t> coset_states(int n);
std::set<uint64_t> coset_states_of_size(int n, int size);

// Images of every map v -> M v + t with M symplectic, N <= 2.
std::set<std::vector<uint16_t>> affine_symplectic_maps(int n);

// (a, b) -> (a, a xor b) on the two-bit labels.
std::vector<uint16_t> xor_map();

// Partitions of the ontic space into pure coset states, as sorted masks.
std::vector<std::vector<uint64_t>> maximal_partitions(int n);
// Every pair of outcomes from different partitions overlaps in the same
// number of ontic states.
bool unbiased(const std::vector<uint64_t> &a, const std::vector<uint64_t> &b);
// Number of mutually unbiased sets of `size` partitions.
size_t count_unbiased_sets(const std::vector<std::vector<uint64_t>> &partitions, size_t size);

inline int popcount(uint64_t v) { return __builtin_popcountll(v); }

}  // namespace oracle

#endif  // KNOWBAL_TESTS_ORACLES_H
