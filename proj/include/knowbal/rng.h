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

#ifndef KNOWBAL_RNG_H
#define KNOWBAL_RNG_H

#include <array>
#include <cstdint>

namespace knowbal {

using PhiloxCounter = std::array<uint32_t, 4>;
using PhiloxKey = std::array<uint32_t, 2>;

// Philox4x32 with ten rounds.
PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key);

// The random stream of one trial. The key is the run seed; the counter holds
// the trial index and a block number, so streams never overlap and any trial
// can be replayed on its own.
class TrialRng {
  public:
    TrialRng(uint64_t seed, uint64_t trial);

    uint32_t next_u32();
    // Uniform on [0, n), by rejection; n > 0.
    uint32_t uniform(uint32_t n);
    bool coin() { return (next_u32() & 1u) != 0; }

  private:
    PhiloxKey key_;
    uint64_t trial_;
    uint64_t block_ = 0;
    PhiloxCounter buf_{};
    int used_ = 4;
};

}  // namespace knowbal

#endif  // KNOWBAL_RNG_H
