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

#ifndef KNOWBAL_MEASUREMENTS_H
#define KNOWBAL_MEASUREMENTS_H

#include <boost/rational.hpp>
#include <string>
#include <vector>

#include "knowbal/ontic_core.h"
#include "knowbal/validity.h"

namespace knowbal {

using Rational = boost::rational<int64_t>;

// A reproducible measurement: a partition of the ontic space of the measured
// sites into valid outcome bases. `sites` lists the measured systems of
// `shape`, in the order used by the outcome digits.
struct Measurement {
    SystemShape shape;
    std::vector<int> sites;
    std::vector<EpistemicState> outcomes;

    SystemShape subsystem() const { return SystemShape(static_cast<int>(sites.size())); }
    bool whole_system() const { return static_cast<int>(sites.size()) == shape.n_systems(); }
    // Every outcome is pure on the measured subsystem.
    bool maximal() const;
    // Outcome k as a set of ontic states of the full shape.
    EpistemicState outcome_base(size_t k) const;

    bool operator==(const Measurement &o) const = default;
};

// Whole-system measurement over the catalog's shape.
Measurement make_measurement(std::vector<EpistemicState> outcomes, const Catalog &catalog);
// Whole-system measurement, checking each outcome with is_valid().
Measurement make_measurement(std::vector<EpistemicState> outcomes);
// Places a measurement on the listed sites of a larger shape.
Measurement on_sites(const Measurement &m, SystemShape shape, std::vector<int> sites);
// The same partition with outcomes in canonical order.
Measurement canonical(const Measurement &m);

// The three single-system partitions: 'z' = {1v2|3v4}, 'x' = {1v3|2v4},
// 'y' = {2v3|1v4}.
Measurement canonical_partition(char axis);
// Conjunction of whole-system measurements on consecutive blocks of sites.
Measurement product_measurement(const std::vector<Measurement> &parts);
// Outcome k is {(x, klein(k)(x))}: the relation measurement on a pair.
Measurement relation_measurement();
// Two-outcome coarse-graining of {1v2|3v4} on both: same block vs different block.
Measurement parity_measurement();

std::string roman(size_t k);

// All partitions into 2^N disjoint pure states, in canonical order. N <= 2.
std::vector<Measurement> enumerate_maximal(SystemShape shape, const Catalog &catalog);

// |s & O_k| / |s|.
Rational outcome_probability(const EpistemicState &s, const Measurement &m, size_t k);

enum class UpdateRule { max_fidelity, outcome_base };
std::string to_string(UpdateRule rule);

struct UpdateResult {
    EpistemicState state;
    bool tie = false;
};

// Among valid states inside `outcome`, the one closest to `s`; ties resolve to
// the canonically smallest and set `tie`.
UpdateResult update_max_fidelity(const EpistemicState &s, const EpistemicState &outcome,
                                 const Catalog &catalog);

// Post-measurement state. Nonmaximal whole-system outcomes follow `rule`;
// the max-fidelity rule needs the catalog of the full shape.
UpdateResult update_state(const EpistemicState &s, const Measurement &m, size_t k,
                          UpdateRule rule = UpdateRule::max_fidelity,
                          const Catalog *catalog = nullptr);
EpistemicState epistemic_update(const EpistemicState &s, const Measurement &m, size_t k,
                                UpdateRule rule = UpdateRule::max_fidelity,
                                const Catalog *catalog = nullptr);

struct MupSet {
    std::vector<Measurement> measurements;
    Fidelity common_fidelity;
};

bool are_mutually_unbiased(const Measurement &m1, const Measurement &m2);
bool is_mup_set(const std::vector<Measurement> &ms);
// Every set of `target_size` pairwise unbiased maximal measurements, or just
// the first one found when `exhaustive` is false.
std::vector<MupSet> find_mup_sets(SystemShape shape, int target_size, const Catalog &catalog,
                                  bool exhaustive = true);

// Catalog-style lines with an `outcomes` array, closed by a checksum line.
std::string serialize_measurements(const std::vector<Measurement> &ms);
// N=2 only: 4x4 grid of outcome numerals. Columns are A = 1..4 left to right,
// rows are B = 4..1 top to bottom; '.' marks cells outside every outcome.
std::string diagram(const Measurement &m);
std::string describe(const Measurement &m);

}  // namespace knowbal

#endif  // KNOWBAL_MEASUREMENTS_H
