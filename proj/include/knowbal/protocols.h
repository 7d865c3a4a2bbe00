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

#ifndef KNOWBAL_PROTOCOLS_H
#define KNOWBAL_PROTOCOLS_H

#include <optional>
#include <string>
#include <vector>

#include "knowbal/measurements.h"
#include "knowbal/ontic_sim.h"
#include "knowbal/quantum_ref.h"
#include "knowbal/transforms.h"
#include "knowbal/validity.h"

namespace knowbal {

struct Assertion {
    std::string description;
    std::string expected;
    std::string observed;
    bool pass = false;
};

struct Artifact {
    std::string name;
    std::string content;
};

struct ProtocolReport {
    std::string name;
    std::vector<Assertion> assertions;
    std::vector<Artifact> artifacts;
    std::vector<std::string> notes;

    bool pass() const;
    void check(const std::string &description, const std::string &expected, const std::string &observed);
    void check(const std::string &description, bool ok);
};

// Shared inputs: catalogs, the N=2 allowed group, and Monte Carlo settings.
class ProtocolContext {
  public:
    explicit ProtocolContext(CatalogStore &store, uint64_t seed = 0, uint64_t trials = 10000);

    const Catalog &catalog(int n) { return store_.get(n); }
    const TransformationGroup &group2();
    RunConfig run_config(int n_systems) const;
    uint64_t seed() const { return seed_; }
    uint64_t trials() const { return trials_; }

  private:
    CatalogStore &store_;
    uint64_t seed_;
    uint64_t trials_;
    std::optional<TransformationGroup> group2_;
};

// Named states used by the protocols and the script language.
EpistemicState single_state(const std::string &literal);  // "1|3"
EpistemicState relation_state(int k);                     // {(x, klein(k)(x))}
EpistemicState ghz_state();
EpistemicState all_equal_triple();

ProtocolReport interference_report(ProtocolContext &ctx);
ProtocolReport noncommutativity_report(ProtocolContext &ctx);
ProtocolReport steering_report(ProtocolContext &ctx);
ProtocolReport inverter_search(ProtocolContext &ctx);
// Allowed N=2 maps taking (s_i).(blank) to (s_i).(s_i) for both i.
std::optional<Permutation> find_cloner(const EpistemicState &s1, const EpistemicState &s2,
                                       const EpistemicState &blank, ProtocolContext &ctx);
ProtocolReport cloner_search(ProtocolContext &ctx);
ProtocolReport broadcast_check(ProtocolContext &ctx);
ProtocolReport dense_coding_run(ProtocolContext &ctx);
ProtocolReport teleportation_run(ProtocolContext &ctx);
ProtocolReport monogamy_check(ProtocolContext &ctx);
ProtocolReport toy_correlation_table(ProtocolContext &ctx);
// Table II as a CorrelationTable, in the layout used by bell_table().
CorrelationTable toy_table();

std::vector<std::string> protocol_names();
// Throws std::invalid_argument for unknown names.
ProtocolReport run_protocol(const std::string &name, ProtocolContext &ctx);

std::string report_json(const std::vector<ProtocolReport> &reports);
std::string report_text(const std::vector<ProtocolReport> &reports);

}  // namespace knowbal

#endif  // KNOWBAL_PROTOCOLS_H
