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

#ifndef KNOWBAL_ONTIC_SIM_H
#define KNOWBAL_ONTIC_SIM_H

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "knowbal/measurements.h"
#include "knowbal/rng.h"
#include "knowbal/transforms.h"

namespace knowbal {

struct PrepareStep {
    EpistemicState state;
};

// Applied only when the named earlier outcome equals `outcome`.
struct Condition {
    std::string binding;
    int outcome = 0;
};

struct TransformStep {
    Permutation perm;  // acts on the full shape
    std::optional<Condition> condition;
};

struct MeasureStep {
    Measurement measurement;
    std::string binding;
};

using Step = std::variant<PrepareStep, TransformStep, MeasureStep>;

struct RunConfig {
    uint64_t seed = 0;
    uint64_t n_trials = 10000;
    SystemShape shape{1};
    bool keep_records = true;
};

struct StepRecord {
    size_t step = 0;
    int outcome = -1;  // -1 for steps that are not measurements
    OnticIndex ontic = 0;  // after the step
    EpistemicState tracked;  // after the step
};

struct TrialRecord {
    OnticIndex initial_ontic = 0;
    std::vector<StepRecord> steps;
    EpistemicState final_state;
};

struct FrequencyRow {
    size_t step = 0;
    std::string binding;
    size_t outcome = 0;
    uint64_t count = 0;
    Rational expected;
};

struct RunResult {
    uint64_t n_trials = 0;
    std::vector<FrequencyRow> frequencies;
    // Keyed by measurement step.
    std::map<size_t, double> chi_square;
    std::vector<TrialRecord> records;
    // Trials in which the ontic state ever left the tracked epistemic state.
    uint64_t inconsistent_trials = 0;

    // Every count within three binomial standard deviations of expectation;
    // certain and impossible outcomes must match exactly.
    bool within_3sigma() const;
    bool consistent() const { return inconsistent_trials == 0; }
};

OnticIndex sample_ontic(const EpistemicState &s, TrialRng &rng);
size_t outcome_of(OnticIndex x, const Measurement &m);
// Measurement disturbance given that outcome k was seen.
OnticIndex disturb(OnticIndex x, const Measurement &m, size_t k, TrialRng &rng);

struct Branch {
    Rational probability{1};
    EpistemicState state;
    std::map<std::string, int> bindings;
    bool tie = false;
};

struct Exploration {
    std::vector<Branch> leaves;
    // Outcome distribution of each measurement step, summed over branches.
    std::map<size_t, std::vector<Rational>> distributions;
};

// Moves one branch across a non-preparation step, possibly splitting it.
std::vector<Branch> advance(const Branch &b, const Step &step, UpdateRule rule, const Catalog *catalog);
Exploration explore(const std::vector<Step> &program, UpdateRule rule = UpdateRule::max_fidelity,
                    const Catalog *catalog = nullptr);

// Monte Carlo over the ontic level. Nonmaximal whole-system measurements are
// only simulated under the outcome-base rule.
RunResult run_trials(const std::vector<Step> &program, const RunConfig &cfg,
                     UpdateRule rule = UpdateRule::outcome_base);

std::string frequencies_csv(const RunResult &r);
// One JSON object per trial.
std::string records_jsonl(const RunResult &r);

}  // namespace knowbal

#endif  // KNOWBAL_ONTIC_SIM_H
