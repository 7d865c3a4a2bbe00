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

#include "knowbal/ontic_sim.h"

#include <map>

#include "gtest/gtest.h"
#include "knowbal/rng.h"
#include "test_util.h"

using namespace knowbal;
using knowbal::testing::S;
using knowbal::testing::store;

namespace {

const SystemShape kOne(1), kTwo(2);

Measurement local(char axis, int site) { return on_sites(canonical_partition(axis), kTwo, {site}); }

RunConfig config(SystemShape shape, uint64_t trials, uint64_t seed = 1) {
    RunConfig c;
    c.shape = shape;
    c.n_trials = trials;
    c.seed = seed;
    return c;
}

}  // namespace

TEST(Rng, philox_known_answers) {
    EXPECT_EQ(philox4x32({0, 0, 0, 0}, {0, 0}),
              (PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
              (PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
              (PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Rng, streams_depend_only_on_seed_and_trial) {
    TrialRng a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    std::vector<uint32_t> va, vb, vc, vd;
    for (int i = 0; i < 9; ++i) {
        va.push_back(a.next_u32());
        vb.push_back(b.next_u32());
        vc.push_back(c.next_u32());
        vd.push_back(d.next_u32());
    }
    EXPECT_EQ(va, vb);
    EXPECT_NE(va, vc);
    EXPECT_NE(va, vd);
    TrialRng u(1, 1);
    for (int i = 0; i < 1000; ++i) ASSERT_LT(u.uniform(3), 3u);
}

TEST(OnticSim, sampling_is_uniform) {
    EpistemicState s = S("(1,1)|(2,2)|(3,3)|(4,4)");
    std::map<OnticIndex, int> counts;
    const int n = 40000;
    for (int t = 0; t < n; ++t) {
        TrialRng rng(3, t);
        OnticIndex x = sample_ontic(s, rng);
        ASSERT_TRUE(s.contains(x));
        ++counts[x];
    }
    ASSERT_EQ(counts.size(), 4u);
    for (const auto &[x, c] : counts) EXPECT_NEAR(c, n / 4.0, 3 * std::sqrt(n * 0.25 * 0.75));
}

TEST(OnticSim, outcome_of) {
    Measurement z = canonical_partition('z'), y = canonical_partition('y');
    EXPECT_EQ(outcome_of(0, z), 0u);
    EXPECT_EQ(outcome_of(2, z), 1u);
    EXPECT_EQ(outcome_of(0, y), 1u);
    EXPECT_EQ(outcome_of(1, y), 0u);
    // (3,2) is index 2*4 + 1.
    EXPECT_EQ(outcome_of(9, local('z', 0)), 1u);
    EXPECT_EQ(outcome_of(9, local('z', 1)), 0u);
    EXPECT_EQ(outcome_of(9, relation_measurement()), outcome_of(9, relation_measurement()));
    EXPECT_EQ(outcome_of(0, relation_measurement()), 0u);
}

TEST(OnticSim, single_system_disturbance) {
    Measurement x = canonical_partition('x');
    std::map<OnticIndex, int> counts;
    const int n = 20000;
    for (int t = 0; t < n; ++t) {
        TrialRng rng(5, t);
        OnticIndex y = disturb(0, x, 0, rng);
        ASSERT_TRUE(y == 0 || y == 2);
        ++counts[y];
    }
    EXPECT_NEAR(counts[0], n / 2.0, 3 * std::sqrt(n * 0.25));
    TrialRng rng(5, 0);
    EXPECT_THROW(disturb(1, x, 0, rng), std::invalid_argument);
}

TEST(OnticSim, disturbance_is_local) {
    Measurement m = local('x', 0);
    for (OnticIndex x = 0; x < 16; ++x) {
        for (int t = 0; t < 20; ++t) {
            TrialRng rng(9, t);
            OnticIndex y = disturb(x, m, outcome_of(x, m), rng);
            ASSERT_EQ(digit_at(kTwo, y, 1), digit_at(kTwo, x, 1));
            ASSERT_EQ(outcome_of(y, m), outcome_of(x, m));
        }
    }
}

TEST(OnticSim, joint_disturbance_stays_in_outcome) {
    Measurement bell = relation_measurement();
    std::map<OnticIndex, int> counts;
    for (int t = 0; t < 8000; ++t) {
        TrialRng rng(11, t);
        OnticIndex y = disturb(0, bell, 0, rng);
        ASSERT_TRUE(bell.outcomes[0].contains(y));
        ++counts[y];
    }
    EXPECT_EQ(counts.size(), 4u);
}

TEST(OnticSim, explore_steering) {
    std::vector<Step> prog = {PrepareStep{S("(1,1)|(2,2)|(3,3)|(4,4)")}, MeasureStep{local('x', 0), "a"}};
    Exploration ex = explore(prog);
    ASSERT_EQ(ex.leaves.size(), 2u);
    EXPECT_EQ(ex.distributions.at(1), (std::vector<Rational>{Rational(1, 2), Rational(1, 2)}));
    EXPECT_EQ(marginal(ex.leaves[0].state, {1}), S("1v3"));
    EXPECT_EQ(marginal(ex.leaves[1].state, {1}), S("2v4"));
}

TEST(OnticSim, conditional_transform) {
    std::vector<Step> prog = {PrepareStep{S("1v2")}, MeasureStep{canonical_partition('x'), "m"},
                              TransformStep{parse_cycles("(12)(34)"), Condition{"m", 1}}};
    Exploration ex = explore(prog);
    ASSERT_EQ(ex.leaves.size(), 2u);
    for (const auto &b : ex.leaves) EXPECT_EQ(b.state, S("1v3"));
    std::vector<Step> bad = {PrepareStep{S("1v2")}, TransformStep{parse_cycles("(12)"), Condition{"q", 0}}};
    EXPECT_THROW(explore(bad), std::invalid_argument);
}

TEST(OnticSim, frequencies_match_and_states_consistent) {
    std::vector<Step> prog = {PrepareStep{S("(1,1)|(2,2)|(3,3)|(4,4)")},
                              MeasureStep{local('x', 0), "a"},
                              TransformStep{cnot_analogue(), std::nullopt},
                              MeasureStep{relation_measurement(), "b"},
                              MeasureStep{local('y', 1), "c"}};
    RunResult r = run_trials(prog, config(kTwo, 20000));
    EXPECT_EQ(r.n_trials, 20000u);
    EXPECT_TRUE(r.within_3sigma()) << frequencies_csv(r);
    EXPECT_TRUE(r.consistent());
    Rational total(0);
    for (const auto &row : r.frequencies) {
        if (row.step == 1) total += row.expected;
    }
    EXPECT_EQ(total, Rational(1));
    for (const auto &rec : r.records) {
        ASSERT_TRUE(rec.final_state.contains(rec.steps.back().ontic));
    }
}

TEST(OnticSim, certain_outcomes_are_exact) {
    std::vector<Step> prog = {PrepareStep{S("1v3")}, MeasureStep{canonical_partition('x'), "m"},
                              MeasureStep{canonical_partition('x'), "again"}};
    RunResult r = run_trials(prog, config(kOne, 500));
    for (const auto &row : r.frequencies) {
        EXPECT_EQ(row.count, row.outcome == 0 ? 500u : 0u);
    }
}

TEST(OnticSim, deterministic_for_seed) {
    std::vector<Step> prog = {PrepareStep{S("mixed")}, MeasureStep{canonical_partition('z'), "m"},
                              MeasureStep{canonical_partition('y'), "n"}};
    RunResult a = run_trials(prog, config(kOne, 300, 7));
    RunResult b = run_trials(prog, config(kOne, 300, 7));
    RunResult c = run_trials(prog, config(kOne, 300, 8));
    EXPECT_EQ(records_jsonl(a), records_jsonl(b));
    EXPECT_EQ(frequencies_csv(a), frequencies_csv(b));
    EXPECT_NE(records_jsonl(a), records_jsonl(c));
}

TEST(OnticSim, invalid_programs) {
    RunResult empty = run_trials({}, config(kOne, 10));
    EXPECT_TRUE(empty.frequencies.empty());
    EXPECT_TRUE(empty.records.empty());
    EXPECT_THROW(explore({}), std::invalid_argument);
    std::vector<Step> two_preps = {PrepareStep{S("1v2")}, PrepareStep{S("1v2")}};
    EXPECT_THROW(run_trials(two_preps, config(kOne, 10)), std::invalid_argument);
    std::vector<Step> prog = {PrepareStep{S("1v2")}};
    EXPECT_THROW(run_trials(prog, config(kOne, 0)), std::invalid_argument);
    EXPECT_THROW(run_trials(prog, config(kTwo, 10)), std::invalid_argument);
    RunResult r = run_trials(prog, config(kOne, 10));
    EXPECT_TRUE(r.frequencies.empty());
    EXPECT_TRUE(r.consistent());
}
