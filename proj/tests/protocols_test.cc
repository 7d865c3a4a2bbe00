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

#include "knowbal/protocols.h"

#include <set>

#include "gtest/gtest.h"
#include "json.hpp"
#include "knowbal/quantum_ref.h"
#include "test_util.h"

using namespace knowbal;
using knowbal::testing::S;
using knowbal::testing::store;

namespace {

const SystemShape kOne(1), kTwo(2);

ProtocolContext &ctx() {
    static ProtocolContext c(store(), 7, 4000);
    return c;
}

std::string failures(const ProtocolReport &r) {
    std::string out;
    for (const auto &a : r.assertions) {
        if (!a.pass) out += a.description + " (expected " + a.expected + ", observed " + a.observed + ")\n";
    }
    return out;
}

bool is_product(const EpistemicState &s, int a, int b) {
    return marginal(s, {a, b}) == conjoin(marginal(s, {a}), marginal(s, {b}));
}

}  // namespace

TEST(Protocols, every_report_passes) {
    for (const auto &name : protocol_names()) {
        ProtocolReport r = run_protocol(name, ctx());
        EXPECT_EQ(r.name, name);
        EXPECT_FALSE(r.assertions.empty()) << name;
        EXPECT_TRUE(r.pass()) << name << "\n" << failures(r);
    }
    EXPECT_EQ(protocol_names().size(), 10u);
    EXPECT_THROW(run_protocol("nope", ctx()), std::invalid_argument);
}

TEST(Protocols, named_states) {
    EXPECT_EQ(single_state("1|3"), S("1v3"));
    EXPECT_EQ(relation_state(0), S("(1,1)|(2,2)|(3,3)|(4,4)"));
    EXPECT_EQ(ghz_state().size(), 8);
    EXPECT_TRUE(store().get(3).contains(ghz_state()));
    EXPECT_EQ(all_equal_triple(), S("(1,1,1)|(2,2,2)|(3,3,3)|(4,4,4)"));
    for (int k = 0; k < 4; ++k) EXPECT_EQ(relation_state(k), relation_measurement().outcomes[k]);
}

TEST(Protocols, no_inverter) {
    // No relabeling sends every pure state to the disjoint one.
    int inverters = 0;
    for (const auto &p : s4_elements()) {
        bool all = true;
        for (const auto &s : store().get(1).pure()) {
            EpistemicState t = apply(p, s);
            all = all && is_disjoint(s, t);
        }
        inverters += all;
    }
    EXPECT_EQ(inverters, 0);
}

TEST(Protocols, cloning) {
    EpistemicState blank = S("1v2");
    auto c = find_cloner(S("1v2"), S("3v4"), blank, ctx());
    ASSERT_TRUE(c);
    EXPECT_EQ(apply(*c, conjoin(S("3v4"), blank)), conjoin(S("3v4"), S("3v4")));
    EXPECT_EQ(apply(*c, conjoin(S("1v2"), blank)), conjoin(S("1v2"), S("1v2")));
    EXPECT_FALSE(find_cloner(S("3v4"), S("1v3"), blank, ctx()));
    EXPECT_FALSE(find_cloner(S("1v2"), S("2v3"), blank, ctx()));
    EXPECT_THROW(find_cloner(S("mixed"), S("1v3"), blank, ctx()), std::invalid_argument);
}

TEST(Protocols, overlapping_pure_pairs_cannot_be_cloned) {
    const auto &pure = store().get(1).pure();
    for (const auto &a : pure) {
        for (const auto &b : pure) {
            if (a == b || is_disjoint(a, b)) continue;
            EXPECT_FALSE(find_cloner(a, b, S("1v2"), ctx())) << to_literal(a) << " " << to_literal(b);
        }
    }
}

TEST(Protocols, dense_coding_messages_are_distinguishable) {
    std::set<uint64_t> seen;
    for (int k = 0; k < 4; ++k) {
        EpistemicState s = apply(on_sites(klein(k), kTwo, {0}), relation_state(0));
        seen.insert(s.members().word(0));
        int certain = 0;
        for (size_t o = 0; o < 4; ++o) certain += outcome_probability(s, relation_measurement(), o) == Rational(1);
        EXPECT_EQ(certain, 1);
    }
    EXPECT_EQ(seen.size(), 4u);
}

TEST(Protocols, teleportation_report) {
    ProtocolReport r = teleportation_run(ctx());
    EXPECT_TRUE(r.pass()) << failures(r);
    EXPECT_GE(r.assertions.size(), 6u);
}

TEST(Protocols, monogamy) {
    int pure_correlated_ab = 0;
    for (const auto &s : store().get(3).pure()) {
        EpistemicState ab = marginal(s, {0, 1}), ac = marginal(s, {0, 2});
        bool ab_pure = ab.size() == 4 && !is_product(s, 0, 1);
        bool ac_pure = ac.size() == 4 && !is_product(s, 0, 2);
        pure_correlated_ab += ab_pure;
        ASSERT_FALSE(ab_pure && ac_pure) << to_literal(s);
    }
    EXPECT_GT(pure_correlated_ab, 0);
}

TEST(Protocols, toy_table) {
    CorrelationTable t = toy_table();
    EXPECT_EQ(t.cells, (std::vector<std::string>{"CCC", "CAA", "ACA", "AAC"}));
    for (size_t row = 0; row < 4; ++row) EXPECT_EQ(t.parity(row), "even");
    CorrelationTable q = bell_table();
    for (size_t row = 0; row < 4; ++row) EXPECT_NE(t.parity(row), q.parity(row));
}

TEST(Protocols, reports_serialize) {
    std::vector<ProtocolReport> reports = {run_protocol("steering", ctx()), run_protocol("toy_table", ctx())};
    auto j = nlohmann::json::parse(report_json(reports));
    ASSERT_EQ(j["reports"].size(), 2u);
    EXPECT_EQ(j["reports"][0]["name"], "steering");
    EXPECT_EQ(j["reports"][0]["pass"], true);
    std::string text = report_text(reports);
    EXPECT_NE(text.find("steering"), std::string::npos);
    EXPECT_EQ(report_json(reports), report_json({run_protocol("steering", ctx()), run_protocol("toy_table", ctx())}));
}
