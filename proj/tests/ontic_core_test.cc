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

#include "knowbal/ontic_core.h"

#include <cmath>

#include "gtest/gtest.h"
#include "knowbal/protocols.h"
#include "test_util.h"

using namespace knowbal;
using knowbal::testing::S;

namespace {

const SystemShape kOne(1), kTwo(2), kThree(3);

std::vector<EpistemicState> six_pure() {
    return {S("1v2"), S("3v4"), S("1v3"), S("2v4"), S("2v3"), S("1v4")};
}

}  // namespace

TEST(OnticCore, make_state) {
    EpistemicState s = make_state(kOne, {1, 0, 1});
    EXPECT_EQ(s.size(), 2);
    EXPECT_EQ(to_literal(s), "1|2");
    EXPECT_EQ(to_literal(make_state(kTwo, {0, 5, 10, 15})), "(1,1)|(2,2)|(3,3)|(4,4)");
    EXPECT_THROW(make_state(kOne, {4}), std::out_of_range);
    EXPECT_THROW(make_state(kOne, {}), std::invalid_argument);
}

TEST(OnticCore, encoding_round_trip) {
    for (int n = 1; n <= 3; ++n) {
        SystemShape shape(n);
        for (OnticIndex i = 0; i < shape.ontic_count(); ++i) {
            ASSERT_EQ(encode_index(shape, decode_index(shape, i)), i);
        }
    }
    EXPECT_EQ(encode_index(kTwo, {2, 1}), 9u);
    EXPECT_EQ(digit_at(kThree, encode_index(kThree, {3, 0, 2}), 0), 3);
    EXPECT_EQ(digit_at(kThree, encode_index(kThree, {3, 0, 2}), 2), 2);
}

TEST(OnticCore, marginal) {
    EpistemicState diag = S("(1,1)|(2,2)|(3,3)|(4,4)");
    EXPECT_EQ(marginal(diag, {1}), S("1|2|3|4"));
    EXPECT_EQ(marginal(S("prod(1v2, 2v3)"), {0}), S("1v2"));
    EXPECT_EQ(marginal(ghz_state(), {0, 1}), S("prod(1v2, 1v2) | prod(3v4, 3v4)"));
    EXPECT_EQ(marginal(ghz_state(), {0, 2}), S("prod(1v2, 1v2) | prod(3v4, 3v4)"));
    EXPECT_EQ(marginal(ghz_state(), {1, 2}), S("prod(1v2, 1v2) | prod(3v4, 3v4)"));
    EXPECT_THROW(marginal(diag, {}), std::invalid_argument);
}

TEST(OnticCore, conjoin) {
    EXPECT_EQ(conjoin(S("1v2"), S("1v2")), S("(1,1)|(1,2)|(2,1)|(2,2)"));
    EXPECT_EQ(conjoin(S("1|2|3|4"), S("1v3")).size(), 8);
    EXPECT_EQ(conjoin(S("1"), S("4")), S("(1,4)"));
}

TEST(OnticCore, conjoin_marginals_recover_factors) {
    auto sets = six_pure();
    sets.push_back(S("1|2|3|4"));
    for (const auto &a : sets) {
        for (const auto &b : sets) {
            EpistemicState ab = conjoin(a, b);
            ASSERT_EQ(marginal(ab, {0}), a);
            ASSERT_EQ(marginal(ab, {1}), b);
        }
    }
}

TEST(OnticCore, fidelity_values) {
    EXPECT_EQ(fidelity(S("1v2"), S("3v4")).value(), 0.0);
    EXPECT_DOUBLE_EQ(fidelity(S("1v2"), S("1v3")).value(), 0.5);
    EXPECT_NEAR(fidelity(S("1v2"), S("1|2|3|4")).value(), 1 / std::sqrt(2.0), 1e-15);
    EXPECT_EQ(fidelity(S("1v2"), S("1v2")).value(), 1.0);
    EXPECT_EQ(fidelity(S("1v2"), S("1|2|3|4")).squared(), std::make_pair(int64_t{1}, int64_t{2}));
}

TEST(OnticCore, fidelity_properties) {
    std::vector<EpistemicState> all;
    for (uint64_t w = 1; w < 16; ++w) all.emplace_back(kOne, OnticSet::from_word(w));
    for (const auto &a : all) {
        EXPECT_EQ(fidelity(a, a).value(), 1.0);
        for (const auto &b : all) {
            ASSERT_EQ(fidelity(a, b), fidelity(b, a));
            ASSERT_EQ(fidelity(a, b).value() == 0.0, is_disjoint(a, b));
            ASSERT_LE(fidelity(a, b).value(), 1.0);
        }
    }
    EXPECT_THROW(fidelity(S("1v2"), S("prod(1v2, 1v2)")), std::invalid_argument);
}

TEST(OnticCore, compatibility) {
    const Catalog &cat = knowbal::testing::store().get(1);
    EXPECT_TRUE(is_compatible(S("1v2"), S("1|2|3|4"), cat));
    EXPECT_FALSE(is_compatible(S("1v2"), S("2v3"), cat));
    EXPECT_FALSE(is_compatible(S("1v2"), S("3v4"), cat));
    EXPECT_TRUE(is_disjoint(S("1v2"), S("3v4")));
}

TEST(OnticCore, convex_combination) {
    const Catalog &one = knowbal::testing::store().get(1);
    EXPECT_EQ(convex_combine({S("1v2"), S("3v4")}, one), S("1|2|3|4"));
    EXPECT_FALSE(convex_combine({S("1v2"), S("1v3")}, one).has_value());
    EXPECT_EQ(convex_combine({S("1v3"), S("2v4")}, one), S("1|2|3|4"));
    EXPECT_EQ(convex_combine({S("2v3"), S("1v4")}, one), S("1|2|3|4"));
    const Catalog &two = knowbal::testing::store().get(2);
    auto mixed = convex_combine({S("prod(1v2, 1v2)"), S("prod(3v4, 3v4)")}, two);
    ASSERT_TRUE(mixed.has_value());
    EXPECT_EQ(mixed->size(), 8);
    EXPECT_EQ(marginal(*mixed, {0}), S("1|2|3|4"));
}

TEST(OnticCore, coherent_ops_table) {
    struct Row {
        const char *a, *b;
        CoherentOp op;
        const char *want;
    };
    const Row rows[] = {
        {"1v2", "3v4", CoherentOp::op1, "1v3"}, {"1v2", "3v4", CoherentOp::op2, "2v4"},
        {"1v2", "3v4", CoherentOp::op3, "2v3"}, {"1v2", "3v4", CoherentOp::op4, "1v4"},
        {"1v3", "2v4", CoherentOp::op1, "1v2"}, {"1v3", "2v4", CoherentOp::op2, "3v4"},
        {"1v3", "2v4", CoherentOp::op3, "2v3"}, {"1v3", "2v4", CoherentOp::op4, "1v4"},
        {"2v3", "1v4", CoherentOp::op1, "1v2"}, {"2v3", "1v4", CoherentOp::op2, "3v4"},
        {"2v3", "1v4", CoherentOp::op3, "1v3"}, {"2v3", "1v4", CoherentOp::op4, "2v4"},
    };
    for (const auto &r : rows) {
        EXPECT_EQ(coherent_combine(S(r.a), S(r.b), r.op), S(r.want)) << r.a << " " << to_string(r.op) << " " << r.b;
    }
    EXPECT_EQ(coherent_combine(S("3v4"), S("1v2"), CoherentOp::op3), S("1v4"));
}

TEST(OnticCore, coherent_ops_algebra) {
    auto pure = six_pure();
    for (const auto &a : pure) {
        for (const auto &b : pure) {
            if (!is_disjoint(a, b)) continue;
            EXPECT_EQ(coherent_combine(a, b, CoherentOp::op1), coherent_combine(b, a, CoherentOp::op1));
            EXPECT_EQ(coherent_combine(a, b, CoherentOp::op2), coherent_combine(b, a, CoherentOp::op2));
            EXPECT_EQ(coherent_combine(a, b, CoherentOp::op3), coherent_combine(b, a, CoherentOp::op4));
        }
    }
}

TEST(OnticCore, coherent_op_errors) {
    EXPECT_THROW(coherent_combine(S("1v2"), S("1v3"), CoherentOp::op1), std::invalid_argument);
    EXPECT_THROW(coherent_combine(S("1|2|3"), S("4"), CoherentOp::op1), std::invalid_argument);
    EXPECT_THROW(coherent_combine(S("prod(1v2, 1v2)"), S("prod(3v4, 3v4)"), CoherentOp::op1),
                 std::invalid_argument);
}

TEST(OnticCore, purity) {
    EXPECT_TRUE(is_pure(S("1v2")));
    EXPECT_FALSE(is_pure(S("1|2|3|4")));
    EXPECT_TRUE(is_pure(S("(1,1)|(2,2)|(3,3)|(4,4)")));
    EXPECT_TRUE(is_pure(S("(1,1)|(1,2)|(1,3)|(1,4)")));
}

TEST(OnticCore, printing) {
    EXPECT_EQ(describe(S("prod(1v2, 2v4)")), "prod(1|2, 2|4)");
    EXPECT_EQ(members_string(S("1v2")), "1v2");
    EXPECT_EQ(to_literal(S("(2,2)|(1,1)")), "(1,1)|(2,2)");
}
