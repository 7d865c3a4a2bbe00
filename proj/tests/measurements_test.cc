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

#include "knowbal/measurements.h"

#include <set>

#include "gtest/gtest.h"
#include "knowbal/protocols.h"
#include "oracles.h"
#include "test_util.h"

using namespace knowbal;
using knowbal::testing::S;
using knowbal::testing::store;

namespace {

const SystemShape kOne(1), kTwo(2);

Measurement same_axis(char axis) {
    return product_measurement({canonical_partition(axis), canonical_partition(axis)});
}

Measurement local(char axis, int site) { return on_sites(canonical_partition(axis), kTwo, {site}); }

std::vector<uint64_t> masks(const Measurement &m) {
    std::vector<uint64_t> out;
    for (const auto &o : m.outcomes) out.push_back(o.members().word(0));
    std::sort(out.begin(), out.end());
    return out;
}

bool is_product(const EpistemicState &s) { return conjoin(marginal(s, {0}), marginal(s, {1})) == s; }

}  // namespace

TEST(Measurements, make_measurement) {
    const Catalog &cat = store().get(1);
    Measurement z = make_measurement({S("1v2"), S("3v4")}, cat);
    EXPECT_TRUE(z.maximal());
    EXPECT_EQ(z, canonical_partition('z'));
    EXPECT_THROW(make_measurement({S("1"), S("2|3|4")}, cat), std::invalid_argument);
    EXPECT_THROW(make_measurement({S("1v2"), S("2v3")}, cat), std::invalid_argument);
    EXPECT_THROW(make_measurement({S("1v2")}, cat), std::invalid_argument);
    EXPECT_THROW(make_measurement({S("1"), S("2|3|4")}), std::invalid_argument);
    Measurement bell = make_measurement(relation_measurement().outcomes, store().get(2));
    EXPECT_EQ(bell.outcomes.size(), 4u);
    EXPECT_TRUE(bell.maximal());
}

TEST(Measurements, canonical_partitions) {
    EXPECT_EQ(canonical_partition('z').outcomes, (std::vector<EpistemicState>{S("1v2"), S("3v4")}));
    EXPECT_EQ(canonical_partition('x').outcomes, (std::vector<EpistemicState>{S("1v3"), S("2v4")}));
    EXPECT_EQ(canonical_partition('y').outcomes, (std::vector<EpistemicState>{S("2v3"), S("1v4")}));
    EXPECT_THROW(canonical_partition('w'), std::invalid_argument);
    EXPECT_EQ(roman(0), "I");
    EXPECT_EQ(roman(3), "IV");
}

TEST(Measurements, enumerate_single_system) {
    auto ms = enumerate_maximal(kOne, store().get(1));
    EXPECT_EQ(ms.size(), 3u);
    std::set<std::vector<uint64_t>> got, want;
    for (const auto &m : ms) got.insert(masks(m));
    for (const auto &p : oracle::maximal_partitions(1)) want.insert(p);
    EXPECT_EQ(got, want);
}

TEST(Measurements, enumerate_pair) {
    auto ms = enumerate_maximal(kTwo, store().get(2));
    EXPECT_EQ(ms.size(), 105u);
    std::set<std::vector<uint64_t>> got, want;
    for (const auto &m : ms) got.insert(masks(m));
    for (const auto &p : oracle::maximal_partitions(2)) want.insert(p);
    EXPECT_EQ(got, want);
    EXPECT_EQ(got.size(), ms.size());
    EXPECT_TRUE(got.count(masks(relation_measurement())));
    EXPECT_TRUE(got.count(masks(same_axis('z'))));
    size_t joint_only = 0, product_only = 0;
    for (const auto &m : ms) {
        bool all_corr = true, all_prod = true;
        for (const auto &o : m.outcomes) {
            all_corr = all_corr && !is_product(o);
            all_prod = all_prod && is_product(o);
        }
        joint_only += all_corr;
        product_only += all_prod;
    }
    EXPECT_GE(joint_only, 4u);
    EXPECT_GT(product_only, 0u);
}

TEST(Measurements, partitions_cover_exactly) {
    for (const auto &m : enumerate_maximal(kTwo, store().get(2))) {
        OnticSet seen;
        for (const auto &o : m.outcomes) {
            ASSERT_TRUE((seen & o.members()).empty());
            seen = seen | o.members();
            ASSERT_TRUE(store().get(2).contains(o));
        }
        ASSERT_EQ(seen.count(), 16);
    }
}

TEST(Measurements, outcome_bases_range_over_pure_states) {
    std::set<uint64_t> bases;
    for (const auto &m : enumerate_maximal(kTwo, store().get(2))) {
        for (const auto &o : m.outcomes) bases.insert(o.members().word(0));
    }
    std::set<uint64_t> pure;
    for (const auto &p : store().get(2).pure()) pure.insert(p.members().word(0));
    EXPECT_EQ(bases, pure);
}

TEST(Measurements, update_examples) {
    EpistemicState diag = S("(1,1)|(2,2)|(3,3)|(4,4)");
    EXPECT_EQ(epistemic_update(diag, local('z', 0), 0), S("prod(1v2, 1v2)"));
    EXPECT_EQ(epistemic_update(S("(1,4)|(2,3)|(3,1)|(4,2)"), local('y', 0), 1), S("prod(1v4, 2v4)"));
    EXPECT_EQ(epistemic_update(S("prod(2v3, 1v2)"), relation_measurement(), 0), diag);
    EXPECT_EQ(epistemic_update(S("1v2"), canonical_partition('x'), 0), S("1v3"));
    EXPECT_THROW(epistemic_update(S("1v2"), canonical_partition('z'), 1), std::invalid_argument);
}

TEST(Measurements, max_fidelity_update) {
    const Catalog &cat = store().get(2);
    Measurement parity = parity_measurement();
    UpdateResult r = update_max_fidelity(S("prod(2v3, 1v2)"), parity.outcomes[0], cat);
    EXPECT_EQ(r.state, S("prod(1v2, 1v2)"));
    EXPECT_FALSE(r.tie);
    EpistemicState inside = S("prod(1v2, 1v2)");
    EXPECT_EQ(update_max_fidelity(inside, parity.outcomes[0], cat).state, inside);
    EXPECT_EQ(update_state(S("prod(2v3, 1v2)"), parity, 0, UpdateRule::outcome_base).state, parity.outcomes[0]);
    EXPECT_THROW(update_state(S("prod(2v3, 1v2)"), parity, 0), std::invalid_argument);
}

TEST(Measurements, max_fidelity_tie_is_flagged) {
    Catalog tiny(kOne, {S("1v2"), S("1v3")});
    UpdateResult r = update_max_fidelity(S("1"), S("1|2|3"), tiny);
    EXPECT_TRUE(r.tie);
    EXPECT_EQ(r.state, S("1v2"));
}

TEST(Measurements, no_ties_for_pair_states) {
    const Catalog &cat = store().get(2);
    for (const auto &o : cat.states_of_size(8)) {
        for (const auto &s : cat.states()) {
            if ((s.members() & o.members()).empty()) continue;
            ASSERT_FALSE(update_max_fidelity(s, o, cat).tie) << to_literal(s) << " / " << to_literal(o);
        }
    }
}

TEST(Measurements, coarse_graining) {
    Measurement parity = parity_measurement();
    Measurement zz = same_axis('z');
    EXPECT_EQ(parity.outcomes[0].members(), zz.outcomes[0].members() | zz.outcomes[3].members());
    EXPECT_EQ(parity.outcomes[1].members(), zz.outcomes[1].members() | zz.outcomes[2].members());
    Measurement bell = relation_measurement();
    EXPECT_EQ(parity.outcomes[0].members(), bell.outcomes[0].members() | bell.outcomes[1].members());
    EXPECT_EQ(parity.outcomes[1].members(), bell.outcomes[2].members() | bell.outcomes[3].members());
    EXPECT_FALSE(parity.maximal());
}

TEST(Measurements, updates_are_valid_and_reproducible) {
    const Catalog &cat = store().get(2);
    std::vector<Measurement> ms = enumerate_maximal(kTwo, cat);
    for (char a : {'z', 'x', 'y'}) {
        ms.push_back(local(a, 0));
        ms.push_back(local(a, 1));
    }
    for (const auto &m : ms) {
        for (const auto &s : cat.states()) {
            for (size_t k = 0; k < m.outcomes.size(); ++k) {
                if (outcome_probability(s, m, k).numerator() == 0) continue;
                EpistemicState t = epistemic_update(s, m, k, UpdateRule::max_fidelity, &cat);
                ASSERT_TRUE(cat.contains(t));
                ASSERT_EQ(outcome_probability(t, m, k), Rational(1));
            }
        }
    }
}

TEST(Measurements, probabilities_sum_to_one) {
    const Catalog &cat = store().get(2);
    Measurement m = relation_measurement();
    for (const auto &s : cat.states()) {
        Rational total(0);
        for (size_t k = 0; k < m.outcomes.size(); ++k) total += outcome_probability(s, m, k);
        ASSERT_EQ(total, Rational(1));
    }
}

TEST(Measurements, noncommutativity) {
    Measurement z = canonical_partition('z'), x = canonical_partition('x');
    EpistemicState s = S("1v2");
    EXPECT_EQ(outcome_probability(s, z, 0), Rational(1));
    EpistemicState after_x = epistemic_update(s, x, 0);
    EXPECT_EQ(outcome_probability(after_x, z, 0), Rational(1, 2));
    EXPECT_EQ(outcome_probability(after_x, z, 1), Rational(1, 2));
}

TEST(Measurements, single_system_mups) {
    std::vector<Measurement> three = {canonical_partition('z'), canonical_partition('x'), canonical_partition('y')};
    EXPECT_TRUE(is_mup_set(three));
    auto sets = find_mup_sets(kOne, 3, store().get(1));
    ASSERT_EQ(sets.size(), 1u);
    EXPECT_EQ(sets[0].common_fidelity.squared(), std::make_pair(int64_t{1}, int64_t{4}));
    EXPECT_TRUE(find_mup_sets(kOne, 4, store().get(1)).empty());
    EXPECT_FALSE(are_mutually_unbiased(canonical_partition('z'), canonical_partition('z')));
}

TEST(Measurements, pair_quintuple) {
    std::vector<Measurement> products = {same_axis('z'), same_axis('x'), same_axis('y')};
    EXPECT_TRUE(is_mup_set(products));
    // Complete the products with joint measurements.
    std::vector<Measurement> joint;
    for (const auto &m : enumerate_maximal(kTwo, store().get(2))) {
        bool all_corr = true;
        for (const auto &o : m.outcomes) all_corr = all_corr && !is_product(o);
        bool unbiased = true;
        for (const auto &p : products) unbiased = unbiased && are_mutually_unbiased(m, p);
        if (all_corr && unbiased) joint.push_back(m);
    }
    bool found = false;
    for (size_t i = 0; i < joint.size() && !found; ++i) {
        for (size_t j = i + 1; j < joint.size() && !found; ++j) {
            std::vector<Measurement> five = products;
            five.push_back(joint[i]);
            five.push_back(joint[j]);
            found = is_mup_set(five);
        }
    }
    EXPECT_TRUE(found);
}

TEST(Measurements, pair_mup_search) {
    auto fives = find_mup_sets(kTwo, 5, store().get(2));
    auto parts = oracle::maximal_partitions(2);
    EXPECT_EQ(fives.size(), oracle::count_unbiased_sets(parts, 5));
    EXPECT_EQ(fives.size(), 6u);
    for (const auto &s : fives) EXPECT_TRUE(is_mup_set(s.measurements));
    EXPECT_TRUE(find_mup_sets(kTwo, 6, store().get(2)).empty());
    EXPECT_EQ(oracle::count_unbiased_sets(parts, 6), 0u);
    EXPECT_EQ(find_mup_sets(kTwo, 5, store().get(2), false).size(), 1u);
}

TEST(Measurements, export_format) {
    std::string text = serialize_measurements({canonical_partition('z')});
    EXPECT_EQ(text.substr(0, text.find('\n')).find("\"format\":\"knowbal-measurements\""), 1u);
    EXPECT_NE(text.find("\"outcomes\":[[0,1],[2,3]]"), std::string::npos);
    EXPECT_NE(text.find("fnv1a64:"), std::string::npos);
}

TEST(Measurements, diagram) {
    std::string d = diagram(relation_measurement());
    EXPECT_EQ(std::count(d.begin(), d.end(), '\n'), 4);
    EXPECT_NE(d.find("I"), std::string::npos);
    EXPECT_THROW(diagram(canonical_partition('z')), std::invalid_argument);
}

TEST(Measurements, on_sites_checks) {
    EXPECT_THROW(on_sites(canonical_partition('z'), kTwo, {2}), std::out_of_range);
    EXPECT_THROW(on_sites(relation_measurement(), kTwo, {0, 0}), std::invalid_argument);
}
