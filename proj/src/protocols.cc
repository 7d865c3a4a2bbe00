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

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace knowbal {

namespace {

const SystemShape kOne(1);
const SystemShape kTwo(2);
const SystemShape kThree(3);

std::string rat(const Rational &r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

std::string dist_string(const std::vector<Rational> &d) {
    std::string out = "(";
    for (size_t i = 0; i < d.size(); ++i) out += (i ? ", " : "") + rat(d[i]);
    return out + ")";
}

std::string yes(bool b) { return b ? "true" : "false"; }

Measurement local(char axis, SystemShape shape, int site) {
    return on_sites(canonical_partition(axis), shape, {site});
}

EpistemicState complement(const EpistemicState &s) {
    return EpistemicState(s.shape(), full_state(s.shape()).members() - s.members());
}

bool perfectly_correlated(const EpistemicState &pair) {
    if (pair.size() != 4) return false;
    for (int site = 0; site < 2; ++site) {
        if (marginal(pair, {site}).size() != 4) return false;
    }
    return true;
}

std::vector<EpistemicState> six_pure() {
    std::vector<EpistemicState> out;
    for (const char *lit : {"1|2", "3|4", "1|3", "2|4", "2|3", "1|4"}) out.push_back(single_state(lit));
    return out;
}

void mc_summary(ProtocolReport &r, const std::string &what, const RunResult &res) {
    r.check(what + ": frequencies within 3 sigma of prediction", res.within_3sigma());
    r.check(what + ": ontic state stays inside the tracked state", res.consistent());
}

}  // namespace

bool ProtocolReport::pass() const {
    return std::all_of(assertions.begin(), assertions.end(), [](const Assertion &a) { return a.pass; });
}

void ProtocolReport::check(const std::string &description, const std::string &expected,
                           const std::string &observed) {
    assertions.push_back(Assertion{description, expected, observed, expected == observed});
}

void ProtocolReport::check(const std::string &description, bool ok) {
    check(description, "true", yes(ok));
}

ProtocolContext::ProtocolContext(CatalogStore &store, uint64_t seed, uint64_t trials)
    : store_(store), seed_(seed), trials_(trials) {}

const TransformationGroup &ProtocolContext::group2() {
    if (!group2_) group2_ = enumerate_allowed(kTwo, catalog(2));
    return *group2_;
}

RunConfig ProtocolContext::run_config(int n_systems) const {
    RunConfig cfg;
    cfg.seed = seed_;
    cfg.n_trials = trials_;
    cfg.shape = SystemShape(n_systems);
    return cfg;
}

EpistemicState single_state(const std::string &literal) {
    std::vector<OnticIndex> cells;
    for (char c : literal) {
        if (c >= '1' && c <= '4') {
            cells.push_back(static_cast<OnticIndex>(c - '1'));
        } else if (c != '|') {
            throw std::invalid_argument("bad single-system literal '" + literal + "'");
        }
    }
    return make_state(kOne, cells);
}

EpistemicState relation_state(int k) {
    Permutation p = klein(k);
    std::vector<OnticIndex> cells;
    for (OnticIndex x = 0; x < 4; ++x) cells.push_back(x * 4 + p(x));
    return make_state(kTwo, cells);
}

EpistemicState ghz_state() {
    return make_state_from_labels({{1, 1, 1}, {1, 2, 2}, {2, 1, 2}, {2, 2, 1},
                                   {3, 3, 3}, {3, 4, 4}, {4, 3, 4}, {4, 4, 3}});
}

EpistemicState all_equal_triple() {
    return make_state_from_labels({{1, 1, 1}, {2, 2, 2}, {3, 3, 3}, {4, 4, 4}});
}

ProtocolReport interference_report(ProtocolContext &ctx) {
    ProtocolReport r{"interference", {}, {}, {}};
    Measurement x = canonical_partition('x');
    struct Case {
        const char *label;
        const char *prep;
        std::vector<Rational> expected;
    };
    const Case cases[] = {{"a", "1|2", {Rational(1, 2), Rational(1, 2)}},
                          {"b", "3|4", {Rational(1, 2), Rational(1, 2)}},
                          {"c", "1|3", {Rational(1), Rational(0)}}};
    for (const auto &c : cases) {
        std::vector<Step> prog{PrepareStep{single_state(c.prep)}, MeasureStep{x, "r"}};
        Exploration ex = explore(prog);
        r.check(std::string("case (") + c.label + "): prepare " + c.prep + ", measure {1v3|2v4}",
                dist_string(c.expected), dist_string(ex.distributions.at(1)));
        RunResult res = run_trials(prog, ctx.run_config(1));
        mc_summary(r, std::string("case (") + c.label + ") Monte Carlo", res);
    }
    EpistemicState lo = single_state("1|2"), hi = single_state("3|4");
    EpistemicState coherent = coherent_combine(lo, hi, CoherentOp::op1);
    r.check("coherent combination (1v2) +1 (3v4)", "1|3", to_literal(coherent));
    auto convex = convex_combine({lo, hi}, ctx.catalog(1));
    r.check("convex combination of 1v2 and 3v4", "1|2|3|4", convex ? to_literal(*convex) : "undefined");
    r.check("coherent and convex combinations differ", convex.has_value() && !(*convex == coherent));
    return r;
}

ProtocolReport noncommutativity_report(ProtocolContext &ctx) {
    ProtocolReport r{"noncommutativity", {}, {}, {}};
    EpistemicState prep = single_state("1|2");
    Measurement z = canonical_partition('z'), x = canonical_partition('x');
    std::vector<Step> order_a{PrepareStep{prep}, MeasureStep{z, "first"}, MeasureStep{x, "second"}};
    std::vector<Step> order_b{PrepareStep{prep}, MeasureStep{x, "first"}, MeasureStep{z, "second"}};
    Exploration a = explore(order_a), b = explore(order_b);
    r.check("{1v2|3v4} first: its outcomes", "(1, 0)", dist_string(a.distributions.at(1)));
    r.check("{1v2|3v4} first, then {1v3|2v4}", "(1/2, 1/2)", dist_string(a.distributions.at(2)));
    r.check("{1v3|2v4} first: its outcomes", "(1/2, 1/2)", dist_string(b.distributions.at(1)));
    r.check("{1v3|2v4} first, then {1v2|3v4}", "(1/2, 1/2)", dist_string(b.distributions.at(2)));
    r.check("order changes the {1v2|3v4} statistics",
            !(a.distributions.at(1) == b.distributions.at(2)));
    mc_summary(r, "order A Monte Carlo", run_trials(order_a, ctx.run_config(1)));
    mc_summary(r, "order B Monte Carlo", run_trials(order_b, ctx.run_config(1)));
    return r;
}

ProtocolReport steering_report(ProtocolContext &ctx) {
    ProtocolReport r{"steering", {}, {}, {}};
    EpistemicState diag = relation_state(0);
    struct Transition {
        char axis;
        size_t outcome;
        const char *expected;
    };
    const Transition ts[] = {{'z', 0, "prod(1|2, 1|2)"},
                             {'z', 1, "prod(3|4, 3|4)"},
                             {'x', 0, "prod(1|3, 1|3)"},
                             {'x', 1, "prod(2|4, 2|4)"}};
    for (const auto &t : ts) {
        Measurement m = local(t.axis, kTwo, 0);
        EpistemicState after = epistemic_update(diag, m, t.outcome);
        r.check("measure " + describe(canonical_partition(t.axis)) + " on A, outcome " +
                    to_literal(m.outcomes[t.outcome]),
                t.expected, describe(after));
    }
    for (char axis : {'z', 'x'}) {
        std::vector<Step> prog{PrepareStep{diag}, MeasureStep{local(axis, kTwo, 0), "a"}};
        RunResult res = run_trials(prog, ctx.run_config(2));
        uint64_t constant = 0;
        for (const auto &rec : res.records) {
            bool same = true;
            for (const auto &s : rec.steps) same = same && digit_at(kTwo, s.ontic, 1) == digit_at(kTwo, rec.initial_ontic, 1);
            constant += same;
        }
        r.check(std::string("trials with B's ontic value unchanged, measuring ") + axis + " on A",
                std::to_string(res.n_trials), std::to_string(constant));
        mc_summary(r, std::string("steering ") + axis + " Monte Carlo", res);
    }
    return r;
}

ProtocolReport inverter_search(ProtocolContext &ctx) {
    ProtocolReport r{"inverter", {}, {}, {}};
    const EpistemicState required[] = {single_state("1|2"), single_state("1|3"), single_state("2|3")};
    int all_three = 0, first_two = 0, allowed = 0;
    std::string first_two_perms;
    bool third_fails = true;
    for (const auto &p : s4_elements()) {
        allowed += is_allowed(p, ctx.catalog(1));
        bool swaps[3];
        for (int i = 0; i < 3; ++i) swaps[i] = apply(p, required[i]) == complement(required[i]);
        if (swaps[0] && swaps[1] && swaps[2]) ++all_three;
        if (swaps[0] && swaps[1]) {
            ++first_two;
            first_two_perms += (first_two_perms.empty() ? "" : " ") + to_cycles(p);
            third_fails = third_fails && !swaps[2];
        }
        if (to_cycles(p) == "(13)(24)") {
            r.check("(13)(24) exchanges 1v2<->3v4 and 2v3<->1v4 but fixes 1v3", "true false true",
                    yes(swaps[0]) + " " + yes(swaps[1]) + " " + yes(swaps[2]));
        }
    }
    r.check("allowed single-system permutations", "24", std::to_string(allowed));
    r.check("permutations exchanging 1v2<->3v4 and 1v3<->2v4", "(14)(23)", first_two_perms);
    r.check("those permutations fail 2v3<->1v4", third_fails);
    r.check("permutations inverting all three", "0", std::to_string(all_three));
    return r;
}

std::optional<Permutation> find_cloner(const EpistemicState &s1, const EpistemicState &s2,
                                       const EpistemicState &blank, ProtocolContext &ctx) {
    for (const auto &s : {s1, s2, blank}) {
        if (!(s.shape() == kOne) || !is_pure(s)) throw std::invalid_argument("cloner inputs must be pure N=1 states");
    }
    EpistemicState in1 = conjoin(s1, blank), in2 = conjoin(s2, blank);
    EpistemicState out1 = conjoin(s1, s1), out2 = conjoin(s2, s2);
    for (const auto &p : ctx.group2().elements) {
        if (apply(p, in1) == out1 && apply(p, in2) == out2) return p;
    }
    return std::nullopt;
}

ProtocolReport cloner_search(ProtocolContext &ctx) {
    ProtocolReport r{"cloner", {}, {}, {}};
    EpistemicState blank = single_state("1|2");
    EpistemicState a = single_state("3|4"), b = single_state("1|3");
    auto none = find_cloner(a, b, blank, ctx);
    r.check("allowed cloner for {3v4, 1v3} with blank 1v2", "none", none ? describe(*none) : "none");
    int before = (conjoin(a, blank).members() & conjoin(b, blank).members()).count();
    int after = (conjoin(a, a).members() & conjoin(b, b).members()).count();
    r.check("overlap of the two inputs (cells)", "2", std::to_string(before));
    r.check("overlap of the two required outputs (cells)", "1", std::to_string(after));
    r.check("permutations preserve overlap, so no cloner can exist", before != after);
    auto witness = find_cloner(single_state("1|2"), single_state("3|4"), blank, ctx);
    r.check("a cloner exists for the disjoint pair {1v2, 3v4}", witness.has_value());
    if (witness) r.artifacts.push_back(Artifact{"disjoint cloner", describe(*witness)});
    auto ident = find_cloner(blank, blank, blank, ctx);
    r.check("identity clones a state paired with itself", ident.has_value() && ident->is_identity());
    r.check("size of the allowed N=2 group searched", "11520", std::to_string(ctx.group2().order()));
    return r;
}

ProtocolReport broadcast_check(ProtocolContext &ctx) {
    ProtocolReport r{"broadcast", {}, {}, {}};
    int with_pure_marginal = 0, products = 0;
    for (const auto &s : ctx.catalog(2).states()) {
        EpistemicState ma = marginal(s, {0}), mb = marginal(s, {1});
        if (ma.size() == 2 || mb.size() == 2) {
            ++with_pure_marginal;
            products += conjoin(ma, mb) == s;
        }
    }
    r.check("valid pair states with a pure marginal that are products", std::to_string(with_pure_marginal),
            std::to_string(products));
    EpistemicState mixed = make_state_from_labels(
        {{1, 1}, {1, 2}, {2, 1}, {2, 2}, {3, 3}, {3, 4}, {4, 3}, {4, 4}});
    r.check("[(1v2).(1v2)]v[(3v4).(3v4)] is valid", ctx.catalog(2).contains(mixed));
    r.check("its A marginal", "1|2|3|4", to_literal(marginal(mixed, {0})));
    r.check("its B marginal", "1|2|3|4", to_literal(marginal(mixed, {1})));
    EpistemicState prod = conjoin(single_state("1|3"), single_state("2|3"));
    r.check("a product state carries its own marginals", conjoin(marginal(prod, {0}), marginal(prod, {1})) == prod);
    r.notes.push_back("pure-state broadcasting therefore reduces to cloning; see the cloner report");
    return r;
}

ProtocolReport dense_coding_run(ProtocolContext &ctx) {
    ProtocolReport r{"dense_coding", {}, {}, {}};
    const char *messages[] = {"00", "01", "10", "11"};
    Measurement bob = relation_measurement();
    for (int k = 0; k < 4; ++k) {
        Permutation alice = on_sites(klein(k), kTwo, {0});
        std::vector<Step> prog{PrepareStep{relation_state(0)}, TransformStep{alice, std::nullopt},
                               MeasureStep{bob, "m"}};
        Exploration ex = explore(prog);
        std::vector<Rational> want(4, Rational(0));
        want[k] = 1;
        r.check(std::string("message ") + messages[k] + " via " + to_cycles(klein(k)) + ": outcome distribution",
                dist_string(want), dist_string(ex.distributions.at(2)));
        RunResult res = run_trials(prog, ctx.run_config(2));
        uint64_t errors = 0;
        for (const auto &row : res.frequencies) errors += row.outcome != static_cast<size_t>(k) ? row.count : 0;
        r.check(std::string("message ") + messages[k] + ": decode errors over " + std::to_string(res.n_trials) +
                    " trials",
                "0", std::to_string(errors));
    }
    // Largest family of pairwise disjoint single-system states.
    const auto &states = ctx.catalog(1).states();
    size_t best = 0;
    std::function<void(size_t, OnticSet, size_t)> grow = [&](size_t from, OnticSet used, size_t n) {
        best = std::max(best, n);
        for (size_t i = from; i < states.size(); ++i) {
            if ((states[i].members() & used).empty()) grow(i + 1, used | states[i].members(), n + 1);
        }
    };
    grow(0, OnticSet(), 0);
    r.check("perfectly distinguishable preparations of one system", "2", std::to_string(best));
    return r;
}

ProtocolReport teleportation_run(ProtocolContext &ctx) {
    ProtocolReport r{"teleportation", {}, {}, {}};
    r.notes.push_back("Bob's correction, the inverse of the relation found, acts on B");
    Measurement alice = on_sites(relation_measurement(), kThree, {0, 1});
    std::vector<Step> corrections;
    for (int k = 0; k < 4; ++k) {
        corrections.push_back(
            TransformStep{on_sites(invert(klein(k)), kThree, {2}), Condition{"p", k}});
    }
    for (const auto &u : six_pure()) {
        std::vector<Step> prog{PrepareStep{conjoin(u, relation_state(0))}, MeasureStep{alice, "p"}};
        prog.insert(prog.end(), corrections.begin(), corrections.end());
        Exploration ex = explore(prog);
        bool all_match = true, b_match = true;
        OnticSet victor;
        for (const auto &leaf : ex.leaves) {
            int k = leaf.bindings.at("p");
            all_match = all_match && leaf.state == conjoin(relation_state(k), u);
            EpistemicState b = marginal(leaf.state, {2});
            b_match = b_match && b == u;
            victor = victor | b.members();
        }
        std::string tag = "unknown " + to_literal(u);
        r.check(tag + ": branches", "4", std::to_string(ex.leaves.size()));
        r.check(tag + ": final state is relation(P) on A'A times the unknown on B", all_match);
        r.check(tag + ": B marginal equals the unknown on every branch", b_match);
        r.check(tag + ": B description without the outcome", to_literal(u),
                to_literal(EpistemicState(kOne, victor)));
        RunResult res = run_trials(prog, ctx.run_config(3));
        uint64_t transferred = 0;
        for (const auto &rec : res.records) {
            transferred += digit_at(kThree, rec.steps.back().ontic, 2) == digit_at(kThree, rec.initial_ontic, 0);
        }
        r.check(tag + ": trials with B's final value equal to A''s initial value", std::to_string(res.n_trials),
                std::to_string(transferred));
        mc_summary(r, tag + " Monte Carlo", res);
    }
    // Spot check of one branch.
    {
        EpistemicState u = single_state("1|3");
        EpistemicState s = conjoin(u, relation_state(0));
        EpistemicState after = epistemic_update(s, alice, 2);
        after = apply(on_sites(invert(klein(2)), kThree, {2}), after);
        r.check("unknown 1v3, relation (13)(24): B marginal", "1|3", to_literal(marginal(after, {2})));
    }
    r.check("classical bits sent to Bob", "2", std::to_string(__builtin_ctz(alice.outcomes.size())));

    // Entanglement swapping on C, A', A, B.
    SystemShape four(4);
    Measurement mid = on_sites(relation_measurement(), four, {1, 2});
    std::vector<Step> prog{PrepareStep{conjoin(relation_state(0), relation_state(0))}, MeasureStep{mid, "p"}};
    for (int k = 0; k < 4; ++k) {
        prog.push_back(TransformStep{on_sites(invert(klein(k)), four, {3}), Condition{"p", k}});
    }
    Exploration ex = explore(prog);
    bool swapped = ex.leaves.size() == 4;
    for (const auto &leaf : ex.leaves) swapped = swapped && marginal(leaf.state, {0, 3}) == relation_state(0);
    r.check("entanglement swapping: C and B end identically related on every branch", swapped);
    RunResult res = run_trials(prog, ctx.run_config(4));
    uint64_t related = 0;
    for (const auto &rec : res.records) {
        OnticIndex last = rec.steps.back().ontic;
        related += digit_at(four, last, 3) == digit_at(four, last, 0);
    }
    r.check("entanglement swapping: trials with B's value equal to C's", std::to_string(res.n_trials),
            std::to_string(related));
    mc_summary(r, "entanglement swapping Monte Carlo", res);
    return r;
}

ProtocolReport monogamy_check(ProtocolContext &ctx) {
    ProtocolReport r{"monogamy", {}, {}, {}};
    ValidityReport eq = check_validity(all_equal_triple());
    r.check("(1.1.1)v(2.2.2)v(3.3.3)v(4.4.4) is valid", "false", yes(eq.valid));
    r.check("rule it breaks", "V1", eq.failed_rule ? to_string(*eq.failed_rule) : "none");
    EpistemicState ghz = ghz_state();
    r.check("triplet-correlated (GHZ-like) state is valid", ctx.catalog(3).contains(ghz));
    const std::vector<std::vector<int>> pairs = {{0, 1}, {0, 2}, {1, 2}};
    EpistemicState mixed = make_state_from_labels(
        {{1, 1}, {1, 2}, {2, 1}, {2, 2}, {3, 3}, {3, 4}, {4, 3}, {4, 4}});
    bool marginals_ok = true;
    for (const auto &p : pairs) marginals_ok = marginals_ok && marginal(ghz, p) == mixed;
    r.check("its pair marginals are all [(1v2).(1v2)]v[(3v4).(3v4)]", marginals_ok);
    int polygamous = 0, monogamous = 0;
    for (const auto &s : ctx.catalog(3).pure()) {
        int perfect = 0;
        for (const auto &p : pairs) perfect += perfectly_correlated(marginal(s, p));
        polygamous += perfect >= 2;
        monogamous += perfect == 1;
    }
    r.check("pure triple states perfectly correlated across two or more pairs", "0", std::to_string(polygamous));
    r.artifacts.push_back(Artifact{"pure triple states with one perfectly correlated pair", std::to_string(monogamous)});
    return r;
}

CorrelationTable toy_table() {
    CorrelationTable t;
    t.columns = {"{1v2,3v4}", "{1v3,2v4}", "{2v3,1v4}"};
    for (int k = 0; k < 4; ++k) {
        t.rows.push_back(to_cycles(klein(k)));
        EpistemicState s = relation_state(k);
        std::string row;
        for (char axis : {'z', 'x', 'y'}) {
            Measurement ma = local(axis, kTwo, 0), mb = local(axis, kTwo, 1);
            char cell = '?';
            for (size_t i = 0; i < ma.outcomes.size(); ++i) {
                if (outcome_probability(s, ma, i).numerator() == 0) continue;
                EpistemicState after = epistemic_update(s, ma, i);
                for (size_t j = 0; j < mb.outcomes.size(); ++j) {
                    if (outcome_probability(after, mb, j) == Rational(1)) {
                        char c = i == j ? 'C' : 'A';
                        cell = cell == '?' || cell == c ? c : '!';
                    }
                }
            }
            row += cell;
        }
        t.cells.push_back(row);
    }
    return t;
}

ProtocolReport toy_correlation_table(ProtocolContext &) {
    ProtocolReport r{"toy_table", {}, {}, {}};
    CorrelationTable t = toy_table();
    const char *want[] = {"CCC", "CAA", "ACA", "AAC"};
    for (size_t i = 0; i < 4; ++i) {
        r.check("row " + t.rows[i], want[i], t.cells[i]);
        r.check("row " + t.rows[i] + " parity", "even", t.parity(i));
    }
    r.artifacts.push_back(Artifact{"table.csv", table_csv(t)});
    return r;
}

std::vector<std::string> protocol_names() {
    return {"interference", "noncommutativity", "steering", "inverter",     "cloner",
            "broadcast",    "dense_coding",     "teleportation", "monogamy", "toy_table"};
}

ProtocolReport run_protocol(const std::string &name, ProtocolContext &ctx) {
    static const std::map<std::string, std::function<ProtocolReport(ProtocolContext &)>> registry = {
        {"interference", interference_report}, {"noncommutativity", noncommutativity_report},
        {"steering", steering_report},         {"inverter", inverter_search},
        {"cloner", cloner_search},             {"broadcast", broadcast_check},
        {"dense_coding", dense_coding_run},    {"teleportation", teleportation_run},
        {"monogamy", monogamy_check},          {"toy_table", toy_correlation_table},
    };
    auto it = registry.find(name);
    if (it == registry.end()) throw std::invalid_argument("unknown protocol '" + name + "'");
    return it->second(ctx);
}

std::string report_json(const std::vector<ProtocolReport> &reports) {
    nlohmann::ordered_json out;
    bool all = true;
    out["reports"] = nlohmann::ordered_json::array();
    for (const auto &rep : reports) {
        nlohmann::ordered_json j;
        j["name"] = rep.name;
        j["pass"] = rep.pass();
        j["assertions"] = nlohmann::ordered_json::array();
        for (const auto &a : rep.assertions) {
            j["assertions"].push_back(
                {{"description", a.description}, {"expected", a.expected}, {"observed", a.observed}, {"pass", a.pass}});
        }
        j["artifacts"] = nlohmann::ordered_json::array();
        for (const auto &a : rep.artifacts) j["artifacts"].push_back({{"name", a.name}, {"content", a.content}});
        j["notes"] = rep.notes;
        all = all && rep.pass();
        out["reports"].push_back(j);
    }
    out["pass"] = all;
    return out.dump(2) + "\n";
}

std::string report_text(const std::vector<ProtocolReport> &reports) {
    std::ostringstream os;
    int passed = 0;
    for (const auto &rep : reports) {
        os << "== " << rep.name << ": " << (rep.pass() ? "PASS" : "FAIL") << "\n";
        for (const auto &a : rep.assertions) {
            os << "  [" << (a.pass ? "ok" : "FAIL") << "] " << a.description << ": " << a.observed;
            if (!a.pass) os << " (expected " << a.expected << ")";
            os << "\n";
        }
        for (const auto &n : rep.notes) os << "  note: " << n << "\n";
        for (const auto &a : rep.artifacts) {
            os << "  " << a.name << ":";
            os << (a.content.find('\n') == std::string::npos ? " " : "\n") << a.content;
            if (a.content.empty() || a.content.back() != '\n') os << "\n";
        }
        passed += rep.pass();
    }
    os << passed << "/" << reports.size() << " protocols passed\n";
    return os.str();
}

}  // namespace knowbal
