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

#include <algorithm>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "knowbal/transforms.h"

namespace knowbal {

namespace {

void check_partition(SystemShape sub, const std::vector<EpistemicState> &outcomes) {
    if (outcomes.empty()) throw std::invalid_argument("measurement has no outcomes");
    OnticSet seen;
    for (const auto &o : outcomes) {
        if (!(o.shape() == sub)) throw std::invalid_argument("outcome has the wrong shape");
        if (!(seen & o.members()).empty()) {
            throw std::invalid_argument("outcomes overlap: " + to_literal(o));
        }
        seen = seen | o.members();
    }
    if (seen.count() != static_cast<int>(sub.ontic_count())) {
        throw std::invalid_argument("outcomes do not cover the ontic space");
    }
}

Measurement build(SystemShape shape, std::vector<int> sites, std::vector<EpistemicState> outcomes) {
    SystemShape sub(static_cast<int>(sites.size()));
    check_partition(sub, outcomes);
    for (const auto &o : outcomes) {
        if (!is_valid(o)) throw std::invalid_argument("outcome " + to_literal(o) + " is not a valid state");
    }
    return Measurement{shape, std::move(sites), std::move(outcomes)};
}

std::vector<int> all_sites(SystemShape shape) {
    std::vector<int> v(shape.n_systems());
    for (int i = 0; i < shape.n_systems(); ++i) v[i] = i;
    return v;
}

EpistemicState n1(uint64_t mask) { return EpistemicState(SystemShape(1), OnticSet::from_word(mask)); }

}  // namespace

bool Measurement::maximal() const {
    uint32_t pure = subsystem().pure_size();
    return std::all_of(outcomes.begin(), outcomes.end(),
                       [&](const EpistemicState &o) { return static_cast<uint32_t>(o.size()) == pure; });
}

EpistemicState Measurement::outcome_base(size_t k) const {
    if (k >= outcomes.size()) throw std::out_of_range("outcome index out of range");
    return whole_system() && sites == all_sites(shape) ? outcomes[k] : lift(outcomes[k], shape, sites);
}

Measurement make_measurement(std::vector<EpistemicState> outcomes, const Catalog &catalog) {
    SystemShape shape = catalog.shape();
    check_partition(shape, outcomes);
    for (const auto &o : outcomes) {
        if (!catalog.contains(o)) {
            throw std::invalid_argument("outcome " + to_literal(o) + " is not a valid state");
        }
    }
    return Measurement{shape, all_sites(shape), std::move(outcomes)};
}

Measurement make_measurement(std::vector<EpistemicState> outcomes) {
    if (outcomes.empty()) throw std::invalid_argument("measurement has no outcomes");
    SystemShape shape = outcomes[0].shape();
    return build(shape, all_sites(shape), std::move(outcomes));
}

Measurement on_sites(const Measurement &m, SystemShape shape, std::vector<int> sites) {
    if (!m.whole_system() || sites.size() != m.sites.size()) {
        throw std::invalid_argument("on_sites: site list does not match the measurement");
    }
    std::set<int> distinct(sites.begin(), sites.end());
    if (distinct.size() != sites.size()) throw std::invalid_argument("on_sites: repeated site");
    for (int s : sites) {
        if (s < 0 || s >= shape.n_systems()) throw std::out_of_range("on_sites: system index out of range");
    }
    return Measurement{shape, std::move(sites), m.outcomes};
}

Measurement canonical(const Measurement &m) {
    Measurement c = m;
    std::sort(c.outcomes.begin(), c.outcomes.end(), canonical_less);
    return c;
}

Measurement canonical_partition(char axis) {
    switch (axis) {
        case 'z': return build(SystemShape(1), {0}, {n1(0b0011), n1(0b1100)});
        case 'x': return build(SystemShape(1), {0}, {n1(0b0101), n1(0b1010)});
        case 'y': return build(SystemShape(1), {0}, {n1(0b0110), n1(0b1001)});
        default: throw std::invalid_argument(std::string("unknown partition '") + axis + "'");
    }
}

Measurement product_measurement(const std::vector<Measurement> &parts) {
    if (parts.empty()) throw std::invalid_argument("product of no measurements");
    std::vector<EpistemicState> outcomes = parts[0].outcomes;
    for (const auto &p : parts) {
        if (!p.whole_system()) throw std::invalid_argument("product factors must be whole-system");
    }
    for (size_t i = 1; i < parts.size(); ++i) {
        std::vector<EpistemicState> next;
        for (const auto &a : outcomes) {
            for (const auto &b : parts[i].outcomes) next.push_back(conjoin(a, b));
        }
        outcomes = std::move(next);
    }
    SystemShape shape = outcomes[0].shape();
    return build(shape, all_sites(shape), std::move(outcomes));
}

Measurement relation_measurement() {
    SystemShape two(2);
    std::vector<EpistemicState> outcomes;
    for (int k = 0; k < 4; ++k) {
        Permutation p = klein(k);
        std::vector<OnticIndex> cells;
        for (OnticIndex x = 0; x < 4; ++x) cells.push_back(x * 4 + p(x));
        outcomes.push_back(make_state(two, cells));
    }
    return build(two, {0, 1}, std::move(outcomes));
}

Measurement parity_measurement() {
    SystemShape two(2);
    EpistemicState lo = n1(0b0011), hi = n1(0b1100);
    OnticSet same = conjoin(lo, lo).members() | conjoin(hi, hi).members();
    OnticSet diff = conjoin(lo, hi).members() | conjoin(hi, lo).members();
    return build(two, {0, 1}, {EpistemicState(two, same), EpistemicState(two, diff)});
}

std::string roman(size_t k) {
    static const char *numerals[] = {"I", "II", "III", "IV", "V", "VI", "VII", "VIII",
                                     "IX", "X", "XI", "XII", "XIII", "XIV", "XV", "XVI"};
    if (k < 16) return numerals[k];
    return std::to_string(k + 1);
}

std::vector<Measurement> enumerate_maximal(SystemShape shape, const Catalog &catalog) {
    if (!(shape == catalog.shape())) throw std::invalid_argument("enumerate_maximal: shape mismatch");
    if (shape.n_systems() > 2) throw std::invalid_argument("enumerate_maximal supports N <= 2");
    const auto &pure = catalog.pure();
    uint64_t full = shape.ontic_count() == 64 ? ~uint64_t{0} : (uint64_t{1} << shape.ontic_count()) - 1;
    std::vector<std::vector<size_t>> by_low(shape.ontic_count());
    for (size_t i = 0; i < pure.size(); ++i) {
        by_low[__builtin_ctzll(pure[i].members().word(0))].push_back(i);
    }
    std::vector<Measurement> out;
    std::vector<size_t> chosen;
    std::function<void(uint64_t)> cover = [&](uint64_t covered) {
        if (covered == full) {
            std::vector<EpistemicState> outcomes;
            for (size_t i : chosen) outcomes.push_back(pure[i]);
            out.push_back(Measurement{shape, all_sites(shape), std::move(outcomes)});
            return;
        }
        int low = __builtin_ctzll(~covered);
        // Rows containing `low` as minimum are the only ones that can cover it.
        for (size_t i : by_low[low]) {
            uint64_t m = pure[i].members().word(0);
            if (m & covered) continue;
            chosen.push_back(i);
            cover(covered | m);
            chosen.pop_back();
        }
    };
    cover(0);
    return out;
}

Rational outcome_probability(const EpistemicState &s, const Measurement &m, size_t k) {
    if (!(s.shape() == m.shape)) throw std::invalid_argument("outcome_probability: shape mismatch");
    int hit = (s.members() & m.outcome_base(k).members()).count();
    return Rational(hit, s.size());
}

std::string to_string(UpdateRule rule) {
    return rule == UpdateRule::max_fidelity ? "max-fidelity" : "outcome-base";
}

UpdateResult update_max_fidelity(const EpistemicState &s, const EpistemicState &outcome,
                                 const Catalog &catalog) {
    require_same_shape(s, outcome, "update_max_fidelity");
    if (!(catalog.shape() == s.shape())) throw std::invalid_argument("update_max_fidelity: catalog shape");
    if ((s.members() & outcome.members()).empty()) {
        throw std::invalid_argument("outcome " + to_literal(outcome) + " is impossible for " + to_literal(s));
    }
    const EpistemicState *best = nullptr;
    Fidelity best_f;
    bool tie = false;
    for (const auto &c : catalog.states()) {
        if (!c.members().subset_of(outcome.members())) continue;
        Fidelity f = fidelity(s, c);
        if (!best || best_f < f) {
            best = &c;
            best_f = f;
            tie = false;
        } else if (f == best_f) {
            tie = true;
        }
    }
    return UpdateResult{*best, tie};
}

UpdateResult update_state(const EpistemicState &s, const Measurement &m, size_t k, UpdateRule rule,
                          const Catalog *catalog) {
    if (!(s.shape() == m.shape)) throw std::invalid_argument("update: shape mismatch");
    EpistemicState base = m.outcome_base(k);
    OnticSet t = s.members() & base.members();
    if (t.empty()) {
        throw std::invalid_argument("outcome " + roman(k) + " is impossible for " + to_literal(s));
    }
    const EpistemicState &o = m.outcomes[k];
    SystemShape sub = m.subsystem();
    if (static_cast<uint32_t>(o.size()) == sub.ontic_count()) return {s, false};
    if (m.whole_system()) {
        if (m.maximal() || rule == UpdateRule::outcome_base) {
            return {base, false};
        }
        if (!catalog) throw std::invalid_argument("max-fidelity update needs a catalog");
        return update_max_fidelity(s, base, *catalog);
    }
    if (!m.maximal()) {
        throw std::invalid_argument("nonmaximal measurements on part of a system are not supported");
    }
    if (m.sites.size() == 1) {
        // Either nothing happens or the two outcome values trade places.
        std::vector<OnticIndex> ab = o.members().members();
        int site = m.sites[0];
        OnticSet u = t;
        t.for_each([&](OnticIndex i) {
            int v = digit_at(s.shape(), i, site);
            int w = v == static_cast<int>(ab[0]) ? static_cast<int>(ab[1]) : static_cast<int>(ab[0]);
            u.set(with_digit(s.shape(), i, site, w));
        });
        return {EpistemicState(s.shape(), u), false};
    }
    std::vector<int> rest;
    for (int i = 0; i < s.shape().n_systems(); ++i) {
        if (std::find(m.sites.begin(), m.sites.end(), i) == m.sites.end()) rest.push_back(i);
    }
    EpistemicState r = marginal(EpistemicState(s.shape(), t), rest);
    return {EpistemicState(s.shape(), base.members() & lift(r, s.shape(), rest).members()), false};
}

EpistemicState epistemic_update(const EpistemicState &s, const Measurement &m, size_t k, UpdateRule rule,
                                const Catalog *catalog) {
    return update_state(s, m, k, rule, catalog).state;
}

bool are_mutually_unbiased(const Measurement &m1, const Measurement &m2) {
    if (!(m1.shape == m2.shape)) throw std::invalid_argument("are_mutually_unbiased: shape mismatch");
    std::optional<Fidelity> common;
    for (size_t i = 0; i < m1.outcomes.size(); ++i) {
        EpistemicState a = m1.outcome_base(i);
        for (size_t j = 0; j < m2.outcomes.size(); ++j) {
            Fidelity f = fidelity(a, m2.outcome_base(j));
            if (!common) {
                common = f;
            } else if (!(f == *common)) {
                return false;
            }
        }
    }
    return true;
}

bool is_mup_set(const std::vector<Measurement> &ms) {
    for (size_t i = 0; i < ms.size(); ++i) {
        for (size_t j = i + 1; j < ms.size(); ++j) {
            if (!are_mutually_unbiased(ms[i], ms[j])) return false;
        }
    }
    return true;
}

std::vector<MupSet> find_mup_sets(SystemShape shape, int target_size, const Catalog &catalog,
                                  bool exhaustive) {
    if (!(shape == catalog.shape())) throw std::invalid_argument("find_mup_sets: shape mismatch");
    if (target_size < 1) throw std::invalid_argument("find_mup_sets: target size must be positive");
    std::vector<Measurement> all = enumerate_maximal(shape, catalog);
    size_t n = all.size();
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) adj[i][j] = adj[j][i] = are_mutually_unbiased(all[i], all[j]);
    }
    std::vector<MupSet> out;
    std::vector<size_t> clique;
    std::function<bool(const std::vector<size_t> &)> grow = [&](const std::vector<size_t> &cand) {
        if (static_cast<int>(clique.size()) == target_size) {
            MupSet set;
            for (size_t i : clique) set.measurements.push_back(all[i]);
            if (set.measurements.size() > 1) {
                set.common_fidelity = fidelity(set.measurements[0].outcome_base(0),
                                               set.measurements[1].outcome_base(0));
            }
            out.push_back(std::move(set));
            return !exhaustive;
        }
        if (clique.size() + cand.size() < static_cast<size_t>(target_size)) return false;
        for (size_t a = 0; a < cand.size(); ++a) {
            std::vector<size_t> next;
            for (size_t b = a + 1; b < cand.size(); ++b) {
                if (adj[cand[a]][cand[b]]) next.push_back(cand[b]);
            }
            clique.push_back(cand[a]);
            bool stop = grow(next);
            clique.pop_back();
            if (stop) return true;
        }
        return false;
    };
    std::vector<size_t> every(n);
    for (size_t i = 0; i < n; ++i) every[i] = i;
    grow(every);
    return out;
}

std::string serialize_measurements(const std::vector<Measurement> &ms) {
    std::string body;
    int n = ms.empty() ? 0 : ms[0].shape.n_systems();
    body += "{\"format\":\"knowbal-measurements\",\"version\":1,\"n_systems\":" + std::to_string(n) + "}\n";
    for (const auto &m : ms) {
        body += "{\"sites\":[";
        for (size_t i = 0; i < m.sites.size(); ++i) body += (i ? "," : "") + std::to_string(m.sites[i]);
        body += "],\"outcomes\":[";
        for (size_t k = 0; k < m.outcomes.size(); ++k) {
            if (k) body += ',';
            body += '[';
            bool first = true;
            m.outcomes[k].members().for_each([&](OnticIndex i) {
                if (!first) body += ',';
                first = false;
                body += std::to_string(i);
            });
            body += ']';
        }
        body += "]}\n";
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a64(body)));
    return body + "{\"checksum\":\"fnv1a64:" + hex + "\"}\n";
}

std::string diagram(const Measurement &m) {
    if (m.shape.n_systems() != 2) throw std::invalid_argument("diagrams are drawn for pairs");
    std::vector<std::string> label(16, ".");
    for (size_t k = 0; k < m.outcomes.size(); ++k) {
        m.outcome_base(k).members().for_each([&](OnticIndex i) { label[i] = roman(k); });
    }
    size_t width = 1;
    for (const auto &l : label) width = std::max(width, l.size());
    std::ostringstream os;
    for (int b = 3; b >= 0; --b) {
        for (int a = 0; a < 4; ++a) {
            const std::string &l = label[a * 4 + b];
            os << (a ? " " : "") << l << std::string(width - l.size(), ' ');
        }
        os << "\n";
    }
    return os.str();
}

std::string describe(const Measurement &m) {
    std::string out = "{";
    for (size_t k = 0; k < m.outcomes.size(); ++k) {
        if (k) out += " | ";
        out += describe(m.outcomes[k]);
    }
    out += "}";
    if (m.sites != all_sites(m.shape)) {
        out += " on";
        for (int s : m.sites) out += " " + std::to_string(s + 1);
    }
    return out;
}

}  // namespace knowbal
