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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "knowbal/validity.h"

namespace knowbal {

SystemShape::SystemShape(int n_systems) : n_(n_systems) {
    if (n_systems < 1 || n_systems > kMaxSystems) {
        throw std::invalid_argument("number of systems must be in [1, " +
                                    std::to_string(kMaxSystems) + "], got " +
                                    std::to_string(n_systems));
    }
}

std::vector<int> decode_index(SystemShape shape, OnticIndex index) {
    if (index >= shape.ontic_count()) {
        throw std::out_of_range("ontic index " + std::to_string(index) + " out of range");
    }
    std::vector<int> digits(shape.n_systems());
    for (int site = 0; site < shape.n_systems(); ++site) {
        digits[site] = digit_at(shape, index, site);
    }
    return digits;
}

OnticIndex encode_index(SystemShape shape, const std::vector<int> &digits) {
    if (static_cast<int>(digits.size()) != shape.n_systems()) {
        throw std::invalid_argument("tuple arity does not match number of systems");
    }
    OnticIndex index = 0;
    for (int d : digits) {
        if (d < 0 || d > 3) throw std::out_of_range("ontic digit out of range");
        index = index * 4 + static_cast<OnticIndex>(d);
    }
    return index;
}

int OnticSet::count() const {
    int c = 0;
    for (uint64_t w : words_) c += __builtin_popcountll(w);
    return c;
}

bool OnticSet::subset_of(const OnticSet &other) const {
    for (int k = 0; k < 4; ++k) {
        if (words_[k] & ~other.words_[k]) return false;
    }
    return true;
}

std::vector<OnticIndex> OnticSet::members() const {
    std::vector<OnticIndex> out;
    out.reserve(count());
    for_each([&](OnticIndex i) { out.push_back(i); });
    return out;
}

OnticSet OnticSet::operator&(const OnticSet &o) const {
    OnticSet r;
    for (int k = 0; k < 4; ++k) r.words_[k] = words_[k] & o.words_[k];
    return r;
}

OnticSet OnticSet::operator|(const OnticSet &o) const {
    OnticSet r;
    for (int k = 0; k < 4; ++k) r.words_[k] = words_[k] | o.words_[k];
    return r;
}

OnticSet OnticSet::operator-(const OnticSet &o) const {
    OnticSet r;
    for (int k = 0; k < 4; ++k) r.words_[k] = words_[k] & ~o.words_[k];
    return r;
}

bool lex_less(const OnticSet &a, const OnticSet &b) {
    auto ma = a.members();
    auto mb = b.members();
    return std::lexicographical_compare(ma.begin(), ma.end(), mb.begin(), mb.end());
}

EpistemicState::EpistemicState(SystemShape shape, OnticSet members)
    : shape_(shape), members_(members) {
    if (members_.empty()) throw std::invalid_argument("epistemic state must be nonempty");
    uint32_t n = shape.ontic_count();
    for (int k = 0; k < 4; ++k) {
        uint32_t lo = static_cast<uint32_t>(k) * 64;
        if (lo >= n) {
            if (members_.word(k) != 0) throw std::out_of_range("ontic index out of range");
        } else if (n - lo < 64 && (members_.word(k) >> (n - lo)) != 0) {
            throw std::out_of_range("ontic index out of range");
        }
    }
}

bool canonical_less(const EpistemicState &a, const EpistemicState &b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return lex_less(a.members(), b.members());
}

EpistemicState make_state(SystemShape shape, const std::vector<OnticIndex> &members) {
    if (members.empty()) throw std::invalid_argument("member list is empty");
    OnticSet set;
    for (OnticIndex i : members) {
        if (i >= shape.ontic_count()) {
            throw std::out_of_range("ontic index " + std::to_string(i) + " out of range for " +
                                    std::to_string(shape.n_systems()) + " system(s)");
        }
        set.set(i);
    }
    return EpistemicState(shape, set);
}

EpistemicState make_state_from_labels(const std::vector<std::vector<int>> &tuples) {
    if (tuples.empty()) throw std::invalid_argument("member list is empty");
    SystemShape shape(static_cast<int>(tuples.front().size()));
    std::vector<OnticIndex> members;
    for (const auto &t : tuples) {
        std::vector<int> digits;
        for (int label : t) {
            if (label < 1 || label > 4) throw std::out_of_range("ontic label must be 1..4");
            digits.push_back(label - 1);
        }
        members.push_back(encode_index(shape, digits));
    }
    return make_state(shape, members);
}

EpistemicState full_state(SystemShape shape) {
    OnticSet set;
    for (OnticIndex i = 0; i < shape.ontic_count(); ++i) set.set(i);
    return EpistemicState(shape, set);
}

OnticIndex project_index(SystemShape shape, OnticIndex index, const std::vector<int> &sites) {
    OnticIndex out = 0;
    for (int site : sites) out = out * 4 + static_cast<OnticIndex>(digit_at(shape, index, site));
    return out;
}

EpistemicState marginal(const EpistemicState &s, std::vector<int> keep) {
    if (keep.empty()) throw std::invalid_argument("marginal needs a nonempty set of systems");
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    for (int site : keep) {
        if (site < 0 || site >= s.shape().n_systems()) {
            throw std::out_of_range("system index out of range in marginal");
        }
    }
    SystemShape sub(static_cast<int>(keep.size()));
    OnticSet out;
    s.members().for_each([&](OnticIndex i) { out.set(project_index(s.shape(), i, keep)); });
    return EpistemicState(sub, out);
}

EpistemicState conjoin(const EpistemicState &s1, const EpistemicState &s2) {
    int n = s1.shape().n_systems() + s2.shape().n_systems();
    if (n > kMaxSystems) throw std::invalid_argument("conjunction exceeds supported system count");
    SystemShape shape(n);
    uint32_t width = s2.shape().ontic_count();
    OnticSet out;
    s1.members().for_each([&](OnticIndex a) {
        s2.members().for_each([&](OnticIndex b) { out.set(a * width + b); });
    });
    return EpistemicState(shape, out);
}

EpistemicState conjoin_all(const std::vector<EpistemicState> &factors) {
    if (factors.empty()) throw std::invalid_argument("conjunction of no factors");
    EpistemicState acc = factors.front();
    for (size_t k = 1; k < factors.size(); ++k) acc = conjoin(acc, factors[k]);
    return acc;
}

EpistemicState lift(const EpistemicState &sub, SystemShape shape, const std::vector<int> &sites) {
    if (static_cast<int>(sites.size()) != sub.shape().n_systems()) {
        throw std::invalid_argument("site list does not match subsystem arity");
    }
    OnticSet out;
    for (OnticIndex i = 0; i < shape.ontic_count(); ++i) {
        if (sub.contains(project_index(shape, i, sites))) out.set(i);
    }
    return EpistemicState(shape, out);
}

void require_same_shape(const EpistemicState &a, const EpistemicState &b, const char *what) {
    if (!(a.shape() == b.shape())) {
        throw std::invalid_argument(std::string(what) + ": shape mismatch");
    }
}

double Fidelity::value() const {
    return static_cast<double>(overlap) /
           std::sqrt(static_cast<double>(size1) * static_cast<double>(size2));
}

std::pair<int64_t, int64_t> Fidelity::squared() const {
    int64_t num = overlap * overlap;
    int64_t den = size1 * size2;
    int64_t g = std::gcd(num, den);
    if (g == 0) return {0, 1};
    return {num / g, den / g};
}

bool Fidelity::operator==(const Fidelity &o) const {
    return overlap * overlap * o.size1 * o.size2 == o.overlap * o.overlap * size1 * size2;
}

bool Fidelity::operator<(const Fidelity &o) const {
    return overlap * overlap * o.size1 * o.size2 < o.overlap * o.overlap * size1 * size2;
}

namespace {

std::optional<int64_t> exact_sqrt(int64_t v) {
    auto r = static_cast<int64_t>(std::llround(std::sqrt(static_cast<double>(v))));
    for (int64_t c = std::max<int64_t>(0, r - 1); c <= r + 1; ++c) {
        if (c * c == v) return c;
    }
    return std::nullopt;
}

}  // namespace

std::string Fidelity::to_string() const {
    auto [num, den] = squared();
    if (num == 0) return "0";
    auto rn = exact_sqrt(num);
    auto rd = exact_sqrt(den);
    std::string top = rn ? std::to_string(*rn) : "sqrt(" + std::to_string(num) + ")";
    if (rd && *rd == 1) return top;
    std::string bottom = rd ? std::to_string(*rd) : "sqrt(" + std::to_string(den) + ")";
    return top + "/" + bottom;
}

Fidelity fidelity(const EpistemicState &s1, const EpistemicState &s2) {
    require_same_shape(s1, s2, "fidelity");
    return Fidelity{(s1.members() & s2.members()).count(), s1.size(), s2.size()};
}

bool is_disjoint(const EpistemicState &s1, const EpistemicState &s2) {
    require_same_shape(s1, s2, "is_disjoint");
    return (s1.members() & s2.members()).empty();
}

bool is_compatible(const EpistemicState &s1, const EpistemicState &s2, const Catalog &catalog) {
    require_same_shape(s1, s2, "is_compatible");
    if (!(catalog.shape() == s1.shape())) {
        throw std::invalid_argument("is_compatible: no catalog for this number of systems");
    }
    OnticSet common = s1.members() & s2.members();
    return !common.empty() && catalog.contains(common);
}

std::optional<EpistemicState> convex_combine(const std::vector<EpistemicState> &states,
                                             const Catalog &catalog) {
    if (states.size() < 2) throw std::invalid_argument("convex_combine needs at least two states");
    for (const auto &s : states) require_same_shape(states.front(), s, "convex_combine");
    if (!(catalog.shape() == states.front().shape())) {
        throw std::invalid_argument("convex_combine: no catalog for this number of systems");
    }
    OnticSet acc;
    for (const auto &s : states) {
        if (!(acc & s.members()).empty()) return std::nullopt;
        acc = acc | s.members();
    }
    if (!catalog.contains(acc)) return std::nullopt;
    return EpistemicState(states.front().shape(), acc);
}

std::string to_string(CoherentOp op) {
    switch (op) {
    case CoherentOp::op1: return "+1";
    case CoherentOp::op2: return "+2";
    case CoherentOp::op3: return "+3";
    case CoherentOp::op4: return "+4";
    }
    return "?";
}

EpistemicState coherent_combine(const EpistemicState &s1, const EpistemicState &s2, CoherentOp op) {
    if (s1.shape().n_systems() != 1 || s2.shape().n_systems() != 1) {
        throw std::invalid_argument("coherent operations are defined for one system only");
    }
    if (s1.size() != 2 || s2.size() != 2) {
        throw std::invalid_argument("coherent operations need pure operands");
    }
    if (!is_disjoint(s1, s2)) {
        throw std::invalid_argument("coherent operations are undefined for nondisjoint states");
    }
    auto m1 = s1.members().members();
    auto m2 = s2.members().members();
    OnticIndex pick1 = 0;
    OnticIndex pick2 = 0;
    switch (op) {
    case CoherentOp::op1: pick1 = m1[0]; pick2 = m2[0]; break;
    case CoherentOp::op2: pick1 = m1[1]; pick2 = m2[1]; break;
    case CoherentOp::op3: pick1 = m1[1]; pick2 = m2[0]; break;
    case CoherentOp::op4: pick1 = m1[0]; pick2 = m2[1]; break;
    }
    return make_state(s1.shape(), {pick1, pick2});
}

bool is_pure(const EpistemicState &s) {
    return static_cast<uint32_t>(s.size()) == s.shape().pure_size();
}

namespace {

std::string tuple_literal(SystemShape shape, OnticIndex i, char sep, bool parens) {
    std::string out;
    if (parens) out += '(';
    auto digits = decode_index(shape, i);
    for (size_t k = 0; k < digits.size(); ++k) {
        if (k) out += sep;
        out += static_cast<char>('1' + digits[k]);
    }
    if (parens) out += ')';
    return out;
}

}  // namespace

std::string to_literal(const EpistemicState &s) {
    bool single = s.shape().n_systems() == 1;
    std::string out;
    bool first = true;
    s.members().for_each([&](OnticIndex i) {
        if (!first) out += '|';
        first = false;
        out += tuple_literal(s.shape(), i, ',', !single);
    });
    return out;
}

std::string members_string(const EpistemicState &s) {
    bool single = s.shape().n_systems() == 1;
    std::string out;
    bool first = true;
    s.members().for_each([&](OnticIndex i) {
        if (!first) out += 'v';
        first = false;
        out += tuple_literal(s.shape(), i, '.', !single);
    });
    return out;
}

std::string describe(const EpistemicState &s) {
    int n = s.shape().n_systems();
    if (n == 1) return to_literal(s);
    std::vector<EpistemicState> factors;
    for (int site = 0; site < n; ++site) factors.push_back(marginal(s, {site}));
    if (conjoin_all(factors) == s) {
        std::string out = "prod(";
        for (int site = 0; site < n; ++site) {
            if (site) out += ", ";
            out += to_literal(factors[site]);
        }
        return out + ")";
    }
    return to_literal(s);
}

}  // namespace knowbal
