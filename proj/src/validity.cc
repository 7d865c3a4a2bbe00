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

#include "knowbal/validity.h"

#include <algorithm>
#include <array>
#include <deque>
#include <set>
#include <sstream>
#include <unordered_map>

namespace knowbal {

Catalog::Catalog(SystemShape shape, std::vector<EpistemicState> states) : shape_(shape) {
    if (shape.n_systems() > kMaxCatalogSystems) {
        throw std::invalid_argument("catalogs are supported for at most three systems");
    }
    for (const auto &s : states) {
        if (!(s.shape() == shape)) throw std::invalid_argument("catalog state has wrong shape");
    }
    std::sort(states.begin(), states.end(), canonical_less);
    states.erase(std::unique(states.begin(), states.end()), states.end());
    states_ = std::move(states);
    for (const auto &s : states_) {
        by_size_[s.size()].push_back(s);
        keys_.insert(s.members().word(0));
    }
}

const std::vector<EpistemicState> &Catalog::states_of_size(int size) const {
    static const std::vector<EpistemicState> empty;
    auto it = by_size_.find(size);
    return it == by_size_.end() ? empty : it->second;
}

std::vector<int> Catalog::sizes() const {
    std::vector<int> out;
    for (const auto &[size, list] : by_size_) out.push_back(size);
    return out;
}

std::string to_string(Rule rule) {
    switch (rule) {
    case Rule::V1: return "V1";
    case Rule::V2: return "V2";
    case Rule::V3: return "V3";
    }
    return "?";
}

namespace {

// The three canonical single-system partitions, as outcome pairs of values 0..3.
constexpr std::array<std::array<int, 2>, 6> kOutcomePairs = {{
    {0, 1}, {2, 3},  // 1v2 | 3v4
    {0, 2}, {1, 3},  // 1v3 | 2v4
    {1, 2}, {0, 3},  // 2v3 | 1v4
}};

int site_shift(int n, int site) { return 2 * (n - 1 - site); }

uint64_t marginal_mask(int n, uint64_t mask, const std::vector<int> &sites) {
    uint64_t out = 0;
    while (mask) {
        uint32_t i = static_cast<uint32_t>(__builtin_ctzll(mask));
        mask &= mask - 1;
        uint32_t p = 0;
        for (int site : sites) p = p * 4 + ((i >> site_shift(n, site)) & 3u);
        out |= uint64_t{1} << p;
    }
    return out;
}

struct Geometry {
    int n;
    // cylinder[site][pair]: cells whose digit at site lies in the outcome pair.
    std::vector<std::array<uint64_t, 6>> cylinder;
    std::vector<std::vector<int>> proper_subsystems;
};

const Geometry &geometry(int n) {
    static const std::array<Geometry, 3> geoms = [] {
        std::array<Geometry, 3> g;
        for (int k = 1; k <= 3; ++k) {
            Geometry &geo = g[k - 1];
            geo.n = k;
            geo.cylinder.resize(k);
            uint32_t count = 1u << (2 * k);
            for (int site = 0; site < k; ++site) {
                for (int p = 0; p < 6; ++p) {
                    uint64_t m = 0;
                    for (uint32_t i = 0; i < count; ++i) {
                        int d = static_cast<int>((i >> site_shift(k, site)) & 3u);
                        if (d == kOutcomePairs[p][0] || d == kOutcomePairs[p][1]) {
                            m |= uint64_t{1} << i;
                        }
                    }
                    geo.cylinder[site][p] = m;
                }
            }
            for (uint32_t sub = 1; sub + 1 < (1u << k); ++sub) {
                std::vector<int> sites;
                for (int site = 0; site < k; ++site) {
                    if (sub & (1u << site)) sites.push_back(site);
                }
                geo.proper_subsystems.push_back(sites);
            }
        }
        return g;
    }();
    return geoms[n - 1];
}

uint64_t swap_digits(int n, uint64_t mask, int site, int a, int b) {
    uint64_t out = 0;
    int shift = site_shift(n, site);
    while (mask) {
        uint32_t i = static_cast<uint32_t>(__builtin_ctzll(mask));
        mask &= mask - 1;
        int d = static_cast<int>((i >> shift) & 3u);
        if (d == a) {
            i = (i & ~(3u << shift)) | (static_cast<uint32_t>(b) << shift);
        } else if (d == b) {
            i = (i & ~(3u << shift)) | (static_cast<uint32_t>(a) << shift);
        }
        out |= uint64_t{1} << i;
    }
    return out;
}

bool size_ok(int n, uint64_t mask) {
    int size = __builtin_popcountll(mask);
    for (int k = 0; k <= n; ++k) {
        if (size == (1 << (2 * n - k))) return true;
    }
    return false;
}

const std::vector<uint8_t> &table(int n);

struct Failure {
    Rule rule;
    std::string detail;
};

std::string mask_literal(int n, uint64_t mask) {
    return to_literal(EpistemicState(SystemShape(n), OnticSet::from_word(mask)));
}

std::string sites_string(const std::vector<int> &sites) {
    std::string out = "{";
    for (size_t k = 0; k < sites.size(); ++k) {
        if (k) out += ",";
        out += std::to_string(sites[k] + 1);
    }
    return out + "}";
}

// V1 and V2 for one set; returns a failure description when violated.
std::optional<Failure> local_check(int n, uint64_t mask, bool detail) {
    if (!size_ok(n, mask)) {
        Failure f{Rule::V1, ""};
        if (detail) {
            f.detail = "size " + std::to_string(__builtin_popcountll(mask)) +
                       " is not 2^(2N-k) with 0 <= k <= N for N=" + std::to_string(n);
        }
        return f;
    }
    for (const auto &sites : geometry(n).proper_subsystems) {
        uint64_t m = marginal_mask(n, mask, sites);
        if (!table(static_cast<int>(sites.size()))[m]) {
            Failure f{Rule::V2, ""};
            if (detail) {
                f.detail = "marginal on systems " + sites_string(sites) + " is " +
                           mask_literal(static_cast<int>(sites.size()), m) + ", which is invalid";
            }
            return f;
        }
    }
    return std::nullopt;
}

const char *pair_name(int p) {
    static const char *names[6] = {"1v2", "3v4", "1v3", "2v4", "2v3", "1v4"};
    return names[p];
}

uint64_t value_cylinder(int n, int site, int v) {
    uint64_t m = 0;
    for (uint32_t i = 0; i < (1u << (2 * n)); ++i) {
        if (static_cast<int>((i >> site_shift(n, site)) & 3u) == v) m |= uint64_t{1} << i;
    }
    return m;
}

// Joint maximal outcomes on two of three systems.
struct JointMove {
    std::vector<int> sites;
    int rest;
    uint64_t outcome;   // two-system pure state
    uint64_t cylinder;  // its lift to three systems
};

const std::vector<JointMove> &joint_moves() {
    static const std::vector<JointMove> moves = [] {
        std::vector<JointMove> out;
        const auto &t2 = table(2);
        const std::array<std::pair<std::vector<int>, int>, 3> pairs = {{
            {{0, 1}, 2}, {{0, 2}, 1}, {{1, 2}, 0}}};
        for (const auto &[sites, rest] : pairs) {
            for (uint32_t o = 1; o < 65536; ++o) {
                if (!t2[o] || __builtin_popcount(o) != 4) continue;
                uint64_t cyl = 0;
                for (uint32_t i = 0; i < 64; ++i) {
                    uint32_t p = ((i >> site_shift(3, sites[0])) & 3u) * 4 +
                                 ((i >> site_shift(3, sites[1])) & 3u);
                    if (o >> p & 1u) cyl |= uint64_t{1} << i;
                }
                out.push_back(JointMove{sites, rest, o, cyl});
            }
        }
        return out;
    }();
    return moves;
}

std::optional<Failure> closure_check(int n, uint64_t root, bool detail, Closure closure) {
    struct Origin {
        uint64_t parent;
        std::string how;
    };
    std::unordered_map<uint64_t, Origin> seen;
    std::deque<uint64_t> queue;
    seen.emplace(root, Origin{root, ""});
    queue.push_back(root);
    const Geometry &geo = geometry(n);
    const bool joint = closure == Closure::joint && n == 3;
    std::array<uint64_t, 4> rest_cyl[3];
    if (joint) {
        for (int site = 0; site < 3; ++site) {
            for (int v = 0; v < 4; ++v) rest_cyl[site][v] = value_cylinder(3, site, v);
        }
    }
    while (!queue.empty()) {
        uint64_t m = queue.front();
        queue.pop_front();
        if (auto f = local_check(n, m, detail)) {
            if (m == root) return f;
            Failure out{Rule::V3, ""};
            if (detail) {
                const Origin &o = seen.at(m);
                std::ostringstream os;
                os << o.how << " updates " << mask_literal(n, o.parent) << " to "
                   << mask_literal(n, m) << ", which fails " << to_string(f->rule) << ": "
                   << f->detail;
                out.detail = os.str();
            }
            return out;
        }
        for (int site = 0; site < n; ++site) {
            for (int p = 0; p < 6; ++p) {
                uint64_t t = m & geo.cylinder[site][p];
                if (!t) continue;
                uint64_t u = t | swap_digits(n, t, site, kOutcomePairs[p][0], kOutcomePairs[p][1]);
                if (seen.count(u)) continue;
                std::string how;
                if (detail) {
                    how = std::string("outcome ") + pair_name(p) + " on system " +
                          std::to_string(site + 1);
                }
                seen.emplace(u, Origin{m, how});
                queue.push_back(u);
            }
        }
        if (!joint) continue;
        for (const auto &mv : joint_moves()) {
            uint64_t t = m & mv.cylinder;
            if (!t) continue;
            uint64_t rest = 0;
            for (int v = 0; v < 4; ++v) {
                if (t & rest_cyl[mv.rest][v]) rest |= rest_cyl[mv.rest][v];
            }
            uint64_t u = mv.cylinder & rest;
            if (seen.count(u)) continue;
            std::string how;
            if (detail) {
                how = "joint outcome " + mask_literal(2, mv.outcome) + " on systems " +
                      sites_string(mv.sites);
            }
            seen.emplace(u, Origin{m, how});
            queue.push_back(u);
        }
    }
    return std::nullopt;
}

std::vector<uint8_t> build_table(int n) {
    std::vector<uint8_t> t(size_t{1} << (1u << (2 * n)), 0);
    for (size_t mask = 1; mask < t.size(); ++mask) {
        if (!size_ok(n, mask)) continue;
        t[mask] = closure_check(n, mask, false, Closure::joint) ? 0 : 1;
    }
    return t;
}

const std::vector<uint8_t> &table(int n) {
    if (n == 1) {
        static const std::vector<uint8_t> t1 = build_table(1);
        return t1;
    }
    if (n == 2) {
        static const std::vector<uint8_t> t2 = build_table(2);
        return t2;
    }
    throw std::logic_error("no lookup table for this number of systems");
}

uint64_t apply_cells(uint64_t mask, const std::vector<uint8_t> &perm) {
    uint64_t out = 0;
    while (mask) {
        int i = __builtin_ctzll(mask);
        mask &= mask - 1;
        out |= uint64_t{1} << perm[i];
    }
    return out;
}

// Generators of ontic relabelings: (12) and (1234) per site, adjacent system swaps.
std::vector<std::vector<uint8_t>> relabel_generators(int n) {
    SystemShape shape(n);
    std::vector<std::vector<uint8_t>> gens;
    const std::array<std::array<int, 4>, 2> locals = {{{1, 0, 2, 3}, {1, 2, 3, 0}}};
    for (int site = 0; site < n; ++site) {
        for (const auto &loc : locals) {
            std::vector<uint8_t> g(shape.ontic_count());
            for (OnticIndex i = 0; i < shape.ontic_count(); ++i) {
                g[i] = static_cast<uint8_t>(with_digit(shape, i, site, loc[digit_at(shape, i, site)]));
            }
            gens.push_back(g);
        }
    }
    for (int site = 0; site + 1 < n; ++site) {
        std::vector<uint8_t> g(shape.ontic_count());
        for (OnticIndex i = 0; i < shape.ontic_count(); ++i) {
            int a = digit_at(shape, i, site);
            int b = digit_at(shape, i, site + 1);
            g[i] = static_cast<uint8_t>(with_digit(shape, with_digit(shape, i, site, b), site + 1, a));
        }
        gens.push_back(g);
    }
    return gens;
}

std::vector<std::vector<uint8_t>> group_elements(int n) {
    auto gens = relabel_generators(n);
    std::set<std::vector<uint8_t>> seen;
    std::vector<uint8_t> id(1u << (2 * n));
    for (size_t i = 0; i < id.size(); ++i) id[i] = static_cast<uint8_t>(i);
    std::deque<std::vector<uint8_t>> queue{id};
    seen.insert(id);
    while (!queue.empty()) {
        auto g = queue.front();
        queue.pop_front();
        for (const auto &h : gens) {
            std::vector<uint8_t> c(g.size());
            for (size_t i = 0; i < g.size(); ++i) c[i] = h[g[i]];
            if (seen.insert(c).second) queue.push_back(c);
        }
    }
    return {seen.begin(), seen.end()};
}

std::vector<uint64_t> orbit_expand(int n, const std::vector<uint64_t> &reps) {
    auto gens = relabel_generators(n);
    std::set<uint64_t> seen(reps.begin(), reps.end());
    std::deque<uint64_t> queue(reps.begin(), reps.end());
    while (!queue.empty()) {
        uint64_t m = queue.front();
        queue.pop_front();
        for (const auto &g : gens) {
            uint64_t img = apply_cells(m, g);
            if (seen.insert(img).second) queue.push_back(img);
        }
    }
    return {seen.begin(), seen.end()};
}

// Three systems: the rows T_a (a = value of system 1) are masks over the
// sixteen cells of systems 2 and 3. Every pair of nonempty rows must unite to
// a valid two-system state, and the row projections onto systems 2 and 3 must
// be row prefixes of valid two-system states. The largest row is made
// orbit-minimal under relabelings of systems 2 and 3; later rows are sorted by
// size. Representatives are expanded to full orbits at the end.
class RowSearch {
  public:
    RowSearch(int target, Closure closure)
        : target_(target), closure_(closure), pair_(table(2)) {
        auto group = group_elements(2);
        minimal_.assign(65536, 0);
        std::vector<uint8_t> seen(65536, 0);
        for (uint32_t t = 1; t < 65536; ++t) {
            if (seen[t]) continue;
            minimal_[t] = 1;
            for (const auto &g : group) seen[apply_cells(t, g)] = 1;
        }
        for (auto &p : prefix_) p.assign(65536, 0);
        for (uint32_t v = 1; v < 65536; ++v) {
            if (!pair_[v]) continue;
            valid2_.push_back(static_cast<uint16_t>(v));
            uint32_t key = 0;
            for (int r = 0; r < 4; ++r) {
                key |= ((v >> (4 * r)) & 0xFu) << (4 * r);
                prefix_[r][key] = 1;
            }
        }
        for (uint32_t t = 0; t < 65536; ++t) {
            uint32_t pb = 0, pc = 0;
            for (int i = 0; i < 16; ++i) {
                if (t >> i & 1u) {
                    pb |= 1u << (i >> 2);
                    pc |= 1u << (i & 3);
                }
            }
            proj_b_[t] = static_cast<uint8_t>(pb);
            proj_c_[t] = static_cast<uint8_t>(pc);
        }
    }

    std::vector<uint64_t> run() {
        for (uint32_t t0 = 1; t0 < 65536; ++t0) {
            int s0 = __builtin_popcount(t0);
            if (s0 * 4 < target_ || s0 >= target_) continue;
            if (!minimal_[t0]) continue;
            if (!prefix_[0][proj_b_[t0]] || !prefix_[0][proj_c_[t0]]) continue;
            rows_[0] = static_cast<uint16_t>(t0);
            compat_.clear();
            for (uint32_t t = 1; t < 65536; ++t) {
                if (__builtin_popcount(t) <= s0 && pair_[t | t0]) {
                    compat_.push_back(static_cast<uint16_t>(t));
                }
            }
            std::sort(compat_.begin(), compat_.end(), [](uint16_t a, uint16_t b) {
                int pa = __builtin_popcount(a), pb = __builtin_popcount(b);
                return pa != pb ? pa > pb : a < b;
            });
            extend(1, target_ - s0, s0, proj_b_[t0], proj_c_[t0]);
        }
        std::vector<uint64_t> reps(found_.begin(), found_.end());
        return orbit_expand(3, reps);
    }

  private:
    void extend(int row, int budget, int max_size, uint32_t key_b, uint32_t key_c) {
        if (budget == 0) {
            for (int r = row; r < 4; ++r) rows_[r] = 0;
            leaf(row);
            return;
        }
        if (row == 4) return;
        if (row == 1) {
            for (uint16_t t : compat_) {
                int s = __builtin_popcount(t);
                if (s > max_size || s > budget) continue;
                if (s * (4 - row) < budget) break;
                try_row(row, t, budget, key_b, key_c);
            }
            return;
        }
        // Row t must unite with row 1 to some valid V, so t = (V - T1) | part of T1.
        uint16_t t1 = rows_[1];
        for (uint16_t v : valid2_) {
            if ((v & t1) != t1) continue;
            uint16_t base = static_cast<uint16_t>(v & ~t1);
            uint16_t sub = t1;
            while (true) {
                uint16_t t = static_cast<uint16_t>(base | sub);
                int s = __builtin_popcount(t);
                if (t && s <= max_size && s <= budget && s * (4 - row) >= budget) {
                    try_row(row, t, budget, key_b, key_c);
                }
                if (sub == 0) break;
                sub = static_cast<uint16_t>((sub - 1) & t1);
            }
        }
    }

    void try_row(int row, uint16_t t, int budget, uint32_t key_b, uint32_t key_c) {
        uint32_t kb = key_b | (uint32_t{proj_b_[t]} << (4 * row));
        uint32_t kc = key_c | (uint32_t{proj_c_[t]} << (4 * row));
        if (!prefix_[row][kb] || !prefix_[row][kc]) return;
        for (int r = 0; r < row; ++r) {
            if (!pair_[rows_[r] | t]) return;
        }
        rows_[row] = t;
        extend(row + 1, budget - __builtin_popcount(t), __builtin_popcount(t), kb, kc);
    }

    void leaf(int nonempty) {
        if (nonempty != 2 && nonempty != 4) return;
        uint64_t mask = 0;
        for (int r = 0; r < 4; ++r) mask |= uint64_t{rows_[r]} << (16 * r);
        if (!table(2)[marginal_mask(3, mask, {1, 2})]) return;
        if (!table(2)[marginal_mask(3, mask, {0, 1})]) return;
        if (!table(2)[marginal_mask(3, mask, {0, 2})]) return;
        if (closure_check(3, mask, false, closure_)) return;
        found_.insert(mask);
    }

    int target_;
    Closure closure_;
    const std::vector<uint8_t> &pair_;
    std::vector<uint8_t> minimal_;
    std::array<std::vector<uint8_t>, 4> prefix_;
    std::array<uint8_t, 65536> proj_b_{};
    std::array<uint8_t, 65536> proj_c_{};
    std::vector<uint16_t> valid2_;
    std::vector<uint16_t> compat_;
    std::array<uint16_t, 4> rows_{};
    std::set<uint64_t> found_;
};

std::vector<EpistemicState> to_states(int n, const std::vector<uint64_t> &masks) {
    std::vector<EpistemicState> out;
    out.reserve(masks.size());
    for (uint64_t m : masks) out.emplace_back(SystemShape(n), OnticSet::from_word(m));
    std::sort(out.begin(), out.end(), canonical_less);
    return out;
}

void require_catalog_shape(SystemShape shape) {
    if (shape.n_systems() > kMaxCatalogSystems) {
        throw std::invalid_argument("validity is supported for at most three systems");
    }
}

}  // namespace

ValidityReport check_validity(const EpistemicState &s, Closure closure) {
    require_catalog_shape(s.shape());
    ValidityReport r;
    if (auto f = closure_check(s.shape().n_systems(), s.members().word(0), true, closure)) {
        r.valid = false;
        r.failed_rule = f->rule;
        r.detail = f->detail;
    }
    return r;
}

bool is_valid(const EpistemicState &s, Closure closure) {
    require_catalog_shape(s.shape());
    int n = s.shape().n_systems();
    if (n <= 2) return table(n)[s.members().word(0)] != 0;
    return !closure_check(n, s.members().word(0), false, closure);
}

std::optional<int> knowledge_count(const EpistemicState &s) {
    int size = s.size();
    if (size & (size - 1)) return std::nullopt;
    return 2 * s.shape().n_systems() - __builtin_ctz(static_cast<unsigned>(size));
}

std::vector<EpistemicState> enumerate_valid_of_size(SystemShape shape, int size, Closure closure) {
    require_catalog_shape(shape);
    int n = shape.n_systems();
    std::vector<uint64_t> masks;
    if (n <= 2) {
        const auto &t = table(n);
        for (size_t m = 1; m < t.size(); ++m) {
            if (t[m] && __builtin_popcountll(m) == size) masks.push_back(m);
        }
    } else {
        bool power = size > 0 && (size & (size - 1)) == 0;
        if (power && size >= 8 && size <= 64) masks = RowSearch(size, closure).run();
    }
    return to_states(n, masks);
}

Catalog enumerate_valid(SystemShape shape, Closure closure) {
    require_catalog_shape(shape);
    std::vector<EpistemicState> all;
    for (uint32_t size = shape.pure_size(); size <= shape.ontic_count(); size *= 2) {
        auto part = enumerate_valid_of_size(shape, static_cast<int>(size), closure);
        all.insert(all.end(), part.begin(), part.end());
    }
    return Catalog(shape, std::move(all));
}

}  // namespace knowbal
