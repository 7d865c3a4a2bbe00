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

#include "knowbal/transforms.h"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <set>
#include <sstream>
#include <stdexcept>

#include "knowbal/quantum_ref.h"

namespace knowbal {

Permutation::Permutation(SystemShape shape, std::vector<OnticIndex> image)
    : shape_(shape), image_(std::move(image)) {
    if (image_.size() != shape.ontic_count()) {
        throw std::invalid_argument("permutation image has wrong length");
    }
    std::vector<bool> hit(image_.size(), false);
    for (OnticIndex v : image_) {
        if (v >= image_.size() || hit[v]) throw std::invalid_argument("image is not a bijection");
        hit[v] = true;
    }
}

Permutation Permutation::identity(SystemShape shape) {
    std::vector<OnticIndex> img(shape.ontic_count());
    for (OnticIndex i = 0; i < img.size(); ++i) img[i] = i;
    return Permutation(shape, img);
}

bool Permutation::is_identity() const {
    for (OnticIndex i = 0; i < image_.size(); ++i) {
        if (image_[i] != i) return false;
    }
    return true;
}

Permutation compose(const Permutation &p, const Permutation &q) {
    if (!(p.shape() == q.shape())) throw std::invalid_argument("compose: shape mismatch");
    std::vector<OnticIndex> img(q.image().size());
    for (OnticIndex i = 0; i < img.size(); ++i) img[i] = p(q(i));
    return Permutation(p.shape(), img);
}

Permutation invert(const Permutation &p) {
    std::vector<OnticIndex> img(p.image().size());
    for (OnticIndex i = 0; i < img.size(); ++i) img[p(i)] = i;
    return Permutation(p.shape(), img);
}

EpistemicState apply(const Permutation &p, const EpistemicState &s) {
    if (!(p.shape() == s.shape())) throw std::invalid_argument("apply: shape mismatch");
    OnticSet out;
    s.members().for_each([&](OnticIndex i) { out.set(p(i)); });
    return EpistemicState(s.shape(), out);
}

bool is_even(const Permutation &p) {
    std::vector<bool> seen(p.image().size(), false);
    int transpositions = 0;
    for (OnticIndex i = 0; i < seen.size(); ++i) {
        if (seen[i]) continue;
        int len = 0;
        for (OnticIndex j = i; !seen[j]; j = p(j)) {
            seen[j] = true;
            ++len;
        }
        transpositions += len - 1;
    }
    return transpositions % 2 == 0;
}

Permutation embed_local(const std::vector<Permutation> &perms) {
    if (perms.empty() || static_cast<int>(perms.size()) > kMaxSystems) {
        throw std::invalid_argument("embed_local: wrong arity");
    }
    for (const auto &p : perms) {
        if (p.shape().n_systems() != 1) {
            throw std::invalid_argument("embed_local takes single-system permutations");
        }
    }
    SystemShape shape(static_cast<int>(perms.size()));
    std::vector<OnticIndex> img(shape.ontic_count());
    for (OnticIndex i = 0; i < img.size(); ++i) {
        OnticIndex j = i;
        for (int site = 0; site < shape.n_systems(); ++site) {
            j = with_digit(shape, j, site, static_cast<int>(perms[site](digit_at(shape, i, site))));
        }
        img[i] = j;
    }
    return Permutation(shape, img);
}

Permutation on_sites(const Permutation &sub, SystemShape shape, const std::vector<int> &sites) {
    if (static_cast<int>(sites.size()) != sub.shape().n_systems()) {
        throw std::invalid_argument("on_sites: site list does not match permutation arity");
    }
    std::set<int> distinct(sites.begin(), sites.end());
    if (distinct.size() != sites.size()) throw std::invalid_argument("on_sites: repeated site");
    for (int site : sites) {
        if (site < 0 || site >= shape.n_systems()) {
            throw std::out_of_range("on_sites: system index out of range");
        }
    }
    SystemShape sub_shape = sub.shape();
    std::vector<OnticIndex> img(shape.ontic_count());
    for (OnticIndex i = 0; i < img.size(); ++i) {
        OnticIndex local = project_index(shape, i, sites);
        OnticIndex moved = sub(local);
        OnticIndex j = i;
        for (size_t k = 0; k < sites.size(); ++k) {
            j = with_digit(shape, j, sites[k], digit_at(sub_shape, moved, static_cast<int>(k)));
        }
        img[i] = j;
    }
    return Permutation(shape, img);
}

Permutation system_swap(SystemShape shape, int i, int j) {
    std::vector<OnticIndex> img(shape.ontic_count());
    for (OnticIndex x = 0; x < img.size(); ++x) {
        int a = digit_at(shape, x, i);
        int b = digit_at(shape, x, j);
        img[x] = with_digit(shape, with_digit(shape, x, i, b), j, a);
    }
    return Permutation(shape, img);
}

Permutation cnot_analogue() {
    // Value v = 2z + x. Control z is copied onto the target's z; the
    // target's x is copied back onto the control's x.
    SystemShape two(2);
    std::vector<OnticIndex> img(16);
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            int za = a >> 1, xa = a & 1, zb = b >> 1, xb = b & 1;
            int a2 = (za << 1) | (xa ^ xb);
            int b2 = ((za ^ zb) << 1) | xb;
            img[a * 4 + b] = static_cast<OnticIndex>(a2 * 4 + b2);
        }
    }
    return Permutation(two, img);
}

Permutation klein(int k) {
    static const std::array<std::array<OnticIndex, 4>, 4> maps = {{
        {0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}}};
    if (k < 0 || k > 3) throw std::out_of_range("relation index must be 0..3");
    return Permutation(SystemShape(1), {maps[k].begin(), maps[k].end()});
}

std::vector<Permutation> s4_elements() {
    std::vector<OnticIndex> img = {0, 1, 2, 3};
    std::vector<Permutation> out;
    do {
        out.emplace_back(SystemShape(1), img);
    } while (std::next_permutation(img.begin(), img.end()));
    return out;
}

Permutation parse_cycles(const std::string &text) {
    std::vector<OnticIndex> img = {0, 1, 2, 3};
    std::vector<bool> used(4, false);
    size_t pos = 0;
    bool any = false;
    while (pos < text.size()) {
        if (text[pos] != '(') throw std::invalid_argument("cycle notation: expected '('");
        size_t close = text.find(')', pos);
        if (close == std::string::npos) throw std::invalid_argument("cycle notation: missing ')'");
        std::vector<int> cycle;
        for (size_t k = pos + 1; k < close; ++k) {
            char c = text[k];
            if (c < '1' || c > '4') throw std::invalid_argument("cycle notation: labels are 1..4");
            int v = c - '1';
            if (used[v]) throw std::invalid_argument("cycle notation: repeated label");
            used[v] = true;
            cycle.push_back(v);
        }
        if (cycle.empty()) throw std::invalid_argument("cycle notation: empty cycle");
        for (size_t k = 0; k < cycle.size(); ++k) {
            img[cycle[k]] = static_cast<OnticIndex>(cycle[(k + 1) % cycle.size()]);
        }
        any = true;
        pos = close + 1;
    }
    if (!any) throw std::invalid_argument("cycle notation: empty");
    return Permutation(SystemShape(1), img);
}

std::string to_cycles(const Permutation &p) {
    if (p.shape().n_systems() != 1) throw std::invalid_argument("cycle notation is for one system");
    std::vector<bool> seen(4, false);
    std::string cycles, fixed;
    for (OnticIndex i = 0; i < 4; ++i) {
        if (seen[i]) continue;
        std::string c = "(";
        for (OnticIndex j = i; !seen[j]; j = p(j)) {
            seen[j] = true;
            c += static_cast<char>('1' + j);
        }
        c += ")";
        (c.size() == 3 ? fixed : cycles) += c;
    }
    return cycles + fixed;
}

std::string describe(const Permutation &p) {
    int n = p.shape().n_systems();
    if (n == 1) return to_cycles(p);
    std::vector<Permutation> locals;
    for (int site = 0; site < n; ++site) {
        std::vector<OnticIndex> img(4);
        for (int v = 0; v < 4; ++v) {
            OnticIndex cell = with_digit(p.shape(), 0, site, v);
            img[v] = static_cast<OnticIndex>(digit_at(p.shape(), p(cell), site));
        }
        try {
            locals.emplace_back(SystemShape(1), img);
        } catch (const std::invalid_argument &) {
            locals.clear();
            break;
        }
    }
    if (!locals.empty() && embed_local(locals) == p) {
        std::string out;
        for (int site = 0; site < n; ++site) {
            if (site) out += " x ";
            out += to_cycles(locals[site]);
        }
        return out;
    }
    std::string out = "[";
    for (size_t i = 0; i < p.image().size(); ++i) {
        if (i) out += ",";
        out += std::to_string(p.image()[i]);
    }
    return out + "]";
}

bool is_allowed(const Permutation &p, const Catalog &catalog) {
    if (!(p.shape() == catalog.shape())) throw std::invalid_argument("is_allowed: shape mismatch");
    for (const auto &s : catalog.states()) {
        if (!catalog.contains(apply(p, s))) return false;
    }
    return true;
}

bool TransformationGroup::contains(const Permutation &p) const {
    return std::binary_search(elements.begin(), elements.end(), p);
}

TransformationGroup closure(const std::vector<Permutation> &generators, const Catalog &catalog) {
    TransformationGroup g{catalog.shape(), {}, generators};
    for (const auto &gen : generators) {
        if (!is_allowed(gen, catalog)) {
            throw std::invalid_argument("closure: generator " + describe(gen) + " is not allowed");
        }
    }
    Permutation id = Permutation::identity(catalog.shape());
    std::set<Permutation> seen{id};
    std::deque<Permutation> queue{id};
    while (!queue.empty()) {
        Permutation x = queue.front();
        queue.pop_front();
        for (const auto &gen : generators) {
            Permutation y = compose(gen, x);
            if (seen.insert(y).second) queue.push_back(y);
        }
    }
    g.elements.assign(seen.begin(), seen.end());
    return g;
}

namespace {

// Assigns images cell by cell; after each assignment, every catalog state
// whose cells are all assigned must map onto a catalog state.
class AllowedSearch {
  public:
    explicit AllowedSearch(const Catalog &catalog) : catalog_(catalog) {
        n_cells_ = static_cast<int>(catalog.shape().ontic_count());
        for (const auto &s : catalog.states()) states_.push_back(s.members().word(0));
        valid_.assign(size_t{1} << n_cells_, 0);
        for (uint64_t m : states_) valid_[m] = 1;
        // Greedy order: next cell completes as many states as possible.
        uint64_t assigned = 0;
        std::vector<bool> taken(n_cells_, false);
        for (int d = 0; d < n_cells_; ++d) {
            int best = -1, best_score = -1;
            for (int c = 0; c < n_cells_; ++c) {
                if (taken[c]) continue;
                uint64_t next = assigned | (uint64_t{1} << c);
                int score = 0;
                for (uint64_t m : states_) {
                    if ((m & next) == m && (m >> c & 1u)) ++score;
                }
                if (score > best_score) {
                    best = c;
                    best_score = score;
                }
            }
            taken[best] = true;
            assigned |= uint64_t{1} << best;
            order_.push_back(best);
            std::vector<uint64_t> done;
            for (uint64_t m : states_) {
                if ((m & assigned) == m && (m >> best & 1u)) done.push_back(m);
            }
            completes_.push_back(done);
        }
        image_.assign(n_cells_, 0);
    }

    std::vector<Permutation> run() {
        search(0, 0);
        return found_;
    }

  private:
    void search(int depth, uint64_t used) {
        if (depth == n_cells_) {
            std::vector<OnticIndex> img(image_.begin(), image_.end());
            found_.emplace_back(catalog_.shape(), img);
            return;
        }
        int cell = order_[depth];
        for (int v = 0; v < n_cells_; ++v) {
            if (used >> v & 1u) continue;
            image_[cell] = v;
            bool ok = true;
            for (uint64_t m : completes_[depth]) {
                uint64_t img = 0;
                for (uint64_t w = m; w; w &= w - 1) img |= uint64_t{1} << image_[__builtin_ctzll(w)];
                if (!valid_[img]) {
                    ok = false;
                    break;
                }
            }
            if (ok) search(depth + 1, used | (uint64_t{1} << v));
        }
    }

    const Catalog &catalog_;
    int n_cells_;
    std::vector<uint64_t> states_;
    std::vector<uint8_t> valid_;
    std::vector<int> order_;
    std::vector<std::vector<uint64_t>> completes_;
    std::vector<int> image_;
    std::vector<Permutation> found_;
};

}  // namespace

TransformationGroup enumerate_allowed(SystemShape shape, const Catalog &catalog) {
    if (!(shape == catalog.shape())) throw std::invalid_argument("enumerate_allowed: shape mismatch");
    if (shape.n_systems() > 2) {
        throw std::invalid_argument("full enumeration of allowed maps is supported for N <= 2");
    }
    TransformationGroup g{shape, AllowedSearch(catalog).run(), {}};
    std::sort(g.elements.begin(), g.elements.end());
    return g;
}

std::vector<Permutation> relabeling_generators(SystemShape shape) {
    std::vector<Permutation> gens;
    int n = shape.n_systems();
    Permutation id1 = Permutation::identity(SystemShape(1));
    for (int site = 0; site < n; ++site) {
        for (const char *c : {"(12)", "(1234)"}) {
            std::vector<Permutation> locals(n, id1);
            locals[site] = parse_cycles(c);
            gens.push_back(embed_local(locals));
        }
    }
    for (int site = 0; site + 1 < n; ++site) gens.push_back(system_swap(shape, site, site + 1));
    return gens;
}

std::string serialize_group(const TransformationGroup &g) {
    std::ostringstream os;
    os << "{\"format\":\"knowbal-group\",\"version\":1,\"n_systems\":" << g.shape.n_systems()
       << ",\"order\":" << g.order() << "}\n";
    for (const auto &p : g.elements) {
        os << "{\"image\":[";
        for (size_t i = 0; i < p.image().size(); ++i) os << (i ? "," : "") << p.image()[i];
        os << "]}\n";
    }
    std::string body = os.str();
    char sum[17];
    std::snprintf(sum, sizeof sum, "%016llx", static_cast<unsigned long long>(fnv1a64(body)));
    return body + "{\"checksum\":\"fnv1a64:" + sum + "\"}\n";
}

std::string to_string(Handedness h) { return h == Handedness::rotation ? "rotation" : "reflection"; }

Eigen::Matrix3d bloch_action(const Permutation &p) {
    if (p.shape().n_systems() != 1) throw std::invalid_argument("Bloch action is for one system");
    SystemShape one(1);
    // States on the +x, +y, +z axes.
    const std::array<uint64_t, 3> axes = {0b0101, 0b0110, 0b0011};
    Eigen::Matrix3d m;
    for (int k = 0; k < 3; ++k) {
        m.col(k) = bloch_coordinates(apply(p, EpistemicState(one, OnticSet::from_word(axes[k]))));
    }
    return m;
}

Handedness classify_n1(const Permutation &p) {
    return bloch_action(p).determinant() > 0 ? Handedness::rotation : Handedness::reflection;
}

}  // namespace knowbal
