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

#ifndef KNOWBAL_ONTIC_CORE_H
#define KNOWBAL_ONTIC_CORE_H

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace knowbal {

// Systems beyond three are tracked state by state; catalogs stop at three.
constexpr int kMaxSystems = 4;
constexpr int kMaxCatalogSystems = 3;

class SystemShape {
  public:
    explicit SystemShape(int n_systems);

    int n_systems() const { return n_; }
    uint32_t ontic_count() const { return 1u << (2 * n_); }
    uint32_t pure_size() const { return 1u << n_; }

    bool operator==(const SystemShape &other) const = default;

  private:
    int n_;
};

using OnticIndex = uint32_t;

// Digits are ontic values 0..3 (printed as 1..4); site 0 is most significant.
std::vector<int> decode_index(SystemShape shape, OnticIndex index);
OnticIndex encode_index(SystemShape shape, const std::vector<int> &digits);
inline int digit_at(SystemShape shape, OnticIndex index, int site) {
    return static_cast<int>((index >> (2 * (shape.n_systems() - 1 - site))) & 3u);
}
inline OnticIndex with_digit(SystemShape shape, OnticIndex index, int site, int value) {
    int shift = 2 * (shape.n_systems() - 1 - site);
    return (index & ~(3u << shift)) | (static_cast<OnticIndex>(value) << shift);
}

// Fixed-width bit set over at most 256 ontic states.
class OnticSet {
  public:
    OnticSet() : words_{} {}
    static OnticSet from_word(uint64_t w) {
        OnticSet s;
        s.words_[0] = w;
        return s;
    }

    bool test(OnticIndex i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set(OnticIndex i) { words_[i >> 6] |= uint64_t{1} << (i & 63); }
    void reset(OnticIndex i) { words_[i >> 6] &= ~(uint64_t{1} << (i & 63)); }
    int count() const;
    bool empty() const { return (words_[0] | words_[1] | words_[2] | words_[3]) == 0; }
    uint64_t word(int k) const { return words_[k]; }
    bool subset_of(const OnticSet &other) const;
    std::vector<OnticIndex> members() const;

    OnticSet operator&(const OnticSet &o) const;
    OnticSet operator|(const OnticSet &o) const;
    OnticSet operator-(const OnticSet &o) const;
    bool operator==(const OnticSet &o) const = default;

    template <typename F>
    void for_each(F &&f) const {
        for (int k = 0; k < 4; ++k) {
            uint64_t w = words_[k];
            while (w) {
                int b = __builtin_ctzll(w);
                f(static_cast<OnticIndex>(k * 64 + b));
                w &= w - 1;
            }
        }
    }

  private:
    std::array<uint64_t, 4> words_;
};

// Lexicographic order of the ascending member lists.
bool lex_less(const OnticSet &a, const OnticSet &b);

// A state of knowledge: the set of ontic states the system might be in.
class EpistemicState {
  public:
    EpistemicState(SystemShape shape, OnticSet members);

    SystemShape shape() const { return shape_; }
    const OnticSet &members() const { return members_; }
    int size() const { return members_.count(); }
    bool contains(OnticIndex i) const { return members_.test(i); }

    bool operator==(const EpistemicState &o) const = default;

  private:
    SystemShape shape_;
    OnticSet members_;
};

// Canonical order: size first, then lexicographic members.
bool canonical_less(const EpistemicState &a, const EpistemicState &b);

EpistemicState make_state(SystemShape shape, const std::vector<OnticIndex> &members);
// Builds a state from tuples of ontic labels 1..4.
EpistemicState make_state_from_labels(const std::vector<std::vector<int>> &tuples);
EpistemicState full_state(SystemShape shape);

// `keep` holds 0-based sites; projection order follows ascending site.
EpistemicState marginal(const EpistemicState &s, std::vector<int> keep);
EpistemicState conjoin(const EpistemicState &s1, const EpistemicState &s2);
EpistemicState conjoin_all(const std::vector<EpistemicState> &factors);
// Cells of `shape` whose digits at `sites` form a member of `sub`.
EpistemicState lift(const EpistemicState &sub, SystemShape shape, const std::vector<int> &sites);
OnticIndex project_index(SystemShape shape, OnticIndex index, const std::vector<int> &sites);

// Classical fidelity |s1 & s2| / sqrt(|s1| |s2|), kept as integers.
struct Fidelity {
    int64_t overlap = 0;
    int64_t size1 = 1;
    int64_t size2 = 1;

    double value() const;
    // F^2 as reduced numerator / denominator.
    std::pair<int64_t, int64_t> squared() const;
    std::string to_string() const;
    bool operator==(const Fidelity &o) const;
    bool operator<(const Fidelity &o) const;
};

Fidelity fidelity(const EpistemicState &s1, const EpistemicState &s2);
bool is_disjoint(const EpistemicState &s1, const EpistemicState &s2);

class Catalog;
bool is_compatible(const EpistemicState &s1, const EpistemicState &s2, const Catalog &catalog);
// nullopt is the lawful "undefined" result.
std::optional<EpistemicState> convex_combine(const std::vector<EpistemicState> &states,
                                             const Catalog &catalog);

enum class CoherentOp { op1, op2, op3, op4 };
constexpr std::array<CoherentOp, 4> kCoherentOps = {CoherentOp::op1, CoherentOp::op2,
                                                    CoherentOp::op3, CoherentOp::op4};
std::string to_string(CoherentOp op);

EpistemicState coherent_combine(const EpistemicState &s1, const EpistemicState &s2, CoherentOp op);
bool is_pure(const EpistemicState &s);

// Literal syntax shared with the script language: "1|3", "(1,1)|(2,2)".
std::string to_literal(const EpistemicState &s);
// Factored form when the state is a product of single-system states.
std::string describe(const EpistemicState &s);
// Label as used in diagrams: "1v2", "(1.1)v(2.2)".
std::string members_string(const EpistemicState &s);

void require_same_shape(const EpistemicState &a, const EpistemicState &b, const char *what);

}  // namespace knowbal

#endif  // KNOWBAL_ONTIC_CORE_H
