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

#ifndef KNOWBAL_TRANSFORMS_H
#define KNOWBAL_TRANSFORMS_H

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "knowbal/ontic_core.h"
#include "knowbal/validity.h"

namespace knowbal {

// A bijection of the ontic space; image[i] is where ontic state i goes.
class Permutation {
  public:
    Permutation(SystemShape shape, std::vector<OnticIndex> image);
    static Permutation identity(SystemShape shape);

    SystemShape shape() const { return shape_; }
    const std::vector<OnticIndex> &image() const { return image_; }
    OnticIndex operator()(OnticIndex i) const { return image_[i]; }
    bool is_identity() const;

    bool operator==(const Permutation &o) const = default;
    bool operator<(const Permutation &o) const { return image_ < o.image_; }

  private:
    SystemShape shape_;
    std::vector<OnticIndex> image_;
};

// compose(p, q) applies q first, then p.
Permutation compose(const Permutation &p, const Permutation &q);
Permutation invert(const Permutation &p);
EpistemicState apply(const Permutation &p, const EpistemicState &s);
bool is_even(const Permutation &p);

Permutation embed_local(const std::vector<Permutation> &perms);
// Acts with `sub` on the listed sites (in that order) and trivially elsewhere.
Permutation on_sites(const Permutation &sub, SystemShape shape, const std::vector<int> &sites);
Permutation system_swap(SystemShape shape, int i, int j);
// Allowed two-system map taking (1v3).(1v2) to (1.1)v(2.2)v(3.3)v(4.4).
Permutation cnot_analogue();
// The relation permutations id, (12)(34), (13)(24), (14)(23).
Permutation klein(int k);
// All 24 single-system permutations, identity first, ordered by image.
std::vector<Permutation> s4_elements();

// Single-system cycle notation, fixed points listed: "(123)(4)".
Permutation parse_cycles(const std::string &text);
std::string to_cycles(const Permutation &p);
// Cycle notation per site for local products, else the image array.
std::string describe(const Permutation &p);

bool is_allowed(const Permutation &p, const Catalog &catalog);

struct TransformationGroup {
    SystemShape shape;
    std::vector<Permutation> elements;  // sorted by image
    std::vector<Permutation> generators;

    size_t order() const { return elements.size(); }
    bool contains(const Permutation &p) const;
};

TransformationGroup closure(const std::vector<Permutation> &generators, const Catalog &catalog);
TransformationGroup enumerate_allowed(SystemShape shape, const Catalog &catalog);
// Generators of local relabelings and adjacent system swaps.
std::vector<Permutation> relabeling_generators(SystemShape shape);
std::string serialize_group(const TransformationGroup &g);

enum class Handedness { rotation, reflection };
std::string to_string(Handedness h);
// Signed permutation matrix of the induced action on Bloch axes.
Eigen::Matrix3d bloch_action(const Permutation &p);
Handedness classify_n1(const Permutation &p);

}  // namespace knowbal

#endif  // KNOWBAL_TRANSFORMS_H
