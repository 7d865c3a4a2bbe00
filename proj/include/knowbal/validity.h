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

#ifndef KNOWBAL_VALIDITY_H
#define KNOWBAL_VALIDITY_H

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "knowbal/ontic_core.h"

namespace knowbal {

// Registry of every valid state for one shape, in canonical order.
class Catalog {
  public:
    static constexpr int kFormatVersion = 1;

    Catalog(SystemShape shape, std::vector<EpistemicState> states);

    SystemShape shape() const { return shape_; }
    int version() const { return kFormatVersion; }
    size_t size() const { return states_.size(); }
    const std::vector<EpistemicState> &states() const { return states_; }
    const std::vector<EpistemicState> &states_of_size(int size) const;
    std::vector<int> sizes() const;
    const std::vector<EpistemicState> &pure() const { return states_of_size(shape_.pure_size()); }

    bool contains(const OnticSet &members) const { return keys_.count(members.word(0)) != 0; }
    bool contains(const EpistemicState &s) const {
        return s.shape() == shape_ && contains(s.members());
    }

  private:
    SystemShape shape_;
    std::vector<EpistemicState> states_;
    std::map<int, std::vector<EpistemicState>> by_size_;
    std::unordered_set<uint64_t> keys_;
};

enum class Rule { V1, V2, V3 };
std::string to_string(Rule rule);

struct ValidityReport {
    bool valid = true;
    std::optional<Rule> failed_rule;
    std::string detail;
};

// Which measurement updates the closure rule follows. `single_system` uses the
// three canonical partitions of each system; `joint` adds maximal outcomes on
// every proper multi-system subsystem (only differs from `single_system` for
// three systems).
enum class Closure { single_system, joint };

// Knowledge balance predicate; greatest fixed point over update closure.
ValidityReport check_validity(const EpistemicState &s, Closure closure = Closure::joint);
bool is_valid(const EpistemicState &s, Closure closure = Closure::joint);
// k = 2N - log2|s| when |s| is a power of two.
std::optional<int> knowledge_count(const EpistemicState &s);

Catalog enumerate_valid(SystemShape shape, Closure closure = Closure::joint);
// Enumerates only states of the given size.
std::vector<EpistemicState> enumerate_valid_of_size(SystemShape shape, int size,
                                                    Closure closure = Closure::joint);

class CatalogError : public std::runtime_error {
  public:
    enum class Kind { io, version, checksum, parse };
    CatalogError(Kind kind, const std::string &what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

  private:
    Kind kind_;
};

std::string serialize_catalog(const Catalog &c);
Catalog parse_catalog(const std::string &text);
void save_catalog(const Catalog &c, const std::string &path);
Catalog load_catalog(const std::string &path);
uint64_t fnv1a64(const std::string &bytes);

// Lazily built catalogs, optionally persisted in a cache directory.
class CatalogStore {
  public:
    CatalogStore() = default;
    explicit CatalogStore(std::string cache_dir, bool offline = false);

    const Catalog &get(int n_systems);
    const Catalog &get(SystemShape shape) { return get(shape.n_systems()); }
    bool cache_hit(int n_systems) const;
    std::string cache_path(int n_systems) const;

  private:
    std::optional<std::string> cache_dir_;
    bool offline_ = false;
    mutable std::mutex mutex_;
    std::map<int, std::unique_ptr<Catalog>> catalogs_;
    std::map<int, bool> hits_;
};

}  // namespace knowbal

#endif  // KNOWBAL_VALIDITY_H
