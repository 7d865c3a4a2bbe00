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

#ifndef KNOWBAL_CIRCUIT_DSL_H
#define KNOWBAL_CIRCUIT_DSL_H

// Experiment scripts (.toy files). One statement per line; '#' starts a
// comment.
//
//   systems 2
//   prepare (1,1)|(2,2)|(3,3)|(4,4)
//   transform (12)(34) on 1
//   measure bell on 1 2 as m
//   transform (12)(34) on 2 if m == 1
//   assert outcome m == 1
//   assert state == bell1
//   assert marginal 1 == mixed
//   assert marginal 2 == 1|2 if m == 0
//   assert prob(m == 1) = 1
//   assert prob(m == 0) in [0, 1/10]
//
// Systems are numbered from 1 and outcomes from 0. States are disjunctions
// ('|' or U+2228) of cell tuples, bare labels for one system, or names:
// zero one plus minus plusi minusi mixed full bell0..bell3 ghz
// prod(s, ...) corr(<perm>). Permutations are cycles such as (123)(4), or
// cnot, swap, id. Partitions are z x y zz xx yy bell parity, or an explicit
// outcome list { s ; s ; ... }.

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "knowbal/measurements.h"
#include "knowbal/ontic_sim.h"
#include "knowbal/transforms.h"
#include "knowbal/validity.h"

namespace knowbal {

struct SourceSpan {
    int line = 0;
    int column = 0;
};

class ParseError : public std::runtime_error {
  public:
    ParseError(SourceSpan span, const std::string &message);
    SourceSpan span() const { return span_; }
    const std::string &message() const { return message_; }

  private:
    SourceSpan span_;
    std::string message_;
};

struct PrepareStmt {
    std::string expr;
    EpistemicState state;
    bool operator==(const PrepareStmt &) const = default;
};

struct TransformStmt {
    std::string expr;
    std::vector<int> sites;  // 0-based
    std::optional<std::pair<std::string, int>> condition;
    Permutation perm;  // on the full shape
    bool operator==(const TransformStmt &) const = default;
};

struct MeasureStmt {
    std::string expr;
    std::vector<int> sites;  // 0-based
    std::string binding;
    Measurement measurement;
    bool operator==(const MeasureStmt &) const = default;
};

struct AssertStmt {
    enum class Kind { outcome, state, marginal, prob_exact, prob_range };
    Kind kind = Kind::outcome;
    std::string binding;
    int outcome = 0;
    std::vector<int> sites;  // marginal sites, 0-based
    std::string expr;
    std::optional<EpistemicState> state;
    Rational lo{0};
    Rational hi{0};
    // Restricts outcome, state and marginal asserts to matching branches.
    std::optional<std::pair<std::string, int>> condition;
    bool operator==(const AssertStmt &) const = default;
};

using Statement = std::variant<PrepareStmt, TransformStmt, MeasureStmt, AssertStmt>;

struct Program {
    SystemShape shape{1};
    std::vector<Statement> statements;
    std::vector<SourceSpan> spans;  // one per statement; ignored by ==

    bool operator==(const Program &o) const { return shape == o.shape && statements == o.statements; }
};

// Prepared states are checked for validity for N <= 3, against `store` when
// one is given.
Program parse(const std::string &text, CatalogStore *store = nullptr);
// A single state expression; the arity comes from the expression itself.
// `full` means the full state of `n_systems`.
EpistemicState parse_state(const std::string &text, int n_systems = 1);
std::string print(const Program &p);
std::string print(const Statement &s);

// Preparation, transformations and measurements, without the asserts.
std::vector<Step> to_steps(const Program &p);

enum class Mode { epistemic, monte_carlo };
std::string to_string(Mode mode);

struct ExecOptions {
    UpdateRule rule = UpdateRule::max_fidelity;
    const Catalog *catalog = nullptr;  // for the max-fidelity rule
    RunConfig run;
};

struct AssertResult {
    SourceSpan span;
    std::string text;
    uint64_t checked = 0;  // branches or trials
    uint64_t failed = 0;
    std::string detail;
    bool pass() const { return failed == 0; }
};

struct ExecutionReport {
    Mode mode = Mode::epistemic;
    std::vector<AssertResult> asserts;
    std::vector<Branch> branches;  // epistemic mode
    std::optional<RunResult> run;  // monte_carlo mode
    bool pass() const;
    std::string text() const;
};

ExecutionReport execute(const Program &p, Mode mode, const ExecOptions &opts = {});

}  // namespace knowbal

#endif  // KNOWBAL_CIRCUIT_DSL_H
