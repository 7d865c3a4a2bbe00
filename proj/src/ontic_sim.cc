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

#include "knowbal/ontic_sim.h"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace knowbal {

namespace {

const PrepareStep &leading_prepare(const std::vector<Step> &program) {
    if (program.empty() || !std::holds_alternative<PrepareStep>(program[0])) {
        throw std::invalid_argument("program must start with a preparation");
    }
    for (size_t i = 1; i < program.size(); ++i) {
        if (std::holds_alternative<PrepareStep>(program[i])) {
            throw std::invalid_argument("program has more than one preparation");
        }
    }
    return std::get<PrepareStep>(program[0]);
}

bool condition_holds(const std::optional<Condition> &c, const std::map<std::string, int> &bindings) {
    if (!c) return true;
    auto it = bindings.find(c->binding);
    if (it == bindings.end()) throw std::invalid_argument("unbound outcome name '" + c->binding + "'");
    return it->second == c->outcome;
}

double to_double(const Rational &r) { return static_cast<double>(r.numerator()) / r.denominator(); }

}  // namespace

OnticIndex sample_ontic(const EpistemicState &s, TrialRng &rng) {
    std::vector<OnticIndex> members = s.members().members();
    return members[rng.uniform(static_cast<uint32_t>(members.size()))];
}

size_t outcome_of(OnticIndex x, const Measurement &m) {
    OnticIndex local = project_index(m.shape, x, m.sites);
    for (size_t k = 0; k < m.outcomes.size(); ++k) {
        if (m.outcomes[k].contains(local)) return k;
    }
    throw std::logic_error("measurement outcomes do not cover the ontic state");
}

OnticIndex disturb(OnticIndex x, const Measurement &m, size_t k, TrialRng &rng) {
    const EpistemicState &o = m.outcomes.at(k);
    SystemShape sub = m.subsystem();
    OnticIndex local = project_index(m.shape, x, m.sites);
    if (!o.contains(local)) throw std::invalid_argument("disturb: ontic state is outside the outcome");
    if (static_cast<uint32_t>(o.size()) == sub.ontic_count()) return x;
    OnticIndex moved;
    if (m.sites.size() == 1 && m.maximal()) {
        std::vector<OnticIndex> ab = o.members().members();
        moved = rng.coin() ? (local == ab[0] ? ab[1] : ab[0]) : local;
    } else {
        moved = sample_ontic(o, rng);
    }
    OnticIndex y = x;
    for (size_t i = 0; i < m.sites.size(); ++i) {
        y = with_digit(m.shape, y, m.sites[i], digit_at(sub, moved, static_cast<int>(i)));
    }
    return y;
}

bool RunResult::within_3sigma() const {
    for (const auto &row : frequencies) {
        double n = static_cast<double>(n_trials);
        double p = to_double(row.expected);
        double c = static_cast<double>(row.count);
        if (row.expected.numerator() == 0 || row.expected == Rational(1)) {
            if (c != n * p) return false;
            continue;
        }
        if (std::abs(c - n * p) > 3.0 * std::sqrt(n * p * (1.0 - p))) return false;
    }
    return true;
}

std::vector<Branch> advance(const Branch &b, const Step &step, UpdateRule rule, const Catalog *catalog) {
    if (const auto *t = std::get_if<TransformStep>(&step)) {
        Branch next = b;
        if (condition_holds(t->condition, b.bindings)) next.state = apply(t->perm, b.state);
        return {next};
    }
    if (const auto *ms = std::get_if<MeasureStep>(&step)) {
        std::vector<Branch> out;
        for (size_t k = 0; k < ms->measurement.outcomes.size(); ++k) {
            Rational p = outcome_probability(b.state, ms->measurement, k);
            if (p.numerator() == 0) continue;
            UpdateResult u = update_state(b.state, ms->measurement, k, rule, catalog);
            Branch next = b;
            next.probability = b.probability * p;
            next.state = u.state;
            next.tie = b.tie || u.tie;
            next.bindings[ms->binding] = static_cast<int>(k);
            out.push_back(std::move(next));
        }
        return out;
    }
    throw std::invalid_argument("preparation in the middle of a program");
}

Exploration explore(const std::vector<Step> &program, UpdateRule rule, const Catalog *catalog) {
    Exploration ex;
    const PrepareStep &prep = leading_prepare(program);
    ex.leaves.push_back(Branch{Rational(1), prep.state, {}, false});
    for (size_t i = 1; i < program.size(); ++i) {
        if (const auto *ms = std::get_if<MeasureStep>(&program[i])) {
            std::vector<Rational> dist(ms->measurement.outcomes.size(), Rational(0));
            for (const auto &b : ex.leaves) {
                for (size_t k = 0; k < dist.size(); ++k) {
                    dist[k] += b.probability * outcome_probability(b.state, ms->measurement, k);
                }
            }
            ex.distributions[i] = dist;
        }
        std::vector<Branch> next;
        for (const auto &b : ex.leaves) {
            for (auto &n : advance(b, program[i], rule, catalog)) next.push_back(std::move(n));
        }
        ex.leaves = std::move(next);
    }
    return ex;
}

RunResult run_trials(const std::vector<Step> &program, const RunConfig &cfg, UpdateRule rule) {
    RunResult result;
    if (program.empty()) return result;
    const PrepareStep &prep = leading_prepare(program);
    if (!(prep.state.shape() == cfg.shape)) throw std::invalid_argument("program shape differs from run shape");
    if (cfg.n_trials == 0) throw std::invalid_argument("n_trials must be positive");
    for (const auto &step : program) {
        if (const auto *ms = std::get_if<MeasureStep>(&step)) {
            if (!(ms->measurement.shape == cfg.shape)) throw std::invalid_argument("measurement shape mismatch");
            if (!ms->measurement.maximal() && rule == UpdateRule::max_fidelity) {
                throw std::invalid_argument(
                    "the max-fidelity rule has no ontic-level randomizer here; simulate nonmaximal "
                    "measurements with the outcome-base rule");
            }
        } else if (const auto *ts = std::get_if<TransformStep>(&step)) {
            if (!(ts->perm.shape() == cfg.shape)) throw std::invalid_argument("transform shape mismatch");
        }
    }

    Exploration ex = explore(program, rule, nullptr);
    std::map<size_t, std::vector<uint64_t>> counts;
    for (const auto &[step, dist] : ex.distributions) counts[step].assign(dist.size(), 0);

    result.n_trials = cfg.n_trials;
    for (uint64_t trial = 0; trial < cfg.n_trials; ++trial) {
        TrialRng rng(cfg.seed, trial);
        EpistemicState state = prep.state;
        OnticIndex x = sample_ontic(state, rng);
        TrialRecord rec{x, {}, state};
        std::map<std::string, int> bindings;
        bool consistent = true;
        for (size_t i = 1; i < program.size(); ++i) {
            int outcome = -1;
            if (const auto *ts = std::get_if<TransformStep>(&program[i])) {
                if (condition_holds(ts->condition, bindings)) {
                    x = ts->perm(x);
                    state = apply(ts->perm, state);
                }
            } else {
                const auto &ms = std::get<MeasureStep>(program[i]);
                size_t k = outcome_of(x, ms.measurement);
                x = disturb(x, ms.measurement, k, rng);
                state = update_state(state, ms.measurement, k, rule, nullptr).state;
                bindings[ms.binding] = static_cast<int>(k);
                ++counts[i][k];
                outcome = static_cast<int>(k);
            }
            if (!state.contains(x)) consistent = false;
            if (cfg.keep_records) rec.steps.push_back(StepRecord{i, outcome, x, state});
        }
        if (!consistent) ++result.inconsistent_trials;
        if (cfg.keep_records) {
            rec.final_state = state;
            result.records.push_back(std::move(rec));
        }
    }

    for (const auto &[step, dist] : ex.distributions) {
        const auto &ms = std::get<MeasureStep>(program[step]);
        double chi = 0.0;
        for (size_t k = 0; k < dist.size(); ++k) {
            result.frequencies.push_back(FrequencyRow{step, ms.binding, k, counts[step][k], dist[k]});
            double e = to_double(dist[k]) * static_cast<double>(cfg.n_trials);
            if (e > 0) {
                double d = static_cast<double>(counts[step][k]) - e;
                chi += d * d / e;
            }
        }
        result.chi_square[step] = chi;
    }
    return result;
}

std::string frequencies_csv(const RunResult &r) {
    std::ostringstream os;
    os << "step,binding,outcome,count,frequency,expected\n";
    for (const auto &row : r.frequencies) {
        double f = r.n_trials ? static_cast<double>(row.count) / static_cast<double>(r.n_trials) : 0.0;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", f);
        os << row.step << "," << row.binding << "," << roman(row.outcome) << "," << row.count << "," << buf
           << "," << row.expected.numerator() << "/" << row.expected.denominator() << "\n";
    }
    return os.str();
}

std::string records_jsonl(const RunResult &r) {
    std::ostringstream os;
    for (size_t t = 0; t < r.records.size(); ++t) {
        const auto &rec = r.records[t];
        os << "{\"trial\":" << t << ",\"initial\":" << rec.initial_ontic << ",\"steps\":[";
        for (size_t i = 0; i < rec.steps.size(); ++i) {
            const auto &s = rec.steps[i];
            os << (i ? "," : "") << "{\"step\":" << s.step << ",\"outcome\":" << s.outcome
               << ",\"ontic\":" << s.ontic << "}";
        }
        os << "],\"final\":\"" << to_literal(rec.final_state) << "\"}\n";
    }
    return os.str();
}

}  // namespace knowbal
