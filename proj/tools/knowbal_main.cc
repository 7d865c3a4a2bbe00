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

// knowbal command-line tool.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "knowbal/circuit_dsl.h"
#include "knowbal/measurements.h"
#include "knowbal/protocols.h"
#include "knowbal/quantum_ref.h"
#include "knowbal/transforms.h"
#include "knowbal/validity.h"

namespace {

using namespace knowbal;
using ordered_json = nlohmann::ordered_json;

struct CliConfig {
    int systems = 1;
    uint64_t seed = 0;
    uint64_t trials = 10000;
    std::string format = "text";
    std::string cache = "./.knowbal-cache";
    std::string update_rule;
    std::string mode = "epistemic";
    std::string closure = "joint";
    bool exhaustive = false;
    bool offline = false;
    bool no_header = false;
    int size = 0;
    std::string target;
};

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string timestamp() {
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

void header(const CliConfig &cfg, const std::string &command) {
    if (cfg.no_header || cfg.format == "json") return;
    std::cout << "# knowbal " << command << " " << timestamp() << "\n";
}

UpdateRule parse_rule(const std::string &text) {
    if (text == "max-fidelity") return UpdateRule::max_fidelity;
    if (text == "outcome-base") return UpdateRule::outcome_base;
    throw UsageError("unknown update rule '" + text + "'");
}

void require_catalog_systems(int n) {
    if (n < 1 || n > kMaxCatalogSystems) {
        throw UsageError("--systems must be 1.." + std::to_string(kMaxCatalogSystems));
    }
}

bool is_product(const EpistemicState &s) {
    int n = s.shape().n_systems();
    std::vector<EpistemicState> parts;
    for (int i = 0; i < n; ++i) parts.push_back(marginal(s, {i}));
    return conjoin_all(parts) == s;
}

int cmd_enumerate(const CliConfig &cfg, CatalogStore &store) {
    require_catalog_systems(cfg.systems);
    const Catalog *cat;
    std::optional<Catalog> local;
    if (cfg.closure == "joint") {
        cat = &store.get(cfg.systems);
    } else if (cfg.closure == "single") {
        local.emplace(enumerate_valid(SystemShape(cfg.systems), Closure::single_system));
        cat = &*local;
    } else {
        throw UsageError("--closure must be joint or single");
    }
    size_t product = 0;
    for (const auto &s : cat->pure()) product += is_product(s);
    size_t correlated = cat->pure().size() - product;
    header(cfg, "enumerate");
    if (cfg.format == "json") {
        ordered_json j;
        j["n_systems"] = cfg.systems;
        j["closure"] = cfg.closure;
        j["total"] = cat->size();
        ordered_json sizes = ordered_json::object();
        for (int sz : cat->sizes()) sizes[std::to_string(sz)] = cat->states_of_size(sz).size();
        j["by_size"] = sizes;
        j["pure"] = {{"total", cat->pure().size()}, {"product", product}, {"correlated", correlated}};
        std::cout << j.dump(2) << "\n";
    } else if (cfg.format == "csv") {
        std::cout << "size,count\n";
        for (int sz : cat->sizes()) std::cout << sz << "," << cat->states_of_size(sz).size() << "\n";
    } else {
        std::cout << "systems: " << cfg.systems << "\n";
        std::cout << "valid states: " << cat->size() << "\n";
        for (int sz : cat->sizes()) std::cout << "  size " << sz << ": " << cat->states_of_size(sz).size() << "\n";
        std::cout << "pure: " << cat->pure().size();
        if (cfg.systems > 1) std::cout << " (" << product << " product + " << correlated << " correlated)";
        std::cout << "\n";
        if (cfg.closure == "joint" && store.cache_hit(cfg.systems)) std::cout << "catalog: cached\n";
    }
    return 0;
}

int cmd_check(const CliConfig &cfg) {
    EpistemicState s = parse_state(cfg.target, cfg.systems);
    if (s.shape().n_systems() > kMaxCatalogSystems) throw UsageError("check supports up to 3 systems");
    ValidityReport r = check_validity(s, cfg.closure == "single" ? Closure::single_system : Closure::joint);
    header(cfg, "check");
    if (cfg.format == "json") {
        ordered_json j;
        j["state"] = to_literal(s);
        j["valid"] = r.valid;
        j["rule"] = r.failed_rule ? ordered_json(to_string(*r.failed_rule)) : ordered_json(nullptr);
        j["detail"] = r.detail;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << to_literal(s) << ": " << (r.valid ? "valid" : "invalid");
        if (r.failed_rule) std::cout << " (" << to_string(*r.failed_rule) << ": " << r.detail << ")";
        std::cout << "\n";
        if (r.valid) std::cout << "description: " << describe(s) << "\n";
    }
    return r.valid ? 0 : 1;
}

int cmd_group(const CliConfig &cfg, CatalogStore &store) {
    if (cfg.systems > 2) throw UsageError("group enumeration supports up to 2 systems");
    require_catalog_systems(cfg.systems);
    SystemShape shape(cfg.systems);
    const Catalog &cat = store.get(cfg.systems);
    TransformationGroup g = enumerate_allowed(shape, cat);
    std::vector<Permutation> gens = relabeling_generators(shape);
    if (cfg.systems == 2) gens.push_back(cnot_analogue());
    TransformationGroup gen = closure(gens, cat);
    size_t even = 0;
    for (const auto &p : g.elements) even += is_even(p);
    header(cfg, "group");
    if (cfg.format == "json") {
        ordered_json j;
        j["n_systems"] = cfg.systems;
        j["order"] = g.order();
        j["even"] = even;
        ordered_json gl = ordered_json::array();
        for (const auto &p : gens) gl.push_back(describe(p));
        j["generators"] = gl;
        j["generated_order"] = gen.order();
        std::cout << j.dump(2) << "\n";
    } else if (cfg.format == "csv") {
        std::cout << serialize_group(g);
    } else {
        std::cout << "allowed permutations: " << g.order() << "\n";
        std::cout << "even permutations: " << even << "\n";
        if (cfg.systems == 1) {
            size_t rot = 0;
            for (const auto &p : g.elements) rot += classify_n1(p) == Handedness::rotation;
            std::cout << "rotations: " << rot << " reflections: " << g.order() - rot << "\n";
        }
        std::cout << "generators:\n";
        for (const auto &p : gens) std::cout << "  " << describe(p) << "\n";
        std::cout << "generated group: " << gen.order() << (gen.order() == g.order() ? " (all)" : " (proper)")
                  << "\n";
    }
    return 0;
}

int cmd_measurements(const CliConfig &cfg, CatalogStore &store) {
    if (cfg.systems > 2) throw UsageError("measurement enumeration supports up to 2 systems");
    require_catalog_systems(cfg.systems);
    std::vector<Measurement> ms = enumerate_maximal(SystemShape(cfg.systems), store.get(cfg.systems));
    header(cfg, "measurements");
    if (cfg.format == "json") {
        std::cout << serialize_measurements(ms);
    } else if (cfg.format == "csv") {
        std::cout << "index,outcomes\n";
        for (size_t i = 0; i < ms.size(); ++i) std::cout << i << ",\"" << describe(ms[i]) << "\"\n";
    } else {
        std::cout << "maximal measurements: " << ms.size() << "\n";
        for (size_t i = 0; i < ms.size(); ++i) std::cout << "  " << i << ": " << describe(ms[i]) << "\n";
    }
    return 0;
}

int cmd_mups(const CliConfig &cfg, CatalogStore &store) {
    if (cfg.systems > 2) throw UsageError("MUP search supports up to 2 systems");
    require_catalog_systems(cfg.systems);
    int size = cfg.size > 0 ? cfg.size : cfg.systems == 1 ? 3 : 5;
    std::vector<MupSet> sets = find_mup_sets(SystemShape(cfg.systems), size, store.get(cfg.systems), cfg.exhaustive);
    header(cfg, "mups");
    if (cfg.format == "json") {
        ordered_json j;
        j["n_systems"] = cfg.systems;
        j["size"] = size;
        j["exhaustive"] = cfg.exhaustive;
        j["found"] = sets.size();
        ordered_json arr = ordered_json::array();
        for (const auto &m : sets) {
            ordered_json e;
            ordered_json ml = ordered_json::array();
            for (const auto &x : m.measurements) ml.push_back(describe(x));
            e["measurements"] = ml;
            e["fidelity"] = m.common_fidelity.to_string();
            arr.push_back(e);
        }
        j["sets"] = arr;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "mutually unbiased sets of size " << size << ": " << sets.size()
                  << (cfg.exhaustive ? "" : " (first found)") << "\n";
        for (size_t i = 0; i < sets.size(); ++i) {
            std::cout << "set " << i << " (fidelity " << sets[i].common_fidelity.to_string() << "):\n";
            for (const auto &m : sets[i].measurements) std::cout << "  " << describe(m) << "\n";
        }
    }
    return 0;
}

int cmd_protocol(const CliConfig &cfg, CatalogStore &store) {
    ProtocolContext ctx(store, cfg.seed, cfg.trials);
    std::vector<std::string> names;
    if (cfg.target == "all") {
        names = protocol_names();
    } else {
        const auto all = protocol_names();
        if (std::find(all.begin(), all.end(), cfg.target) == all.end()) {
            throw UsageError("unknown protocol '" + cfg.target + "'");
        }
        names = {cfg.target};
    }
    std::vector<ProtocolReport> reports;
    for (const auto &n : names) reports.push_back(run_protocol(n, ctx));
    header(cfg, "protocol " + cfg.target);
    std::cout << (cfg.format == "json" ? report_json(reports) : report_text(reports));
    bool ok = std::all_of(reports.begin(), reports.end(), [](const ProtocolReport &r) { return r.pass(); });
    return ok ? 0 : 1;
}

int cmd_run(const CliConfig &cfg, CatalogStore &store) {
    std::ifstream in(cfg.target, std::ios::binary);
    if (!in) throw UsageError("cannot open " + cfg.target);
    std::stringstream ss;
    ss << in.rdbuf();
    Program p;
    try {
        p = parse(ss.str());
    } catch (const ParseError &e) {
        std::cerr << cfg.target << ":" << e.what() << "\n";
        return 2;
    }
    ExecOptions opts;
    Mode mode;
    if (cfg.mode == "epistemic") {
        mode = Mode::epistemic;
    } else if (cfg.mode == "monte-carlo") {
        mode = Mode::monte_carlo;
    } else {
        throw UsageError("--mode must be epistemic or monte-carlo");
    }
    if (!cfg.update_rule.empty()) {
        opts.rule = parse_rule(cfg.update_rule);
    } else {
        opts.rule = mode == Mode::epistemic ? UpdateRule::max_fidelity : UpdateRule::outcome_base;
    }
    bool needs_catalog = false;
    for (const auto &st : p.statements) {
        if (const auto *m = std::get_if<MeasureStmt>(&st)) {
            needs_catalog |= m->measurement.whole_system() && !m->measurement.maximal();
        }
    }
    if (opts.rule == UpdateRule::max_fidelity && needs_catalog && p.shape.n_systems() <= kMaxCatalogSystems) {
        opts.catalog = &store.get(p.shape.n_systems());
    }
    opts.run.seed = cfg.seed;
    opts.run.n_trials = cfg.trials;
    ExecutionReport rep = execute(p, mode, opts);
    header(cfg, "run " + cfg.target);
    if (cfg.format == "json") {
        ordered_json j;
        j["script"] = cfg.target;
        j["mode"] = to_string(mode);
        j["update_rule"] = to_string(opts.rule);
        ordered_json arr = ordered_json::array();
        for (const auto &a : rep.asserts) {
            arr.push_back({{"line", a.span.line}, {"assert", a.text}, {"checked", a.checked},
                           {"failed", a.failed}, {"detail", a.detail}, {"pass", a.pass()}});
        }
        j["asserts"] = arr;
        if (mode == Mode::epistemic) {
            ordered_json br = ordered_json::array();
            for (const auto &b : rep.branches) {
                ordered_json bind = ordered_json::object();
                for (const auto &[k, v] : b.bindings) bind[k] = v;
                std::string prob = std::to_string(b.probability.numerator()) + "/" +
                                   std::to_string(b.probability.denominator());
                br.push_back({{"probability", prob}, {"bindings", bind}, {"state", to_literal(b.state)},
                              {"tie", b.tie}});
            }
            j["branches"] = br;
        }
        j["pass"] = rep.pass();
        std::cout << j.dump(2) << "\n";
    } else if (cfg.format == "csv" && rep.run) {
        std::cout << frequencies_csv(*rep.run);
    } else {
        std::cout << rep.text();
    }
    return rep.pass() ? 0 : 1;
}

void print_table(const CorrelationTable &t, const std::string &title, const CliConfig &cfg) {
    if (cfg.format == "csv") {
        std::cout << table_csv(t);
        return;
    }
    std::cout << title << "\n";
    std::cout << std::left << std::setw(12) << "state";
    for (const auto &c : t.columns) std::cout << std::setw(12) << c;
    std::cout << "parity\n";
    for (size_t r = 0; r < t.rows.size(); ++r) {
        std::cout << std::setw(12) << t.rows[r];
        for (char c : t.cells[r]) std::cout << std::setw(12) << std::string(1, c);
        std::cout << t.parity(r) << "\n";
    }
}

ordered_json table_json(const CorrelationTable &t) {
    ordered_json j;
    j["columns"] = t.columns;
    ordered_json rows = ordered_json::array();
    for (size_t r = 0; r < t.rows.size(); ++r) {
        rows.push_back({{"state", t.rows[r]}, {"cells", t.cells[r]}, {"parity", t.parity(r)}});
    }
    j["rows"] = rows;
    return j;
}

int cmd_table(const CliConfig &cfg) {
    CorrelationTable toy = toy_table();
    CorrelationTable quantum = bell_table();
    if (cfg.target != "toy" && cfg.target != "quantum" && cfg.target != "diff") {
        throw UsageError("table must be toy, quantum or diff");
    }
    header(cfg, "table " + cfg.target);
    if (cfg.format == "json") {
        ordered_json j;
        if (cfg.target != "quantum") j["toy"] = table_json(toy);
        if (cfg.target != "toy") j["quantum"] = table_json(quantum);
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    if (cfg.target == "toy") {
        print_table(toy, "toy theory", cfg);
    } else if (cfg.target == "quantum") {
        print_table(quantum, "quantum", cfg);
    } else if (cfg.format == "csv") {
        std::cout << "toy_state,toy_cells,toy_parity,quantum_state,quantum_cells,quantum_parity\n";
        for (size_t r = 0; r < toy.rows.size(); ++r) {
            std::cout << toy.rows[r] << "," << toy.cells[r] << "," << toy.parity(r) << "," << quantum.rows[r] << ","
                      << quantum.cells[r] << "," << quantum.parity(r) << "\n";
        }
    } else {
        std::cout << std::left << std::setw(14) << "toy" << std::setw(8) << "cells" << std::setw(10) << "parity"
                  << "| " << std::setw(8) << "quantum" << std::setw(8) << "cells" << "parity\n";
        for (size_t r = 0; r < toy.rows.size(); ++r) {
            std::cout << std::setw(14) << toy.rows[r] << std::setw(8) << toy.cells[r] << std::setw(10)
                      << toy.parity(r) << "| " << std::setw(8) << quantum.rows[r] << std::setw(8)
                      << quantum.cells[r] << quantum.parity(r) << "\n";
        }
        std::cout << "columns: toy " << toy.columns[0] << " " << toy.columns[1] << " " << toy.columns[2]
                  << "; quantum " << quantum.columns[0] << " " << quantum.columns[1] << " " << quantum.columns[2]
                  << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CliConfig cfg;
    if (const char *env = std::getenv("KNOWBAL_CACHE")) cfg.cache = env;

    CLI::App app{"knowbal: toy-theory enumerator, simulator and protocol checker"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--systems,-n", cfg.systems, "Number of systems")->check(CLI::Range(1, kMaxSystems));
    app.add_option("--seed", cfg.seed, "Random seed");
    app.add_option("--trials", cfg.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"text", "json", "csv"}));
    app.add_option("--cache", cfg.cache, "Catalog cache directory");
    app.add_option("--update-rule", cfg.update_rule, "max-fidelity or outcome-base")
        ->check(CLI::IsMember({"max-fidelity", "outcome-base"}));
    app.add_option("--closure", cfg.closure, "Validity closure: joint or single")
        ->check(CLI::IsMember({"joint", "single"}));
    app.add_flag("--exhaustive", cfg.exhaustive, "Search exhaustively");
    app.add_flag("--offline", cfg.offline, "Never build catalogs; require the cache");
    app.add_flag("--no-header", cfg.no_header, "Omit the timestamp header line");

    auto *enumerate = app.add_subcommand("enumerate", "Count valid states");
    auto *check = app.add_subcommand("check", "Check a state literal");
    check->add_option("state", cfg.target, "State literal, e.g. (1,1)|(2,2)")->required();
    auto *group = app.add_subcommand("group", "Allowed permutation group");
    auto *measurements = app.add_subcommand("measurements", "Maximal valid measurements");
    auto *mups = app.add_subcommand("mups", "Mutually unbiased measurement sets");
    mups->add_option("--size", cfg.size, "Set size")->check(CLI::PositiveNumber);
    auto *protocol = app.add_subcommand("protocol", "Run protocol checks");
    protocol->add_option("name", cfg.target, "Protocol name or all")->required();
    auto *run = app.add_subcommand("run", "Run a .toy script");
    run->add_option("script", cfg.target, "Script path")->required();
    run->add_option("--mode", cfg.mode, "epistemic or monte-carlo")
        ->check(CLI::IsMember({"epistemic", "monte-carlo"}));
    auto *table = app.add_subcommand("table", "Correlation tables");
    table->add_option("which", cfg.target, "toy, quantum or diff")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (cfg.offline && cfg.cache.empty()) throw UsageError("--offline needs a cache directory");
        CatalogStore store = cfg.cache.empty() ? CatalogStore() : CatalogStore(cfg.cache, cfg.offline);
        if (*enumerate) return cmd_enumerate(cfg, store);
        if (*check) return cmd_check(cfg);
        if (*group) return cmd_group(cfg, store);
        if (*measurements) return cmd_measurements(cfg, store);
        if (*mups) return cmd_mups(cfg, store);
        if (*protocol) return cmd_protocol(cfg, store);
        if (*run) return cmd_run(cfg, store);
        if (*table) return cmd_table(cfg);
    } catch (const ParseError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const UsageError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const CatalogError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 2;
}
