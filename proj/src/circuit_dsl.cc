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

#include "knowbal/circuit_dsl.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "knowbal/protocols.h"

namespace knowbal {

ParseError::ParseError(SourceSpan span, const std::string &message)
    : std::runtime_error(std::to_string(span.line) + ":" + std::to_string(span.column) + ": " + message),
      span_(span),
      message_(message) {}

namespace {

enum class Tok { ident, integer, punct, end };

struct Token {
    Tok kind;
    std::string text;
    int column;    // 1-based, in code points
    size_t begin;  // byte offsets into the line
    size_t end;
};

std::vector<Token> lex(const std::string &line, int lineno) {
    std::vector<Token> out;
    size_t i = 0;
    int col = 1;
    auto advance = [&](size_t bytes) {
        i += bytes;
        ++col;
    };
    while (i < line.size()) {
        unsigned char c = static_cast<unsigned char>(line[i]);
        if (c == '#') break;
        if (c == ' ' || c == '\t' || c == '\r') {
            advance(1);
            continue;
        }
        size_t start = i;
        int start_col = col;
        if (c == 'v' && !out.empty() && (out.back().kind == Tok::integer || out.back().text == ")") &&
            out.back().end == i && i + 1 < line.size() &&
            (std::isdigit(static_cast<unsigned char>(line[i + 1])) || line[i + 1] == '(')) {
            // ASCII spelling of the disjunction, as in 1v3.
            advance(1);
            out.push_back({Tok::punct, "|", start_col, start, i});
            continue;
        }
        if (std::isalpha(c) || c == '_') {
            while (i < line.size() && (std::isalnum(static_cast<unsigned char>(line[i])) || line[i] == '_')) advance(1);
            out.push_back({Tok::ident, line.substr(start, i - start), start_col, start, i});
        } else if (std::isdigit(c)) {
            while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) advance(1);
            out.push_back({Tok::integer, line.substr(start, i - start), start_col, start, i});
        } else if (line.compare(i, 3, "\xE2\x88\xA8") == 0) {
            advance(3);
            out.push_back({Tok::punct, "|", start_col, start, i});
        } else if (line.compare(i, 2, "==") == 0) {
            i += 2;
            col += 2;
            out.push_back({Tok::punct, "==", start_col, start, i});
        } else if (std::string("()|,{};=[]/.").find(static_cast<char>(c)) != std::string::npos) {
            advance(1);
            out.push_back({Tok::punct, std::string(1, static_cast<char>(c)), start_col, start, i});
        } else {
            if (c >= 0x80) {
                size_t len = c >= 0xF0 ? 4 : c >= 0xE0 ? 3 : 2;
                throw ParseError({lineno, start_col},
                                 "unexpected character '" + line.substr(i, len) + "'");
            }
            throw ParseError({lineno, start_col}, std::string("unexpected character '") + static_cast<char>(c) + "'");
        }
    }
    out.push_back({Tok::end, "", col, line.size(), line.size()});
    return out;
}

struct ShapedSet {
    int arity;
    OnticSet members;
};

std::string sites_string(const std::vector<int> &sites) {
    std::string out;
    for (size_t i = 0; i < sites.size(); ++i) out += (i ? " " : "") + std::to_string(sites[i] + 1);
    return out;
}

std::string rat_string(const Rational &r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

class LineParser {
  public:
    LineParser(const std::string &line, int lineno, SystemShape shape)
        : line_(line), lineno_(lineno), shape_(shape), toks_(lex(line, lineno)) {}

    bool at_end() const { return peek().kind == Tok::end; }
    const Token &peek(size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
    const Token &next() {
        const Token &t = peek();
        if (pos_ < toks_.size() - 1) ++pos_;
        return t;
    }
    SourceSpan span(const Token &t) const { return {lineno_, t.column}; }
    [[noreturn]] void fail(const Token &t, const std::string &msg) const { throw ParseError(span(t), msg); }

    bool accept(const std::string &punct_or_word) {
        const Token &t = peek();
        if ((t.kind == Tok::punct || t.kind == Tok::ident) && t.text == punct_or_word) {
            next();
            return true;
        }
        return false;
    }
    const Token &expect(const std::string &text) {
        const Token &t = peek();
        if (!((t.kind == Tok::punct || t.kind == Tok::ident) && t.text == text)) {
            fail(t, "expected '" + text + "'" + found(t));
        }
        return next();
    }
    std::string expect_ident(const char *what) {
        const Token &t = peek();
        if (t.kind != Tok::ident) fail(t, std::string("expected ") + what + found(t));
        return next().text;
    }
    int expect_int(const char *what) {
        const Token &t = peek();
        if (t.kind != Tok::integer) fail(t, std::string("expected ") + what + found(t));
        if (t.text.size() > 9) fail(t, "number is too large");
        return std::stoi(next().text);
    }
    void expect_end() {
        if (!at_end()) fail(peek(), "unexpected" + found(peek()));
    }

    std::string text_between(size_t begin_tok, size_t end_tok) const {
        size_t b = toks_[begin_tok].begin;
        size_t e = toks_[end_tok - 1].end;
        return line_.substr(b, e - b);
    }
    size_t position() const { return pos_; }

    // stateExpr := term { '|' term }
    ShapedSet state_expr() {
        const Token &first = peek();
        ShapedSet acc = term();
        while (peek().kind == Tok::punct && peek().text == "|") {
            const Token &bar = next();
            if (peek().kind == Tok::end || (peek().kind == Tok::punct && peek().text != "(")) {
                fail(bar, "expected a state after '|'");
            }
            const Token &t = peek();
            ShapedSet more = term();
            if (more.arity != acc.arity) {
                fail(t, "disjunction mixes " + std::to_string(acc.arity) + "-system and " +
                            std::to_string(more.arity) + "-system states");
            }
            acc.members = acc.members | more.members;
        }
        (void)first;
        return acc;
    }

    EpistemicState top_state(int arity, const char *role) {
        const Token &t = peek();
        ShapedSet s = state_expr();
        if (s.arity != arity) {
            fail(t, std::string(role) + " has " + std::to_string(s.arity) + " system(s), expected " +
                        std::to_string(arity));
        }
        return EpistemicState(SystemShape(arity), s.members);
    }

    ShapedSet term() {
        const Token &t = peek();
        if (t.kind == Tok::punct && t.text == "(") {
            next();
            std::vector<int> digits;
            for (;;) {
                const Token &d = peek();
                int v = expect_int("an ontic label");
                if (v < 1 || v > 4 || d.text.size() != 1) fail(d, "ontic labels are 1..4");
                digits.push_back(v - 1);
                if (accept(")")) break;
                expect(",");
            }
            if (static_cast<int>(digits.size()) > kMaxSystems) fail(t, "tuple has too many entries");
            SystemShape sh(static_cast<int>(digits.size()));
            OnticSet s;
            s.set(encode_index(sh, digits));
            return {sh.n_systems(), s};
        }
        if (t.kind == Tok::integer) {
            if (t.text.size() != 1 || t.text[0] < '1' || t.text[0] > '4') fail(t, "ontic labels are 1..4");
            next();
            OnticSet s;
            s.set(static_cast<OnticIndex>(t.text[0] - '1'));
            return {1, s};
        }
        if (t.kind == Tok::ident) return named_state();
        fail(t, "expected a state" + found(t));
    }

    ShapedSet named_state() {
        const Token &t = peek();
        std::string name = next().text;
        static const std::map<std::string, const char *> singles = {
            {"zero", "1|2"}, {"one", "3|4"}, {"plus", "1|3"}, {"minus", "2|4"},
            {"plusi", "2|3"}, {"minusi", "1|4"}, {"mixed", "1|2|3|4"}};
        if (auto it = singles.find(name); it != singles.end()) return {1, single_state(it->second).members()};
        if (name == "full") return {shape_.n_systems(), full_state(shape_).members()};
        if (name.size() == 5 && name.compare(0, 4, "bell") == 0 && name[4] >= '0' && name[4] <= '3') {
            return {2, relation_state(name[4] - '0').members()};
        }
        if (name == "ghz") return {3, ghz_state().members()};
        if (name == "prod") {
            expect("(");
            std::vector<EpistemicState> factors;
            int arity = 0;
            for (;;) {
                ShapedSet f = state_expr();
                arity += f.arity;
                if (arity > kMaxSystems) fail(t, "product has too many systems");
                factors.emplace_back(SystemShape(f.arity), f.members);
                if (accept(")")) break;
                expect(",");
            }
            return {arity, conjoin_all(factors).members()};
        }
        if (name == "corr") {
            expect("(");
            const Token &pt = peek();
            auto [perm, arity] = perm_expr();
            if (arity != 1) fail(pt, "corr takes a single-system permutation");
            expect(")");
            std::vector<OnticIndex> cells;
            for (OnticIndex x = 0; x < 4; ++x) cells.push_back(x * 4 + perm(x));
            return {2, make_state(SystemShape(2), cells).members()};
        }
        fail(t, "unknown state name '" + name + "'");
    }

    // Returns the permutation on its own systems and their count.
    std::pair<Permutation, int> perm_expr() {
        const Token &t = peek();
        if (t.kind == Tok::ident) {
            next();
            if (t.text == "cnot") return {cnot_analogue(), 2};
            if (t.text == "swap") return {system_swap(SystemShape(2), 0, 1), 2};
            if (t.text == "id") return {Permutation::identity(SystemShape(1)), 1};
            fail(t, "unknown permutation '" + t.text + "'");
        }
        if (!(t.kind == Tok::punct && t.text == "(")) fail(t, "expected a permutation" + found(t));
        std::string cycles;
        while (peek().kind == Tok::punct && peek().text == "(") {
            const Token &open = next();
            const Token &body = peek();
            if (body.kind != Tok::integer) fail(body, "expected cycle labels" + found(body));
            next();
            expect(")");
            for (char c : body.text) {
                if (c < '1' || c > '4') fail(body, "cycle labels are 1..4");
            }
            (void)open;
            cycles += "(" + body.text + ")";
        }
        try {
            return {parse_cycles(cycles), 1};
        } catch (const std::invalid_argument &e) {
            fail(t, e.what());
        }
    }

    std::pair<Measurement, int> part_expr() {
        const Token &t = peek();
        if (t.kind == Tok::ident) {
            next();
            const std::string &n = t.text;
            if (n == "z" || n == "x" || n == "y") return {canonical_partition(n[0]), 1};
            if (n == "zz" || n == "xx" || n == "yy") {
                return {product_measurement({canonical_partition(n[0]), canonical_partition(n[0])}), 2};
            }
            if (n == "bell") return {relation_measurement(), 2};
            if (n == "parity") return {parity_measurement(), 2};
            fail(t, "unknown partition '" + n + "'");
        }
        if (!(t.kind == Tok::punct && t.text == "{")) fail(t, "expected a partition" + found(t));
        next();
        std::vector<EpistemicState> outcomes;
        int arity = -1;
        for (;;) {
            const Token &st = peek();
            ShapedSet s = state_expr();
            if (arity >= 0 && s.arity != arity) fail(st, "outcomes have different numbers of systems");
            arity = s.arity;
            outcomes.emplace_back(SystemShape(arity), s.members);
            if (accept("}")) break;
            expect(";");
        }
        try {
            return {make_measurement(outcomes), arity};
        } catch (const std::invalid_argument &e) {
            fail(t, e.what());
        }
    }

    std::vector<int> sys_list() {
        std::vector<int> sites;
        std::set<int> seen;
        do {
            const Token &t = peek();
            int v = expect_int("a system number");
            if (v < 1 || v > shape_.n_systems()) {
                fail(t, "system " + std::to_string(v) + " is out of range 1.." + std::to_string(shape_.n_systems()));
            }
            if (!seen.insert(v - 1).second) fail(t, "system " + std::to_string(v) + " is repeated");
            sites.push_back(v - 1);
            accept(",");
        } while (peek().kind == Tok::integer);
        return sites;
    }

    Rational rational() {
        const Token &t = peek();
        int64_t num = expect_int("a number");
        if (accept("/")) {
            const Token &d = peek();
            int64_t den = expect_int("a denominator");
            if (den == 0) fail(d, "zero denominator");
            return Rational(num, den);
        }
        if (accept(".")) {
            const Token &f = peek();
            if (f.kind != Tok::integer || f.text.size() > 9) fail(f, "expected decimal digits");
            next();
            int64_t scale = 1;
            for (size_t i = 0; i < f.text.size(); ++i) scale *= 10;
            return Rational(num * scale + std::stoll(f.text), scale);
        }
        (void)t;
        return Rational(num);
    }

  private:
    static std::string found(const Token &t) {
        if (t.kind == Tok::end) return ", found end of line";
        return ", found '" + t.text + "'";
    }

    const std::string &line_;
    int lineno_;
    SystemShape shape_;
    std::vector<Token> toks_;
    size_t pos_ = 0;
};

std::vector<int> identity_sites(int n) {
    std::vector<int> v(n);
    for (int i = 0; i < n; ++i) v[i] = i;
    return v;
}

std::optional<std::pair<std::string, int>> parse_condition(LineParser &lp,
                                                           const std::map<std::string, size_t> &outcome_counts) {
    if (!lp.accept("if")) return std::nullopt;
    const Token &it = lp.peek();
    std::string name = lp.expect_ident("an outcome name");
    auto found = outcome_counts.find(name);
    if (found == outcome_counts.end()) lp.fail(it, "unknown outcome name '" + name + "'");
    lp.expect("==");
    const Token &kt = lp.peek();
    int k = lp.expect_int("an outcome index");
    if (static_cast<size_t>(k) >= found->second) lp.fail(kt, "outcome index out of range");
    return std::make_pair(name, k);
}

std::string condition_string(const std::optional<std::pair<std::string, int>> &c) {
    return c ? " if " + c->first + " == " + std::to_string(c->second) : "";
}

}  // namespace

Program parse(const std::string &text, CatalogStore *store) {
    Program prog;
    bool have_header = false;
    bool have_prepare = false;
    std::map<std::string, size_t> outcome_counts;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        LineParser lp(line, lineno, prog.shape);
        if (lp.at_end()) continue;
        const Token &kw = lp.peek();
        if (kw.kind != Tok::ident) lp.fail(kw, "expected a statement" );
        if (!have_header) {
            if (kw.text != "systems") lp.fail(kw, "script must begin with 'systems N'");
            lp.next();
            const Token &nt = lp.peek();
            int n = lp.expect_int("the number of systems");
            if (n < 1 || n > kMaxSystems) lp.fail(nt, "systems must be 1.." + std::to_string(kMaxSystems));
            lp.expect_end();
            prog.shape = SystemShape(n);
            have_header = true;
            continue;
        }
        int n = prog.shape.n_systems();
        SourceSpan where = lp.span(kw);
        lp.next();
        if (kw.text == "systems") lp.fail(kw, "'systems' may appear only once");
        if (kw.text != "prepare" && !have_prepare) lp.fail(kw, "the first step must be 'prepare'");
        if (kw.text == "prepare") {
            if (have_prepare) lp.fail(kw, "only one 'prepare' is allowed");
            size_t b = lp.position();
            const Token &st = lp.peek();
            EpistemicState s = lp.top_state(n, "prepared state");
            std::string expr = lp.text_between(b, lp.position());
            lp.expect_end();
            bool valid = n <= kMaxCatalogSystems &&
                         (store ? store->get(n).contains(s) : is_valid(s));
            if (n <= kMaxCatalogSystems && !valid) lp.fail(st, "state " + to_literal(s) + " is not valid");
            prog.statements.push_back(PrepareStmt{expr, s});
            have_prepare = true;
        } else if (kw.text == "transform") {
            size_t b = lp.position();
            const Token &pt = lp.peek();
            auto [perm, arity] = lp.perm_expr();
            std::string expr = lp.text_between(b, lp.position());
            std::vector<int> sites;
            if (lp.accept("on")) {
                const Token &st = lp.peek();
                sites = lp.sys_list();
                if (static_cast<int>(sites.size()) != arity) {
                    lp.fail(st, "'" + expr + "' acts on " + std::to_string(arity) + " system(s), got " +
                                    std::to_string(sites.size()));
                }
            } else if (arity == n) {
                sites = identity_sites(n);
            } else {
                lp.fail(lp.peek(), "'" + expr + "' needs 'on' with " + std::to_string(arity) + " system(s)");
            }
            std::optional<std::pair<std::string, int>> cond = parse_condition(lp, outcome_counts);
            lp.expect_end();
            (void)pt;
            Permutation full = sites == identity_sites(n) ? perm : on_sites(perm, prog.shape, sites);
            prog.statements.push_back(TransformStmt{expr, sites, cond, full});
        } else if (kw.text == "measure") {
            size_t b = lp.position();
            auto [m, arity] = lp.part_expr();
            std::string expr = lp.text_between(b, lp.position());
            std::vector<int> sites;
            if (lp.accept("on")) {
                const Token &st = lp.peek();
                sites = lp.sys_list();
                if (static_cast<int>(sites.size()) != arity) {
                    lp.fail(st, "'" + expr + "' covers " + std::to_string(arity) + " system(s), got " +
                                    std::to_string(sites.size()));
                }
            } else if (arity == n) {
                sites = identity_sites(n);
            } else {
                lp.fail(lp.peek(), "'" + expr + "' needs 'on' with " + std::to_string(arity) + " system(s)");
            }
            lp.expect("as");
            const Token &bt = lp.peek();
            std::string name = lp.expect_ident("an outcome name");
            if (outcome_counts.count(name)) lp.fail(bt, "outcome name '" + name + "' is already bound");
            lp.expect_end();
            outcome_counts[name] = m.outcomes.size();
            Measurement placed = sites == identity_sites(n) ? m : on_sites(m, prog.shape, sites);
            prog.statements.push_back(MeasureStmt{expr, sites, name, placed});
        } else if (kw.text == "assert") {
            AssertStmt a;
            const Token &what = lp.peek();
            auto bound_outcome = [&](AssertStmt &st) {
                const Token &it = lp.peek();
                st.binding = lp.expect_ident("an outcome name");
                auto found = outcome_counts.find(st.binding);
                if (found == outcome_counts.end()) lp.fail(it, "unknown outcome name '" + st.binding + "'");
                lp.expect("==");
                const Token &kt = lp.peek();
                st.outcome = lp.expect_int("an outcome index");
                if (static_cast<size_t>(st.outcome) >= found->second) lp.fail(kt, "outcome index out of range");
            };
            if (lp.accept("outcome")) {
                a.kind = AssertStmt::Kind::outcome;
                bound_outcome(a);
            } else if (lp.accept("state")) {
                a.kind = AssertStmt::Kind::state;
                lp.expect("==");
                size_t b = lp.position();
                a.state = lp.top_state(n, "state");
                a.expr = lp.text_between(b, lp.position());
            } else if (lp.accept("marginal")) {
                a.kind = AssertStmt::Kind::marginal;
                const Token &st = lp.peek();
                a.sites = lp.sys_list();
                if (!std::is_sorted(a.sites.begin(), a.sites.end())) lp.fail(st, "marginal systems must be ascending");
                lp.expect("==");
                size_t b = lp.position();
                a.state = lp.top_state(static_cast<int>(a.sites.size()), "marginal");
                a.expr = lp.text_between(b, lp.position());
            } else if (lp.accept("prob")) {
                lp.expect("(");
                bound_outcome(a);
                lp.expect(")");
                if (lp.accept("=")) {
                    a.kind = AssertStmt::Kind::prob_exact;
                    const Token &pt = lp.peek();
                    a.lo = a.hi = lp.rational();
                    if (a.lo > Rational(1)) lp.fail(pt, "probability exceeds 1");
                } else if (lp.accept("in")) {
                    a.kind = AssertStmt::Kind::prob_range;
                    lp.expect("[");
                    const Token &pt = lp.peek();
                    a.lo = lp.rational();
                    lp.expect(",");
                    a.hi = lp.rational();
                    lp.expect("]");
                    if (a.hi < a.lo) lp.fail(pt, "empty probability range");
                } else {
                    lp.fail(lp.peek(), "expected '=' or 'in'");
                }
            } else {
                lp.fail(what, "expected outcome, state, marginal or prob");
            }
            if (a.kind != AssertStmt::Kind::prob_exact && a.kind != AssertStmt::Kind::prob_range) {
                a.condition = parse_condition(lp, outcome_counts);
            }
            lp.expect_end();
            prog.statements.push_back(a);
        } else {
            lp.fail(kw, "unknown statement '" + kw.text + "'");
        }
        prog.spans.push_back(where);
    }
    if (!have_header) throw ParseError({lineno + 1, 1}, "script must begin with 'systems N'");
    if (!have_prepare) throw ParseError({lineno + 1, 1}, "script has no 'prepare' step");
    return prog;
}

EpistemicState parse_state(const std::string &text, int n_systems) {
    if (text.find('\n') != std::string::npos) throw ParseError({1, 1}, "state literal spans several lines");
    LineParser lp(text, 1, SystemShape(n_systems));
    if (lp.at_end()) lp.fail(lp.peek(), "empty state literal");
    ShapedSet s = lp.state_expr();
    lp.expect_end();
    return EpistemicState(SystemShape(s.arity), s.members);
}

std::string print(const Statement &s) {
    if (const auto *p = std::get_if<PrepareStmt>(&s)) return "prepare " + p->expr;
    if (const auto *t = std::get_if<TransformStmt>(&s)) {
        std::string out = "transform " + t->expr + " on " + sites_string(t->sites);
        return out + condition_string(t->condition);
    }
    if (const auto *m = std::get_if<MeasureStmt>(&s)) {
        return "measure " + m->expr + " on " + sites_string(m->sites) + " as " + m->binding;
    }
    const auto &a = std::get<AssertStmt>(s);
    switch (a.kind) {
        case AssertStmt::Kind::outcome:
            return "assert outcome " + a.binding + " == " + std::to_string(a.outcome) + condition_string(a.condition);
        case AssertStmt::Kind::state:
            return "assert state == " + a.expr + condition_string(a.condition);
        case AssertStmt::Kind::marginal:
            return "assert marginal " + sites_string(a.sites) + " == " + a.expr + condition_string(a.condition);
        case AssertStmt::Kind::prob_exact:
            return "assert prob(" + a.binding + " == " + std::to_string(a.outcome) + ") = " + rat_string(a.lo);
        case AssertStmt::Kind::prob_range:
            return "assert prob(" + a.binding + " == " + std::to_string(a.outcome) + ") in [" + rat_string(a.lo) +
                   ", " + rat_string(a.hi) + "]";
    }
    return {};
}

std::string print(const Program &p) {
    std::string out = "systems " + std::to_string(p.shape.n_systems()) + "\n";
    for (const auto &s : p.statements) out += print(s) + "\n";
    return out;
}

std::vector<Step> to_steps(const Program &p) {
    std::vector<Step> steps;
    for (const auto &s : p.statements) {
        if (const auto *pr = std::get_if<PrepareStmt>(&s)) {
            steps.push_back(PrepareStep{pr->state});
        } else if (const auto *t = std::get_if<TransformStmt>(&s)) {
            std::optional<Condition> c;
            if (t->condition) c = Condition{t->condition->first, t->condition->second};
            steps.push_back(TransformStep{t->perm, c});
        } else if (const auto *m = std::get_if<MeasureStmt>(&s)) {
            steps.push_back(MeasureStep{m->measurement, m->binding});
        }
    }
    return steps;
}

std::string to_string(Mode mode) { return mode == Mode::epistemic ? "epistemic" : "monte-carlo"; }

namespace {

bool state_assert_holds(const AssertStmt &a, const EpistemicState &s) {
    if (a.kind == AssertStmt::Kind::state) return s == *a.state;
    return marginal(s, a.sites) == *a.state;
}

std::string bindings_string(const std::map<std::string, int> &b) {
    std::string out;
    for (const auto &[k, v] : b) out += (out.empty() ? "" : " ") + k + "=" + std::to_string(v);
    return out.empty() ? "-" : out;
}

ExecutionReport run_epistemic(const Program &p, const ExecOptions &opts) {
    ExecutionReport rep;
    rep.mode = Mode::epistemic;
    std::vector<Branch> branches;
    std::map<std::string, std::vector<Rational>> dists;
    for (size_t i = 0; i < p.statements.size(); ++i) {
        const Statement &s = p.statements[i];
        if (const auto *pr = std::get_if<PrepareStmt>(&s)) {
            branches = {Branch{Rational(1), pr->state, {}, false}};
            continue;
        }
        if (const auto *a = std::get_if<AssertStmt>(&s)) {
            AssertResult r{p.spans[i], print(s), 0, 0, {}};
            if (a->kind == AssertStmt::Kind::prob_exact || a->kind == AssertStmt::Kind::prob_range) {
                Rational got = dists.at(a->binding)[a->outcome];
                r.checked = 1;
                bool ok = a->kind == AssertStmt::Kind::prob_exact ? got == a->lo : (a->lo <= got && got <= a->hi);
                r.failed = ok ? 0 : 1;
                r.detail = "probability " + rat_string(got);
            } else {
                for (const auto &b : branches) {
                    if (a->condition && b.bindings.at(a->condition->first) != a->condition->second) continue;
                    ++r.checked;
                    bool ok = a->kind == AssertStmt::Kind::outcome ? b.bindings.at(a->binding) == a->outcome
                                                                  : state_assert_holds(*a, b.state);
                    if (!ok) {
                        if (r.failed == 0) {
                            std::string got = a->kind == AssertStmt::Kind::marginal
                                                  ? "marginal " + to_literal(marginal(b.state, a->sites))
                                                  : a->kind == AssertStmt::Kind::state ? "state " + to_literal(b.state)
                                                                                       : "outcome " + std::to_string(b.bindings.at(a->binding));
                            r.detail = "branch [" + bindings_string(b.bindings) + "] has " + got;
                        }
                        ++r.failed;
                    }
                }
                if (r.failed == 0) r.detail = std::to_string(r.checked) + " branch(es)";
            }
            rep.asserts.push_back(std::move(r));
            continue;
        }
        Step step = to_steps(Program{p.shape, {s}, {}})[0];
        if (const auto *m = std::get_if<MeasureStmt>(&s)) {
            std::vector<Rational> d(m->measurement.outcomes.size(), Rational(0));
            for (const auto &b : branches) {
                for (size_t k = 0; k < d.size(); ++k) d[k] += b.probability * outcome_probability(b.state, m->measurement, k);
            }
            dists[m->binding] = d;
        }
        std::vector<Branch> next;
        for (const auto &b : branches) {
            for (auto &n : advance(b, step, opts.rule, opts.catalog)) next.push_back(std::move(n));
        }
        branches = std::move(next);
    }
    rep.branches = std::move(branches);
    return rep;
}

ExecutionReport run_monte_carlo(const Program &p, const ExecOptions &opts) {
    ExecutionReport rep;
    rep.mode = Mode::monte_carlo;
    std::vector<Step> steps = to_steps(p);
    RunConfig cfg = opts.run;
    cfg.shape = p.shape;
    cfg.keep_records = true;
    RunResult run = run_trials(steps, cfg, opts.rule);
    // Steps completed before each statement, and the binding of each step.
    std::vector<size_t> done(p.statements.size());
    std::map<size_t, std::string> binding_at;
    size_t count = 0;
    for (size_t i = 0; i < p.statements.size(); ++i) {
        if (!std::holds_alternative<AssertStmt>(p.statements[i])) {
            if (const auto *m = std::get_if<MeasureStmt>(&p.statements[i])) binding_at[count] = m->binding;
            ++count;
        }
        done[i] = count;
    }
    const EpistemicState &prepared = std::get<PrepareStep>(steps[0]).state;
    for (size_t i = 0; i < p.statements.size(); ++i) {
        const auto *a = std::get_if<AssertStmt>(&p.statements[i]);
        if (!a) continue;
        AssertResult r{p.spans[i], print(p.statements[i]), 0, 0, {}};
        size_t last = done[i] - 1;  // index of the latest step
        if (a->kind == AssertStmt::Kind::prob_exact || a->kind == AssertStmt::Kind::prob_range) {
            uint64_t hits = 0;
            for (const auto &rec : run.records) {
                for (const auto &sr : rec.steps) {
                    auto it = binding_at.find(sr.step);
                    if (it != binding_at.end() && it->second == a->binding && sr.outcome == a->outcome) ++hits;
                }
            }
            double n = static_cast<double>(run.n_trials);
            double f = static_cast<double>(hits) / n;
            auto as_double = [](const Rational &q) { return static_cast<double>(q.numerator()) / q.denominator(); };
            bool ok;
            if (a->kind == AssertStmt::Kind::prob_range) {
                ok = as_double(a->lo) <= f && f <= as_double(a->hi);
            } else if (a->lo.numerator() == 0 || a->lo == Rational(1)) {
                ok = f == as_double(a->lo);
            } else {
                double pr = as_double(a->lo);
                ok = std::abs(static_cast<double>(hits) - n * pr) <= 3.0 * std::sqrt(n * pr * (1 - pr));
            }
            r.checked = 1;
            r.failed = ok ? 0 : 1;
            char buf[64];
            std::snprintf(buf, sizeof buf, "frequency %.4f over %llu trials", f,
                          static_cast<unsigned long long>(run.n_trials));
            r.detail = buf;
        } else {
            auto outcome_in = [&](const TrialRecord &rec, const std::string &binding) {
                int got = -1;
                for (const auto &sr : rec.steps) {
                    if (sr.step > last) break;
                    auto it = binding_at.find(sr.step);
                    if (it != binding_at.end() && it->second == binding) got = sr.outcome;
                }
                return got;
            };
            for (const auto &rec : run.records) {
                if (a->condition && outcome_in(rec, a->condition->first) != a->condition->second) continue;
                ++r.checked;
                bool ok;
                if (a->kind == AssertStmt::Kind::outcome) {
                    ok = outcome_in(rec, a->binding) == a->outcome;
                } else {
                    const EpistemicState &st = last == 0 ? prepared : rec.steps[last - 1].tracked;
                    ok = state_assert_holds(*a, st);
                }
                r.failed += !ok;
            }
            r.detail = std::to_string(r.checked - r.failed) + "/" + std::to_string(r.checked) + " trials";
        }
        rep.asserts.push_back(std::move(r));
    }
    AssertResult freq{{0, 0}, "frequencies agree with exact probabilities (3 sigma)", 1,
                      run.within_3sigma() ? 0u : 1u, {}};
    for (const auto &[step, chi] : run.chi_square) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s%s chi2=%.3f", freq.detail.empty() ? "" : ", ", binding_at[step].c_str(), chi);
        freq.detail += buf;
    }
    rep.asserts.push_back(freq);
    rep.asserts.push_back(AssertResult{{0, 0}, "ontic state stays inside the tracked state", run.n_trials,
                                       run.inconsistent_trials, {}});
    rep.run = std::move(run);
    return rep;
}

}  // namespace

bool ExecutionReport::pass() const {
    return std::all_of(asserts.begin(), asserts.end(), [](const AssertResult &a) { return a.pass(); });
}

std::string ExecutionReport::text() const {
    std::ostringstream os;
    os << "mode: " << to_string(mode) << "\n";
    for (const auto &a : asserts) {
        os << (a.span.line ? "line " + std::to_string(a.span.line) + ": " : "check: ") << a.text << " ... "
           << (a.pass() ? "ok" : "FAILED");
        if (!a.detail.empty()) os << " (" << a.detail << ")";
        os << "\n";
    }
    if (mode == Mode::epistemic) {
        os << "branches:\n";
        for (const auto &b : branches) {
            os << "  " << rat_string(b.probability) << " [" << bindings_string(b.bindings) << "] " << to_literal(b.state)
               << (b.tie ? " (tie)" : "") << "\n";
        }
    } else if (run) {
        os << frequencies_csv(*run);
    }
    os << "result: " << (pass() ? "PASS" : "FAIL") << "\n";
    return os.str();
}

ExecutionReport execute(const Program &p, Mode mode, const ExecOptions &opts) {
    return mode == Mode::epistemic ? run_epistemic(p, opts) : run_monte_carlo(p, opts);
}

}  // namespace knowbal
