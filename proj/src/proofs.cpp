#include "decolog/proofs.hpp"

#include <set>
#include <sstream>

#include "decolog/error.hpp"
#include "lexer.hpp"
#include "parse_util.hpp"

namespace decolog {

namespace {

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    out.emplace_back(text.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

std::string trim(std::string s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

class ScriptParser {
 public:
  ScriptParser(std::string_view text, const Signature& sig)
      : lines_(split_lines(text)), ts_(tokenize(text, true)), sig_(sig) {}

  ProofScript parse() {
    ProofScript script;
    std::vector<Token> goal_tokens;
    bool have_use = false;
    while (true) {
      ts_.skip_newlines();
      if (ts_.at_end()) break;
      if (ts_.peek().kind == TokenKind::Ident && ts_.is_symbol(":", 1)) {
        script.steps.push_back(step());
        continue;
      }
      const Token head = ts_.peek();
      std::string kw = ts_.expect_ident("use, sig, goal or a step label");
      if (kw == "use") {
        const Token at = ts_.peek();
        std::string id = ts_.expect_ident("EXC, ST or COMBINED");
        auto which = parse_ruleset_id(id);
        if (!which) ts_.fail_at(at, "unknown rule set '" + id + "'");
        if (have_use) ts_.fail_at(head, "duplicate 'use' directive");
        have_use = true;
        script.rules = *which;
        ts_.expect_line_end();
      } else if (kw == "sig") {
        const Token at = ts_.peek();
        if (at.kind == TokenKind::Newline || at.kind == TokenKind::End) {
          ts_.fail_at(at, "expected a file name after 'sig'");
        }
        script.sig_ref = trim(strip_comment(lines_[at.line - 1].substr(at.column - 1)));
        while (ts_.peek().kind != TokenKind::Newline && !ts_.at_end()) ts_.next();
      } else if (kw == "goal") {
        goal_tokens.push_back(ts_.peek());
        script.goals.push_back(ts_.expect_ident("a goal label"));
        ts_.expect_line_end();
      } else {
        ts_.fail_at(head, "unknown directive '" + kw + "'");
      }
    }
    if (!have_use) ts_.fail("missing 'use EXC|ST|COMBINED' directive");
    for (const Token& g : goal_tokens) {
      if (!labels_.count(g.text)) ts_.fail_at(g, "dangling label '" + g.text + "'");
    }
    return script;
  }

 private:
  static std::string strip_comment(const std::string& s) {
    std::size_t hash = s.find('#');
    return hash == std::string::npos ? s : s.substr(0, hash);
  }

  Step step() {
    Step st;
    const Token label = ts_.next();
    st.label = label.text;
    st.line = label.line;
    if (labels_.count(st.label)) ts_.fail_at(label, "duplicate label '" + st.label + "'");
    ts_.expect_symbol(":");
    Term lhs = detail::parse_term(ts_, &sig_, false);
    const Token& rel = ts_.peek();
    auto strength = rel.kind == TokenKind::Symbol ? parse_relation(rel.text) : std::nullopt;
    if (!strength) ts_.fail("expected one of ==, ~exc, ~st, ~~ but found " + describe(rel));
    ts_.next();
    Term rhs = detail::parse_term(ts_, &sig_, false);
    st.claim = {lhs, rhs, *strength};
    ts_.expect_keyword("by");
    const Token kind_at = ts_.peek();
    std::string kind = ts_.expect_ident("axiom, rule or hyp");
    if (kind == "axiom") {
      st.by.kind = Justification::Kind::Axiom;
      st.by.name = ts_.expect_ident("an axiom name");
      if (ts_.accept_symbol("(")) {
        if (!ts_.accept_symbol(")")) {
          do {
            st.by.args.push_back(argument());
          } while (ts_.accept_symbol(","));
          ts_.expect_symbol(")");
        }
      }
      with(st.by);
    } else if (kind == "rule") {
      st.by.kind = Justification::Kind::Rule;
      st.by.name = ts_.expect_ident("a rule name");
      ts_.expect_symbol("(");
      if (!ts_.accept_symbol(")")) {
        do {
          const Token cited = ts_.peek();
          std::string l = ts_.expect_ident("a step label");
          if (!labels_.count(l)) {
            ts_.fail_at(cited, "dangling label '" + l + "': steps may only cite earlier steps");
          }
          st.by.premises.push_back(l);
        } while (ts_.accept_symbol(","));
        ts_.expect_symbol(")");
      }
      with(st.by);
    } else if (kind == "hyp") {
      st.by.kind = Justification::Kind::Hypothesis;
      st.by.name = ts_.expect_ident("a hypothesis name");
    } else {
      ts_.fail_at(kind_at, "expected axiom, rule or hyp, found '" + kind + "'");
    }
    ts_.expect_line_end();
    labels_.insert(st.label);
    return st;
  }

  void with(Justification& by) {
    if (!ts_.accept_ident("with")) return;
    do {
      std::string meta = ts_.expect_ident("a metavariable name");
      ts_.expect_symbol(":=");
      by.with.emplace_back(meta, detail::parse_term(ts_, &sig_, false));
    } while (ts_.accept_symbol(","));
  }

  // Raw text of one argument: tokens up to a top-level ',' or ')'.
  std::string argument() {
    const Token first = ts_.peek();
    if (first.kind == TokenKind::Symbol && (first.text == "," || first.text == ")")) {
      ts_.fail_at(first, "empty argument");
    }
    Token last = first;
    int depth = 0;
    while (true) {
      const Token& t = ts_.peek();
      if (t.kind == TokenKind::End || t.kind == TokenKind::Newline) {
        ts_.fail_at(t, "unterminated argument list");
      }
      if (t.kind == TokenKind::Symbol) {
        if (depth == 0 && (t.text == "," || t.text == ")")) break;
        if (t.text == "(" || t.text == "[" || t.text == "<") ++depth;
        if (t.text == ")" || t.text == "]" || t.text == ">") --depth;
      }
      last = ts_.next();
    }
    if (last.line != first.line) ts_.fail_at(first, "argument spans several lines");
    std::string text = lines_[first.line - 1].substr(
        first.column - 1, last.column - first.column + last.text.size());
    try {
      return pretty(parse_term(text, sig_));
    } catch (const std::exception&) {
      return trim(text);
    }
  }

  std::vector<std::string> lines_;
  TokenStream ts_;
  const Signature& sig_;
  std::set<std::string> labels_;
};

}  // namespace

ProofScript parse_script(std::string_view text, const Signature& sig) {
  return ScriptParser(text, sig).parse();
}

std::string pretty(const ProofScript& script) {
  std::ostringstream os;
  os << "use " << to_string(script.rules) << '\n';
  if (!script.sig_ref.empty()) os << "sig " << script.sig_ref << '\n';
  for (const auto& g : script.goals) os << "goal " << g << '\n';
  if (!script.steps.empty()) os << '\n';
  for (const Step& st : script.steps) {
    os << st.label << ": " << pretty(st.claim) << " by ";
    switch (st.by.kind) {
      case Justification::Kind::Axiom:
        os << "axiom " << st.by.name;
        if (!st.by.args.empty()) {
          os << '(';
          for (std::size_t i = 0; i < st.by.args.size(); ++i) {
            os << (i ? ", " : "") << st.by.args[i];
          }
          os << ')';
        }
        break;
      case Justification::Kind::Rule:
        os << "rule " << st.by.name << '(';
        for (std::size_t i = 0; i < st.by.premises.size(); ++i) {
          os << (i ? ", " : "") << st.by.premises[i];
        }
        os << ')';
        break;
      case Justification::Kind::Hypothesis:
        os << "hyp " << st.by.name;
        break;
    }
    for (std::size_t i = 0; i < st.by.with.size(); ++i) {
      os << (i ? ", " : " with ") << st.by.with[i].first << " := " << pretty(st.by.with[i].second);
    }
    os << '\n';
  }
  return os.str();
}

Verdict check(const ProofScript& script, const Signature& sig) {
  Verdict v;
  std::map<std::string, const Step*> steps;
  std::set<std::string> good;
  auto fail = [&](const std::string& label, const std::string& reason) {
    v.ok = false;
    v.failures.push_back({label, reason});
  };
  for (const Step& st : script.steps) {
    steps[st.label] = &st;
    try {
      Arrow l = infer(st.claim.lhs, sig);
      Arrow r = infer(st.claim.rhs, sig);
      if (!(l.source == r.source && l.target == r.target)) {
        throw TypeError("$", "claim sides are not parallel: " + to_string(l) + " vs " +
                                 to_string(r));
      }
      Equation derived;
      if (st.by.kind == Justification::Kind::Hypothesis) {
        v.under_hypotheses = true;
        derived = st.claim;
      } else {
        const Rule* rule = find_rule(script.rules, st.by.name);
        if (!rule) {
          throw RuleError("rule " + st.by.name + " is not part of the " +
                          to_string(script.rules) + " rule set");
        }
        Bindings b;
        if (st.by.kind == Justification::Kind::Axiom) {
          if (!rule->is_axiom()) {
            throw RuleError(rule->name + " has premises; cite it with 'by rule'");
          }
          b = bind_arguments(*rule, st.by.args, sig);
        }
        for (const auto& [meta, term] : st.by.with) bind_named(*rule, meta, pretty(term), sig, b);
        std::vector<Equation> premises;
        bool premises_ok = true;
        for (const auto& p : st.by.premises) {
          if (!good.count(p)) {
            fail(st.label, "depends on failed step '" + p + "'");
            premises_ok = false;
            break;
          }
          premises.push_back(steps.at(p)->claim);
        }
        if (!premises_ok) continue;
        derived = st.by.kind == Justification::Kind::Axiom
                      ? instantiate_axiom(script.rules, st.by.name, b, sig)
                      : apply_rule(script.rules, st.by.name, premises, b, sig);
      }
      Equation want = normalize(st.claim);
      Equation got = normalize(derived);
      if (!(want.strength == got.strength)) {
        fail(st.label, "strength mismatch: " + st.by.name + " yields " +
                           relation_symbol(got.strength) + ", claimed " +
                           relation_symbol(want.strength) + " (derived " + pretty(derived) + ")");
        continue;
      }
      if (!(want.lhs == got.lhs && want.rhs == got.rhs)) {
        fail(st.label, "claim differs from derivation: " + st.by.name + " yields " +
                           pretty(derived));
        continue;
      }
      good.insert(st.label);
    } catch (const std::exception& e) {
      fail(st.label, e.what());
    }
  }
  for (const auto& g : script.goals) {
    auto it = steps.find(g);
    if (it == steps.end()) {
      fail(g, "dangling label '" + g + "'");
    } else if (good.count(g)) {
      v.established.emplace_back(g, it->second->claim);
    } else {
      v.ok = false;
    }
  }
  return v;
}

namespace {

std::string renamed(const std::string& n, const std::map<std::string, std::string>& names) {
  auto it = names.find(n);
  return it == names.end() ? n : it->second;
}

Type rename(const Type& t, const std::map<std::string, std::string>& names) {
  switch (t.kind()) {
    case TypeKind::Base:
      return Type::base(renamed(t.name(), names));
    case TypeKind::Sum:
      return Type::sum(rename(t.left(), names), rename(t.right(), names));
    case TypeKind::Prod:
      return Type::prod(rename(t.left(), names), rename(t.right(), names));
    default:
      return t;
  }
}

}  // namespace

Term rename(const Term& t, const std::map<std::string, std::string>& names) {
  auto ty = [&](std::size_t i) { return rename(t.types()[i], names); };
  auto a = [&](std::size_t i) { return rename(t.arg(i), names); };
  switch (t.kind()) {
    case TermKind::Id:
      return Term::id(ty(0));
    case TermKind::FromEmpty:
      return Term::from_empty(ty(0));
    case TermKind::ToUnit:
      return Term::to_unit(ty(0));
    case TermKind::Inl:
      return Term::inl(ty(0), ty(1));
    case TermKind::Inr:
      return Term::inr(ty(0), ty(1));
    case TermKind::Proj1:
      return Term::proj1(ty(0), ty(1));
    case TermKind::Proj2:
      return Term::proj2(ty(0), ty(1));
    case TermKind::Tag:
      return Term::tag(renamed(t.name(), names));
    case TermKind::Untag:
      return Term::untag(renamed(t.name(), names));
    case TermKind::Lookup:
      return Term::lookup(renamed(t.name(), names));
    case TermKind::Update:
      return Term::update(renamed(t.name(), names));
    case TermKind::Op:
      return Term::op(renamed(t.name(), names));
    case TermKind::Meta:
      return t;
    case TermKind::Comp:
      return Term::comp(a(0), a(1));
    case TermKind::Copair:
      return Term::copair(a(0), a(1));
    case TermKind::Pair:
      return Term::pair(a(0), a(1));
    case TermKind::If:
      return Term::if_(a(0), a(1), a(2));
    case TermKind::While:
      return Term::while_(a(0), a(1));
    case TermKind::Down:
      return Term::down(a(0));
  }
  return t;
}

ProofScript dualize(const ProofScript& script, const std::map<std::string, std::string>& names) {
  ProofScript out;
  out.rules = script.rules == RuleSetId::Exc  ? RuleSetId::St
              : script.rules == RuleSetId::St ? RuleSetId::Exc
                                              : RuleSetId::Combined;
  out.sig_ref = script.sig_ref;
  out.goals = script.goals;
  auto dual_term = [&](const Term& t) { return rename(dualize(t), names); };
  for (const Step& st : script.steps) {
    Step d = st;
    Equation e = dualize(st.claim);
    d.claim = {rename(e.lhs, names), rename(e.rhs, names), e.strength};
    if (st.by.kind != Justification::Kind::Hypothesis) {
      const Rule* rule = find_rule(script.rules, st.by.name);
      if (!rule) throw RuleError("rule " + st.by.name + " has no dual in this rule set");
      d.by.name = rule->dual_name;
      auto metas = metavariables(*rule);
      d.by.args.clear();
      for (std::size_t i = 0; i < st.by.args.size(); ++i) {
        MetaKind kind = MetaKind::Term;
        if (i < rule->params.size()) {
          for (const auto& [n, k] : metas) {
            if (n == rule->params[i]) kind = k;
          }
        }
        const std::string& arg = st.by.args[i];
        switch (kind) {
          case MetaKind::Term:
            d.by.args.push_back(pretty(dual_term(parse_schema(arg))));
            break;
          case MetaKind::Type:
            d.by.args.push_back(to_string(rename(dualize(parse_type(arg)), names)));
            break;
          default:
            d.by.args.push_back(renamed(arg, names));
            break;
        }
      }
      d.by.with.clear();
      for (const auto& [m, t] : st.by.with) d.by.with.emplace_back(m, dual_term(t));
    }
    out.steps.push_back(std::move(d));
  }
  return out;
}

}  // namespace decolog
