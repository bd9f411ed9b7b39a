#include "decolog/logic.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "decolog/error.hpp"
#include "lexer.hpp"
#include "parse_util.hpp"

namespace decolog {

// ---------------------------------------------------------------------------
// Equations

std::string relation_symbol(Strength s) {
  if (s.exc_strict && s.st_strict) return "==";
  if (!s.exc_strict && s.st_strict) return "~exc";
  if (s.exc_strict) return "~st";
  return "~~";
}

std::optional<Strength> parse_relation(std::string_view symbol) {
  if (symbol == "==") return kStrong;
  if (symbol == "~exc") return kWeakExc;
  if (symbol == "~st") return kWeakSt;
  if (symbol == "~~") return kWeakBoth;
  return std::nullopt;
}

std::string pretty(const Equation& eq) {
  return pretty(eq.lhs) + " " + relation_symbol(eq.strength) + " " + pretty(eq.rhs);
}

Equation parse_equation(std::string_view text, const Signature& sig) {
  TokenStream ts(tokenize(text, false));
  Term lhs = detail::parse_term(ts, &sig, false);
  const Token& rel = ts.peek();
  auto strength = rel.kind == TokenKind::Symbol ? parse_relation(rel.text) : std::nullopt;
  if (!strength) ts.fail("expected one of ==, ~exc, ~st, ~~ but found " + describe(rel));
  ts.next();
  Term rhs = detail::parse_term(ts, &sig, false);
  if (!ts.at_end()) ts.fail("trailing input after equation: " + describe(ts.peek()));
  return {lhs, rhs, *strength};
}

Equation normalize(const Equation& eq) { return {normalize(eq.lhs), normalize(eq.rhs), eq.strength}; }

Equation dualize(const Equation& eq) {
  return {dualize(eq.lhs), dualize(eq.rhs), {eq.strength.st_strict, eq.strength.exc_strict}};
}

std::string to_string(RuleSetId id) {
  switch (id) {
    case RuleSetId::Exc:
      return "EXC";
    case RuleSetId::St:
      return "ST";
    case RuleSetId::Combined:
      return "COMBINED";
  }
  return "?";
}

std::optional<RuleSetId> parse_ruleset_id(std::string_view text) {
  if (text == "EXC") return RuleSetId::Exc;
  if (text == "ST") return RuleSetId::St;
  if (text == "COMBINED") return RuleSetId::Combined;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Rule table

namespace {

FlagPattern strict() { return {true, {}}; }
FlagPattern weak() { return {false, {}}; }
FlagPattern flag(const char* meta) { return {std::nullopt, meta}; }

EquationPattern eqp(const char* lhs, const char* rhs, FlagPattern exc, FlagPattern st) {
  return {parse_schema(lhs), parse_schema(rhs), {std::move(exc), std::move(st)}};
}
EquationPattern strong(const char* lhs, const char* rhs) {
  return eqp(lhs, rhs, strict(), strict());
}
EquationPattern weak_exc(const char* lhs, const char* rhs) {
  return eqp(lhs, rhs, weak(), strict());
}
EquationPattern weak_st(const char* lhs, const char* rhs) {
  return eqp(lhs, rhs, strict(), weak());
}

PremisePattern premise(EquationPattern eq) { return {std::move(eq), Quantifier::None, {}}; }

Guard at_most(const char* meta, Effect e, int level) {
  return {Guard::Kind::DecAtMost, meta, e, level, {}, {}, Type()};
}
Guard at_most_if_weak(const char* flag_meta, const char* meta, Effect e, int level) {
  return {Guard::Kind::DecAtMostIfWeak, meta, e, level, flag_meta, {}, Type()};
}
Guard distinct(const char* a, const char* b) {
  return {Guard::Kind::Distinct, a, Effect::Exc, 0, {}, b, Type()};
}
Guard source_is(const char* meta, Type t) {
  return {Guard::Kind::SourceIs, meta, Effect::Exc, 0, {}, {}, std::move(t)};
}
Guard target_is(const char* meta, Type t) {
  return {Guard::Kind::TargetIs, meta, Effect::Exc, 0, {}, {}, std::move(t)};
}

TypeDerivation derive(const char* var, TypeDerivation::From from, const char* of) {
  return {var, from, of};
}

using From = TypeDerivation::From;

std::vector<Rule> build_rules() {
  std::vector<Rule> r;
  auto add = [&](Rule rule) { r.push_back(std::move(rule)); };

  // Category laws.
  add({"R0.idr", "R0.idl", "f o id == f", {"?f"}, {}, strong("?f o id[?A]", "?f"), {},
       {derive("?A", From::Source, "?f")}});
  add({"R0.idl", "R0.idr", "id o f == f", {"?f"}, {}, strong("id[?A] o ?f", "?f"), {},
       {derive("?A", From::Target, "?f")}});
  add({"R0.assoc", "R0.assoc", "(f o g) o h == f o (g o h)", {"?f", "?g", "?h"}, {},
       strong("(?f o ?g) o ?h", "?f o (?g o ?h)"), {}, {}});

  // Equivalence, for every strength.
  add({"R1.refl", "R1.refl", "f == f", {"?f"}, {}, strong("?f", "?f"), {}, {}});
  add({"R1.sym", "R1.sym", "f ~ g => g ~ f", {},
       {premise(eqp("?f", "?g", flag("?x"), flag("?s")))}, eqp("?g", "?f", flag("?x"), flag("?s")),
       {}, {}});
  add({"R1.trans", "R1.trans", "f ~ g, g ~ h => f ~ h", {},
       {premise(eqp("?f", "?g", flag("?x"), flag("?s"))),
        premise(eqp("?g", "?h", flag("?x"), flag("?s")))},
       eqp("?f", "?h", flag("?x"), flag("?s")), {}, {}});

  // Strength hierarchy: a strict comparison implies the weak one.
  add({"R2.exc", "R2.st", "exception-strict implies exception-weak", {},
       {premise(eqp("?f", "?g", strict(), flag("?s")))}, eqp("?f", "?g", weak(), flag("?s")), {},
       {}});
  add({"R2.st", "R2.exc", "state-strict implies state-weak", {},
       {premise(eqp("?f", "?g", flag("?x"), strict()))}, eqp("?f", "?g", flag("?x"), weak()), {},
       {}});

  Rule hierarchy;
  hierarchy.name = "R3";
  hierarchy.dual_name = "R3";
  hierarchy.summary = "decoration bounds are upper bounds; applied implicitly by every guard";
  hierarchy.structural = true;
  add(hierarchy);

  // Propagators agree on exceptional arguments; accessors leave the state alone.
  add({"R4", "R4'", "exception-weak upgrades to strict between propagators", {},
       {premise(eqp("?f", "?g", weak(), flag("?s")))}, eqp("?f", "?g", strict(), flag("?s")),
       {at_most("?f", Effect::Exc, 1), at_most("?g", Effect::Exc, 1)}, {}});
  add({"R4'", "R4", "state-weak upgrades to strict between accessors", {},
       {premise(eqp("?f", "?g", flag("?x"), weak()))}, eqp("?f", "?g", flag("?x"), strict()),
       {at_most("?f", Effect::St, 1), at_most("?g", Effect::St, 1)}, {}});

  add({"R5.pre", "R5.post", "strong congruence, substitution", {},
       {premise(strong("?f1", "?f2"))}, strong("?f1 o ?g", "?f2 o ?g"), {}, {}});
  add({"R5.post", "R5.pre", "strong congruence, replacement", {},
       {premise(strong("?f1", "?f2"))}, strong("?g o ?f1", "?g o ?f2"), {}, {}});

  add({"R6", "R7", "substitution; exception-weak needs an exception-pure g", {},
       {premise(eqp("?f1", "?f2", flag("?x"), flag("?s")))},
       eqp("?f1 o ?g", "?f2 o ?g", flag("?x"), flag("?s")),
       {at_most_if_weak("?x", "?g", Effect::Exc, 0)}, {}});
  add({"R7", "R6", "replacement; state-weak needs a state-pure g", {},
       {premise(eqp("?f1", "?f2", flag("?x"), flag("?s")))},
       eqp("?g o ?f1", "?g o ?f2", flag("?x"), flag("?s")),
       {at_most_if_weak("?s", "?g", Effect::St, 0)}, {}});

  // Copair and pair.
  add({"R8.inl", "R8'.pi1", "<f|g> o inl ~exc f", {"?f", "?g"}, {},
       weak_exc("< ?f | ?g > o inl[?A,?B]", "?f"), {at_most("?g", Effect::St, 0)},
       {derive("?A", From::Source, "?f"), derive("?B", From::Source, "?g")}});
  add({"R8.inr", "R8'.pi2", "<f|g> o inr == g", {"?f", "?g"}, {},
       strong("< ?f | ?g > o inr[?A,?B]", "?g"), {at_most("?g", Effect::St, 1)},
       {derive("?A", From::Source, "?f"), derive("?B", From::Source, "?g")}});
  add({"R8'.pi1", "R8.inl", "pi1 o (f,g) ~st f", {"?f", "?g"}, {},
       weak_st("pi1[?A,?B] o (?f, ?g)", "?f"), {at_most("?g", Effect::Exc, 0)},
       {derive("?A", From::Target, "?f"), derive("?B", From::Target, "?g")}});
  add({"R8'.pi2", "R8.inr", "pi2 o (f,g) == g", {"?f", "?g"}, {},
       strong("pi2[?A,?B] o (?f, ?g)", "?g"), {at_most("?g", Effect::Exc, 1)},
       {derive("?A", From::Target, "?f"), derive("?B", From::Target, "?g")}});
  add({"R9", "R9'", "copair uniqueness", {},
       {premise(weak_exc("?h1 o inl[?A,?B]", "?h2 o inl[?A,?B]")),
        premise(strong("?h1 o inr[?A,?B]", "?h2 o inr[?A,?B]"))},
       strong("?h1", "?h2"), {}, {}});
  add({"R9'", "R9", "pair uniqueness", {},
       {premise(weak_st("pi1[?A,?B] o ?h1", "pi1[?A,?B] o ?h2")),
        premise(strong("pi2[?A,?B] o ?h1", "pi2[?A,?B] o ?h2"))},
       strong("?h1", "?h2"), {}, {}});

  // Empty has no ordinary values; Unit has exactly one.
  add({"R10", "R10'", "any f, g : 0 -> A are exception-weakly equal", {"?f", "?g"}, {},
       weak_exc("?f", "?g"),
       {source_is("?f", Type::empty()), source_is("?g", Type::empty()),
        at_most("?f", Effect::St, 0), at_most("?g", Effect::St, 0)},
       {}});
  add({"R10'", "R10", "any f, g : A -> 1 are state-weakly equal", {"?f", "?g"}, {},
       weak_st("?f", "?g"),
       {target_is("?f", Type::unit()), target_is("?g", Type::unit()),
        at_most("?f", Effect::Exc, 0), at_most("?g", Effect::Exc, 0)},
       {}});

  // Primitive operations.
  add({"R11", "R11'", "untag[T] o tag[T] ~exc id", {"?T"}, {},
       weak_exc("untag[?T] o tag[?T]", "id[?V]"), {},
       {derive("?V", From::ExceptionValue, "?T")}});
  add({"R12", "R12'", "untag[T] o tag[R] ~exc from0 o tag[R] for T != R", {"?T", "?R"}, {},
       weak_exc("untag[?T] o tag[?R]", "from0[?V] o tag[?R]"), {distinct("?T", "?R")},
       {derive("?V", From::ExceptionValue, "?T")}});
  add({"R11'", "R11", "lookup[X] o update[X] ~st id", {"?T"}, {},
       weak_st("lookup[?T] o update[?T]", "id[?V]"), {},
       {derive("?V", From::LocationValue, "?T")}});
  add({"R12'", "R12", "lookup[Y] o update[X] ~st lookup[Y] o to1 for X != Y", {"?T", "?R"}, {},
       weak_st("lookup[?R] o update[?T]", "lookup[?R] o to1[?V]"), {distinct("?T", "?R")},
       {derive("?V", From::LocationValue, "?T")}});

  // Observation: behaviour on every exception (every location) determines.
  {
    Rule obs{"R13", "R13'", "f, g : 0 -> A agreeing after every tag are equal", {}, {},
             strong("?f", "?g"),
             {source_is("?f", Type::empty()), source_is("?g", Type::empty())}, {}};
    obs.premises.push_back({weak_exc("?f o tag[?T]", "?g o tag[?T]"), Quantifier::AllExceptions,
                            "?T"});
    add(obs);
    Rule obs_dual{"R13'", "R13", "f, g : A -> 1 agreeing before every lookup are equal", {}, {},
                  strong("?f", "?g"),
                  {target_is("?f", Type::unit()), target_is("?g", Type::unit())}, {}};
    obs_dual.premises.push_back(
        {weak_st("lookup[?T] o ?f", "lookup[?T] o ?g"), Quantifier::AllLocations, "?T"});
    add(obs_dual);
  }

  // Conditionals and loops.
  add({"R14.true", "", "b == true => if(b,f,g) == f", {},
       {premise(strong("?b", "inl[1,1] o to1[?A]"))}, strong("if(?b, ?f, ?g)", "?f"),
       {at_most("?f", Effect::Exc, 1)}, {derive("?A", From::Source, "?b")}});
  add({"R14.false", "", "b == false => if(b,f,g) == g", {},
       {premise(strong("?b", "inr[1,1] o to1[?A]"))}, strong("if(?b, ?f, ?g)", "?g"),
       {at_most("?g", Effect::Exc, 1)}, {derive("?A", From::Source, "?b")}});
  add({"R14.while", "", "while unfolds once", {"?b", "?f"}, {},
       strong("while(?b, ?f)", "if(?b, while(?b, ?f) o ?f, id[?A])"), {},
       {derive("?A", From::Source, "?b")}});
  return r;
}

bool in_set(const Rule& rule, RuleSetId which) {
  const std::string& n = rule.name;
  bool exc_only = n == "R4" || n == "R8.inl" || n == "R8.inr" || n == "R9" || n == "R10" ||
                  n == "R11" || n == "R12";
  bool st_only = n == "R4'" || n == "R8'.pi1" || n == "R8'.pi2" || n == "R9'" ||
                 n == "R10'" || n == "R11'" || n == "R12'";
  bool combined_only = n.rfind("R14", 0) == 0;
  switch (which) {
    case RuleSetId::Exc:
      return !st_only && !combined_only && n != "R13'";
    case RuleSetId::St:
      return !exc_only && !combined_only && n != "R13";
    case RuleSetId::Combined:
      return n != "R13" && n != "R13'";
  }
  return false;
}

}  // namespace

const std::vector<Rule>& all_rules() {
  static const std::vector<Rule> rules = build_rules();
  return rules;
}

std::vector<Rule> ruleset(RuleSetId which) {
  std::vector<Rule> out;
  for (const Rule& r : all_rules()) {
    if (in_set(r, which)) out.push_back(r);
  }
  return out;
}

const Rule* find_rule(RuleSetId which, std::string_view name) {
  for (const Rule& r : all_rules()) {
    if (r.name == name && in_set(r, which)) return &r;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Metavariables

namespace {

class MetaCollector {
 public:
  void type(const Type& t) {
    switch (t.kind()) {
      case TypeKind::Base:
        if (t.is_meta()) add(t.name(), MetaKind::Type);
        break;
      case TypeKind::Sum:
      case TypeKind::Prod:
        type(t.left());
        type(t.right());
        break;
      default:
        break;
    }
  }
  void term(const Term& t) {
    switch (t.kind()) {
      case TermKind::Meta:
        add(t.name(), MetaKind::Term);
        return;
      case TermKind::Tag:
      case TermKind::Untag:
        if (!t.name().empty() && t.name()[0] == '?') add(t.name(), MetaKind::Exception);
        return;
      case TermKind::Lookup:
      case TermKind::Update:
        if (!t.name().empty() && t.name()[0] == '?') add(t.name(), MetaKind::Location);
        return;
      default:
        break;
    }
    for (const Type& ty : t.types()) type(ty);
    for (const Term& a : t.args()) term(a);
  }
  void flag(const FlagPattern& f) {
    if (!f.fixed) add(f.meta, MetaKind::Flag);
  }
  void equation(const EquationPattern& e) {
    term(e.lhs);
    term(e.rhs);
    flag(e.strength.exc);
    flag(e.strength.st);
  }
  void add(const std::string& name, MetaKind kind) {
    for (const auto& [n, k] : out) {
      if (n == name) return;
    }
    out.emplace_back(name, kind);
  }

  std::vector<std::pair<std::string, MetaKind>> out;
};

}  // namespace

std::vector<std::pair<std::string, MetaKind>> metavariables(const Rule& rule) {
  MetaCollector c;
  for (const auto& p : rule.premises) c.equation(p.eq);
  c.equation(rule.conclusion);
  for (const auto& d : rule.derived) c.add(d.var, MetaKind::Type);
  return c.out;
}

// ---------------------------------------------------------------------------
// Duality and canonical forms

namespace {

StrengthPattern swap(const StrengthPattern& s) { return {s.st, s.exc}; }

EquationPattern dual_eq(const EquationPattern& e) {
  return {dualize(e.lhs), dualize(e.rhs), swap(e.strength)};
}

Effect other(Effect e) { return e == Effect::Exc ? Effect::St : Effect::Exc; }

}  // namespace

Rule dualize(const Rule& rule) {
  Rule d;
  d.name = rule.dual_name;
  d.dual_name = rule.name;
  d.summary = rule.summary;
  d.params = rule.params;
  d.structural = rule.structural;
  if (rule.structural) return d;
  for (const auto& p : rule.premises) {
    PremisePattern q{dual_eq(p.eq), p.quant, p.bound};
    if (p.quant == Quantifier::AllExceptions) q.quant = Quantifier::AllLocations;
    if (p.quant == Quantifier::AllLocations) q.quant = Quantifier::AllExceptions;
    d.premises.push_back(std::move(q));
  }
  d.conclusion = dual_eq(rule.conclusion);
  for (Guard g : rule.guards) {
    switch (g.kind) {
      case Guard::Kind::DecAtMost:
      case Guard::Kind::DecAtMostIfWeak:
        g.effect = other(g.effect);
        break;
      case Guard::Kind::SourceIs:
        g.kind = Guard::Kind::TargetIs;
        g.type = dualize(g.type);
        break;
      case Guard::Kind::TargetIs:
        g.kind = Guard::Kind::SourceIs;
        g.type = dualize(g.type);
        break;
      case Guard::Kind::Distinct:
        break;
    }
    d.guards.push_back(std::move(g));
  }
  for (TypeDerivation t : rule.derived) {
    switch (t.from) {
      case From::Source:
        t.from = From::Target;
        break;
      case From::Target:
        t.from = From::Source;
        break;
      case From::ExceptionValue:
        t.from = From::LocationValue;
        break;
      case From::LocationValue:
        t.from = From::ExceptionValue;
        break;
    }
    d.derived.push_back(std::move(t));
  }
  return d;
}

namespace {

std::string flag_text(const FlagPattern& f, const std::map<std::string, std::string>& ren) {
  if (f.fixed) return *f.fixed ? "strict" : "weak";
  return ren.at(f.meta);
}

std::string effect_text(Effect e) { return e == Effect::Exc ? "exc" : "st"; }

}  // namespace

std::string canonical_form(const Rule& rule) {
  if (rule.structural) return "structural";
  auto metas = metavariables(rule);
  std::map<std::string, std::string> ren;
  Bindings b;
  int counter = 0;
  for (const auto& [name, kind] : metas) {
    std::string fresh = "?v" + std::to_string(counter++);
    ren[name] = fresh;
    switch (kind) {
      case MetaKind::Term:
        b.terms[name] = Term::meta(fresh);
        break;
      case MetaKind::Type:
        b.types[name] = Type::base(fresh);
        break;
      case MetaKind::Exception:
      case MetaKind::Location:
        b.names[name] = fresh;
        break;
      case MetaKind::Flag:
        break;
    }
  }
  for (const auto& p : rule.premises) {
    if (!p.bound.empty() && !ren.count(p.bound)) ren[p.bound] = p.bound;
  }
  auto eq_text = [&](const EquationPattern& e) {
    return pretty(normalize(instantiate(e.lhs, b))) + " [" + flag_text(e.strength.exc, ren) + "," +
           flag_text(e.strength.st, ren) + "] " + pretty(normalize(instantiate(e.rhs, b)));
  };
  std::ostringstream os;
  for (const auto& p : rule.premises) {
    os << "premise ";
    if (p.quant == Quantifier::AllExceptions) os << "forall-exc " << ren.at(p.bound) << ' ';
    if (p.quant == Quantifier::AllLocations) os << "forall-loc " << ren.at(p.bound) << ' ';
    os << eq_text(p.eq) << '\n';
  }
  os << "conclusion " << eq_text(rule.conclusion) << '\n';
  std::vector<std::string> lines;
  for (const auto& g : rule.guards) {
    std::ostringstream gs;
    switch (g.kind) {
      case Guard::Kind::DecAtMost:
        gs << effect_text(g.effect) << '(' << ren.at(g.meta) << ")<=" << g.level;
        break;
      case Guard::Kind::DecAtMostIfWeak:
        gs << "weak " << ren.at(g.flag) << " => " << effect_text(g.effect) << '('
           << ren.at(g.meta) << ")<=" << g.level;
        break;
      case Guard::Kind::Distinct: {
        std::string a = ren.at(g.meta), c = ren.at(g.other);
        gs << "distinct " << std::min(a, c) << ' ' << std::max(a, c);
        break;
      }
      case Guard::Kind::SourceIs:
        gs << "source(" << ren.at(g.meta) << ")=" << to_string(g.type);
        break;
      case Guard::Kind::TargetIs:
        gs << "target(" << ren.at(g.meta) << ")=" << to_string(g.type);
        break;
    }
    lines.push_back(gs.str());
  }
  for (const auto& d : rule.derived) {
    static const char* kFrom[] = {"source", "target", "exception-value", "location-value"};
    lines.push_back(ren.at(d.var) + ":=" + kFrom[static_cast<int>(d.from)] + "(" + ren.at(d.of) +
                    ")");
  }
  std::vector<std::string> params;
  for (const auto& p : rule.params) params.push_back(ren.at(p));
  std::sort(params.begin(), params.end());
  for (const auto& p : params) lines.push_back("param " + p);
  std::sort(lines.begin(), lines.end());
  for (const auto& l : lines) os << l << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Instantiation and matching

Type instantiate(const Type& pattern, const Bindings& b) {
  switch (pattern.kind()) {
    case TypeKind::Base:
      if (pattern.is_meta()) {
        auto it = b.types.find(pattern.name());
        if (it != b.types.end()) return it->second;
      }
      return pattern;
    case TypeKind::Sum:
      return Type::sum(instantiate(pattern.left(), b), instantiate(pattern.right(), b));
    case TypeKind::Prod:
      return Type::prod(instantiate(pattern.left(), b), instantiate(pattern.right(), b));
    default:
      return pattern;
  }
}

Term instantiate(const Term& t, const Bindings& b) {
  auto ty = [&](std::size_t i) { return instantiate(t.types()[i], b); };
  auto name = [&]() {
    auto it = b.names.find(t.name());
    return it == b.names.end() ? t.name() : it->second;
  };
  auto a = [&](std::size_t i) { return instantiate(t.arg(i), b); };
  switch (t.kind()) {
    case TermKind::Meta: {
      auto it = b.terms.find(t.name());
      return it == b.terms.end() ? t : it->second;
    }
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
      return Term::tag(name());
    case TermKind::Untag:
      return Term::untag(name());
    case TermKind::Lookup:
      return Term::lookup(name());
    case TermKind::Update:
      return Term::update(name());
    case TermKind::Op:
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

std::optional<Strength> instantiate(const StrengthPattern& p, const Bindings& b) {
  auto flag_value = [&](const FlagPattern& f) -> std::optional<bool> {
    if (f.fixed) return f.fixed;
    auto it = b.flags.find(f.meta);
    if (it == b.flags.end()) return std::nullopt;
    return it->second;
  };
  auto x = flag_value(p.exc);
  auto s = flag_value(p.st);
  if (!x || !s) return std::nullopt;
  return Strength{*x, *s};
}

std::vector<EquationPattern> expand_premises(const Rule& rule, const Signature& sig) {
  std::vector<EquationPattern> out;
  for (const auto& p : rule.premises) {
    if (p.quant == Quantifier::None) {
      out.push_back(p.eq);
      continue;
    }
    const auto& names = p.quant == Quantifier::AllExceptions ? sig.exceptions : sig.locations;
    for (const auto& n : names) {
      Bindings only;
      only.names[p.bound] = n.name;
      out.push_back({instantiate(p.eq.lhs, only), instantiate(p.eq.rhs, only), p.eq.strength});
    }
  }
  return out;
}

namespace {

std::vector<Term> chain_of(const Term& t) {
  std::vector<Term> out;
  Term cur = t;
  while (cur.kind() == TermKind::Comp) {
    out.push_back(cur.arg(0));
    cur = cur.arg(1);
  }
  out.push_back(cur);
  return out;
}

Term from_chain(const std::vector<Term>& c, std::size_t begin, std::size_t end) {
  Term acc = c[end - 1];
  for (std::size_t i = end - 1; i-- > begin;) acc = Term::comp(c[i], acc);
  return acc;
}

class Matcher {
 public:
  explicit Matcher(Bindings& b) : b_(b) {}

  bool type(const Type& p, const Type& t) {
    if (p.is_meta()) {
      auto it = b_.types.find(p.name());
      if (it != b_.types.end()) return it->second == t;
      b_.types.emplace(p.name(), t);
      return true;
    }
    if (p.kind() != t.kind()) return false;
    switch (p.kind()) {
      case TypeKind::Base:
        return p.name() == t.name();
      case TypeKind::Sum:
      case TypeKind::Prod:
        return type(p.left(), t.left()) && type(p.right(), t.right());
      default:
        return true;
    }
  }

  bool name(const std::string& p, const std::string& n) {
    if (!p.empty() && p[0] == '?') {
      auto it = b_.names.find(p);
      if (it != b_.names.end()) return it->second == n;
      b_.names.emplace(p, n);
      return true;
    }
    return p == n;
  }

  bool flag(const FlagPattern& p, bool v) {
    if (p.fixed) return *p.fixed == v;
    auto it = b_.flags.find(p.meta);
    if (it != b_.flags.end()) return it->second == v;
    b_.flags.emplace(p.meta, v);
    return true;
  }

  // Both arguments normalized.
  bool term(const Term& p, const Term& t) {
    if (p.kind() == TermKind::Meta || p.kind() == TermKind::Comp || t.kind() == TermKind::Comp) {
      return chain(chain_of(p), 0, chain_of(t), 0);
    }
    return node(p, t);
  }

 private:
  bool node(const Term& p, const Term& t) {
    if (p.kind() != t.kind()) return false;
    if (p.kind() == TermKind::Op) {
      if (p.name() != t.name()) return false;
    } else if (!name(p.name(), t.name())) {
      return false;
    }
    for (std::size_t i = 0; i < p.types().size(); ++i) {
      if (!type(p.types()[i], t.types()[i])) return false;
    }
    for (std::size_t i = 0; i < p.args().size(); ++i) {
      if (!term(p.arg(i), t.arg(i))) return false;
    }
    return true;
  }

  bool chain(const std::vector<Term>& ps, std::size_t i, const std::vector<Term>& ts,
             std::size_t j) {
    if (i == ps.size()) return j == ts.size();
    if (j == ts.size()) return false;
    const Term& p = ps[i];
    if (p.kind() == TermKind::Meta) {
      auto it = b_.terms.find(p.name());
      if (it != b_.terms.end()) {
        std::vector<Term> bound = chain_of(normalize(it->second));
        if (j + bound.size() > ts.size()) return false;
        for (std::size_t k = 0; k < bound.size(); ++k) {
          if (!(bound[k] == ts[j + k])) return false;
        }
        return chain(ps, i + 1, ts, j + bound.size());
      }
      std::size_t remaining = ps.size() - i - 1;
      for (std::size_t len = 1; j + len + remaining <= ts.size(); ++len) {
        Bindings saved = b_;
        b_.terms.emplace(p.name(), from_chain(ts, j, j + len));
        if (chain(ps, i + 1, ts, j + len)) return true;
        b_ = std::move(saved);
      }
      return false;
    }
    Bindings saved = b_;
    if (node(p, ts[j]) && chain(ps, i + 1, ts, j + 1)) return true;
    b_ = std::move(saved);
    return false;
  }

  Bindings& b_;
};

}  // namespace

bool match(const EquationPattern& pattern, const Equation& eq, Bindings& b) {
  Bindings work = b;
  Matcher m(work);
  Equation n = normalize(eq);
  if (!m.flag(pattern.strength.exc, n.strength.exc_strict)) return false;
  if (!m.flag(pattern.strength.st, n.strength.st_strict)) return false;
  if (!m.term(normalize(pattern.lhs), n.lhs)) return false;
  if (!m.term(normalize(pattern.rhs), n.rhs)) return false;
  b = std::move(work);
  return true;
}

// ---------------------------------------------------------------------------
// Guards and derived types

std::optional<std::string> derive_types(const Rule& rule, Bindings& b, const Signature& sig,
                                        const ArrowOf& arrow_of) {
  for (const auto& d : rule.derived) {
    std::optional<Type> value;
    switch (d.from) {
      case From::Source:
      case From::Target: {
        if (!b.terms.count(d.of)) return "unbound metavariable " + d.of;
        Arrow a = arrow_of(d.of);
        value = d.from == From::Source ? a.source : a.target;
        break;
      }
      case From::ExceptionValue:
      case From::LocationValue: {
        auto it = b.names.find(d.of);
        if (it == b.names.end()) return "unbound metavariable " + d.of;
        const NamedValue* nv = d.from == From::ExceptionValue ? sig.find_exception(it->second)
                                                               : sig.find_location(it->second);
        if (!nv) {
          return std::string("unknown ") +
                 (d.from == From::ExceptionValue ? "exception '" : "location '") + it->second +
                 "'";
        }
        value = Type::base(nv->value_type);
        break;
      }
    }
    auto it = b.types.find(d.var);
    if (it == b.types.end()) {
      b.types.emplace(d.var, *value);
    } else if (!(it->second == *value)) {
      return "type " + d.var + " is " + to_string(it->second) + " but must be " +
             to_string(*value);
    }
  }
  return std::nullopt;
}

namespace {

std::string bound_text(const std::string& level_name, Effect e, int level) {
  if (e == Effect::Exc) {
    return level == 0 ? level_name + " must be exception-pure"
                      : level_name + " must not be a catcher";
  }
  return level == 0 ? level_name + " must be state-pure" : level_name + " must not be a modifier";
}

}  // namespace

std::optional<std::string> violated_guard(const Rule& rule, const Bindings& b,
                                          const ArrowOf& arrow_of,
                                          const std::vector<bool>* disabled) {
  for (std::size_t i = 0; i < rule.guards.size(); ++i) {
    if (disabled && i < disabled->size() && (*disabled)[i]) continue;
    const Guard& g = rule.guards[i];
    switch (g.kind) {
      case Guard::Kind::DecAtMostIfWeak: {
        auto it = b.flags.find(g.flag);
        if (it == b.flags.end() || it->second) break;
        [[fallthrough]];
      }
      case Guard::Kind::DecAtMost: {
        Arrow a = arrow_of(g.meta);
        int level = g.effect == Effect::Exc ? a.dec.exc : a.dec.st;
        if (level > g.level) {
          std::string who = g.meta.substr(1);
          auto t = b.terms.find(g.meta);
          if (t != b.terms.end()) who += " = " + pretty(t->second);
          return "side condition violated: " + bound_text(who, g.effect, g.level) +
                 " (decoration " + to_string(a.dec) + ")";
        }
        break;
      }
      case Guard::Kind::Distinct: {
        auto x = b.names.find(g.meta);
        auto y = b.names.find(g.other);
        if (x != b.names.end() && y != b.names.end() && x->second == y->second) {
          return "side condition violated: names must differ (" + g.meta.substr(1) + " and " +
                 g.other.substr(1) + " are both " + x->second + ")";
        }
        break;
      }
      case Guard::Kind::SourceIs:
      case Guard::Kind::TargetIs: {
        Arrow a = arrow_of(g.meta);
        const Type& actual = g.kind == Guard::Kind::SourceIs ? a.source : a.target;
        if (!(actual == g.type)) {
          return std::string("side condition violated: ") +
                 (g.kind == Guard::Kind::SourceIs ? "source" : "target") + " of " +
                 g.meta.substr(1) + " must be " + to_string(g.type) + ", got " +
                 to_string(actual);
        }
        break;
      }
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Arguments

namespace {

std::string meta_key(const std::string& name) { return name[0] == '?' ? name : "?" + name; }

MetaKind kind_of(const Rule& rule, const std::string& meta) {
  for (const auto& [n, k] : metavariables(rule)) {
    if (n == meta) return k;
  }
  throw RuleError("rule " + rule.name + " has no metavariable '" + meta.substr(1) + "'");
}

}  // namespace

void bind_named(const Rule& rule, const std::string& meta, std::string_view text,
                const Signature& sig, Bindings& b) {
  std::string key = meta_key(meta);
  MetaKind kind = kind_of(rule, key);
  TokenStream ts(tokenize(text, false));
  switch (kind) {
    case MetaKind::Term:
      b.terms[key] = detail::parse_term(ts, &sig, false);
      break;
    case MetaKind::Type:
      b.types[key] = detail::parse_type(ts, false);
      break;
    case MetaKind::Exception: {
      std::string n = ts.expect_ident("an exception name");
      if (!sig.find_exception(n)) throw NameError("unknown exception '" + n + "'");
      b.names[key] = n;
      break;
    }
    case MetaKind::Location: {
      std::string n = ts.expect_ident("a location name");
      if (!sig.find_location(n)) throw NameError("unknown location '" + n + "'");
      b.names[key] = n;
      break;
    }
    case MetaKind::Flag: {
      std::string v = ts.expect_ident("strict or weak");
      if (v != "strict" && v != "weak") ts.fail("expected strict or weak");
      b.flags[key] = v == "strict";
      break;
    }
  }
  if (!ts.at_end()) ts.fail("trailing input in argument: " + describe(ts.peek()));
}

Bindings bind_arguments(const Rule& rule, const std::vector<std::string>& args,
                        const Signature& sig) {
  if (args.size() != rule.params.size()) {
    throw RuleError(rule.name + " takes " + std::to_string(rule.params.size()) +
                    " argument(s), got " + std::to_string(args.size()));
  }
  Bindings b;
  for (std::size_t i = 0; i < args.size(); ++i) bind_named(rule, rule.params[i], args[i], sig, b);
  return b;
}

// ---------------------------------------------------------------------------
// Application

namespace {

void check_fragment(RuleSetId which, const Term& t, const Arrow& a) {
  if (which == RuleSetId::Exc && a.dec.st > 0) {
    throw RuleError("decoration violation: " + pretty(t) + " has decoration " +
                    to_string(a.dec) + ", outside the EXC fragment");
  }
  if (which == RuleSetId::St && a.dec.exc > 0) {
    throw RuleError("decoration violation: " + pretty(t) + " has decoration " +
                    to_string(a.dec) + ", outside the ST fragment");
  }
}

}  // namespace

Equation apply_rule(RuleSetId which, std::string_view name, const std::vector<Equation>& premises,
                    const Bindings& bindings, const Signature& sig) {
  const Rule* rule = find_rule(which, name);
  if (!rule) {
    throw RuleError("rule " + std::string(name) + " is not part of the " + to_string(which) +
                    " rule set");
  }
  if (rule->structural) {
    throw RuleError(rule->name + " is implicit: " + rule->summary);
  }
  std::vector<EquationPattern> patterns = expand_premises(*rule, sig);
  if (patterns.size() != premises.size()) {
    throw RuleError(rule->name + " expects " + std::to_string(patterns.size()) +
                    " premise(s), got " + std::to_string(premises.size()));
  }
  Bindings b = bindings;
  for (std::size_t i = 0; i < premises.size(); ++i) {
    Arrow l = infer(premises[i].lhs, sig);
    Arrow r = infer(premises[i].rhs, sig);
    check_fragment(which, premises[i].lhs, l);
    check_fragment(which, premises[i].rhs, r);
    if (!match(patterns[i], premises[i], b)) {
      EquationPattern shown{instantiate(patterns[i].lhs, b), instantiate(patterns[i].rhs, b),
                            patterns[i].strength};
      std::string rel = "~";
      if (auto s = instantiate(shown.strength, b)) rel = relation_symbol(*s);
      throw RuleError("premise " + std::to_string(i + 1) + " of " + rule->name +
                      " does not match: expected " + pretty(shown.lhs) + " " + rel + " " +
                      pretty(shown.rhs) + ", got " + pretty(premises[i]));
    }
  }
  std::map<std::string, Arrow> arrows;
  for (const auto& [meta, term] : b.terms) {
    Arrow a = infer(term, sig);
    check_fragment(which, term, a);
    arrows.emplace(meta, a);
  }
  ArrowOf arrow_of = [&](const std::string& m) { return arrows.at(m); };
  if (auto err = derive_types(*rule, b, sig, arrow_of)) throw RuleError(*err);
  for (const auto& [meta, kind] : metavariables(*rule)) {
    bool quantified = std::any_of(rule->premises.begin(), rule->premises.end(),
                                  [&](const PremisePattern& p) { return p.bound == meta; });
    if (quantified) continue;
    bool bound = false;
    switch (kind) {
      case MetaKind::Term:
        bound = b.terms.count(meta) > 0;
        break;
      case MetaKind::Type:
        bound = b.types.count(meta) > 0;
        break;
      case MetaKind::Exception:
      case MetaKind::Location:
        bound = b.names.count(meta) > 0;
        break;
      case MetaKind::Flag:
        bound = b.flags.count(meta) > 0;
        break;
    }
    if (!bound) {
      throw RuleError("unbound metavariable " + meta.substr(1) + " in " + rule->name +
                      "; supply it with 'with " + meta.substr(1) + " := ...'");
    }
  }
  if (auto err = violated_guard(*rule, b, arrow_of)) throw RuleError(*err);

  Equation out{instantiate(rule->conclusion.lhs, b), instantiate(rule->conclusion.rhs, b),
               *instantiate(rule->conclusion.strength, b)};
  Arrow l = infer(out.lhs, sig);
  Arrow r = infer(out.rhs, sig);
  if (!(l.source == r.source && l.target == r.target)) {
    throw RuleError("conclusion sides are not parallel: " + to_string(l) + " vs " + to_string(r));
  }
  check_fragment(which, out.lhs, l);
  check_fragment(which, out.rhs, r);
  return out;
}

Equation instantiate_axiom(RuleSetId which, std::string_view name, const Bindings& args,
                           const Signature& sig) {
  const Rule* rule = find_rule(which, name);
  if (rule && !rule->is_axiom()) throw RuleError(rule->name + " is not an axiom");
  return apply_rule(which, name, {}, args, sig);
}

}  // namespace decolog
