#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "decolog/signature.hpp"
#include "decolog/terms.hpp"

namespace decolog {

// Which behaviours an equality compares. Strong equality is (true, true); the
// exception-weak equality `~exc` is (false, true), the state-weak `~st` is
// (true, false) and `~~` is (false, false).
struct Strength {
  bool exc_strict = true;
  bool st_strict = true;

  bool operator==(const Strength&) const = default;
};

inline constexpr Strength kStrong{true, true};
inline constexpr Strength kWeakExc{false, true};
inline constexpr Strength kWeakSt{true, false};
inline constexpr Strength kWeakBoth{false, false};

std::string relation_symbol(Strength s);
std::optional<Strength> parse_relation(std::string_view symbol);

struct Equation {
  Term lhs;
  Term rhs;
  Strength strength;

  bool operator==(const Equation&) const = default;
};

std::string pretty(const Equation& eq);
Equation parse_equation(std::string_view text, const Signature& sig);
Equation normalize(const Equation& eq);
// Both sides dualized, strictness flags swapped.
Equation dualize(const Equation& eq);

enum class RuleSetId { Exc, St, Combined };

std::string to_string(RuleSetId id);
std::optional<RuleSetId> parse_ruleset_id(std::string_view text);

enum class MetaKind { Term, Type, Exception, Location, Flag };
enum class Effect { Exc, St };

// A strictness flag in a schema: either fixed or a flag metavariable.
struct FlagPattern {
  std::optional<bool> fixed;
  std::string meta;
};

struct StrengthPattern {
  FlagPattern exc;
  FlagPattern st;
};

struct EquationPattern {
  Term lhs;
  Term rhs;
  StrengthPattern strength;
};

enum class Quantifier { None, AllExceptions, AllLocations };

// A quantified premise stands for one premise per exception (or location) of
// the signature, in declaration order, with `bound` instantiated to it.
struct PremisePattern {
  EquationPattern eq;
  Quantifier quant = Quantifier::None;
  std::string bound;
};

struct Guard {
  enum class Kind {
    DecAtMost,        // effect(meta) <= level
    DecAtMostIfWeak,  // if flag is weak: effect(meta) <= level
    Distinct,         // names meta and other differ
    SourceIs,         // source(meta) == type
    TargetIs,         // target(meta) == type
  };
  Kind kind;
  std::string meta;
  Effect effect = Effect::Exc;
  int level = 0;
  std::string flag;
  std::string other;
  Type type;
};

struct TypeDerivation {
  enum class From { Source, Target, ExceptionValue, LocationValue };
  std::string var;
  From from;
  std::string of;
};

struct Rule {
  std::string name;
  std::string dual_name;
  std::string summary;
  std::vector<std::string> params;  // positional arguments when used as an axiom
  std::vector<PremisePattern> premises;
  EquationPattern conclusion;
  std::vector<Guard> guards;
  std::vector<TypeDerivation> derived;
  bool structural = false;  // no schema; holds implicitly (decoration hierarchy)

  bool is_axiom() const { return !structural && premises.empty(); }
};

// Every metavariable of a rule with its kind, in order of first occurrence.
std::vector<std::pair<std::string, MetaKind>> metavariables(const Rule& rule);

const std::vector<Rule>& all_rules();
std::vector<Rule> ruleset(RuleSetId which);
const Rule* find_rule(RuleSetId which, std::string_view name);

// Structural dual of a schema: terms dualized, flags swapped, effects swapped
// in guards, quantifiers and derivations exchanged. Renamed to `dual_name`.
Rule dualize(const Rule& rule);

// Rendering modulo consistent renaming of metavariables and associativity;
// two rules are structurally equal iff their canonical forms are.
std::string canonical_form(const Rule& rule);

struct Bindings {
  std::map<std::string, Term> terms;
  std::map<std::string, Type> types;
  std::map<std::string, std::string> names;
  std::map<std::string, bool> flags;
};

// Substitutes every bound metavariable; unbound ones are left in place.
Term instantiate(const Term& pattern, const Bindings& b);
Type instantiate(const Type& pattern, const Bindings& b);
std::optional<Strength> instantiate(const StrengthPattern& pattern, const Bindings& b);

// Premise schemas with quantifiers unfolded against `sig`.
std::vector<EquationPattern> expand_premises(const Rule& rule, const Signature& sig);

// First-order matching modulo associativity of composition. On success the
// bindings are extended; on failure they are left unchanged.
bool match(const EquationPattern& pattern, const Equation& eq, Bindings& b);

using ArrowOf = std::function<Arrow(const std::string& meta)>;

// Fills derived type metavariables. Returns an error message on conflict.
std::optional<std::string> derive_types(const Rule& rule, Bindings& b, const Signature& sig,
                                        const ArrowOf& arrow_of);

// First violated guard as a message, or nothing. Guards named in `disabled`
// (by index) are skipped; the soundness harness uses this.
std::optional<std::string> violated_guard(const Rule& rule, const Bindings& b,
                                          const ArrowOf& arrow_of,
                                          const std::vector<bool>* disabled = nullptr);

// Positional axiom arguments and `with` bindings, parsed per metavariable kind.
Bindings bind_arguments(const Rule& rule, const std::vector<std::string>& args,
                        const Signature& sig);
void bind_named(const Rule& rule, const std::string& meta, std::string_view text,
                const Signature& sig, Bindings& b);

Equation instantiate_axiom(RuleSetId which, std::string_view name, const Bindings& args,
                           const Signature& sig);

Equation apply_rule(RuleSetId which, std::string_view name, const std::vector<Equation>& premises,
                    const Bindings& bindings, const Signature& sig);

}  // namespace decolog
