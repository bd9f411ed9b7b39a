#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "decolog/logic.hpp"
#include "decolog/signature.hpp"

namespace decolog {

struct Justification {
  enum class Kind { Axiom, Rule, Hypothesis };
  Kind kind = Kind::Axiom;
  std::string name;
  std::vector<std::string> args;                          // axiom arguments, as text
  std::vector<std::string> premises;                      // cited step labels
  std::vector<std::pair<std::string, Term>> with;         // `with g := term`
};

struct Step {
  std::string label;
  Equation claim;
  Justification by;
  int line = 0;
};

struct ProofScript {
  RuleSetId rules = RuleSetId::Combined;
  std::string sig_ref;  // `sig` directive, informational
  std::vector<std::string> goals;
  std::vector<Step> steps;
};

struct Failure {
  std::string label;
  std::string reason;
};

struct Verdict {
  bool ok = true;
  bool under_hypotheses = false;
  std::vector<Failure> failures;
  std::vector<std::pair<std::string, Equation>> established;  // goals, in order
};

// Script grammar, one item per line:
//   use EXC|ST|COMBINED
//   sig <file>
//   goal <label>
//   <label>: <lhs> <rel> <rhs> by axiom NAME(arg, ...)
//   <label>: <lhs> <rel> <rhs> by rule NAME(label, ...) [with m := term, ...]
//   <label>: <lhs> <rel> <rhs> by hyp NAME
// Cited labels must name earlier steps; goals must name steps.
ProofScript parse_script(std::string_view text, const Signature& sig);
std::string pretty(const ProofScript& script);

Verdict check(const ProofScript& script, const Signature& sig);

// Dual script: claims and `with` terms dualized, rules replaced by their
// duals, rule set EXC <-> ST. `rename` maps exception, location and base
// type names.
ProofScript dualize(const ProofScript& script, const std::map<std::string, std::string>& rename);

// Renames exception, location, op and base type names inside a term.
Term rename(const Term& t, const std::map<std::string, std::string>& names);

}  // namespace decolog
