#pragma once

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "decolog/logic.hpp"
#include "decolog/semantics.hpp"

namespace decolog {

struct HarnessOptions {
  // Object types the enumerated terms may have as source and target. Empty
  // means bases, 0, 1, 1+1 and B+B, B*B for every base B.
  std::vector<Type> universe;
  // Restrict to these rules; empty means the whole rule set.
  std::vector<std::string> rules;
  // Per rule, guard indices to ignore.
  std::map<std::string, std::vector<bool>> disabled_guards;
};

struct HarnessFinding {
  std::string rule;
  std::string instance;  // bindings, `f := ...; g := ...`
  std::string detail;

  bool operator<(const HarnessFinding& o) const {
    return std::tie(rule, instance, detail) < std::tie(o.rule, o.instance, o.detail);
  }
};

struct HarnessReport {
  std::vector<HarnessFinding> counterexamples;  // premises hold, conclusion fails
  std::vector<HarnessFinding> timeouts;         // conclusion undecided within fuel
  std::map<std::string, long> instances;        // checked instances per rule
  long classes = 0;                             // distinct term classes enumerated
};

// Enumerates every instance of every rule in `which` whose terms have depth
// at most `depth_bound`, metavariables ranging over terms of the rule set's
// fragment modulo semantic equality in `m`, and reports instances whose
// premises hold in `m` but whose conclusion does not.
HarnessReport validate_ruleset(RuleSetId which, const Model& m, int depth_bound,
                               const HarnessOptions& options = {});

std::vector<Type> default_universe(const Signature& sig);

}  // namespace decolog
