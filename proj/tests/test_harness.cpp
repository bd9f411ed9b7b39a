#include <doctest.h>

#include <algorithm>
#include <tuple>

#include "decolog/harness.hpp"
#include "support.hpp"

using namespace decolog;

namespace {

struct Setup {
  Signature sig;
  Model model;
};

Setup setup(const char* sig, const char* model) {
  Signature s = testing_support::sig(sig);
  Model m = testing_support::model(model, s);
  return {s, m};
}

HarnessReport without_guard(RuleSetId which, const Model& m, const std::string& rule) {
  HarnessOptions o;
  o.rules = {rule};
  o.disabled_guards[rule] = std::vector<bool>(4, true);
  return validate_ruleset(which, m, 2, o);
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("default universe") {
    Setup e = setup("exceptions.dls", "exceptions_2.dlm");
    std::vector<Type> u = default_universe(e.sig);
    CHECK(std::find(u.begin(), u.end(), Type::empty()) != u.end());
    CHECK(std::find(u.begin(), u.end(), Type::sum(Type::unit(), Type::unit())) != u.end());
    CHECK(std::find(u.begin(), u.end(), Type::prod(Type::base("VT"), Type::base("VT"))) != u.end());
  }

  TEST_CASE("rule sets are sound at depth 2") {
    for (auto [which, sig, model] : {std::tuple{RuleSetId::Exc, "exceptions.dls", "exceptions_2.dlm"},
                                     std::tuple{RuleSetId::St, "states.dls", "states_2.dlm"},
                                     std::tuple{RuleSetId::Combined, "combined.dls", "combined_2x2.dlm"}}) {
      Setup s = setup(sig, model);
      HarnessReport r = validate_ruleset(which, s.model, 2);
      CHECK_MESSAGE(r.counterexamples.empty(),
                    to_string(which) << ": " << (r.counterexamples.empty() ? "" : r.counterexamples[0].detail));
      CHECK(r.classes > 10);
      for (const Rule& rule : ruleset(which)) {
        if (!rule.structural) CHECK_MESSAGE(r.instances[rule.name] > 0, rule.name);
      }
    }
  }

  TEST_CASE("restricting to one rule") {
    Setup s = setup("exceptions.dls", "exceptions_2.dlm");
    HarnessOptions o;
    o.rules = {"R11"};
    HarnessReport r = validate_ruleset(RuleSetId::Exc, s.model, 2, o);
    CHECK(r.instances.size() == 1);
    CHECK(r.instances.count("R11") == 1);
  }

  TEST_CASE("guards are necessary") {
    Setup e = setup("exceptions.dls", "exceptions_2.dlm");
    Setup st = setup("states.dls", "states_2.dlm");
    CHECK_FALSE(without_guard(RuleSetId::Exc, e.model, "R6").counterexamples.empty());
    CHECK_FALSE(without_guard(RuleSetId::Exc, e.model, "R4").counterexamples.empty());
    CHECK_FALSE(without_guard(RuleSetId::St, st.model, "R7").counterexamples.empty());
    CHECK_FALSE(without_guard(RuleSetId::St, st.model, "R4'").counterexamples.empty());
    HarnessReport r6 = without_guard(RuleSetId::Exc, e.model, "R6");
    for (const auto& f : r6.counterexamples) CHECK(f.rule == "R6");
  }
}
