#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "decolog/error.hpp"
#include "decolog/proofs.hpp"
#include "decolog/semantics.hpp"
#include "support.hpp"

using namespace decolog;
namespace fs = std::filesystem;

namespace {

struct Loaded {
  Signature sig;
  std::string text;
};

Loaded load(const std::string& rel) {
  fs::path path = testing_support::data("scripts/" + rel);
  std::string text = detail::read_file(path.string());
  std::smatch m;
  REQUIRE(std::regex_search(text, m, std::regex(R"((^|\n)sig\s+(\S+))")));
  fs::path sig_path = path.parent_path() / m[2].str();
  return {parse_signature(detail::read_file(sig_path.string())), text};
}

// Reason of the first failure, from parsing or checking.
std::string first_failure(const std::string& rel) {
  Loaded l = load(rel);
  try {
    Verdict v = check(parse_script(l.text, l.sig), l.sig);
    if (v.ok || v.failures.empty()) return "";
    return v.failures.front().reason;
  } catch (const std::exception& e) {
    return e.what();
  }
}

void every_step_holds(const ProofScript& script, const std::vector<const Model*>& models) {
  for (const Step& s : script.steps) {
    for (const Model* m : models) {
      CHECK_MESSAGE(holds(s.claim, *m).kind == HoldsResult::Kind::Holds, s.label << ": " << pretty(s.claim));
    }
  }
}

}  // namespace

TEST_SUITE("proofs") {
  TEST_CASE("script syntax") {
    Signature sig = testing_support::sig("states.dls");
    ProofScript p = parse_script(
        "use ST\n"
        "goal a\n"
        "a: lookup[X] o update[X] ~st id[V] by axiom R11'(X)\n",
        sig);
    CHECK(p.rules == RuleSetId::St);
    REQUIRE(p.steps.size() == 1);
    CHECK(p.steps[0].by.kind == Justification::Kind::Axiom);
    CHECK(p.steps[0].by.args == std::vector<std::string>{"X"});
    CHECK(p.steps[0].line == 3);
    Verdict v = check(p, sig);
    CHECK(v.ok);
    REQUIRE(v.established.size() == 1);
    CHECK(pretty(v.established[0].second) == "lookup[X] o update[X] ~st id[V]");

    CHECK_THROWS_WITH_AS(parse_script("use ST\ngoal z\n", sig), doctest::Contains("z"), ParseError);
    CHECK_THROWS_AS(parse_script("use MIXED\n", sig), ParseError);
  }

  TEST_CASE("hypotheses are reported") {
    Signature sig = testing_support::sig("states.dls");
    ProofScript p = parse_script(
        "use ST\n"
        "goal b\n"
        "h: lookup[X] == lookup[Y] by hyp H\n"
        "b: lookup[Y] == lookup[X] by rule R1.sym(h)\n",
        sig);
    Verdict v = check(p, sig);
    CHECK(v.ok);
    CHECK(v.under_hypotheses);
  }

  TEST_CASE("primitive properties of global state") {
    Loaded l = load("state_laws.dlp");
    ProofScript p = parse_script(l.text, l.sig);
    Verdict v = check(p, l.sig);
    CHECK(v.ok);
    CHECK_FALSE(v.under_hypotheses);
    CHECK(v.established.size() == 7);
    Model s2 = testing_support::model("states_2.dlm", l.sig);
    Model s3 = testing_support::model("states_3.dlm", l.sig);
    Signature c = testing_support::sig("combined.dls");
    Model c22 = testing_support::model("combined_2x2.dlm", c);
    Model c23 = testing_support::model("combined_2x3.dlm", c);
    every_step_holds(p, {&s2, &s3, &c22, &c23});
  }

  TEST_CASE("primitive properties of exceptions") {
    Loaded l = load("exception_laws.dlp");
    ProofScript p = parse_script(l.text, l.sig);
    Verdict v = check(p, l.sig);
    CHECK(v.ok);
    CHECK(v.established.size() == 7);
    Model e2 = testing_support::model("exceptions_2.dlm", l.sig);
    Model e3 = testing_support::model("exceptions_3.dlm", l.sig);
    Signature c = testing_support::sig("combined.dls");
    Model c22 = testing_support::model("combined_2x2.dlm", c);
    every_step_holds(p, {&e2, &e3, &c22});
  }

  TEST_CASE("the exception script is the dual of the state script") {
    Loaded st = load("state_laws.dlp");
    Loaded ex = load("exception_laws.dlp");
    ProofScript dual = dualize(parse_script(st.text, st.sig), {{"X", "T"}, {"Y", "R"}, {"V", "VT"}});
    ProofScript exc = parse_script(ex.text, ex.sig);
    CHECK(dual.rules == RuleSetId::Exc);
    REQUIRE(dual.steps.size() == exc.steps.size());
    for (std::size_t i = 0; i < exc.steps.size(); ++i) {
      CHECK(dual.steps[i].label == exc.steps[i].label);
      CHECK(dual.steps[i].claim == exc.steps[i].claim);
      CHECK(dual.steps[i].by.name == exc.steps[i].by.name);
    }
    CHECK(check(dual, ex.sig).ok);
  }

  TEST_CASE("pretty round trip") {
    for (const char* rel : {"state_laws.dlp", "exception_laws.dlp"}) {
      Loaded l = load(rel);
      ProofScript p = parse_script(l.text, l.sig);
      std::string once = pretty(p);
      CHECK(pretty(parse_script(once, l.sig)) == once);
    }
  }

  TEST_CASE("negative scripts fail for the stated reason") {
    const std::vector<std::pair<const char*, const char*>> cases{
        {"negative/strength_mismatch.dlp", "strength mismatch: R11' yields ~st, claimed =="},
        {"negative/substitution_with_tag.dlp", "must be exception-pure"},
        {"negative/same_exception.dlp", "names must differ"},
        {"negative/dangling_label.dlp", "dangling label 's2'"},
        {"negative/circular_label.dlp", "dangling label 's1'"},
        {"negative/catcher_in_copair.dlp", "copair restriction: left branch is a catcher"},
        {"negative/wrong_fragment.dlp", "outside the EXC fragment"},
    };
    for (const auto& [rel, reason] : cases) {
      std::string got = first_failure(rel);
      CHECK_MESSAGE(got.find(reason) != std::string::npos, rel << " -> " << got);
    }
  }
}
