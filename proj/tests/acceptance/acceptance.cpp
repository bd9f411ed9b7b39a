// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <regex>
#include <set>
#include <sstream>

#include "decolog/error.hpp"
#include "decolog/harness.hpp"
#include "decolog/imp.hpp"
#include "decolog/proofs.hpp"
#include "imp_agreement.hpp"
#include "support.hpp"

using namespace decolog;
namespace fs = std::filesystem;
namespace ts = testing_support;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

void fail(Outcome& o, const std::string& why) {
  if (o.pass) o.detail = why;
  o.pass = false;
}

const Signature& combined() {
  static const Signature s = ts::sig("combined.dls");
  return s;
}

const std::vector<Model>& test_models() {
  static const std::vector<Model> m{ts::model("combined_2x2.dlm", combined()),
                                    ts::model("combined_2x3.dlm", combined())};
  return m;
}

Signature script_sig(const fs::path& path, const std::string& text) {
  std::smatch m;
  if (!std::regex_search(text, m, std::regex(R"((^|\n)sig\s+(\S+))"))) throw std::runtime_error("no sig directive");
  return parse_signature(detail::read_file((path.parent_path() / m[2].str()).string()));
}

std::vector<fs::path> files(const std::string& dir, const std::string& ext) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(ts::data(dir))) {
    if (e.path().extension() == ext) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// 1. Every axiom, at every instance of depth <= 2, in every test model.
Outcome axioms() {
  Outcome o;
  long instances = 0, timeouts = 0;
  for (RuleSetId which : {RuleSetId::Exc, RuleSetId::St, RuleSetId::Combined}) {
    HarnessOptions opt;
    for (const Rule& r : ruleset(which)) {
      if (r.is_axiom()) opt.rules.push_back(r.name);
    }
    for (const Model& m : test_models()) {
      HarnessReport r = validate_ruleset(which, m, 2, opt);
      for (const auto& [rule, n] : r.instances) instances += n;
      if (!r.counterexamples.empty()) fail(o, r.counterexamples[0].rule + ": " + r.counterexamples[0].detail);
      timeouts += static_cast<long>(r.timeouts.size());
    }
  }
  if (o.pass) {
    o.detail = std::to_string(instances) + " axiom instances, 0 counterexamples in 2 models, " +
               std::to_string(timeouts) + " divergent instances listed separately";
  }
  return o;
}

// 2. Rule soundness at depth 3, and necessity of the purity guards.
Outcome rules() {
  Outcome o;
  long instances = 0, timeouts = 0;
  for (RuleSetId which : {RuleSetId::Exc, RuleSetId::St, RuleSetId::Combined}) {
    for (const Model& m : test_models()) {
      HarnessReport r = validate_ruleset(which, m, 3);
      for (const auto& [rule, n] : r.instances) instances += n;
      timeouts += static_cast<long>(r.timeouts.size());
      if (!r.counterexamples.empty()) {
        fail(o, to_string(which) + " " + r.counterexamples[0].rule + ": " + r.counterexamples[0].detail);
      }
    }
  }
  const Model& m = test_models()[0];
  for (auto [which, rule] : {std::pair{RuleSetId::Exc, "R6"}, std::pair{RuleSetId::St, "R7"},
                             std::pair{RuleSetId::Exc, "R4"}, std::pair{RuleSetId::St, "R4'"}}) {
    HarnessOptions opt;
    opt.rules = {rule};
    opt.disabled_guards[rule] = std::vector<bool>(4, true);
    if (validate_ruleset(which, m, 3, opt).counterexamples.empty()) {
      fail(o, std::string(rule) + " without its guard produced no counterexample");
    }
  }
  if (o.pass) {
    o.detail = std::to_string(instances) + " instances, 0 counterexamples, " + std::to_string(timeouts) +
               " divergent instances listed separately; R6, R7, R4, R4' unguarded are refuted";
  }
  return o;
}

// 3. The state and exception proof suites, each step checked in the models.
Outcome laws() {
  Outcome o;
  std::vector<Model> models = test_models();
  int goals = 0;
  for (const char* rel : {"scripts/state_laws.dlp", "scripts/exception_laws.dlp"}) {
    fs::path path = ts::data(rel);
    std::string text = detail::read_file(path.string());
    Signature sig = script_sig(path, text);
    ProofScript p = parse_script(text, sig);
    Verdict v = check(p, sig);
    if (!v.ok || v.under_hypotheses || v.established.size() != 7) {
      fail(o, std::string(rel) + " does not check");
      continue;
    }
    goals += 7;
    std::string small = std::string(rel).find("state") != std::string::npos ? "states_" : "exceptions_";
    models.push_back(ts::model(small + "2.dlm", sig));
    models.push_back(ts::model(small + "3.dlm", sig));
    for (const Step& s : p.steps) {
      for (const Model& m : models) {
        if (holds(s.claim, m).kind != HoldsResult::Kind::Holds) fail(o, s.label + " is refuted in a model");
      }
    }
    models.resize(2);
    if (p.rules == RuleSetId::Exc) {
      Equation want = parse_equation("tag[T] o untag[T] == id[0]", sig);
      bool found = false;
      for (const auto& [label, eq] : v.established) found |= normalize(eq) == normalize(want);
      if (!found) fail(o, "tag[T] o untag[T] == id[0] is not among the exception goals");
    }
  }
  if (o.pass) o.detail = std::to_string(goals) + " goals proved; every step holds in 4 models";
  return o;
}

// 4. Flawed scripts are rejected for the right reason.
Outcome negatives() {
  Outcome o;
  const std::vector<std::pair<const char*, const char*>> cases{
      {"strength_mismatch.dlp", "strength mismatch"},
      {"substitution_with_tag.dlp", "must be exception-pure"},
      {"same_exception.dlp", "names must differ"},
      {"circular_label.dlp", "dangling label 's1'"},
      {"dangling_label.dlp", "dangling label 's2'"},
      {"catcher_in_copair.dlp", "copair restriction"},
      {"wrong_fragment.dlp", "outside the EXC fragment"},
  };
  for (const auto& [name, reason] : cases) {
    fs::path path = ts::data(std::string("scripts/negative/") + name);
    std::string got;
    try {
      std::string text = detail::read_file(path.string());
      Signature sig = script_sig(path, text);
      Verdict v = check(parse_script(text, sig), sig);
      got = v.ok ? "accepted" : v.failures.at(0).reason;
    } catch (const std::exception& e) {
      got = e.what();
    }
    if (got.find(reason) == std::string::npos) fail(o, std::string(name) + ": " + got);
  }
  if (o.pass) o.detail = std::to_string(cases.size()) + " scripts rejected with the expected reason";
  return o;
}

// 5. dualize(EXC) is ST, rule by rule.
Outcome duality() {
  Outcome o;
  std::vector<Rule> exc = ruleset(RuleSetId::Exc), st = ruleset(RuleSetId::St);
  std::multiset<std::string> lhs, rhs;
  for (const Rule& r : exc) lhs.insert(canonical_form(dualize(r)));
  for (const Rule& r : st) rhs.insert(canonical_form(r));
  if (lhs != rhs) fail(o, "dualized EXC rules differ from ST");
  for (const Rule& r : exc) {
    const Rule* d = find_rule(RuleSetId::St, r.dual_name);
    if (!d || canonical_form(*d) != canonical_form(dualize(r))) fail(o, r.name + " is not dual to " + r.dual_name);
  }
  if (o.pass) o.detail = std::to_string(exc.size()) + " rules match";
  return o;
}

// 6. Interpreter and translation agree on every store.
Outcome imp_agreement() {
  Outcome o;
  Signature sig = ts::sig("imp.dls");
  int programs = 0, f = 0, u = 0, t = 0;
  for (const fs::path& path : files("imp", ".imp")) {
    if (path.stem() == "rank_mod6") continue;
    ImpProgram p = parse_imp(detail::read_file(path.string()), sig);
    ++programs;
    for (int fuel : {3, 20}) {
      ts::Agreement a = ts::agreement(p, sig, fuel);
      if (!a.mismatches.empty()) fail(o, path.filename().string() + ": " + a.mismatches[0]);
      f += a.finished;
      u += a.uncaught;
      t += a.timeout;
    }
  }
  if (programs < 8) fail(o, "fewer than 8 programs");
  if (u == 0 || t == 0) fail(o, "Uncaught or Timeout outcomes not exercised");
  if (o.pass) {
    o.detail = std::to_string(programs) + " programs; finished " + std::to_string(f) + ", uncaught " +
               std::to_string(u) + ", timeout " + std::to_string(t);
  }
  return o;
}

int rank_mod_p(int a, int b, int c, int d, int p) {
  a %= p, b %= p, c %= p, d %= p;
  if (a == 0 && b == 0 && c == 0 && d == 0) return 0;
  return ((a * d - b * c) % p + p) % p != 0 ? 2 : 1;
}

// 7. Rank over Z/6 against a per-prime brute-force oracle.
Outcome rank() {
  Outcome o;
  Signature sig = ts::sig("rank.dls");
  ImpProgram p = parse_imp(detail::read_file(ts::data("imp/rank_mod6.imp")), sig);
  auto index = [&](const std::string& name) {
    for (std::size_t i = 0; i < sig.locations.size(); ++i) {
      if (sig.locations[i].name == name) return i;
    }
    throw std::runtime_error("no location " + name);
  };
  std::size_t A = index("A"), B = index("B"), C = index("C"), D = index("D"), R2 = index("R2"), R3 = index("R3");
  int handled = 0;
  for (int i = 0; i < 1296; ++i) {
    int a = i / 216, b = i / 36 % 6, c = i / 6 % 6, d = i % 6;
    std::vector<int> store(sig.locations.size(), 0);
    store[A] = a, store[B] = b, store[C] = c, store[D] = d;
    RunResult r = run(p, sig, store, 100);
    if (r.kind != RunResult::Kind::Finished) {
      fail(o, "did not finish: " + to_string(r, sig));
      continue;
    }
    if (r.store[R2] != rank_mod_p(a, b, c, d, 2) || r.store[R3] != rank_mod_p(a, b, c, d, 3)) {
      fail(o, "wrong rank for " + to_string(r, sig));
    }
    handled += rank_mod_p(a, b, c, d, 2) != rank_mod_p(a, b, c, d, 3);
  }
  if (o.pass) o.detail = "1296 matrices match, " + std::to_string(handled) + " with different ranks mod 2 and mod 3";
  return o;
}

// 8. parse o pretty is the identity.
Outcome round_trips() {
  Outcome o;
  ts::TermGen gen(combined(), 7);
  for (int i = 0; i < 1000; ++i) {
    Term t = gen.any(i % 4);
    if (depth(t) > 4 || !(parse_term(pretty(t), combined()) == t)) fail(o, "term " + pretty(t));
  }
  int n = 0;
  for (const fs::path& path : files("sigs", ".dls")) {
    Signature s = parse_signature(detail::read_file(path.string()));
    if (pretty(parse_signature(pretty(s))) != pretty(s)) fail(o, path.filename().string());
    ++n;
  }
  for (const fs::path& path : files("models", ".dlm")) {
    std::string name = path.filename().string();
    Signature s = ts::sig(name.rfind("combined", 0) == 0 ? "combined.dls"
                          : name.rfind("states", 0) == 0 ? "states.dls"
                                                         : "exceptions.dls");
    Model m = parse_model(detail::read_file(path.string()), s);
    if (pretty(parse_model(pretty(m), s)) != pretty(m)) fail(o, name);
    ++n;
  }
  for (const std::string& dir : {std::string("scripts"), std::string("scripts/negative")}) {
    for (const fs::path& path : files(dir, ".dlp")) {
      std::string text = detail::read_file(path.string());
      Signature s = script_sig(path, text);
      ProofScript p;
      try {
        p = parse_script(text, s);
      } catch (const ParseError&) {
        continue;  // deliberately malformed
      }
      if (pretty(parse_script(pretty(p), s)) != pretty(p)) fail(o, path.filename().string());
      ++n;
    }
  }
  for (const fs::path& path : files("imp", ".imp")) {
    Signature s = ts::sig(path.stem() == "rank_mod6" ? "rank.dls" : "imp.dls");
    ImpProgram p = parse_imp(detail::read_file(path.string()), s);
    if (pretty(parse_imp(pretty(p), s)) != pretty(p)) fail(o, path.filename().string());
    ++n;
  }
  if (o.pass) o.detail = "1000 terms and " + std::to_string(n) + " bundled files";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int number;
    const char* name;
    double limit_seconds;  // 0: none
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "axiom soundness", 10, axioms},
      {2, "rule soundness harness", 300, rules},
      {3, "state and exception laws", 0, laws},
      {4, "negative proof scripts", 0, negatives},
      {5, "rule set duality", 0, duality},
      {6, "IMP agreement", 0, imp_agreement},
      {7, "rank modulo 6", 60, rank},
      {8, "round trips", 0, round_trips},
  };
  bool all = true;
  for (const Criterion& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0 && secs > c.limit_seconds) {
      std::ostringstream os;
      os << "over the " << c.limit_seconds << " s limit; " << o.detail;
      o = {false, os.str()};
    }
    all &= o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << ' ' << c.number << ' ' << c.name << ": " << o.detail << " ("
              << std::fixed << std::setprecision(1) << secs << " s)" << std::endl;
  }
  return all ? 0 : 1;
}
