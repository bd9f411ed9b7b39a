#pragma once

#include <string>
#include <vector>

#include "decolog/imp.hpp"

namespace testing_support {

struct Agreement {
  int finished = 0;
  int uncaught = 0;
  int timeout = 0;
  std::vector<std::string> mismatches;  // "state: run ... / denote ..."
};

// Runs p from every store of its arithmetic model and compares each outcome
// with the denotation of `term` at ((), store).
inline Agreement agreement(const decolog::ImpProgram& p, const decolog::Signature& sig,
                           const decolog::Term& term, int fuel) {
  using namespace decolog;
  Signature as = arith_signature(sig, p);
  Model m = arith_model(as, p, fuel);
  Denotation d = denote(term, m);
  Agreement a;
  for (int s = 0; s < m.state_count(); ++s) {
    std::vector<int> store;
    for (std::size_t i = 0; i < sig.locations.size(); ++i) store.push_back(m.state_component(s, i));
    RunResult r = run(p, sig, store, fuel);
    RunResult o = outcome(d.at(0, s, m.state_count()), m);
    std::string lhs = to_string(r, sig), rhs = to_string(o, sig);
    if (lhs != rhs) a.mismatches.push_back(m.state_to_string(s) + ": run " + lhs + " / denote " + rhs);
    switch (r.kind) {
      case RunResult::Kind::Finished: ++a.finished; break;
      case RunResult::Kind::Uncaught: ++a.uncaught; break;
      case RunResult::Kind::Timeout: ++a.timeout; break;
    }
  }
  return a;
}

inline Agreement agreement(const decolog::ImpProgram& p, const decolog::Signature& sig, int fuel) {
  return agreement(p, sig, decolog::translate(p, decolog::arith_signature(sig, p)), fuel);
}

}  // namespace testing_support
