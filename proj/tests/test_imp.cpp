#include <doctest.h>

#include <functional>

#include "decolog/error.hpp"
#include "decolog/imp.hpp"
#include "imp_agreement.hpp"
#include "support.hpp"

using namespace decolog;

namespace {

const Signature& isig() {
  static const Signature s = testing_support::sig("imp.dls");
  return s;
}

ImpProgram prog(const std::string& text) { return parse_imp(text, isig()); }

ImpProgram bundled(const std::string& name) {
  return parse_imp(detail::read_file(testing_support::data("imp/" + name + ".imp")), isig());
}

Decoration dec(const ImpProgram& p) {
  Signature as = arith_signature(isig(), p);
  return infer(translate(p, as), as).dec;
}

std::string run_text(const std::string& text, std::vector<int> store) {
  return to_string(run(prog(text), isig(), std::move(store), 20), isig());
}

Term strip_down(const Term& t) {
  std::vector<Term> a;
  for (const Term& x : t.args()) a.push_back(strip_down(x));
  switch (t.kind()) {
    case TermKind::Down: return a[0];
    case TermKind::Comp: return Term::comp(a[0], a[1]);
    case TermKind::Copair: return Term::copair(a[0], a[1]);
    case TermKind::Pair: return Term::pair(a[0], a[1]);
    case TermKind::If: return Term::if_(a[0], a[1], a[2]);
    case TermKind::While: return Term::while_(a[0], a[1]);
    default: return t;
  }
}

const std::vector<std::string> kPrograms{"skip",  "assign_seq", "arith",     "cond",
                                         "loop",  "diverge",    "throw",     "try",
                                         "nested_try", "throw_then_try", "rethrow"};

}  // namespace

TEST_SUITE("imp") {
  TEST_CASE("parsing") {
    ImpProgram p = prog("mod 4 skip");
    CHECK(p.modulus == 4);
    CHECK(p.value_type == "Z");
    CHECK(p.body.kind == Cmd::Kind::Skip);
    CHECK(prog("mod 3 while (not (X == 0)) do X := X - 1").body.kind == Cmd::Kind::While);
    ImpProgram t = prog("mod 3 try X := 1 catch E(W) X := 0");
    CHECK(t.body.kind == Cmd::Kind::Try);
    CHECK(t.body.name == "E");
    CHECK(t.body.binder == "W");
    CHECK(prog("mod 3 X := 5").body.expr.value == 2);
    CHECK(prog("mod 3 X := 1 + 2 * Y").body.expr.kind == Expr::Kind::Add);
    CHECK_THROWS_AS(prog("mod 3 Q := 1"), NameError);
    CHECK_THROWS_AS(prog("mod 3 throw G(1)"), NameError);
    CHECK_THROWS_AS(prog("mod 3 X := "), ParseError);
    CHECK_THROWS_AS(prog("X := 1"), ParseError);
  }

  TEST_CASE("pretty round trip") {
    for (const auto& name : kPrograms) {
      ImpProgram p = bundled(name);
      std::string text = pretty(p);
      CHECK_MESSAGE(pretty(parse_imp(text, isig())) == text, name);
    }
  }

  TEST_CASE("interpreter") {
    CHECK(run_text("mod 3 X := 1; X := 2", {0, 0, 0}) == "FINISHED {X=2, Y=0, W=0}");
    CHECK(run_text("mod 3 throw E(1)", {2, 1, 0}) == "UNCAUGHT E(1) {X=2, Y=1, W=0}");
    CHECK(run_text("mod 3 try throw E(1) catch E(W) skip", {0, 0, 0}) == "FINISHED {X=0, Y=0, W=1}");
    CHECK(run_text("mod 3 try throw F(1) catch E(W) skip", {0, 0, 0}) == "UNCAUGHT F(1) {X=0, Y=0, W=0}");
    CHECK(run_text("mod 3 while true do skip", {0, 0, 0}) == "TIMEOUT");
    CHECK(run_text("mod 3 while X < 2 do X := X + 1", {0, 0, 0}) == "FINISHED {X=2, Y=0, W=0}");
    CHECK(run_text("mod 3 X := 0 - 1", {0, 0, 0}) == "FINISHED {X=2, Y=0, W=0}");
  }

  TEST_CASE("translation") {
    ImpProgram skip = prog("mod 3 skip");
    Signature as = arith_signature(isig(), skip);
    CHECK(pretty(translate(skip, as)) == "id[1]");
    CHECK(dec(skip) == Decoration{0, 0});
    CHECK(dec(prog("mod 3 throw E(2)")).exc == 1);
    CHECK(dec(prog("mod 3 if X == Y then skip else skip")) == Decoration{0, 1});

    ImpProgram t = prog("mod 3 try skip catch E(W) skip");
    Signature ts = arith_signature(isig(), t);
    Model m = arith_model(ts, t, 20);
    Denotation d = denote(translate(t, ts), m);
    for (int s = 0; s < m.state_count(); ++s) CHECK(d.at(0, s, m.state_count()) == Out{0, s});
  }

  TEST_CASE("decorations of the bundled programs") {
    for (const auto& name : kPrograms) {
      ImpProgram p = bundled(name);
      Decoration d = dec(p);
      std::function<void(const Cmd&, bool&, bool&, bool&)> scan = [&](const Cmd& c, bool& thr, bool& tr, bool& st) {
        thr |= c.kind == Cmd::Kind::Throw;
        tr |= c.kind == Cmd::Kind::Try;
        st |= c.kind == Cmd::Kind::Assign || c.kind == Cmd::Kind::Try;
        for (const Cmd& x : c.body) scan(x, thr, tr, st);
      };
      bool thr = false, tr = false, st = false;
      scan(p.body, thr, tr, st);
      // try/catch is downcast, so a whole program is never a catcher.
      CHECK_MESSAGE(d.exc <= 1, name);
      if (thr) CHECK_MESSAGE(d.exc == 1, name);
      if (!thr) CHECK_MESSAGE(d.exc == 0, name);
      if (!st) CHECK_MESSAGE(d.st <= 1, name);
      if (tr) CHECK_MESSAGE(d.st == 2, name);
    }
  }

  TEST_CASE("interpreter and translation agree") {
    int finished = 0, uncaught = 0, timeout = 0;
    for (const auto& name : kPrograms) {
      ImpProgram p = bundled(name);
      for (int fuel : {3, 20}) {
        testing_support::Agreement a = testing_support::agreement(p, isig(), fuel);
        CHECK_MESSAGE(a.mismatches.empty(), name << ": " << (a.mismatches.empty() ? "" : a.mismatches[0]));
        finished += a.finished;
        uncaught += a.uncaught;
        timeout += a.timeout;
      }
    }
    CHECK(finished > 0);
    CHECK(uncaught > 0);
    CHECK(timeout > 0);
  }

  TEST_CASE("without the downcast an earlier exception is caught") {
    ImpProgram p = bundled("throw_then_try");
    Signature as = arith_signature(isig(), p);
    Term raw = strip_down(translate(p, as));
    testing_support::Agreement a = testing_support::agreement(p, isig(), raw, 20);
    CHECK_FALSE(a.mismatches.empty());
    CHECK(testing_support::agreement(p, isig(), 20).mismatches.empty());
  }
}
