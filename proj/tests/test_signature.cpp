#include <doctest.h>

#include "decolog/error.hpp"
#include "decolog/signature.hpp"
#include "support.hpp"

using namespace decolog;

TEST_SUITE("signature") {
  TEST_CASE("single exception declaration") {
    Signature s = parse_signature("base Nat2\nexception T : Nat2\n");
    REQUIRE(s.exceptions.size() == 1);
    CHECK(s.exceptions[0].name == "T");
    CHECK(s.exceptions[0].value_type == "Nat2");
  }

  TEST_CASE("two locations share a value type") {
    Signature s = parse_signature("base Nat3\nlocation X : Nat3\nlocation Y : Nat3\n");
    REQUIRE(s.locations.size() == 2);
    CHECK(s.locations[1].value_type == "Nat3");
  }

  TEST_CASE("unknown type is named") {
    try {
      parse_signature("exception T : Missing\n");
      FAIL("expected an error");
    } catch (const NameError& e) {
      CHECK(std::string(e.what()).find("Missing") != std::string::npos);
    }
  }

  TEST_CASE("duplicates and Empty ops are rejected") {
    CHECK_THROWS_AS(parse_signature("base V\nexception T : V\nexception T : V\n"), NameError);
    CHECK_THROWS_AS(parse_signature("base V\nop bad : 0 -> V\n"), NameError);
    CHECK_THROWS_AS(parse_signature("base V\nlocation X V\n"), ParseError);
  }

  TEST_CASE("validate reports violations as data") {
    Signature ok = testing_support::sig("combined.dls");
    CHECK(validate(ok).empty());

    Signature dup = ok;
    dup.exceptions.push_back(dup.exceptions[0]);
    auto v = validate(dup);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("duplicate name") != std::string::npos);

    Signature empty_op = ok;
    empty_op.ops.push_back({"bad", Type::empty(), Type::base("V")});
    v = validate(empty_op);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("pure op touches Empty") != std::string::npos);
  }

  TEST_CASE("pretty is inverted by parse") {
    for (const char* name : {"combined.dls", "states.dls", "exceptions.dls", "imp.dls", "rank.dls"}) {
      Signature s = testing_support::sig(name);
      CHECK(parse_signature(pretty(s)) == s);
    }
    Signature with_ops = parse_signature("base Z\nop add : Z*Z -> Z\nop neg : Z -> Z+1\n");
    CHECK(parse_signature(pretty(with_ops)) == with_ops);
  }

  TEST_CASE("dualize swaps exceptions and locations") {
    Signature s = testing_support::sig("combined.dls");
    Signature d = dualize(s);
    CHECK(d.locations == s.exceptions);
    CHECK(d.exceptions == s.locations);
    CHECK(dualize(d) == s);
  }
}
