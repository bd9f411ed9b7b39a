#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "decolog/cli.hpp"
#include "support.hpp"

using namespace decolog;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

// Runs from the data directory; reports carry relative paths.
Result cli(std::vector<std::string> args) {
  fs::path before = fs::current_path();
  fs::current_path(DECOLOG_DATA_DIR);
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  fs::current_path(before);
  return {code, out.str(), err.str()};
}

std::string golden_path(const std::string& name) { return std::string(DECOLOG_GOLDEN_DIR) + "/" + name; }

// DECOLOG_UPDATE_GOLDEN=1 rewrites the files instead of comparing.
void golden(const std::string& name, int expected_code, std::vector<std::string> args) {
  Result r = cli(std::move(args));
  CHECK_MESSAGE(r.code == expected_code, name << ": " << r.err);
  if (std::getenv("DECOLOG_UPDATE_GOLDEN")) {
    std::ofstream(golden_path(name), std::ios::binary) << r.out;
    return;
  }
  std::ifstream in(golden_path(name), std::ios::binary);
  REQUIRE_MESSAGE(in, "missing golden file " << name);
  std::stringstream want;
  want << in.rdbuf();
  CHECK_MESSAGE(r.out == want.str(), name);
}

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("model-check") {
    Result ok = cli({"model-check", "--sig", "sigs/combined.dls", "--model", "models/combined_2x2.dlm", "--eq",
                     "untag[T] o tag[T] ~exc id[VT]"});
    CHECK(ok.code == 0);
    CHECK(ok.out == "HOLDS\n");
    Result bad = cli({"model-check", "--sig", "sigs/combined.dls", "--model", "models/combined_2x2.dlm", "--eq",
                      "untag[T] o tag[T] == id[VT]"});
    CHECK(bad.code == 1);
    CHECK(starts_with(bad.out, "COUNTEREXAMPLE: input exc T(v0) "));
  }

  TEST_CASE("check") {
    Result r = cli({"check", "scripts/state_laws.dlp"});
    CHECK(r.code == 0);
    CHECK(r.out == "OK (7 goals)\n");
    Result s = cli({"check", "scripts/state_laws.dlp", "--sig", "sigs/states.dls"});
    CHECK(s.out == "OK (7 goals)\n");
    Result n = cli({"check", "scripts/negative/same_exception.dlp"});
    CHECK(n.code == 1);
    CHECK(n.out.find("FAIL s1: side condition violated") != std::string::npos);
    Result p = cli({"check", "scripts/negative/dangling_label.dlp"});
    CHECK(p.code == 2);
    CHECK(starts_with(p.err, "parse error: "));
    // The worst outcome across files decides the exit code.
    Result mixed = cli({"check", "scripts/state_laws.dlp", "scripts/negative/same_exception.dlp",
                        "scripts/negative/dangling_label.dlp"});
    CHECK(mixed.code == 2);
    CHECK(mixed.out.find("== scripts/state_laws.dlp\nOK (7 goals)") != std::string::npos);
  }

  TEST_CASE("infer, dual, translate and run") {
    Result i = cli({"infer", "--sig", "sigs/combined.dls", "--term", "lookup[X] o update[X]"});
    CHECK(i.code == 0);
    CHECK(i.out == "lookup[X] o update[X] : V -> V (0,2)\n");
    CHECK(cli({"infer", "--sig", "sigs/combined.dls", "--term", "lookup[Q]"}).code == 2);
    CHECK(cli({"infer", "--sig", "sigs/combined.dls", "--term", "tag[T] o tag[T]"}).code == 2);

    CHECK(cli({"dual", "--term", "untag[T] o tag[T]"}).out == "lookup[T] o update[T]\n");

    Result t = cli({"translate", "imp/skip.imp", "--sig", "sigs/imp.dls"});
    CHECK(t.code == 0);
    CHECK(t.out == "id[1]\n  : 1 -> 1 (0,0)\n");

    Result r = cli({"run", "imp/try.imp", "--sig", "sigs/imp.dls", "--store", "X=0,Y=2"});
    CHECK(r.code == 0);
    CHECK(r.out == "FINISHED {X=0, Y=1, W=2}\n");
    Result d = cli({"run", "imp/diverge.imp", "--sig", "sigs/imp.dls", "--fuel", "5"});
    CHECK(d.code == 1);
    CHECK(d.out == "TIMEOUT\n");
  }

  TEST_CASE("fuel from the environment") {
    ::setenv("DECOLOG_FUEL", "1", 1);
    Result low = cli({"run", "imp/loop.imp", "--sig", "sigs/imp.dls", "--store", "X=2"});
    ::setenv("DECOLOG_FUEL", "50", 1);
    Result high = cli({"run", "imp/loop.imp", "--sig", "sigs/imp.dls", "--store", "X=2"});
    Result flag = cli({"run", "imp/loop.imp", "--sig", "sigs/imp.dls", "--store", "X=2", "--fuel", "1"});
    ::unsetenv("DECOLOG_FUEL");
    CHECK(low.out == "TIMEOUT\n");
    CHECK(high.code == 0);
    CHECK(flag.out == "TIMEOUT\n");
  }

  TEST_CASE("usage errors") {
    CHECK(cli({}).code == 2);
    CHECK(cli({"frobnicate"}).code == 2);
    Result r = cli({"validate-rules", "--sig", "sigs/combined.dls"});
    CHECK(r.code == 2);
    CHECK(r.err.find("--model") != std::string::npos);
    CHECK(cli({"validate-rules", "--sig", "sigs/combined.dls", "--model", "models/combined_2x2.dlm",
               "--ruleset", "BOTH", "--depth", "1"})
              .code == 2);
  }

  TEST_CASE("porcelain reports are stable") {
    golden("check_state_laws.txt", 0, {"--porcelain", "check", "scripts/state_laws.dlp"});
    golden("check_negative.txt", 2,
           {"--porcelain", "check", "scripts/negative/catcher_in_copair.dlp", "scripts/negative/circular_label.dlp",
            "scripts/negative/dangling_label.dlp", "scripts/negative/same_exception.dlp",
            "scripts/negative/strength_mismatch.dlp", "scripts/negative/substitution_with_tag.dlp",
            "scripts/negative/wrong_fragment.dlp"});
    golden("model_check.txt", 1,
           {"--porcelain", "model-check", "--sig", "sigs/combined.dls", "--model", "models/combined_2x2.dlm", "--eq",
            "lookup[X] o update[X] == id[V]"});
    golden("validate_exc.txt", 0,
           {"--porcelain", "validate-rules", "--sig", "sigs/exceptions.dls", "--model", "models/exceptions_2.dlm",
            "--ruleset", "EXC", "--depth", "2"});
    golden("validate_r6_unguarded.txt", 1,
           {"--porcelain", "validate-rules", "--sig", "sigs/exceptions.dls", "--model", "models/exceptions_2.dlm",
            "--ruleset", "EXC", "--depth", "2", "--rules", "R6", "--disable-guards", "R6"});
    golden("translate_nested_try.txt", 0, {"--porcelain", "translate", "imp/nested_try.imp", "--sig", "sigs/imp.dls"});
    golden("run_throw.txt", 0, {"--porcelain", "run", "imp/throw.imp", "--sig", "sigs/imp.dls", "--store", "X=1"});
  }

  TEST_CASE("dual of the state script is the exception script") {
    Result r = cli({"dual", "--script", "scripts/state_laws.dlp", "--rename", "X=T,Y=R,V=VT", "--dual-sig",
                    "../sigs/exceptions.dls"});
    CHECK(r.code == 0);
    std::string exc = detail::read_file(testing_support::data("scripts/exception_laws.dlp"));
    CHECK(exc.find(r.out) != std::string::npos);
  }
}
