#include "decolog/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <regex>
#include <sstream>

#include "decolog/error.hpp"
#include "decolog/harness.hpp"
#include "decolog/imp.hpp"
#include "decolog/proofs.hpp"
#include "decolog/semantics.hpp"
#include "parse_util.hpp"

namespace decolog {

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kError = 2;

// Errors that map to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::optional<int> env_fuel() {
  const char* v = std::getenv("DECOLOG_FUEL");
  if (!v || !*v) return std::nullopt;
  char* end = nullptr;
  long n = std::strtol(v, &end, 10);
  if (*end || n < 0 || n > 1000000) throw UsageError("DECOLOG_FUEL must be a fuel amount");
  return static_cast<int>(n);
}

Signature load_signature(const std::string& path) {
  return parse_signature(detail::read_file(path));
}

Model load_model(const std::string& path, const Signature& sig, int fuel_flag) {
  Model m = parse_model(detail::read_file(path), sig);
  if (fuel_flag >= 0) {
    m.set_fuel(fuel_flag);
  } else if (auto f = env_fuel()) {
    m.set_fuel(*f);
  }
  return m;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    auto b = item.find_first_not_of(" \t");
    auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

// `A=1,B=2` pairs.
std::vector<std::pair<std::string, std::string>> assignments(const std::string& text,
                                                              const char* what) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& item : split(text, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size()) {
      throw UsageError(std::string("malformed ") + what + " entry '" + item + "', expected NAME=VALUE");
    }
    out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
  }
  return out;
}

// Sig file named by a script's `sig` directive, relative to the script.
std::string script_sig_path(const std::string& script_path, const std::string& text) {
  static const std::regex directive(R"(^[ \t]*sig[ \t]+(\S+))");
  std::istringstream lines(text);
  std::string line;
  std::smatch m;
  while (std::getline(lines, line)) {
    if (std::regex_search(line, m, directive)) {
      std::filesystem::path p(m[1].str());
      if (p.is_relative()) p = std::filesystem::path(script_path).parent_path() / p;
      return p.string();
    }
  }
  throw UsageError(script_path + ": no --sig given and the script has no sig directive");
}

class Cli {
 public:
  Cli(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int main(const std::vector<std::string>& args) {
    CLI::App app{"Workbench for decorated equational logic with exceptions and state", "decolog"};
    app.require_subcommand(1);
    app.add_flag("--porcelain", porcelain_, "tab-separated records, one per result");

    // check
    auto* check = app.add_subcommand("check", "check proof scripts");
    std::vector<std::string> scripts;
    std::string check_sig;
    std::vector<std::string> check_models;
    check->add_option("scripts", scripts, "proof scripts")->required();
    check->add_option("--sig", check_sig, "signature file (default: the script's sig directive)");
    check->add_option("--model", check_models, "also evaluate every step in these models");

    // infer
    auto* infer_cmd = app.add_subcommand("infer", "type and decorate a term");
    std::string infer_sig, infer_term;
    infer_cmd->add_option("--sig", infer_sig, "signature file")->required();
    infer_cmd->add_option("--term", infer_term, "term text")->required();

    // model-check
    auto* mc = app.add_subcommand("model-check", "decide an equation in a finite model");
    std::string mc_sig, mc_model, mc_eq;
    int mc_fuel = -1;
    mc->add_option("--sig", mc_sig, "signature file")->required();
    mc->add_option("--model", mc_model, "model file")->required();
    mc->add_option("--eq", mc_eq, "equation: <lhs> ==|~exc|~st|~~ <rhs>")->required();
    mc->add_option("--fuel", mc_fuel, "loop fuel (overrides the model)");

    // validate-rules
    auto* vr = app.add_subcommand("validate-rules", "check every rule instance in a model");
    std::string vr_sig, vr_model, vr_set, vr_rules, vr_disable;
    int vr_depth = 3, vr_fuel = -1;
    vr->add_option("--sig", vr_sig, "signature file")->required();
    vr->add_option("--model", vr_model, "model file")->required();
    vr->add_option("--ruleset", vr_set, "EXC, ST or COMBINED")->required();
    vr->add_option("--depth", vr_depth, "term depth bound")->check(CLI::Range(0, 6));
    vr->add_option("--rules", vr_rules, "comma-separated rule names (default: all)");
    vr->add_option("--disable-guards", vr_disable, "comma-separated rules whose side conditions are ignored");
    vr->add_option("--fuel", vr_fuel, "loop fuel (overrides the model)");

    // translate
    auto* tr = app.add_subcommand("translate", "translate an IMP program to a term");
    std::string tr_prog, tr_sig;
    tr->add_option("program", tr_prog, "IMP program")->required();
    tr->add_option("--sig", tr_sig, "signature file")->required();

    // run
    auto* rn = app.add_subcommand("run", "run an IMP program");
    std::string rn_prog, rn_sig, rn_store;
    int rn_fuel = -1;
    rn->add_option("program", rn_prog, "IMP program")->required();
    rn->add_option("--sig", rn_sig, "signature file")->required();
    rn->add_option("--store", rn_store, "initial store, X=1,Y=2 (unlisted locations start at 0)");
    rn->add_option("--fuel", rn_fuel, "loop fuel (default DECOLOG_FUEL, else 100)");

    // dual
    auto* du = app.add_subcommand("dual", "dualize a term or a proof script");
    std::string du_term, du_script, du_sig, du_rename, du_sig_ref;
    auto* term_opt = du->add_option("--term", du_term, "term text");
    auto* script_opt = du->add_option("--script", du_script, "proof script");
    du->add_option("--sig", du_sig, "signature file (default: the script's sig directive)");
    du->add_option("--rename", du_rename, "name table for scripts, X=T,Y=R,...");
    du->add_option("--dual-sig", du_sig_ref, "sig directive written into the dual script");
    term_opt->excludes(script_opt);

    std::vector<const char*> argv{"decolog"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
      int code = app.exit(e, out_, err_);
      return code == 0 ? kOk : kError;
    }

    try {
      if (*check) return run_check(scripts, check_sig, check_models);
      if (*infer_cmd) return run_infer(infer_sig, infer_term);
      if (*mc) return run_model_check(mc_sig, mc_model, mc_eq, mc_fuel);
      if (*vr) return run_validate(vr_sig, vr_model, vr_set, vr_depth, vr_rules, vr_disable, vr_fuel);
      if (*tr) return run_translate(tr_prog, tr_sig);
      if (*rn) return run_program(rn_prog, rn_sig, rn_store, rn_fuel);
      if (*du) {
        if (du_term.empty() && du_script.empty()) throw UsageError("dual needs --term or --script");
        return du_term.empty() ? run_dual_script(du_script, du_sig, du_rename, du_sig_ref)
                               : run_dual_term(du_term, du_sig);
      }
    } catch (...) {
      return report(std::current_exception());
    }
    return kError;
  }

 private:
  int report(std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const UsageError& e) {
      err_ << "usage error: " << e.what() << '\n';
    } catch (const ParseError& e) {
      err_ << "parse error: " << e.what() << '\n';
    } catch (const NameError& e) {
      err_ << "name error: " << e.what() << '\n';
    } catch (const TypeError& e) {
      err_ << "type error: " << e.what() << '\n';
    } catch (const std::exception& e) {
      err_ << "error: " << e.what() << '\n';
    }
    return kError;
  }

  int run_check(const std::vector<std::string>& paths, const std::string& sig_path,
                const std::vector<std::string>& model_paths) {
    int worst = kOk;
    for (const auto& path : paths) {
      if (paths.size() > 1 && !porcelain_) out_ << "== " << path << '\n';
      try {
        worst = std::max(worst, check_one(path, sig_path, model_paths));
      } catch (...) {
        if (porcelain_) out_ << "result\t" << path << "\terror\n";
        worst = report(std::current_exception());
      }
    }
    return worst;
  }

  int check_one(const std::string& path, const std::string& sig_path,
                const std::vector<std::string>& model_paths) {
    {
      std::string text = detail::read_file(path);
      Signature sig = load_signature(sig_path.empty() ? script_sig_path(path, text) : sig_path);
      ProofScript script = parse_script(text, sig);
      Verdict v = check(script, sig);
      for (const auto& f : v.failures) {
        if (porcelain_) {
          out_ << "step\t" << path << '\t' << f.label << "\tfail\t" << f.reason << '\n';
        } else {
          out_ << "FAIL " << f.label << ": " << f.reason << '\n';
        }
      }
      bool models_ok = true;
      if (v.ok && !v.under_hypotheses) {
        for (const auto& mp : model_paths) {
          Model m = load_model(mp, sig, -1);
          for (const auto& step : script.steps) {
            HoldsResult h = holds(step.claim, m);
            if (h.kind == HoldsResult::Kind::Holds) continue;
            models_ok = false;
            if (porcelain_) {
              out_ << "model\t" << path << '\t' << step.label << '\t' << mp << '\t' << h.message << '\n';
            } else {
              out_ << "MODEL " << mp << ' ' << step.label << ": " << h.message << '\n';
            }
          }
        }
      }
      for (const auto& [label, eq] : v.established) {
        if (porcelain_) out_ << "goal\t" << path << '\t' << label << '\t' << pretty(eq) << '\n';
      }
      std::string status = !v.ok           ? "failed"
                           : !models_ok    ? "refuted"
                           : v.under_hypotheses ? "ok-under-hypotheses"
                                                : "ok";
      if (porcelain_) {
        out_ << "result\t" << path << '\t' << status << '\n';
      } else if (!v.ok) {
        out_ << "FAILED (" << v.failures.size() << " of " << script.steps.size() << " steps)\n";
      } else if (!models_ok) {
        out_ << "REFUTED by a model\n";
      } else {
        out_ << (v.under_hypotheses ? "OK under hypotheses (" : "OK (") << v.established.size()
             << (v.established.size() == 1 ? " goal)\n" : " goals)\n");
      }
      return v.ok && models_ok ? kOk : kFailed;
    }
  }

  int run_infer(const std::string& sig_path, const std::string& text) {
    Signature sig = load_signature(sig_path);
    Term t = parse_term(text, sig);
    Arrow a = infer(t, sig);
    if (porcelain_) {
      out_ << "arrow\t" << to_string(a.source) << '\t' << to_string(a.target) << '\t' << a.dec.exc
           << '\t' << a.dec.st << '\n';
    } else {
      out_ << pretty(t) << " : " << to_string(a) << '\n';
    }
    return kOk;
  }

  int run_model_check(const std::string& sig_path, const std::string& model_path,
                      const std::string& text, int fuel) {
    Signature sig = load_signature(sig_path);
    Model m = load_model(model_path, sig, fuel);
    Equation eq = parse_equation(text, sig);
    Arrow l = infer(eq.lhs, sig);
    Arrow r = infer(eq.rhs, sig);
    if (!(l.source == r.source && l.target == r.target)) {
      throw UsageError("sides are not parallel: " + to_string(l) + " vs " + to_string(r));
    }
    HoldsResult h = holds(eq, m);
    if (porcelain_) {
      const char* kind = h.kind == HoldsResult::Kind::Holds            ? "holds"
                         : h.kind == HoldsResult::Kind::Counterexample ? "counterexample"
                                                                       : "timeout";
      out_ << "result\t" << kind;
      if (h.kind != HoldsResult::Kind::Holds) {
        auto show = [&](const Out& o) {
          return o.timeout() ? std::string("timeout\t-")
                             : m.value_to_string(l.target, o.value) + '\t' + m.state_to_string(o.state);
        };
        out_ << '\t' << m.value_to_string(l.source, h.input_value) << '\t'
             << m.state_to_string(h.input_state) << '\t' << show(h.lhs) << '\t' << show(h.rhs);
      }
      out_ << '\n';
    } else {
      out_ << (h.kind == HoldsResult::Kind::Holds ? "HOLDS" : h.message) << '\n';
    }
    return h.kind == HoldsResult::Kind::Holds ? kOk : kFailed;
  }

  int run_validate(const std::string& sig_path, const std::string& model_path,
                   const std::string& set_text, int depth, const std::string& rules,
                   const std::string& disable, int fuel) {
    Signature sig = load_signature(sig_path);
    Model m = load_model(model_path, sig, fuel);
    auto which = parse_ruleset_id(set_text);
    if (!which) throw UsageError("unknown rule set '" + set_text + "' (EXC, ST or COMBINED)");
    HarnessOptions opts;
    opts.rules = split(rules, ',');
    for (const auto& name : opts.rules) {
      if (!find_rule(*which, name)) throw UsageError("rule " + name + " is not in " + set_text);
    }
    for (const auto& name : split(disable, ',')) {
      const Rule* rule = find_rule(*which, name);
      if (!rule) throw UsageError("rule " + name + " is not in " + set_text);
      opts.disabled_guards[name] = std::vector<bool>(rule->guards.size(), true);
    }
    HarnessReport rep = validate_ruleset(*which, m, depth, opts);
    long total = 0;
    for (const auto& [rule, n] : rep.instances) total += n;
    if (porcelain_) {
      out_ << "classes\t" << rep.classes << '\n';
      for (const auto& [rule, n] : rep.instances) out_ << "instances\t" << rule << '\t' << n << '\n';
      for (const auto& f : rep.counterexamples) {
        out_ << "counterexample\t" << f.rule << '\t' << f.instance << '\t' << f.detail << '\n';
      }
      for (const auto& f : rep.timeouts) {
        out_ << "timeout\t" << f.rule << '\t' << f.instance << '\t' << f.detail << '\n';
      }
      out_ << "result\t" << (rep.counterexamples.empty() ? "empty" : "nonempty") << '\n';
    } else {
      out_ << "rule set " << to_string(*which) << ", depth " << depth << ": " << rep.classes
           << " term classes, " << total << " instances\n";
      for (const auto& [rule, n] : rep.instances) out_ << "  " << rule << ": " << n << '\n';
      for (const auto& f : rep.counterexamples) {
        out_ << "COUNTEREXAMPLE " << f.rule << " [" << f.instance << "]: " << f.detail << '\n';
      }
      constexpr std::size_t kShown = 10;
      for (std::size_t i = 0; i < rep.timeouts.size() && i < kShown; ++i) {
        const auto& f = rep.timeouts[i];
        out_ << "TIMEOUT " << f.rule << " [" << f.instance << "]: " << f.detail << '\n';
      }
      if (rep.timeouts.size() > kShown) {
        out_ << "... " << rep.timeouts.size() - kShown << " more timeouts (see --porcelain)\n";
      }
      out_ << rep.counterexamples.size() << " counterexamples, " << rep.timeouts.size()
           << " timeouts\n";
    }
    return rep.counterexamples.empty() ? kOk : kFailed;
  }

  int run_translate(const std::string& prog_path, const std::string& sig_path) {
    Signature sig = load_signature(sig_path);
    ImpProgram p = parse_imp(detail::read_file(prog_path), sig);
    Signature as = arith_signature(sig, p);
    Term t = translate(p, as);
    Arrow a = infer(t, as);
    if (porcelain_) {
      out_ << "term\t" << pretty(t) << '\t' << a.dec.exc << '\t' << a.dec.st << '\n';
    } else {
      out_ << pretty(t) << "\n  : " << to_string(a) << '\n';
    }
    return kOk;
  }

  int run_program(const std::string& prog_path, const std::string& sig_path,
                  const std::string& store_text, int fuel) {
    Signature sig = load_signature(sig_path);
    ImpProgram p = parse_imp(detail::read_file(prog_path), sig);
    if (fuel < 0) fuel = env_fuel().value_or(100);
    std::vector<int> store(sig.locations.size(), 0);
    for (const auto& [name, value] : assignments(store_text, "store")) {
      std::size_t i = 0;
      while (i < sig.locations.size() && sig.locations[i].name != name) ++i;
      if (i == sig.locations.size()) throw UsageError("unknown location '" + name + "'");
      char* end = nullptr;
      long v = std::strtol(value.c_str(), &end, 10);
      if (*end || v < 0 || v >= p.modulus) {
        throw UsageError("value of " + name + " must be in 0.." + std::to_string(p.modulus - 1));
      }
      store[i] = static_cast<int>(v);
    }
    RunResult r = run(p, sig, store, fuel);
    if (porcelain_) {
      const char* kind = r.kind == RunResult::Kind::Finished ? "finished"
                         : r.kind == RunResult::Kind::Uncaught ? "uncaught"
                                                               : "timeout";
      out_ << "result\t" << kind;
      if (r.kind == RunResult::Kind::Uncaught) out_ << '\t' << r.exception << '\t' << r.value;
      for (std::size_t i = 0; i < r.store.size(); ++i) {
        out_ << '\t' << sig.locations[i].name << '=' << r.store[i];
      }
      out_ << '\n';
    } else {
      out_ << to_string(r, sig) << '\n';
    }
    return r.kind == RunResult::Kind::Timeout ? kFailed : kOk;
  }

  int run_dual_term(const std::string& text, const std::string& sig_path) {
    if (sig_path.empty()) {
      out_ << pretty(dualize(parse_schema(text))) << '\n';
      return kOk;
    }
    Signature sig = load_signature(sig_path);
    Term d = dualize(parse_term(text, sig));
    Arrow a = infer(d, dualize(sig));
    if (porcelain_) {
      out_ << "term\t" << pretty(d) << '\t' << to_string(a) << '\n';
    } else {
      out_ << pretty(d) << " : " << to_string(a) << '\n';
    }
    return kOk;
  }

  int run_dual_script(const std::string& path, const std::string& sig_path,
                      const std::string& rename_text, const std::string& sig_ref) {
    std::string text = detail::read_file(path);
    Signature sig = load_signature(sig_path.empty() ? script_sig_path(path, text) : sig_path);
    std::map<std::string, std::string> table;
    for (const auto& [from, to] : assignments(rename_text, "rename")) table[from] = to;
    ProofScript dual = dualize(parse_script(text, sig), table);
    if (!sig_ref.empty()) dual.sig_ref = sig_ref;
    out_ << pretty(dual);
    return kOk;
  }

  std::ostream& out_;
  std::ostream& err_;
  bool porcelain_ = false;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return Cli(out, err).main(args);
}

}  // namespace decolog
