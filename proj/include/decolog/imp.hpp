#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "decolog/semantics.hpp"
#include "decolog/signature.hpp"
#include "decolog/terms.hpp"

namespace decolog {

struct Expr {
  enum class Kind { Var, Lit, Add, Sub, Mul };
  Kind kind = Kind::Lit;
  std::string name;  // Var
  int value = 0;     // Lit, already reduced modulo n
  std::vector<Expr> args;
};

struct BExpr {
  enum class Kind { True, False, Eq, Lt, Not, And, Or };
  Kind kind = Kind::True;
  std::vector<Expr> operands;  // Eq, Lt
  std::vector<BExpr> args;     // Not, And, Or
};

struct Cmd {
  enum class Kind { Skip, Assign, Seq, If, While, Throw, Try };
  Kind kind = Kind::Skip;
  std::string name;    // Assign: location; Throw, Try: exception
  std::string binder;  // Try: location receiving the carried value
  Expr expr;           // Assign, Throw
  BExpr cond;          // If, While
  std::vector<Cmd> body;  // Seq: items; If: then, else; While: body; Try: body, handler
};

struct ImpProgram {
  int modulus = 2;
  std::string value_type;  // the base type of every variable and exception used
  Cmd body;
};

// Grammar (whitespace-insensitive, `#` comments):
//   program := 'mod' N seq
//   seq     := cmd (';' cmd)*
//   cmd     := 'skip' | X ':=' e | '{' seq '}'
//            | 'if' b 'then' cmd 'else' cmd | 'while' b 'do' cmd
//            | 'throw' T '(' e ')' | 'try' cmd 'catch' T '(' X ')' cmd
//   e       := e ('+'|'-') e | e '*' e | X | N | '(' e ')'
//   b       := b 'or' b | b 'and' b | 'not' b | e ('=='|'<') e
//            | 'true' | 'false' | '(' b ')'
// Names resolve against `sig`; all of them must share one base type.
ImpProgram parse_imp(std::string_view text, const Signature& sig);
std::string pretty(const ImpProgram& p);

// `sig` extended with the arithmetic ops over the program's value type Z:
// lit0 .. lit(n-1) : 1 -> Z, add sub mul : Z*Z -> Z, eq lt : Z*Z -> 1+1,
// and or : (1+1)*(1+1) -> 1+1, not : 1+1 -> 1+1. Booleans are 1+1 with
// inl as true.
Signature arith_signature(const Signature& sig, const ImpProgram& p);

// Model of an arith signature: every base type is Z_n, written 0 .. n-1.
Model arith_model(const Signature& arith_sig, const ImpProgram& p, int fuel);

// Commands become terms 1 -> 1 over arith_signature(sig, p). A try/catch is
// wrapped in down(...): exceptions raised before it propagate.
Term translate(const ImpProgram& p, const Signature& arith_sig);

struct RunResult {
  enum class Kind { Finished, Uncaught, Timeout };
  Kind kind = Kind::Finished;
  std::vector<int> store;  // location values in declaration order
  std::string exception;   // Uncaught
  int value = 0;           // Uncaught: carried value
};

// Big-step interpreter. Every loop entry may run its body at most `fuel`
// times; one more iteration is a Timeout.
RunResult run(const ImpProgram& p, const Signature& sig, std::vector<int> store, int fuel);

// The same outcome read off a denotation of translate(p) at input (), state s.
RunResult outcome(const Out& out, const Model& m);

std::string to_string(const RunResult& r, const Signature& sig);

}  // namespace decolog
