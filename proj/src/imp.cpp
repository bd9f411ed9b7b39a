#include "decolog/imp.hpp"

#include <sstream>
#include <stdexcept>

#include "decolog/error.hpp"
#include "lexer.hpp"

namespace decolog {

namespace {

const char* const kKeywords[] = {"mod",  "skip", "if",    "then", "else", "while", "do",  "throw",
                                 "try",  "catch", "true", "false", "not", "and",   "or"};

bool is_keyword(const std::string& s) {
  for (const char* k : kKeywords) {
    if (s == k) return true;
  }
  return false;
}

class ImpParser {
 public:
  ImpParser(TokenStream& ts, const Signature& sig) : ts_(ts), sig_(sig) {}

  ImpProgram program() {
    ImpProgram p;
    ts_.expect_keyword("mod");
    long n = ts_.expect_number("a modulus");
    if (n < 2) ts_.fail("modulus must be at least 2");
    modulus_ = static_cast<int>(n);
    p.modulus = modulus_;
    p.body = seq();
    if (!ts_.at_end()) ts_.fail("unexpected " + describe(ts_.peek()));
    p.value_type = value_type_.empty() ? (sig_.base_types.empty() ? "" : sig_.base_types[0])
                                       : value_type_;
    return p;
  }

 private:
  void use_type(const Token& at, const std::string& name, const std::string& type) {
    if (value_type_.empty()) value_type_ = type;
    if (type != value_type_) {
      ts_.fail_at(at, "'" + name + "' holds " + type + " but the program computes in " +
                          value_type_);
    }
  }

  std::string location() {
    const Token& at = ts_.peek();
    std::string n = ts_.expect_ident("a variable");
    const NamedValue* loc = sig_.find_location(n);
    if (!loc) {
      throw NameError(std::to_string(at.line) + ":" + std::to_string(at.column) +
                      ": undeclared variable '" + n + "'");
    }
    use_type(at, n, loc->value_type);
    return n;
  }

  std::string exception() {
    const Token& at = ts_.peek();
    std::string n = ts_.expect_ident("an exception name");
    const NamedValue* exc = sig_.find_exception(n);
    if (!exc) {
      throw NameError(std::to_string(at.line) + ":" + std::to_string(at.column) +
                      ": undeclared exception '" + n + "'");
    }
    use_type(at, n, exc->value_type);
    return n;
  }

  Cmd seq() {
    Cmd first = cmd();
    if (!ts_.is_symbol(";")) return first;
    Cmd s;
    s.kind = Cmd::Kind::Seq;
    s.body.push_back(std::move(first));
    while (ts_.accept_symbol(";")) s.body.push_back(cmd());
    return s;
  }

  Cmd cmd() {
    Cmd c;
    if (ts_.accept_symbol("{")) {
      c = seq();
      ts_.expect_symbol("}");
      return c;
    }
    if (ts_.accept_ident("skip")) return c;
    if (ts_.accept_ident("if")) {
      c.kind = Cmd::Kind::If;
      c.cond = bexpr();
      ts_.expect_keyword("then");
      c.body.push_back(cmd());
      ts_.expect_keyword("else");
      c.body.push_back(cmd());
      return c;
    }
    if (ts_.accept_ident("while")) {
      c.kind = Cmd::Kind::While;
      c.cond = bexpr();
      ts_.expect_keyword("do");
      c.body.push_back(cmd());
      return c;
    }
    if (ts_.accept_ident("throw")) {
      c.kind = Cmd::Kind::Throw;
      c.name = exception();
      ts_.expect_symbol("(");
      c.expr = expr();
      ts_.expect_symbol(")");
      return c;
    }
    if (ts_.accept_ident("try")) {
      c.kind = Cmd::Kind::Try;
      c.body.push_back(cmd());
      ts_.expect_keyword("catch");
      c.name = exception();
      ts_.expect_symbol("(");
      c.binder = location();
      ts_.expect_symbol(")");
      c.body.push_back(cmd());
      return c;
    }
    const Token& tok = ts_.peek();
    if (tok.kind != TokenKind::Ident || is_keyword(tok.text)) {
      ts_.fail("expected a command, found " + describe(tok));
    }
    c.kind = Cmd::Kind::Assign;
    c.name = location();
    ts_.expect_symbol(":=");
    c.expr = expr();
    return c;
  }

  Expr expr() {
    Expr e = term();
    while (ts_.is_symbol("+") || ts_.is_symbol("-")) {
      Expr b;
      b.kind = ts_.next().text == "+" ? Expr::Kind::Add : Expr::Kind::Sub;
      b.args = {std::move(e), term()};
      e = std::move(b);
    }
    return e;
  }

  Expr term() {
    Expr e = atom();
    while (ts_.accept_symbol("*")) {
      Expr b;
      b.kind = Expr::Kind::Mul;
      b.args = {std::move(e), atom()};
      e = std::move(b);
    }
    return e;
  }

  Expr atom() {
    Expr e;
    if (ts_.accept_symbol("(")) {
      e = expr();
      ts_.expect_symbol(")");
      return e;
    }
    if (ts_.peek().kind == TokenKind::Number) {
      e.kind = Expr::Kind::Lit;
      e.value = static_cast<int>(ts_.expect_number("a literal") % modulus_);
      return e;
    }
    const Token& tok = ts_.peek();
    if (tok.kind != TokenKind::Ident || is_keyword(tok.text)) {
      ts_.fail("expected an expression, found " + describe(tok));
    }
    e.kind = Expr::Kind::Var;
    e.name = location();
    return e;
  }

  BExpr bexpr() {
    BExpr b = conj();
    while (ts_.accept_ident("or")) {
      BExpr o;
      o.kind = BExpr::Kind::Or;
      o.args = {std::move(b), conj()};
      b = std::move(o);
    }
    return b;
  }

  BExpr conj() {
    BExpr b = batom();
    while (ts_.accept_ident("and")) {
      BExpr a;
      a.kind = BExpr::Kind::And;
      a.args = {std::move(b), batom()};
      b = std::move(a);
    }
    return b;
  }

  BExpr batom() {
    BExpr b;
    if (ts_.accept_ident("true")) return b;
    if (ts_.accept_ident("false")) {
      b.kind = BExpr::Kind::False;
      return b;
    }
    if (ts_.accept_ident("not")) {
      b.kind = BExpr::Kind::Not;
      b.args.push_back(batom());
      return b;
    }
    if (ts_.is_symbol("(")) {
      // A parenthesized condition or a comparison whose left side starts
      // with a parenthesized expression.
      std::size_t mark = ts_.position();
      std::string saved = value_type_;
      try {
        ts_.next();
        b = bexpr();
        ts_.expect_symbol(")");
        return b;
      } catch (const ParseError&) {
        ts_.rewind(mark);
        value_type_ = saved;
      }
    }
    Expr l = expr();
    if (ts_.accept_symbol("==")) {
      b.kind = BExpr::Kind::Eq;
    } else if (ts_.accept_symbol("<")) {
      b.kind = BExpr::Kind::Lt;
    } else {
      ts_.fail("expected '==' or '<', found " + describe(ts_.peek()));
    }
    b.operands = {std::move(l), expr()};
    return b;
  }

  TokenStream& ts_;
  const Signature& sig_;
  int modulus_ = 2;
  std::string value_type_;
};

// ---------------------------------------------------------------------------
// Printing

void print_expr(std::ostream& os, const Expr& e, int prec) {
  switch (e.kind) {
    case Expr::Kind::Var:
      os << e.name;
      return;
    case Expr::Kind::Lit:
      os << e.value;
      return;
    default:
      break;
  }
  int mine = e.kind == Expr::Kind::Mul ? 2 : 1;
  if (mine < prec) os << '(';
  print_expr(os, e.args[0], mine);
  os << (e.kind == Expr::Kind::Add ? " + " : e.kind == Expr::Kind::Sub ? " - " : " * ");
  print_expr(os, e.args[1], mine + 1);
  if (mine < prec) os << ')';
}

void print_bexpr(std::ostream& os, const BExpr& b, int prec) {
  switch (b.kind) {
    case BExpr::Kind::True:
      os << "true";
      return;
    case BExpr::Kind::False:
      os << "false";
      return;
    case BExpr::Kind::Eq:
    case BExpr::Kind::Lt:
      print_expr(os, b.operands[0], 0);
      os << (b.kind == BExpr::Kind::Eq ? " == " : " < ");
      print_expr(os, b.operands[1], 0);
      return;
    case BExpr::Kind::Not:
      os << "not ";
      print_bexpr(os, b.args[0], 3);
      return;
    case BExpr::Kind::And:
    case BExpr::Kind::Or: {
      int mine = b.kind == BExpr::Kind::Or ? 1 : 2;
      if (mine < prec) os << '(';
      print_bexpr(os, b.args[0], mine);
      os << (mine == 1 ? " or " : " and ");
      print_bexpr(os, b.args[1], mine + 1);
      if (mine < prec) os << ')';
      return;
    }
  }
}

void print_cmd(std::ostream& os, const Cmd& c, int indent);

void print_block(std::ostream& os, const Cmd& c, int indent) {
  if (c.kind != Cmd::Kind::Seq) {
    print_cmd(os, c, indent);
    return;
  }
  os << "{\n";
  for (std::size_t i = 0; i < c.body.size(); ++i) {
    os << std::string(indent + 2, ' ');
    print_cmd(os, c.body[i], indent + 2);
    os << (i + 1 < c.body.size() ? ";\n" : "\n");
  }
  os << std::string(indent, ' ') << '}';
}

void print_cmd(std::ostream& os, const Cmd& c, int indent) {
  switch (c.kind) {
    case Cmd::Kind::Skip:
      os << "skip";
      return;
    case Cmd::Kind::Assign:
      os << c.name << " := ";
      print_expr(os, c.expr, 0);
      return;
    case Cmd::Kind::Seq:
      for (std::size_t i = 0; i < c.body.size(); ++i) {
        if (i) os << ";\n" << std::string(indent, ' ');
        print_block(os, c.body[i], indent);
      }
      return;
    case Cmd::Kind::If:
      os << "if ";
      print_bexpr(os, c.cond, 0);
      os << " then ";
      print_block(os, c.body[0], indent);
      os << " else ";
      print_block(os, c.body[1], indent);
      return;
    case Cmd::Kind::While:
      os << "while ";
      print_bexpr(os, c.cond, 0);
      os << " do ";
      print_block(os, c.body[0], indent);
      return;
    case Cmd::Kind::Throw:
      os << "throw " << c.name << '(';
      print_expr(os, c.expr, 0);
      os << ')';
      return;
    case Cmd::Kind::Try:
      os << "try ";
      print_block(os, c.body[0], indent);
      os << " catch " << c.name << '(' << c.binder << ") ";
      print_block(os, c.body[1], indent);
      return;
  }
}

// ---------------------------------------------------------------------------
// Translation

Type bool_type() { return Type::sum(Type::unit(), Type::unit()); }

class Translator {
 public:
  Term expr(const Expr& e) const {
    switch (e.kind) {
      case Expr::Kind::Var:
        return Term::lookup(e.name);
      case Expr::Kind::Lit:
        return Term::op("lit" + std::to_string(e.value));
      case Expr::Kind::Add:
      case Expr::Kind::Sub:
      case Expr::Kind::Mul: {
        const char* name = e.kind == Expr::Kind::Add ? "add" : e.kind == Expr::Kind::Sub ? "sub" : "mul";
        return Term::comp(Term::op(name), Term::pair(expr(e.args[0]), expr(e.args[1])));
      }
    }
    throw std::logic_error("unhandled expression");
  }

  Term bexpr(const BExpr& b) const {
    switch (b.kind) {
      case BExpr::Kind::True:
        return Term::inl(Type::unit(), Type::unit());
      case BExpr::Kind::False:
        return Term::inr(Type::unit(), Type::unit());
      case BExpr::Kind::Eq:
      case BExpr::Kind::Lt:
        return Term::comp(Term::op(b.kind == BExpr::Kind::Eq ? "eq" : "lt"),
                          Term::pair(expr(b.operands[0]), expr(b.operands[1])));
      case BExpr::Kind::Not:
        return Term::comp(Term::op("not"), bexpr(b.args[0]));
      case BExpr::Kind::And:
      case BExpr::Kind::Or:
        return Term::comp(Term::op(b.kind == BExpr::Kind::And ? "and" : "or"),
                          Term::pair(bexpr(b.args[0]), bexpr(b.args[1])));
    }
    throw std::logic_error("unhandled condition");
  }

  Term cmd(const Cmd& c) const {
    Type one = Type::unit();
    switch (c.kind) {
      case Cmd::Kind::Skip:
        return Term::id(one);
      case Cmd::Kind::Assign:
        return Term::comp(Term::update(c.name), expr(c.expr));
      case Cmd::Kind::Seq: {
        Term t = cmd(c.body[0]);
        for (std::size_t i = 1; i < c.body.size(); ++i) t = Term::comp(cmd(c.body[i]), t);
        return t;
      }
      case Cmd::Kind::If:
        return Term::if_(bexpr(c.cond), cmd(c.body[0]), cmd(c.body[1]));
      case Cmd::Kind::While:
        return Term::while_(bexpr(c.cond), cmd(c.body[0]));
      case Cmd::Kind::Throw:
        return Term::comp(Term::from_empty(one), Term::comp(Term::tag(c.name), expr(c.expr)));
      case Cmd::Kind::Try: {
        Term handler = Term::comp(cmd(c.body[1]),
                                  Term::comp(Term::update(c.binder), Term::untag(c.name)));
        Term caught = Term::copair(Term::id(one), handler);
        return Term::down(Term::comp(
            caught, Term::comp(Term::inl(one, Type::empty()), cmd(c.body[0]))));
      }
    }
    throw std::logic_error("unhandled command");
  }
};

// ---------------------------------------------------------------------------
// Interpreter

class Interpreter {
 public:
  Interpreter(const ImpProgram& p, const Signature& sig, int fuel)
      : n_(p.modulus), sig_(sig), fuel_(fuel) {}

  RunResult exec(const Cmd& c, std::vector<int> store) {
    RunResult r;
    r.store = std::move(store);
    step(c, r);
    return r;
  }

 private:
  std::size_t slot(const std::string& name) const {
    for (std::size_t i = 0; i < sig_.locations.size(); ++i) {
      if (sig_.locations[i].name == name) return i;
    }
    throw NameError("unknown location '" + name + "'");
  }

  int eval(const Expr& e, const std::vector<int>& s) const {
    switch (e.kind) {
      case Expr::Kind::Var:
        return s[slot(e.name)];
      case Expr::Kind::Lit:
        return e.value;
      case Expr::Kind::Add:
        return (eval(e.args[0], s) + eval(e.args[1], s)) % n_;
      case Expr::Kind::Sub:
        return (eval(e.args[0], s) - eval(e.args[1], s) + n_) % n_;
      case Expr::Kind::Mul:
        return eval(e.args[0], s) * eval(e.args[1], s) % n_;
    }
    return 0;
  }

  bool test(const BExpr& b, const std::vector<int>& s) const {
    switch (b.kind) {
      case BExpr::Kind::True:
        return true;
      case BExpr::Kind::False:
        return false;
      case BExpr::Kind::Eq:
        return eval(b.operands[0], s) == eval(b.operands[1], s);
      case BExpr::Kind::Lt:
        return eval(b.operands[0], s) < eval(b.operands[1], s);
      case BExpr::Kind::Not:
        return !test(b.args[0], s);
      case BExpr::Kind::And: {
        bool l = test(b.args[0], s);
        bool r = test(b.args[1], s);
        return l && r;
      }
      case BExpr::Kind::Or: {
        bool l = test(b.args[0], s);
        bool r = test(b.args[1], s);
        return l || r;
      }
    }
    return false;
  }

  // Runs c on r.store; leaves r.kind Finished on normal completion.
  void step(const Cmd& c, RunResult& r) {
    switch (c.kind) {
      case Cmd::Kind::Skip:
        return;
      case Cmd::Kind::Assign:
        r.store[slot(c.name)] = eval(c.expr, r.store);
        return;
      case Cmd::Kind::Seq:
        for (const Cmd& item : c.body) {
          step(item, r);
          if (r.kind != RunResult::Kind::Finished) return;
        }
        return;
      case Cmd::Kind::If:
        step(test(c.cond, r.store) ? c.body[0] : c.body[1], r);
        return;
      case Cmd::Kind::While:
        for (int iter = 0;; ++iter) {
          if (!test(c.cond, r.store)) return;
          if (iter == fuel_) {
            r.kind = RunResult::Kind::Timeout;
            return;
          }
          step(c.body[0], r);
          if (r.kind != RunResult::Kind::Finished) return;
        }
      case Cmd::Kind::Throw:
        r.value = eval(c.expr, r.store);
        r.exception = c.name;
        r.kind = RunResult::Kind::Uncaught;
        return;
      case Cmd::Kind::Try:
        step(c.body[0], r);
        if (r.kind == RunResult::Kind::Uncaught && r.exception == c.name) {
          r.kind = RunResult::Kind::Finished;
          r.store[slot(c.binder)] = r.value;
          r.exception.clear();
          r.value = 0;
          step(c.body[1], r);
        }
        return;
    }
  }

  int n_;
  const Signature& sig_;
  int fuel_;
};

}  // namespace

ImpProgram parse_imp(std::string_view text, const Signature& sig) {
  TokenStream ts(tokenize(text, false));
  return ImpParser(ts, sig).program();
}

std::string pretty(const ImpProgram& p) {
  std::ostringstream os;
  os << "mod " << p.modulus << '\n';
  if (p.body.kind == Cmd::Kind::Seq) {
    for (std::size_t i = 0; i < p.body.body.size(); ++i) {
      print_block(os, p.body.body[i], 0);
      os << (i + 1 < p.body.body.size() ? ";\n" : "\n");
    }
  } else {
    print_block(os, p.body, 0);
    os << '\n';
  }
  return os.str();
}

Signature arith_signature(const Signature& sig, const ImpProgram& p) {
  Signature out = sig;
  Type z = Type::base(p.value_type);
  Type zz = Type::prod(z, z);
  Type b = bool_type();
  auto add = [&](std::string name, Type src, Type tgt) {
    if (out.find_op(name)) throw NameError("op '" + name + "' already declared");
    out.ops.push_back({std::move(name), std::move(src), std::move(tgt)});
  };
  for (int k = 0; k < p.modulus; ++k) add("lit" + std::to_string(k), Type::unit(), z);
  for (const char* name : {"add", "sub", "mul"}) add(name, zz, z);
  for (const char* name : {"eq", "lt"}) add(name, zz, b);
  for (const char* name : {"and", "or"}) add(name, Type::prod(b, b), b);
  add("not", b, b);
  return out;
}

Model arith_model(const Signature& arith_sig, const ImpProgram& p, int fuel) {
  const int n = p.modulus;
  std::vector<std::string> values;
  for (int k = 0; k < n; ++k) values.push_back(std::to_string(k));
  std::map<std::string, std::vector<std::string>> carriers;
  for (const auto& base : arith_sig.base_types) carriers[base] = values;

  auto binary = [n](auto f) {
    std::vector<int> t(static_cast<std::size_t>(n) * n);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) t[a * n + b] = f(a, b);
    }
    return t;
  };
  // Booleans: 0 is true (inl), 1 is false (inr).
  auto truth = [](bool v) { return v ? 0 : 1; };
  std::map<std::string, std::vector<int>> tables;
  for (int k = 0; k < n; ++k) tables["lit" + std::to_string(k)] = {k};
  tables["add"] = binary([n](int a, int b) { return (a + b) % n; });
  tables["sub"] = binary([n](int a, int b) { return (a - b + n) % n; });
  tables["mul"] = binary([n](int a, int b) { return a * b % n; });
  tables["eq"] = binary([&](int a, int b) { return truth(a == b); });
  tables["lt"] = binary([&](int a, int b) { return truth(a < b); });
  tables["and"] = {truth(true), truth(false), truth(false), truth(false)};
  tables["or"] = {truth(true), truth(true), truth(true), truth(false)};
  tables["not"] = {1, 0};
  return Model(arith_sig, std::move(carriers), std::move(tables), fuel);
}

Term translate(const ImpProgram& p, const Signature& arith_sig) {
  Term t = Translator().cmd(p.body);
  Arrow a = infer(t, arith_sig);  // throws on a formation violation
  if (!(a.source == Type::unit()) || !(a.target == Type::unit())) {
    throw std::logic_error("translated program is not a map 1 -> 1");
  }
  return t;
}

RunResult run(const ImpProgram& p, const Signature& sig, std::vector<int> store, int fuel) {
  if (store.size() != sig.locations.size()) {
    throw std::invalid_argument("store must give a value for every location");
  }
  for (int v : store) {
    if (v < 0 || v >= p.modulus) throw std::invalid_argument("store value out of range");
  }
  return Interpreter(p, sig, fuel).exec(p.body, std::move(store));
}

RunResult outcome(const Out& out, const Model& m) {
  RunResult r;
  if (out.timeout()) {
    r.kind = RunResult::Kind::Timeout;
    return r;
  }
  const Signature& sig = m.signature();
  for (std::size_t i = 0; i < sig.locations.size(); ++i) {
    r.store.push_back(m.state_component(out.state, i));
  }
  if (out.value == 0) return r;
  int e = out.value - 1;
  r.kind = RunResult::Kind::Uncaught;
  for (const auto& exc : sig.exceptions) {
    int off = m.exception_offset(exc.name);
    int count = m.size(Type::base(exc.value_type));
    if (e >= off && e < off + count) {
      r.exception = exc.name;
      r.value = e - off;
      return r;
    }
  }
  throw std::logic_error("exceptional value out of range");
}

std::string to_string(const RunResult& r, const Signature& sig) {
  std::ostringstream os;
  switch (r.kind) {
    case RunResult::Kind::Timeout:
      return "TIMEOUT";
    case RunResult::Kind::Finished:
      os << "FINISHED";
      break;
    case RunResult::Kind::Uncaught:
      os << "UNCAUGHT " << r.exception << '(' << r.value << ')';
      break;
  }
  os << " {";
  for (std::size_t i = 0; i < r.store.size(); ++i) {
    if (i) os << ", ";
    os << sig.locations[i].name << '=' << r.store[i];
  }
  os << '}';
  return os.str();
}

}  // namespace decolog
