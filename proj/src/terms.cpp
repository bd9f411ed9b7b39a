#include "decolog/terms.hpp"

#include <algorithm>
#include <sstream>

#include "decolog/error.hpp"
#include "parse_util.hpp"

namespace decolog {

// ---------------------------------------------------------------------------
// Types

Type::Type() : Type(unit()) {}

Type Type::base(std::string name) {
  return Type(std::make_shared<const Node>(Node{TypeKind::Base, std::move(name), {}, {}}));
}
Type Type::sum(Type left, Type right) {
  return Type(std::make_shared<const Node>(
      Node{TypeKind::Sum, {}, std::move(left.node_), std::move(right.node_)}));
}
Type Type::prod(Type left, Type right) {
  return Type(std::make_shared<const Node>(
      Node{TypeKind::Prod, {}, std::move(left.node_), std::move(right.node_)}));
}
Type Type::empty() {
  static const Type t(std::make_shared<const Node>(Node{TypeKind::Empty, {}, {}, {}}));
  return t;
}
Type Type::unit() {
  static const Type t(std::make_shared<const Node>(Node{TypeKind::Unit, {}, {}, {}}));
  return t;
}

std::strong_ordering Type::compare(const Node* a, const Node* b) {
  if (a == b) return std::strong_ordering::equal;
  if (auto c = a->kind <=> b->kind; c != 0) return c;
  switch (a->kind) {
    case TypeKind::Base:
      return a->name <=> b->name;
    case TypeKind::Sum:
    case TypeKind::Prod:
      if (auto c = compare(a->left.get(), b->left.get()); c != 0) return c;
      return compare(a->right.get(), b->right.get());
    default:
      return std::strong_ordering::equal;
  }
}

bool operator==(const Type& a, const Type& b) {
  return Type::compare(a.node_.get(), b.node_.get()) == 0;
}
std::strong_ordering operator<=>(const Type& a, const Type& b) {
  return Type::compare(a.node_.get(), b.node_.get());
}

namespace {

void print_type(std::ostream& os, const Type& t) {
  switch (t.kind()) {
    case TypeKind::Base:
      os << t.name();
      break;
    case TypeKind::Empty:
      os << '0';
      break;
    case TypeKind::Unit:
      os << '1';
      break;
    case TypeKind::Sum: {
      // `+` is right-associative and binds looser than `*`.
      bool paren = t.left().kind() == TypeKind::Sum;
      if (paren) os << '(';
      print_type(os, t.left());
      if (paren) os << ')';
      os << '+';
      print_type(os, t.right());
      break;
    }
    case TypeKind::Prod: {
      auto operand = [&](const Type& x, bool left) {
        bool paren = x.kind() == TypeKind::Sum || (left && x.kind() == TypeKind::Prod);
        if (paren) os << '(';
        print_type(os, x);
        if (paren) os << ')';
      };
      operand(t.left(), true);
      os << '*';
      operand(t.right(), false);
      break;
    }
  }
}

}  // namespace

std::string to_string(const Type& t) {
  std::ostringstream os;
  print_type(os, t);
  return os.str();
}

Type dualize(const Type& t) {
  switch (t.kind()) {
    case TypeKind::Base:
      return t;
    case TypeKind::Empty:
      return Type::unit();
    case TypeKind::Unit:
      return Type::empty();
    case TypeKind::Sum:
      return Type::prod(dualize(t.left()), dualize(t.right()));
    case TypeKind::Prod:
      return Type::sum(dualize(t.left()), dualize(t.right()));
  }
  return t;
}

namespace detail {
namespace {

Type parse_type_atom(TokenStream& ts, bool allow_meta) {
  if (ts.accept_symbol("(")) {
    Type t = parse_type(ts, allow_meta);
    ts.expect_symbol(")");
    return t;
  }
  const Token& tok = ts.peek();
  if (tok.kind == TokenKind::Number && (tok.text == "0" || tok.text == "1")) {
    ts.next();
    return tok.text == "0" ? Type::empty() : Type::unit();
  }
  if (tok.kind == TokenKind::Ident) return Type::base(ts.next().text);
  if (tok.kind == TokenKind::Meta && allow_meta) return Type::base(ts.next().text);
  ts.fail("expected a type, found " + describe(tok));
}

Type parse_type_prod(TokenStream& ts, bool allow_meta) {
  Type left = parse_type_atom(ts, allow_meta);
  if (ts.accept_symbol("*")) return Type::prod(left, parse_type_prod(ts, allow_meta));
  return left;
}

}  // namespace

Type parse_type(TokenStream& ts, bool allow_meta) {
  Type left = parse_type_prod(ts, allow_meta);
  if (ts.accept_symbol("+")) return Type::sum(left, parse_type(ts, allow_meta));
  return left;
}

}  // namespace detail

Type parse_type(std::string_view text) {
  TokenStream ts(tokenize(text, false));
  Type t = detail::parse_type(ts, false);
  if (!ts.at_end()) ts.fail("trailing input after type: " + describe(ts.peek()));
  return t;
}

// ---------------------------------------------------------------------------
// Decorations

Decoration join(const Decoration& a, const Decoration& b) {
  return {std::max(a.exc, b.exc), std::max(a.st, b.st)};
}

std::string to_string(const Decoration& d) {
  return "(" + std::to_string(d.exc) + "," + std::to_string(d.st) + ")";
}

std::string to_string(const Arrow& a) {
  return to_string(a.source) + " -> " + to_string(a.target) + " " + to_string(a.dec);
}

// ---------------------------------------------------------------------------
// Terms

Term::Term(TermKind kind, std::string name, std::vector<Type> types, std::vector<Term> args)
    : node_(std::make_shared<const Node>(
          Node{kind, std::move(name), std::move(types), std::move(args)})) {}

Term::Term() : Term(id(Type::unit())) {}

Term Term::id(Type t) { return Term(TermKind::Id, {}, {std::move(t)}, {}); }
Term Term::comp(Term f, Term g) {
  return Term(TermKind::Comp, {}, {}, {std::move(f), std::move(g)});
}
Term Term::copair(Term f, Term g) {
  return Term(TermKind::Copair, {}, {}, {std::move(f), std::move(g)});
}
Term Term::inl(Type a, Type b) { return Term(TermKind::Inl, {}, {std::move(a), std::move(b)}, {}); }
Term Term::inr(Type a, Type b) { return Term(TermKind::Inr, {}, {std::move(a), std::move(b)}, {}); }
Term Term::from_empty(Type t) { return Term(TermKind::FromEmpty, {}, {std::move(t)}, {}); }
Term Term::pair(Term f, Term g) {
  return Term(TermKind::Pair, {}, {}, {std::move(f), std::move(g)});
}
Term Term::proj1(Type a, Type b) {
  return Term(TermKind::Proj1, {}, {std::move(a), std::move(b)}, {});
}
Term Term::proj2(Type a, Type b) {
  return Term(TermKind::Proj2, {}, {std::move(a), std::move(b)}, {});
}
Term Term::to_unit(Type t) { return Term(TermKind::ToUnit, {}, {std::move(t)}, {}); }
Term Term::tag(std::string e) { return Term(TermKind::Tag, std::move(e), {}, {}); }
Term Term::untag(std::string e) { return Term(TermKind::Untag, std::move(e), {}, {}); }
Term Term::lookup(std::string x) { return Term(TermKind::Lookup, std::move(x), {}, {}); }
Term Term::update(std::string x) { return Term(TermKind::Update, std::move(x), {}, {}); }
Term Term::op(std::string name) { return Term(TermKind::Op, std::move(name), {}, {}); }
Term Term::if_(Term c, Term t, Term e) {
  return Term(TermKind::If, {}, {}, {std::move(c), std::move(t), std::move(e)});
}
Term Term::while_(Term c, Term body) {
  return Term(TermKind::While, {}, {}, {std::move(c), std::move(body)});
}
Term Term::down(Term f) { return Term(TermKind::Down, {}, {}, {std::move(f)}); }
Term Term::meta(std::string name) { return Term(TermKind::Meta, std::move(name), {}, {}); }

std::strong_ordering Term::compare(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.kind() <=> b.kind(); c != 0) return c;
  if (auto c = a.name() <=> b.name(); c != 0) return c;
  if (auto c = a.types().size() <=> b.types().size(); c != 0) return c;
  for (std::size_t i = 0; i < a.types().size(); ++i) {
    if (auto c = a.types()[i] <=> b.types()[i]; c != 0) return c;
  }
  if (auto c = a.args().size() <=> b.args().size(); c != 0) return c;
  for (std::size_t i = 0; i < a.args().size(); ++i) {
    if (auto c = compare(a.args()[i], b.args()[i]); c != 0) return c;
  }
  return std::strong_ordering::equal;
}

bool operator==(const Term& a, const Term& b) { return Term::compare(a, b) == 0; }
std::strong_ordering operator<=>(const Term& a, const Term& b) { return Term::compare(a, b); }

// ---------------------------------------------------------------------------
// Parsing

namespace detail {
namespace {

class TermParser {
 public:
  TermParser(TokenStream& ts, const Signature* sig, bool allow_meta)
      : ts_(ts), sig_(sig), allow_meta_(allow_meta) {}

  Term term() {
    Term left = factor();
    if (ts_.accept_ident("o")) return Term::comp(left, term());
    return left;
  }

 private:
  Type type() {
    const Token& at = ts_.peek();
    Type t = parse_type(ts_, allow_meta_);
    if (sig_) check_type_names(t, at);
    return t;
  }

  void check_type_names(const Type& t, const Token& at) {
    switch (t.kind()) {
      case TypeKind::Base:
        if (!sig_->has_base(t.name())) {
          throw NameError(std::to_string(at.line) + ":" + std::to_string(at.column) +
                          ": unknown type '" + t.name() + "'");
        }
        break;
      case TypeKind::Sum:
      case TypeKind::Prod:
        check_type_names(t.left(), at);
        check_type_names(t.right(), at);
        break;
      default:
        break;
    }
  }

  std::string name(const char* what) {
    const Token& tok = ts_.peek();
    if (tok.kind == TokenKind::Meta && allow_meta_) return ts_.next().text;
    std::string n = ts_.expect_ident(what);
    if (!sig_) return n;
    std::string w = what;
    bool ok = (w == "exception" && sig_->find_exception(n)) ||
              (w == "location" && sig_->find_location(n)) || (w == "op" && sig_->find_op(n));
    if (!ok) {
      throw NameError(std::to_string(tok.line) + ":" + std::to_string(tok.column) +
                      ": unknown " + w + " '" + n + "'");
    }
    return n;
  }

  std::vector<Type> bracket_types(int count) {
    ts_.expect_symbol("[");
    std::vector<Type> out;
    for (int i = 0; i < count; ++i) {
      if (i > 0) ts_.expect_symbol(",");
      out.push_back(type());
    }
    ts_.expect_symbol("]");
    return out;
  }

  std::string bracket_name(const char* what) {
    ts_.expect_symbol("[");
    std::string n = name(what);
    ts_.expect_symbol("]");
    return n;
  }

  Term factor() {
    const Token& tok = ts_.peek();
    if (ts_.accept_symbol("(")) {
      Term first = term();
      if (ts_.accept_symbol(",")) {
        Term second = term();
        ts_.expect_symbol(")");
        return Term::pair(first, second);
      }
      ts_.expect_symbol(")");
      return first;
    }
    if (ts_.accept_symbol("<")) {
      Term f = term();
      ts_.expect_symbol("|");
      Term g = term();
      ts_.expect_symbol(">");
      return Term::copair(f, g);
    }
    if (tok.kind == TokenKind::Meta && allow_meta_) return Term::meta(ts_.next().text);
    if (tok.kind != TokenKind::Ident) ts_.fail("expected a term, found " + describe(tok));
    std::string kw = ts_.next().text;
    if (kw == "id") return Term::id(bracket_types(1)[0]);
    if (kw == "from0") return Term::from_empty(bracket_types(1)[0]);
    if (kw == "to1") return Term::to_unit(bracket_types(1)[0]);
    if (kw == "inl" || kw == "inr" || kw == "pi1" || kw == "pi2") {
      auto ts = bracket_types(2);
      if (kw == "inl") return Term::inl(ts[0], ts[1]);
      if (kw == "inr") return Term::inr(ts[0], ts[1]);
      if (kw == "pi1") return Term::proj1(ts[0], ts[1]);
      return Term::proj2(ts[0], ts[1]);
    }
    if (kw == "tag") return Term::tag(bracket_name("exception"));
    if (kw == "untag") return Term::untag(bracket_name("exception"));
    if (kw == "lookup") return Term::lookup(bracket_name("location"));
    if (kw == "update") return Term::update(bracket_name("location"));
    if (kw == "op") return Term::op(bracket_name("op"));
    if (kw == "if") {
      ts_.expect_symbol("(");
      Term c = term();
      ts_.expect_symbol(",");
      Term t = term();
      ts_.expect_symbol(",");
      Term e = term();
      ts_.expect_symbol(")");
      return Term::if_(c, t, e);
    }
    if (kw == "while") {
      ts_.expect_symbol("(");
      Term c = term();
      ts_.expect_symbol(",");
      Term body = term();
      ts_.expect_symbol(")");
      return Term::while_(c, body);
    }
    if (kw == "down") {
      ts_.expect_symbol("(");
      Term f = term();
      ts_.expect_symbol(")");
      return Term::down(f);
    }
    ts_.fail_at(tok, "unknown term former '" + kw + "'");
  }

  TokenStream& ts_;
  const Signature* sig_;
  bool allow_meta_;
};

}  // namespace

Term parse_term(TokenStream& ts, const Signature* sig, bool allow_meta) {
  return TermParser(ts, sig, allow_meta).term();
}

}  // namespace detail

namespace {

Term parse_whole(std::string_view text, const Signature* sig, bool allow_meta) {
  TokenStream ts(tokenize(text, false));
  Term t = detail::parse_term(ts, sig, allow_meta);
  if (!ts.at_end()) ts.fail("trailing input after term: " + describe(ts.peek()));
  return t;
}

}  // namespace

Term parse_term(std::string_view text, const Signature& sig) {
  return parse_whole(text, &sig, false);
}

Term parse_schema(std::string_view text) { return parse_whole(text, nullptr, true); }

// ---------------------------------------------------------------------------
// Pretty printing

namespace {

void print_term(std::ostream& os, const Term& t) {
  auto types = [&](std::size_t n) {
    os << '[';
    for (std::size_t i = 0; i < n; ++i) {
      if (i) os << ',';
      os << to_string(t.types()[i]);
    }
    os << ']';
  };
  switch (t.kind()) {
    case TermKind::Id:
      os << "id";
      types(1);
      break;
    case TermKind::FromEmpty:
      os << "from0";
      types(1);
      break;
    case TermKind::ToUnit:
      os << "to1";
      types(1);
      break;
    case TermKind::Inl:
      os << "inl";
      types(2);
      break;
    case TermKind::Inr:
      os << "inr";
      types(2);
      break;
    case TermKind::Proj1:
      os << "pi1";
      types(2);
      break;
    case TermKind::Proj2:
      os << "pi2";
      types(2);
      break;
    case TermKind::Tag:
      os << "tag[" << t.name() << ']';
      break;
    case TermKind::Untag:
      os << "untag[" << t.name() << ']';
      break;
    case TermKind::Lookup:
      os << "lookup[" << t.name() << ']';
      break;
    case TermKind::Update:
      os << "update[" << t.name() << ']';
      break;
    case TermKind::Op:
      os << "op[" << t.name() << ']';
      break;
    case TermKind::Meta:
      os << t.name();
      break;
    case TermKind::Comp: {
      bool paren = t.arg(0).kind() == TermKind::Comp;
      if (paren) os << '(';
      print_term(os, t.arg(0));
      if (paren) os << ')';
      os << " o ";
      print_term(os, t.arg(1));
      break;
    }
    case TermKind::Copair:
      os << "< ";
      print_term(os, t.arg(0));
      os << " | ";
      print_term(os, t.arg(1));
      os << " >";
      break;
    case TermKind::Pair:
      os << '(';
      print_term(os, t.arg(0));
      os << ", ";
      print_term(os, t.arg(1));
      os << ')';
      break;
    case TermKind::If:
      os << "if(";
      print_term(os, t.arg(0));
      os << ", ";
      print_term(os, t.arg(1));
      os << ", ";
      print_term(os, t.arg(2));
      os << ')';
      break;
    case TermKind::While:
      os << "while(";
      print_term(os, t.arg(0));
      os << ", ";
      print_term(os, t.arg(1));
      os << ')';
      break;
    case TermKind::Down:
      os << "down(";
      print_term(os, t.arg(0));
      os << ')';
      break;
  }
}

}  // namespace

std::string pretty(const Term& t) {
  std::ostringstream os;
  print_term(os, t);
  return os.str();
}

// ---------------------------------------------------------------------------
// Inference

namespace {

const Type kBool = Type::sum(Type::unit(), Type::unit());

class Inferrer {
 public:
  Inferrer(const Signature& sig, const MetaTyping* metas) : sig_(sig), metas_(metas) {}

  Arrow infer(const Term& t, const std::string& path) {
    auto child = [&](std::size_t i) { return infer(t.arg(i), path + "." + std::to_string(i)); };
    auto fail = [&](const std::string& msg) -> Arrow { throw TypeError(path, msg); };
    switch (t.kind()) {
      case TermKind::Id:
        check(t.types()[0], path);
        return {t.types()[0], t.types()[0], {0, 0}};
      case TermKind::FromEmpty:
        check(t.types()[0], path);
        return {Type::empty(), t.types()[0], {0, 0}};
      case TermKind::ToUnit:
        check(t.types()[0], path);
        return {t.types()[0], Type::unit(), {0, 0}};
      case TermKind::Inl:
      case TermKind::Inr: {
        check(t.types()[0], path);
        check(t.types()[1], path);
        Type s = Type::sum(t.types()[0], t.types()[1]);
        return {t.kind() == TermKind::Inl ? t.types()[0] : t.types()[1], s, {0, 0}};
      }
      case TermKind::Proj1:
      case TermKind::Proj2: {
        check(t.types()[0], path);
        check(t.types()[1], path);
        Type p = Type::prod(t.types()[0], t.types()[1]);
        return {p, t.kind() == TermKind::Proj1 ? t.types()[0] : t.types()[1], {0, 0}};
      }
      case TermKind::Tag:
      case TermKind::Untag: {
        const NamedValue* e = sig_.find_exception(t.name());
        if (!e) return fail("unknown exception '" + t.name() + "'");
        Type v = Type::base(e->value_type);
        if (t.kind() == TermKind::Tag) return {v, Type::empty(), {1, 0}};
        return {Type::empty(), v, {2, 0}};
      }
      case TermKind::Lookup:
      case TermKind::Update: {
        const NamedValue* x = sig_.find_location(t.name());
        if (!x) return fail("unknown location '" + t.name() + "'");
        Type v = Type::base(x->value_type);
        if (t.kind() == TermKind::Lookup) return {Type::unit(), v, {0, 1}};
        return {v, Type::unit(), {0, 2}};
      }
      case TermKind::Op: {
        const OpDecl* op = sig_.find_op(t.name());
        if (!op) return fail("unknown op '" + t.name() + "'");
        return {op->source, op->target, {0, 0}};
      }
      case TermKind::Meta: {
        const Arrow* a = metas_ ? metas_->find(t.name()) : nullptr;
        if (!a) return fail("unbound metavariable " + t.name());
        return *a;
      }
      case TermKind::Comp: {
        Arrow f = child(0);
        Arrow g = child(1);
        if (!(g.target == f.source)) {
          return fail("composition mismatch: right operand has target " + to_string(g.target) +
                      " but left operand has source " + to_string(f.source));
        }
        return {g.source, f.target, join(f.dec, g.dec)};
      }
      case TermKind::Copair: {
        Arrow f = child(0);
        Arrow g = child(1);
        if (!(f.target == g.target)) {
          return fail("copair branches have different targets " + to_string(f.target) +
                      " and " + to_string(g.target));
        }
        if (f.dec.exc > 1) return fail("copair restriction: left branch is a catcher");
        if (f.dec.st > 0) return fail("copair restriction: left branch touches the state");
        return {Type::sum(f.source, g.source), f.target, join(f.dec, g.dec)};
      }
      case TermKind::Pair: {
        Arrow f = child(0);
        Arrow g = child(1);
        if (!(f.source == g.source)) {
          return fail("pair components have different sources " + to_string(f.source) +
                      " and " + to_string(g.source));
        }
        if (f.dec.st > 1) return fail("pair restriction: left component is a modifier");
        if (f.dec.exc > 0) return fail("pair restriction: left component may throw");
        return {f.source, Type::prod(f.target, g.target), join(f.dec, g.dec)};
      }
      case TermKind::If: {
        Arrow b = child(0);
        Arrow f = child(1);
        Arrow g = child(2);
        if (!(b.target == kBool)) return fail("condition must have target 1+1");
        if (!(f.source == b.source && g.source == b.source)) {
          return fail("branches must have the source of the condition");
        }
        if (!(f.target == g.target)) return fail("branches have different targets");
        return {b.source, f.target, join(b.dec, join(f.dec, g.dec))};
      }
      case TermKind::While: {
        Arrow b = child(0);
        Arrow f = child(1);
        if (!(b.target == kBool)) return fail("condition must have target 1+1");
        if (!(f.source == b.source && f.target == b.source)) {
          return fail("loop body must be an endomorphism of the condition's source");
        }
        return {b.source, b.source, join(b.dec, f.dec)};
      }
      case TermKind::Down: {
        Arrow f = child(0);
        return {f.source, f.target, {std::min(f.dec.exc, 1), f.dec.st}};
      }
    }
    return fail("unreachable");
  }

 private:
  void check(const Type& t, const std::string& path) {
    switch (t.kind()) {
      case TypeKind::Base:
        if (!t.is_meta() && !sig_.has_base(t.name())) {
          throw TypeError(path, "unknown type '" + t.name() + "'");
        }
        break;
      case TypeKind::Sum:
      case TypeKind::Prod:
        check(t.left(), path);
        check(t.right(), path);
        break;
      default:
        break;
    }
  }

  const Signature& sig_;
  const MetaTyping* metas_;
};

}  // namespace

Arrow infer(const Term& t, const Signature& sig, const MetaTyping* metas) {
  return Inferrer(sig, metas).infer(t, "$");
}

// ---------------------------------------------------------------------------
// Duality, normalization

Term dualize(const Term& t) {
  auto d = [](const Type& x) { return dualize(x); };
  switch (t.kind()) {
    case TermKind::Id:
      return Term::id(d(t.types()[0]));
    case TermKind::Comp:
      return Term::comp(dualize(t.arg(1)), dualize(t.arg(0)));
    case TermKind::Copair:
      return Term::pair(dualize(t.arg(0)), dualize(t.arg(1)));
    case TermKind::Pair:
      return Term::copair(dualize(t.arg(0)), dualize(t.arg(1)));
    case TermKind::Inl:
      return Term::proj1(d(t.types()[0]), d(t.types()[1]));
    case TermKind::Inr:
      return Term::proj2(d(t.types()[0]), d(t.types()[1]));
    case TermKind::Proj1:
      return Term::inl(d(t.types()[0]), d(t.types()[1]));
    case TermKind::Proj2:
      return Term::inr(d(t.types()[0]), d(t.types()[1]));
    case TermKind::FromEmpty:
      return Term::to_unit(d(t.types()[0]));
    case TermKind::ToUnit:
      return Term::from_empty(d(t.types()[0]));
    case TermKind::Tag:
      return Term::lookup(t.name());
    case TermKind::Untag:
      return Term::update(t.name());
    case TermKind::Lookup:
      return Term::tag(t.name());
    case TermKind::Update:
      return Term::untag(t.name());
    case TermKind::Meta:
      return t;
    case TermKind::Op:
    case TermKind::If:
    case TermKind::While:
    case TermKind::Down:
      break;
  }
  throw TypeError("$", "term former has no dual: " + pretty(t));
}

namespace {

void flatten_into(const Term& t, std::vector<Term>& out) {
  if (t.kind() == TermKind::Comp) {
    flatten_into(t.arg(0), out);
    flatten_into(t.arg(1), out);
  } else {
    out.push_back(normalize(t));
  }
}

Term rebuild(const Term& t, std::vector<Term> args) {
  switch (t.kind()) {
    case TermKind::Copair:
      return Term::copair(args[0], args[1]);
    case TermKind::Pair:
      return Term::pair(args[0], args[1]);
    case TermKind::If:
      return Term::if_(args[0], args[1], args[2]);
    case TermKind::While:
      return Term::while_(args[0], args[1]);
    case TermKind::Down:
      return Term::down(args[0]);
    default:
      return t;
  }
}

}  // namespace

Term normalize(const Term& t) {
  if (t.kind() == TermKind::Comp) {
    std::vector<Term> chain;
    flatten_into(t, chain);
    Term acc = chain.back();
    for (std::size_t i = chain.size() - 1; i-- > 0;) acc = Term::comp(chain[i], acc);
    return acc;
  }
  if (t.args().empty()) return t;
  std::vector<Term> args;
  args.reserve(t.args().size());
  for (const Term& a : t.args()) args.push_back(normalize(a));
  return rebuild(t, std::move(args));
}

int depth(const Term& t) {
  int d = 0;
  for (const Term& a : t.args()) d = std::max(d, depth(a));
  return d + 1;
}

}  // namespace decolog
