#pragma once

#include <compare>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "decolog/signature.hpp"
#include "decolog/types.hpp"

namespace decolog {

// Effect level per effect. Exceptions: 0 pure, 1 thrower, 2 catcher.
// State: 0 pure, 1 accessor, 2 modifier.
struct Decoration {
  int exc = 0;
  int st = 0;

  bool operator==(const Decoration&) const = default;
  bool below(const Decoration& o) const { return exc <= o.exc && st <= o.st; }
};

Decoration join(const Decoration& a, const Decoration& b);
std::string to_string(const Decoration& d);

enum class TermKind {
  Id,
  Comp,
  Copair,
  Inl,
  Inr,
  FromEmpty,
  Pair,
  Proj1,
  Proj2,
  ToUnit,
  Tag,
  Untag,
  Lookup,
  Update,
  Op,
  If,
  While,
  Down,  // propagating restriction of a catcher, used for try/catch
  Meta,  // schema metavariable; never produced by parsing user input
};

// Immutable decorated term. Type annotations live in `types()`:
// Id/FromEmpty/ToUnit carry one, Inl/Inr/Proj1/Proj2 carry two. Names of
// exceptions, locations, ops and metavariables live in `name()`.
class Term {
 public:
  Term();  // id[1]

  static Term id(Type t);
  static Term comp(Term f, Term g);  // f o g: g first
  static Term copair(Term f, Term g);
  static Term inl(Type a, Type b);
  static Term inr(Type a, Type b);
  static Term from_empty(Type t);
  static Term pair(Term f, Term g);
  static Term proj1(Type a, Type b);
  static Term proj2(Type a, Type b);
  static Term to_unit(Type t);
  static Term tag(std::string exception);
  static Term untag(std::string exception);
  static Term lookup(std::string location);
  static Term update(std::string location);
  static Term op(std::string name);
  static Term if_(Term cond, Term then_branch, Term else_branch);
  static Term while_(Term cond, Term body);
  static Term down(Term f);
  static Term meta(std::string name);

  TermKind kind() const { return node_->kind; }
  const std::string& name() const { return node_->name; }
  const std::vector<Type>& types() const { return node_->types; }
  const std::vector<Term>& args() const { return node_->args; }
  const Term& arg(std::size_t i) const { return node_->args[i]; }

  friend bool operator==(const Term& a, const Term& b);
  friend std::strong_ordering operator<=>(const Term& a, const Term& b);

 private:
  struct Node {
    TermKind kind;
    std::string name;
    std::vector<Type> types;
    std::vector<Term> args;
  };
  Term(TermKind kind, std::string name, std::vector<Type> types, std::vector<Term> args);
  static std::strong_ordering compare(const Term& a, const Term& b);

  std::shared_ptr<const Node> node_;
};

struct Arrow {
  Type source;
  Type target;
  Decoration dec;

  bool operator==(const Arrow&) const = default;
};

std::string to_string(const Arrow& a);

// Resolves metavariables during inference over schemas.
class MetaTyping {
 public:
  virtual ~MetaTyping() = default;
  virtual const Arrow* find(const std::string& meta) const = 0;
};

// Parses the term grammar and resolves every exception, location, op and base
// type name against `sig`. Typing is not checked.
Term parse_term(std::string_view text, const Signature& sig);

// Schema variant: accepts `?name` metavariables for terms, types and names
// and does not resolve names.
Term parse_schema(std::string_view text);

// Infers source, target and least decoration. Throws TypeError with the path
// of the offending subterm.
Arrow infer(const Term& t, const Signature& sig, const MetaTyping* metas = nullptr);

// Involutive renaming between the exception and state cores. Throws TypeError
// on Op, If, While and Down.
Term dualize(const Term& t);

std::string pretty(const Term& t);

// Comp re-associated to the right everywhere; two terms are the same up to
// associativity iff their normal forms are equal.
Term normalize(const Term& t);

// Number of nested formers, leaves have depth 1.
int depth(const Term& t);

}  // namespace decolog
