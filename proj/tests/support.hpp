#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "decolog/semantics.hpp"
#include "decolog/signature.hpp"
#include "decolog/terms.hpp"
#include "parse_util.hpp"

namespace testing_support {

inline std::string data(const std::string& rel) { return std::string(DECOLOG_DATA_DIR) + "/" + rel; }

inline decolog::Signature sig(const std::string& name) {
  return decolog::parse_signature(decolog::detail::read_file(data("sigs/" + name)));
}

inline decolog::Model model(const std::string& name, const decolog::Signature& s) {
  return decolog::parse_model(decolog::detail::read_file(data("models/" + name)), s);
}

// Seeded generator of well-typed core terms (no op, if, while, down) between
// types of a small universe.
class TermGen {
 public:
  TermGen(const decolog::Signature& sig, unsigned seed) : sig_(sig), rng_(seed) {
    using decolog::Type;
    universe_ = {Type::empty(), Type::unit()};
    for (const auto& b : sig.base_types) universe_.push_back(Type::base(b));
    std::vector<Type> atoms = universe_;
    for (const auto& a : atoms) {
      for (const auto& b : atoms) {
        if (a.kind() == decolog::TypeKind::Base || b.kind() == decolog::TypeKind::Base) {
          universe_.push_back(Type::sum(a, b));
          universe_.push_back(Type::prod(a, b));
        }
      }
    }
  }

  const std::vector<decolog::Type>& universe() const { return universe_; }

  decolog::Type pick_type() { return universe_[uniform(universe_.size())]; }

  // A term src -> tgt of depth at most `depth`, well-typed and satisfying the
  // formation restrictions, or nullopt after a few failed attempts.
  std::optional<decolog::Term> term(const decolog::Type& src, const decolog::Type& tgt, int depth) {
    for (int attempt = 0; attempt < 20; ++attempt) {
      if (auto t = build(src, tgt, depth)) {
        try {
          decolog::infer(*t, sig_);
          return t;
        } catch (const std::exception&) {
        }
      }
    }
    return std::nullopt;
  }

  // Any structurally valid term, not necessarily well-typed.
  decolog::Term any(int depth) {
    using decolog::Term;
    int choice = static_cast<int>(uniform(depth > 0 ? 20 : 14));
    auto name = [&](const auto& list) { return list[uniform(list.size())].name; };
    switch (choice) {
      case 0: return Term::id(pick_type());
      case 1: return Term::inl(pick_type(), pick_type());
      case 2: return Term::inr(pick_type(), pick_type());
      case 3: return Term::from_empty(pick_type());
      case 4: return Term::proj1(pick_type(), pick_type());
      case 5: return Term::proj2(pick_type(), pick_type());
      case 6: return Term::to_unit(pick_type());
      case 7: return Term::tag(name(sig_.exceptions));
      case 8: return Term::untag(name(sig_.exceptions));
      case 9: return Term::lookup(name(sig_.locations));
      case 10: return Term::update(name(sig_.locations));
      case 11:
      case 12:
      case 13: return sig_.ops.empty() ? Term::id(pick_type()) : Term::op(name(sig_.ops));
      case 14:
      case 15: return Term::comp(any(depth - 1), any(depth - 1));
      case 16: return Term::copair(any(depth - 1), any(depth - 1));
      case 17: return Term::pair(any(depth - 1), any(depth - 1));
      case 18: return Term::if_(any(depth - 1), any(depth - 1), any(depth - 1));
      default: return uniform(2) ? Term::while_(any(depth - 1), any(depth - 1)) : Term::down(any(depth - 1));
    }
  }

 private:
  std::size_t uniform(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

  std::vector<decolog::Term> leaves(const decolog::Type& a, const decolog::Type& b) {
    using decolog::Term;
    using decolog::Type;
    using decolog::TypeKind;
    std::vector<Term> out;
    if (a == b) out.push_back(Term::id(a));
    if (b.kind() == TypeKind::Sum) {
      if (b.left() == a) out.push_back(Term::inl(b.left(), b.right()));
      if (b.right() == a) out.push_back(Term::inr(b.left(), b.right()));
    }
    if (a.kind() == TypeKind::Prod) {
      if (a.left() == b) out.push_back(Term::proj1(a.left(), a.right()));
      if (a.right() == b) out.push_back(Term::proj2(a.left(), a.right()));
    }
    if (a.kind() == TypeKind::Empty) out.push_back(Term::from_empty(b));
    if (b.kind() == TypeKind::Unit) out.push_back(Term::to_unit(a));
    for (const auto& e : sig_.exceptions) {
      Type v = Type::base(e.value_type);
      if (a == v && b == Type::empty()) out.push_back(Term::tag(e.name));
      if (a == Type::empty() && b == v) out.push_back(Term::untag(e.name));
    }
    for (const auto& l : sig_.locations) {
      Type v = Type::base(l.value_type);
      if (a == Type::unit() && b == v) out.push_back(Term::lookup(l.name));
      if (a == v && b == Type::unit()) out.push_back(Term::update(l.name));
    }
    return out;
  }

  std::optional<decolog::Term> build(const decolog::Type& a, const decolog::Type& b, int depth) {
    using decolog::Term;
    using decolog::TypeKind;
    std::vector<Term> base = leaves(a, b);
    if (depth == 0 || (!base.empty() && uniform(3) == 0)) {
      if (base.empty()) return std::nullopt;
      return base[uniform(base.size())];
    }
    switch (uniform(3)) {
      case 0:
        if (a.kind() == TypeKind::Sum) {
          auto f = build(a.left(), b, depth - 1);
          auto g = build(a.right(), b, depth - 1);
          if (f && g) return Term::copair(*f, *g);
        }
        break;
      case 1:
        if (b.kind() == TypeKind::Prod) {
          auto f = build(a, b.left(), depth - 1);
          auto g = build(a, b.right(), depth - 1);
          if (f && g) return Term::pair(*f, *g);
        }
        break;
      default:
        break;
    }
    decolog::Type mid = pick_type();
    auto g = build(a, mid, depth - 1);
    auto f = build(mid, b, depth - 1);
    if (f && g) return Term::comp(*f, *g);
    if (base.empty()) return std::nullopt;
    return base[uniform(base.size())];
  }

  const decolog::Signature& sig_;
  std::mt19937 rng_;
  std::vector<decolog::Type> universe_;
};

}  // namespace testing_support
