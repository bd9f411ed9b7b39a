#pragma once

#include <compare>
#include <memory>
#include <string>
#include <string_view>

namespace decolog {

enum class TypeKind { Base, Sum, Prod, Empty, Unit };

// Immutable object type of the calculus. Base names beginning with '?' are
// type metavariables and only occur inside rule schemas.
class Type {
 public:
  Type();  // Unit
  static Type base(std::string name);
  static Type sum(Type left, Type right);
  static Type prod(Type left, Type right);
  static Type empty();
  static Type unit();

  TypeKind kind() const { return node_->kind; }
  const std::string& name() const { return node_->name; }
  Type left() const { return Type(node_->left); }
  Type right() const { return Type(node_->right); }
  bool is_meta() const {
    return kind() == TypeKind::Base && !name().empty() && name()[0] == '?';
  }

  friend bool operator==(const Type& a, const Type& b);
  friend std::strong_ordering operator<=>(const Type& a, const Type& b);

 private:
  struct Node {
    TypeKind kind;
    std::string name;
    std::shared_ptr<const Node> left;
    std::shared_ptr<const Node> right;
  };
  explicit Type(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static std::strong_ordering compare(const Node* a, const Node* b);

  std::shared_ptr<const Node> node_;
};

std::string to_string(const Type& t);

// Sum <-> Prod, Empty <-> Unit, base types fixed.
Type dualize(const Type& t);

Type parse_type(std::string_view text);

}  // namespace decolog
