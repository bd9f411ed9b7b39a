#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "decolog/types.hpp"

namespace decolog {

// An exception name or a store location together with its value type.
struct NamedValue {
  std::string name;
  std::string value_type;  // a declared base type

  bool operator==(const NamedValue&) const = default;
};

struct OpDecl {
  std::string name;
  Type source;
  Type target;

  bool operator==(const OpDecl&) const = default;
};

// The ambient vocabulary. Declaration order is significant: it fixes the
// enumeration order of every finite model built on the signature.
struct Signature {
  std::vector<std::string> base_types;
  std::vector<NamedValue> exceptions;
  std::vector<NamedValue> locations;
  std::vector<OpDecl> ops;

  bool has_base(std::string_view name) const;
  const NamedValue* find_exception(std::string_view name) const;
  const NamedValue* find_location(std::string_view name) const;
  const OpDecl* find_op(std::string_view name) const;

  bool operator==(const Signature&) const = default;
};

// Parses and validates. Throws ParseError on malformed lines and NameError
// (message prefixed with the line number) on duplicate or unknown names.
Signature parse_signature(std::string_view text);

// Empty result iff every invariant holds.
std::vector<std::string> validate(const Signature& sig);

std::string pretty(const Signature& sig);

// Exceptions become locations and vice versa; op symbols are dropped.
Signature dualize(const Signature& sig);

}  // namespace decolog
