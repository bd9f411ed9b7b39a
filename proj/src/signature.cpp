#include "decolog/signature.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "decolog/error.hpp"
#include "parse_util.hpp"

namespace decolog {

bool Signature::has_base(std::string_view name) const {
  for (const auto& b : base_types) {
    if (b == name) return true;
  }
  return false;
}

const NamedValue* Signature::find_exception(std::string_view name) const {
  for (const auto& e : exceptions) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

const NamedValue* Signature::find_location(std::string_view name) const {
  for (const auto& x : locations) {
    if (x.name == name) return &x;
  }
  return nullptr;
}

const OpDecl* Signature::find_op(std::string_view name) const {
  for (const auto& op : ops) {
    if (op.name == name) return &op;
  }
  return nullptr;
}

namespace {

bool mentions_empty(const Type& t) {
  switch (t.kind()) {
    case TypeKind::Empty:
      return true;
    case TypeKind::Sum:
    case TypeKind::Prod:
      return mentions_empty(t.left()) || mentions_empty(t.right());
    default:
      return false;
  }
}

void collect_bases(const Type& t, std::vector<std::string>& out) {
  switch (t.kind()) {
    case TypeKind::Base:
      out.push_back(t.name());
      break;
    case TypeKind::Sum:
    case TypeKind::Prod:
      collect_bases(t.left(), out);
      collect_bases(t.right(), out);
      break;
    default:
      break;
  }
}

}  // namespace

std::vector<std::string> validate(const Signature& sig) {
  std::vector<std::string> out;
  auto dupes = [&](const std::vector<std::string>& names, const char* space) {
    std::set<std::string> seen;
    for (const auto& n : names) {
      if (!seen.insert(n).second) {
        out.push_back(std::string("duplicate name '") + n + "' among " + space);
      }
    }
  };
  dupes(sig.base_types, "base types");
  std::vector<std::string> names;
  for (const auto& e : sig.exceptions) names.push_back(e.name);
  dupes(names, "exceptions");
  names.clear();
  for (const auto& x : sig.locations) names.push_back(x.name);
  dupes(names, "locations");
  names.clear();
  for (const auto& op : sig.ops) names.push_back(op.name);
  dupes(names, "ops");

  for (const auto& e : sig.exceptions) {
    if (!sig.has_base(e.value_type)) {
      out.push_back("unknown type '" + e.value_type + "' for exception '" + e.name + "'");
    }
  }
  for (const auto& x : sig.locations) {
    if (!sig.has_base(x.value_type)) {
      out.push_back("unknown type '" + x.value_type + "' for location '" + x.name + "'");
    }
  }
  for (const auto& op : sig.ops) {
    std::vector<std::string> bases;
    collect_bases(op.source, bases);
    collect_bases(op.target, bases);
    for (const auto& b : bases) {
      if (!sig.has_base(b)) out.push_back("unknown type '" + b + "' in op '" + op.name + "'");
    }
    if (mentions_empty(op.source) || mentions_empty(op.target)) {
      out.push_back("pure op touches Empty: '" + op.name + "'");
    }
  }
  return out;
}

Signature parse_signature(std::string_view text) {
  TokenStream ts(tokenize(text, true));
  Signature sig;
  auto name_error = [](const Token& at, const std::string& msg) {
    return NameError(std::to_string(at.line) + ":" + std::to_string(at.column) + ": " + msg);
  };
  auto require_base = [&](const Token& at, const std::string& name) {
    if (!sig.has_base(name)) throw name_error(at, "unknown type '" + name + "'");
  };
  auto check_type = [&](const Token& at, const Type& t) {
    std::vector<std::string> bases;
    collect_bases(t, bases);
    for (const auto& b : bases) require_base(at, b);
  };
  std::set<std::string> base_seen, exc_seen, loc_seen, op_seen;
  auto fresh = [&](std::set<std::string>& seen, const Token& at, const std::string& n) {
    if (!seen.insert(n).second) throw name_error(at, "duplicate name '" + n + "'");
  };

  while (true) {
    ts.skip_newlines();
    if (ts.at_end()) break;
    const Token& head = ts.peek();
    std::string kw = ts.expect_ident("a declaration keyword");
    if (kw == "base") {
      const Token& at = ts.peek();
      std::string n = ts.expect_ident("a base type name");
      fresh(base_seen, at, n);
      sig.base_types.push_back(n);
    } else if (kw == "exception" || kw == "location") {
      const Token& at = ts.peek();
      std::string n = ts.expect_ident("a name");
      ts.expect_symbol(":");
      const Token& type_at = ts.peek();
      std::string v = ts.expect_ident("a base type");
      require_base(type_at, v);
      if (kw == "exception") {
        fresh(exc_seen, at, n);
        sig.exceptions.push_back({n, v});
      } else {
        fresh(loc_seen, at, n);
        sig.locations.push_back({n, v});
      }
    } else if (kw == "op") {
      const Token& at = ts.peek();
      std::string n = ts.expect_ident("an op name");
      ts.expect_symbol(":");
      const Token& src_at = ts.peek();
      Type src = detail::parse_type(ts, false);
      check_type(src_at, src);
      ts.expect_symbol("->");
      const Token& tgt_at = ts.peek();
      Type tgt = detail::parse_type(ts, false);
      check_type(tgt_at, tgt);
      if (mentions_empty(src) || mentions_empty(tgt)) {
        throw name_error(at, "pure op touches Empty: '" + n + "'");
      }
      fresh(op_seen, at, n);
      sig.ops.push_back({n, src, tgt});
    } else {
      ts.fail_at(head, "unknown declaration '" + kw + "'");
    }
    ts.expect_line_end();
  }
  return sig;
}

std::string pretty(const Signature& sig) {
  std::ostringstream os;
  for (const auto& b : sig.base_types) os << "base " << b << '\n';
  for (const auto& e : sig.exceptions) os << "exception " << e.name << " : " << e.value_type << '\n';
  for (const auto& x : sig.locations) os << "location " << x.name << " : " << x.value_type << '\n';
  for (const auto& op : sig.ops) {
    os << "op " << op.name << " : " << to_string(op.source) << " -> " << to_string(op.target)
       << '\n';
  }
  return os.str();
}

Signature dualize(const Signature& sig) {
  Signature out;
  out.base_types = sig.base_types;
  out.exceptions = sig.locations;
  out.locations = sig.exceptions;
  return out;
}

namespace detail {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail
}  // namespace decolog
