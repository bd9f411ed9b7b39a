#include "decolog/semantics.hpp"

#include <set>
#include <sstream>
#include <stdexcept>

#include "decolog/error.hpp"
#include "lexer.hpp"
#include "parse_util.hpp"

namespace decolog {

Model::Model(Signature sig, std::map<std::string, std::vector<std::string>> carriers,
             std::map<std::string, std::vector<int>> op_tables, int fuel)
    : sig_(std::move(sig)),
      carriers_(std::move(carriers)),
      op_tables_(std::move(op_tables)),
      fuel_(fuel) {
  for (const auto& e : sig_.exceptions) {
    exception_offsets_.push_back(exception_count_);
    exception_count_ += static_cast<int>(carriers_.at(e.value_type).size());
  }
  strides_.assign(sig_.locations.size(), 1);
  for (std::size_t i = sig_.locations.size(); i-- > 0;) {
    strides_[i] = state_count_;
    state_count_ *= static_cast<int>(carriers_.at(sig_.locations[i].value_type).size());
  }
}

int Model::size(const Type& t) const {
  switch (t.kind()) {
    case TypeKind::Base: {
      auto it = carriers_.find(t.name());
      if (it == carriers_.end()) throw NameError("no carrier for type '" + t.name() + "'");
      return static_cast<int>(it->second.size());
    }
    case TypeKind::Sum:
      return size(t.left()) + size(t.right());
    case TypeKind::Prod:
      return size(t.left()) * size(t.right());
    case TypeKind::Empty:
      return 0;
    case TypeKind::Unit:
      return 1;
  }
  return 0;
}

int Model::exception_offset(std::string_view exception) const {
  for (std::size_t i = 0; i < sig_.exceptions.size(); ++i) {
    if (sig_.exceptions[i].name == exception) return exception_offsets_[i];
  }
  throw NameError("unknown exception '" + std::string(exception) + "'");
}

int Model::state_component(int state, std::size_t location) const {
  int radix = static_cast<int>(carriers_.at(sig_.locations[location].value_type).size());
  return (state / strides_[location]) % radix;
}

int Model::with_component(int state, std::size_t location, int value) const {
  int old = state_component(state, location);
  return state + (value - old) * strides_[location];
}

int Model::encode_state(const std::vector<int>& components) const {
  int s = 0;
  for (std::size_t i = 0; i < components.size(); ++i) s += components[i] * strides_[i];
  return s;
}

std::string Model::value_to_string(const Type& t, int value) const {
  int n = size(t);
  if (value >= n) {
    int e = value - n;
    for (std::size_t i = sig_.exceptions.size(); i-- > 0;) {
      if (e >= exception_offsets_[i]) {
        const auto& exc = sig_.exceptions[i];
        return "exc " + exc.name + "(" + carriers_.at(exc.value_type)[e - exception_offsets_[i]] +
               ")";
      }
    }
    return "exc ?";
  }
  switch (t.kind()) {
    case TypeKind::Base:
      return carriers_.at(t.name())[value];
    case TypeKind::Unit:
      return "()";
    case TypeKind::Sum: {
      int l = size(t.left());
      if (value < l) return "inl(" + value_to_string(t.left(), value) + ")";
      return "inr(" + value_to_string(t.right(), value - l) + ")";
    }
    case TypeKind::Prod: {
      int r = size(t.right());
      return "(" + value_to_string(t.left(), value / r) + ", " +
             value_to_string(t.right(), value % r) + ")";
    }
    case TypeKind::Empty:
      break;
  }
  return "?";
}

std::string Model::state_to_string(int state) const {
  std::string out = "{";
  for (std::size_t i = 0; i < sig_.locations.size(); ++i) {
    if (i) out += ", ";
    const auto& loc = sig_.locations[i];
    out += loc.name + "=" + carriers_.at(loc.value_type)[state_component(state, i)];
  }
  return out + "}";
}

namespace {

int parse_value_tokens(TokenStream& ts, const Type& t, const Model& m) {
  switch (t.kind()) {
    case TypeKind::Unit:
      ts.expect_symbol("(");
      ts.expect_symbol(")");
      return 0;
    case TypeKind::Empty:
      ts.fail("type 0 has no values");
    case TypeKind::Sum: {
      const Token& at = ts.peek();
      std::string side = ts.expect_ident("inl or inr");
      if (side != "inl" && side != "inr") ts.fail_at(at, "expected inl or inr, found '" + side + "'");
      ts.expect_symbol("(");
      int v = side == "inl" ? parse_value_tokens(ts, t.left(), m)
                            : m.size(t.left()) + parse_value_tokens(ts, t.right(), m);
      ts.expect_symbol(")");
      return v;
    }
    case TypeKind::Prod: {
      ts.expect_symbol("(");
      int a = parse_value_tokens(ts, t.left(), m);
      ts.expect_symbol(",");
      int b = parse_value_tokens(ts, t.right(), m);
      ts.expect_symbol(")");
      return a * m.size(t.right()) + b;
    }
    case TypeKind::Base: {
      const Token& at = ts.peek();
      std::string v = ts.expect_name_or_number("a value of " + t.name());
      const auto& carrier = m.carriers().at(t.name());
      for (std::size_t i = 0; i < carrier.size(); ++i) {
        if (carrier[i] == v) return static_cast<int>(i);
      }
      ts.fail_at(at, "'" + v + "' is not a value of " + t.name());
    }
  }
  return 0;
}

}  // namespace

int Model::parse_value(std::string_view text, const Type& t) const {
  TokenStream ts(tokenize(text, false));
  int v = parse_value_tokens(ts, t, *this);
  if (!ts.at_end()) ts.fail("trailing input after value: " + describe(ts.peek()));
  return v;
}

Model parse_model(std::string_view text, const Signature& sig) {
  TokenStream ts(tokenize(text, true));
  std::map<std::string, std::vector<std::string>> carriers;
  std::map<std::string, std::vector<std::pair<std::size_t, std::size_t>>> op_lines;
  std::map<std::string, Token> op_at;
  int fuel = 100;
  while (true) {
    ts.skip_newlines();
    if (ts.at_end()) break;
    const Token head = ts.peek();
    std::string kw = ts.expect_ident("carrier, op or fuel");
    if (kw == "carrier") {
      const Token at = ts.peek();
      std::string b = ts.expect_ident("a base type");
      if (!sig.has_base(b)) ts.fail_at(at, "unknown type '" + b + "'");
      if (carriers.count(b)) ts.fail_at(at, "duplicate carrier for '" + b + "'");
      ts.expect_symbol("=");
      std::vector<std::string> values;
      std::set<std::string> seen;
      while (ts.peek().kind == TokenKind::Ident || ts.peek().kind == TokenKind::Number) {
        const Token v = ts.next();
        if (!seen.insert(v.text).second) ts.fail_at(v, "duplicate value '" + v.text + "'");
        values.push_back(v.text);
      }
      if (values.empty()) ts.fail_at(at, "carrier of '" + b + "' is empty");
      carriers[b] = std::move(values);
    } else if (kw == "op") {
      const Token at = ts.peek();
      std::string n = ts.expect_ident("an op name");
      if (!sig.find_op(n)) ts.fail_at(at, "unknown op '" + n + "'");
      if (op_at.count(n)) ts.fail_at(at, "duplicate table for op '" + n + "'");
      op_at.emplace(n, at);
      ts.expect_symbol("=");
      std::size_t op_start = ts.position();
      // Entries are parsed once carriers are known; skip to end of line.
      while (ts.peek().kind != TokenKind::Newline && !ts.at_end()) ts.next();
      op_lines[n].push_back({op_start, ts.position()});
    } else if (kw == "fuel") {
      const Token at = ts.peek();
      long f = ts.expect_number("a fuel bound");
      if (f <= 0) ts.fail_at(at, "fuel must be positive");
      fuel = static_cast<int>(f);
    } else {
      ts.fail_at(head, "unknown declaration '" + kw + "'");
    }
    ts.expect_line_end();
  }
  for (const auto& b : sig.base_types) {
    if (!carriers.count(b)) ts.fail("missing carrier for base type '" + b + "'");
  }
  Model shape(sig, carriers, {}, fuel);
  std::map<std::string, std::vector<int>> tables;
  for (const auto& op : sig.ops) {
    auto lines = op_lines.find(op.name);
    if (lines == op_lines.end()) ts.fail("missing table for op '" + op.name + "'");
    int n_in = shape.size(op.source);
    std::vector<int> table(n_in, -1);
    for (auto [begin, end] : lines->second) {
      ts.rewind(begin);
      while (ts.position() < end) {
        const Token at = ts.peek();
        ts.expect_symbol("(");
        int in = parse_value_tokens(ts, op.source, shape);
        ts.expect_symbol("->");
        int out = parse_value_tokens(ts, op.target, shape);
        ts.expect_symbol(")");
        if (table[in] >= 0) ts.fail_at(at, "duplicate entry in table of '" + op.name + "'");
        table[in] = out;
      }
    }
    for (int i = 0; i < n_in; ++i) {
      if (table[i] < 0) {
        throw ParseError(op_at.at(op.name).line, op_at.at(op.name).column,
                         "table of '" + op.name + "' is not total: missing " +
                             shape.value_to_string(op.source, i));
      }
    }
    tables[op.name] = std::move(table);
  }
  return Model(sig, std::move(carriers), std::move(tables), fuel);
}

std::string pretty(const Model& m) {
  std::ostringstream os;
  for (const auto& b : m.signature().base_types) {
    os << "carrier " << b << " =";
    for (const auto& v : m.carriers().at(b)) os << ' ' << v;
    os << '\n';
  }
  for (const auto& op : m.signature().ops) {
    os << "op " << op.name << " =";
    const auto& table = m.op_tables().at(op.name);
    for (std::size_t i = 0; i < table.size(); ++i) {
      os << " (" << m.value_to_string(op.source, static_cast<int>(i)) << " -> "
         << m.value_to_string(op.target, table[i]) << ')';
    }
    os << '\n';
  }
  os << "fuel " << m.fuel() << '\n';
  return os.str();
}

Model dualize(const Model& m) { return Model(dualize(m.signature()), m.carriers(), {}, m.fuel()); }

// ---------------------------------------------------------------------------
// Denotation

namespace {

constexpr Out kTimeout{-1, 0};


class Compiler {
 public:
  Compiler(const Model& m, const MetaDenotations* metas)
      : m_(m), metas_(metas), states_(m.state_count()), excs_(m.exception_count()) {}

  Denotation run(const Term& t) {
    switch (t.kind()) {
      case TermKind::Meta: {
        if (!metas_ || !metas_->count(t.name())) {
          throw std::invalid_argument("no denotation for metavariable " + t.name());
        }
        return *metas_->at(t.name());
      }
      case TermKind::Id:
        return pure(t.types()[0], t.types()[0], [](int v) { return v; });
      case TermKind::Inl:
        return pure(t.types()[0], Type::sum(t.types()[0], t.types()[1]), [](int v) { return v; });
      case TermKind::Inr: {
        int l = m_.size(t.types()[0]);
        return pure(t.types()[1], Type::sum(t.types()[0], t.types()[1]),
                    [l](int v) { return l + v; });
      }
      case TermKind::FromEmpty:
        return pure(Type::empty(), t.types()[0], [](int v) { return v; });
      case TermKind::ToUnit:
        return pure(t.types()[0], Type::unit(), [](int) { return 0; });
      case TermKind::Proj1: {
        int r = m_.size(t.types()[1]);
        return pure(Type::prod(t.types()[0], t.types()[1]), t.types()[0],
                    [r](int v) { return v / r; });
      }
      case TermKind::Proj2: {
        int r = m_.size(t.types()[1]);
        return pure(Type::prod(t.types()[0], t.types()[1]), t.types()[1],
                    [r](int v) { return v % r; });
      }
      case TermKind::Op: {
        const OpDecl* op = m_.signature().find_op(t.name());
        const auto& table = m_.op_tables().at(t.name());
        return pure(op->source, op->target, [&table](int v) { return table[v]; });
      }
      case TermKind::Tag: {
        Type v = Type::base(m_.signature().find_exception(t.name())->value_type);
        int off = m_.exception_offset(t.name());
        Denotation d = make(v, Type::empty());
        fill(d, [&](int x, int s) -> Out {
          if (x < d.source_size) return {off + x, s};
          return propagate(d, x, s);
        });
        return d;
      }
      case TermKind::Untag: {
        Type v = Type::base(m_.signature().find_exception(t.name())->value_type);
        int off = m_.exception_offset(t.name());
        Denotation d = make(Type::empty(), v);
        int n = d.target_size;
        fill(d, [&](int x, int s) -> Out {
          if (x >= off && x < off + n) return {x - off, s};
          return propagate(d, x, s);
        });
        return d;
      }
      case TermKind::Lookup: {
        const auto& locs = m_.signature().locations;
        std::size_t i = index_of(locs, t.name());
        Denotation d = make(Type::unit(), Type::base(locs[i].value_type));
        fill(d, [&](int x, int s) -> Out {
          if (x < 1) return {m_.state_component(s, i), s};
          return propagate(d, x, s);
        });
        return d;
      }
      case TermKind::Update: {
        const auto& locs = m_.signature().locations;
        std::size_t i = index_of(locs, t.name());
        Denotation d = make(Type::base(locs[i].value_type), Type::unit());
        fill(d, [&](int x, int s) -> Out {
          if (x < d.source_size) return {0, m_.with_component(s, i, x)};
          return propagate(d, x, s);
        });
        return d;
      }
      case TermKind::Comp: {
        Denotation g = run(t.arg(1));
        Denotation f = run(t.arg(0));
        Denotation d = make(g.source, f.target);
        fill(d, [&](int x, int s) -> Out {
          const Out& o = g.at(x, s, states_);
          if (o.timeout()) return o;
          return f.at(o.value, o.state, states_);
        });
        return d;
      }
      case TermKind::Copair: {
        Denotation f = run(t.arg(0));
        Denotation g = run(t.arg(1));
        Denotation d = make(Type::sum(f.source, g.source), f.target);
        int a = f.source_size;
        fill(d, [&](int x, int s) -> Out {
          // Exceptional inputs go to g as well.
          if (x < a) return f.at(x, s, states_);
          return g.at(x - a, s, states_);
        });
        return d;
      }
      case TermKind::Pair: {
        Denotation f = run(t.arg(0));
        Denotation g = run(t.arg(1));
        Denotation d = make(f.source, Type::prod(f.target, g.target));
        int n1 = f.target_size, n2 = g.target_size, n = d.target_size;
        fill(d, [&](int x, int s) -> Out {
          if (x >= d.source_size) return propagate(d, x, s);
          const Out& w = f.at(x, s, states_);
          if (w.timeout()) return w;
          if (w.value >= n1) return {n + w.value - n1, w.state};
          const Out& u = g.at(x, s, states_);
          if (u.timeout()) return u;
          if (u.value >= n2) return {n + u.value - n2, u.state};
          return {w.value * n2 + u.value, u.state};
        });
        return d;
      }
      case TermKind::If: {
        Denotation b = run(t.arg(0));
        Denotation f = run(t.arg(1));
        Denotation g = run(t.arg(2));
        Denotation d = make(b.source, f.target);
        fill(d, [&](int x, int s) -> Out {
          if (x >= d.source_size) return propagate(d, x, s);
          const Out& c = b.at(x, s, states_);
          if (c.timeout()) return c;
          if (c.value >= 2) return {d.target_size + c.value - 2, c.state};
          return (c.value == 0 ? f : g).at(x, c.state, states_);
        });
        return d;
      }
      case TermKind::While: {
        Denotation b = run(t.arg(0));
        Denotation f = run(t.arg(1));
        Denotation d = make(b.source, b.source);
        int fuel = m_.fuel();
        fill(d, [&](int x, int s) -> Out {
          if (x >= d.source_size) return propagate(d, x, s);
          for (int iter = 0;; ++iter) {
            const Out& c = b.at(x, s, states_);
            if (c.timeout()) return c;
            if (c.value >= 2) return {d.target_size + c.value - 2, c.state};
            if (c.value == 1) return {x, c.state};
            if (iter == fuel) return kTimeout;
            const Out& r = f.at(x, c.state, states_);
            if (r.timeout() || r.value >= d.target_size) return r;
            x = r.value;
            s = r.state;
          }
        });
        return d;
      }
      case TermKind::Down: {
        Denotation f = run(t.arg(0));
        Denotation d = make(f.source, f.target);
        fill(d, [&](int x, int s) -> Out {
          if (x >= d.source_size) return propagate(d, x, s);
          return f.at(x, s, states_);
        });
        return d;
      }
    }
    throw std::logic_error("unhandled term kind");
  }

 private:
  template <typename T>
  static std::size_t index_of(const std::vector<T>& names, const std::string& n) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i].name == n) return i;
    }
    throw NameError("unknown location '" + n + "'");
  }

  Denotation make(Type source, Type target) {
    Denotation d;
    d.source_size = m_.size(source);
    d.target_size = m_.size(target);
    d.source = std::move(source);
    d.target = std::move(target);
    d.table.resize(static_cast<std::size_t>(d.source_size + excs_) * states_);
    return d;
  }

  static Out propagate(const Denotation& d, int x, int s) {
    return {d.target_size + x - d.source_size, s};
  }

  template <typename F>
  void fill(Denotation& d, F&& f) {
    std::size_t i = 0;
    int values = d.source_size + excs_;
    for (int x = 0; x < values; ++x) {
      for (int s = 0; s < states_; ++s) d.table[i++] = f(x, s);
    }
  }

  template <typename F>
  Denotation pure(Type source, Type target, F&& fn) {
    Denotation d = make(std::move(source), std::move(target));
    fill(d, [&](int x, int s) -> Out {
      if (x < d.source_size) return {fn(x), s};
      return propagate(d, x, s);
    });
    return d;
  }

  const Model& m_;
  const MetaDenotations* metas_;
  int states_;
  int excs_;
};

struct Scan {
  long disagreement = -1;
  long timeout = -1;
};

Scan scan(const Denotation& lhs, const Denotation& rhs, Strength strength, const Model& m) {
  Scan r;
  long values = lhs.source_size + (strength.exc_strict ? m.exception_count() : 0);
  long n = values * m.state_count();
  for (long i = 0; i < n; ++i) {
    const Out& a = lhs.table[i];
    const Out& b = rhs.table[i];
    if (a.timeout() || b.timeout()) {
      if (a.timeout() != b.timeout() && r.timeout < 0) r.timeout = i;
      continue;
    }
    if (a.value != b.value || (strength.st_strict && a.state != b.state)) {
      r.disagreement = i;
      return r;
    }
  }
  return r;
}

}  // namespace

Denotation denote(const Term& t, const Model& m, const MetaDenotations* metas) {
  return Compiler(m, metas).run(t);
}

long first_disagreement(const Denotation& lhs, const Denotation& rhs, Strength strength,
                        const Model& m, bool* timeout) {
  Scan s = scan(lhs, rhs, strength, m);
  if (timeout) *timeout = s.timeout >= 0;
  return s.disagreement;
}

std::string describe(const HoldsResult& r, const Type& source, const Type& target,
                     const Model& m) {
  auto out = [&](const Out& o) {
    if (o.timeout()) return std::string("timeout");
    return m.value_to_string(target, o.value) + " " + m.state_to_string(o.state);
  };
  std::string input = "input " + m.value_to_string(source, r.input_value) + " " +
                      m.state_to_string(r.input_state);
  switch (r.kind) {
    case HoldsResult::Kind::Holds:
      return "HOLDS";
    case HoldsResult::Kind::Counterexample:
      return "COUNTEREXAMPLE: " + input + "; lhs " + out(r.lhs) + "; rhs " + out(r.rhs);
    case HoldsResult::Kind::Timeout:
      return "TIMEOUT: " + input + " (fuel " + std::to_string(m.fuel()) + "); lhs " + out(r.lhs) +
             "; rhs " + out(r.rhs);
  }
  return "";
}

HoldsResult holds(const Equation& eq, const Model& m) {
  Denotation l = denote(eq.lhs, m);
  Denotation r = denote(eq.rhs, m);
  if (!(l.source == r.source && l.target == r.target)) {
    throw std::invalid_argument("equation sides are not parallel");
  }
  Scan s = scan(l, r, eq.strength, m);
  HoldsResult res;
  long at = s.disagreement >= 0 ? s.disagreement : s.timeout;
  if (at < 0) return res;
  res.kind = s.disagreement >= 0 ? HoldsResult::Kind::Counterexample : HoldsResult::Kind::Timeout;
  res.input_value = static_cast<int>(at / m.state_count());
  res.input_state = static_cast<int>(at % m.state_count());
  res.lhs = l.table[at];
  res.rhs = r.table[at];
  res.message = describe(res, l.source, l.target, m);
  return res;
}

}  // namespace decolog
