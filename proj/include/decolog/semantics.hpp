#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "decolog/logic.hpp"
#include "decolog/signature.hpp"
#include "decolog/terms.hpp"

namespace decolog {

// A finite interpretation of a signature.
//
// Values of a type t are encoded as integers. Ordinary values occupy
// [0, |t|); the exceptional value number e occupies |t| + e, where the
// exceptional values are the pairs (T, v) for every exception T in
// declaration order and v in carrier(V_T). Sums put left values first,
// a pair (w, u) of A*B is w*|B| + u, Unit has the single value 0.
// States are mixed-radix numbers over the locations in declaration order,
// the last location varying fastest.
class Model {
 public:
  Model() = default;
  Model(Signature sig, std::map<std::string, std::vector<std::string>> carriers,
        std::map<std::string, std::vector<int>> op_tables, int fuel);

  const Signature& signature() const { return sig_; }
  const std::map<std::string, std::vector<std::string>>& carriers() const { return carriers_; }
  const std::map<std::string, std::vector<int>>& op_tables() const { return op_tables_; }
  int fuel() const { return fuel_; }
  void set_fuel(int fuel) { fuel_ = fuel; }

  // Number of ordinary values of t.
  int size(const Type& t) const;
  int exception_count() const { return exception_count_; }
  int exception_offset(std::string_view exception) const;
  int state_count() const { return state_count_; }

  int state_component(int state, std::size_t location) const;
  int with_component(int state, std::size_t location, int value) const;
  int encode_state(const std::vector<int>& components) const;

  // Rendering: `inl(v0)`, `(a, b)`, `()`, `exc T(v1)`, `{X=v0, Y=v1}`.
  std::string value_to_string(const Type& t, int value) const;
  std::string state_to_string(int state) const;

  // Inverse of value_to_string for ordinary values.
  int parse_value(std::string_view text, const Type& t) const;

 private:
  Signature sig_;
  std::map<std::string, std::vector<std::string>> carriers_;
  std::map<std::string, std::vector<int>> op_tables_;
  int fuel_ = 100;
  int exception_count_ = 0;
  std::vector<int> exception_offsets_;
  std::vector<int> strides_;
  int state_count_ = 1;
};

// `carrier B = v1 v2 ...`, `op name = (in -> out) ...`, `fuel n`. Every base
// type needs a carrier and every op a total table.
Model parse_model(std::string_view text, const Signature& sig);
std::string pretty(const Model& m);

// Signature dualized, carriers kept, ops dropped.
Model dualize(const Model& m);

// One evaluation result. value < 0 means the fuel ran out.
struct Out {
  std::int32_t value;
  std::int32_t state;

  bool timeout() const { return value < 0; }
  bool operator==(const Out&) const = default;
};

// A term's meaning as a complete table over (value, state) inputs, where the
// input (v, s) sits at v * state_count + s.
struct Denotation {
  Type source;
  Type target;
  int source_size = 0;  // ordinary values of source
  int target_size = 0;
  std::vector<Out> table;

  const Out& at(int value, int state, int states) const {
    return table[static_cast<std::size_t>(value) * states + state];
  }
};

// Denotations for schema metavariables.
using MetaDenotations = std::map<std::string, const Denotation*>;

// Pre: t well-typed under the model's signature.
Denotation denote(const Term& t, const Model& m, const MetaDenotations* metas = nullptr);

struct HoldsResult {
  enum class Kind { Holds, Counterexample, Timeout };
  Kind kind = Kind::Holds;
  int input_value = 0;
  int input_state = 0;
  Out lhs{0, 0};
  Out rhs{0, 0};
  std::string message;  // empty when Holds
};

// Inputs are visited value-major in encoding order: ordinary values, then
// exceptional values when exc_strict, each with every state. Values are
// always compared, states only when st_strict. Both sides running out of
// fuel at the same input counts as agreement; a one-sided timeout makes the
// verdict Timeout.
HoldsResult holds(const Equation& eq, const Model& m);

// Same comparison over precomputed tables; returns the index of the first
// disagreeing input, or -1. `timeout` is set when a one-sided timeout was
// seen before any disagreement.
long first_disagreement(const Denotation& lhs, const Denotation& rhs, Strength strength,
                        const Model& m, bool* timeout);

std::string describe(const HoldsResult& r, const Type& source, const Type& target,
                     const Model& m);

}  // namespace decolog
