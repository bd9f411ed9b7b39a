#include "decolog/harness.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <unordered_map>

#include "decolog/error.hpp"

namespace decolog {

std::vector<Type> default_universe(const Signature& sig) {
  std::vector<Type> out;
  for (const auto& b : sig.base_types) out.push_back(Type::base(b));
  out.push_back(Type::empty());
  out.push_back(Type::unit());
  out.push_back(Type::sum(Type::unit(), Type::unit()));
  for (const auto& b : sig.base_types) {
    out.push_back(Type::sum(Type::base(b), Type::base(b)));
    out.push_back(Type::prod(Type::base(b), Type::base(b)));
  }
  return out;
}

namespace {

bool in_fragment(RuleSetId which, const Decoration& d) {
  if (which == RuleSetId::Exc) return d.st == 0;
  if (which == RuleSetId::St) return d.exc == 0;
  return true;
}

class ArrowMap : public MetaTyping {
 public:
  const Arrow* find(const std::string& meta) const override {
    auto it = arrows.find(meta);
    return it == arrows.end() ? nullptr : &it->second;
  }
  std::map<std::string, Arrow> arrows;
};

struct Class {
  Term rep;
  Arrow arrow;
  int depth;
  Denotation den;
};

using Hom = std::pair<Type, Type>;

// Every term of the fragment up to a depth, one representative per
// (arrow, decoration, table). Composition is compositional in the tables, so
// two terms of one class are interchangeable in every context.
class Universe {
 public:
  Universe(const Model& m, RuleSetId which, int depth, std::vector<Type> types)
      : m_(m), which_(which), types_(std::move(types)) {
    leaves();
    for (int d = 2; d <= depth; ++d) grow(d);
    for (std::size_t i = 0; i < classes.size(); ++i) {
      by_hom[{classes[i].arrow.source, classes[i].arrow.target}].push_back(static_cast<int>(i));
    }
  }

  std::vector<Class> classes;
  std::map<Hom, std::vector<int>> by_hom;

 private:
  bool allowed(const Type& t) const {
    return std::find(types_.begin(), types_.end(), t) != types_.end();
  }

  void add(Term rep, const Arrow& a, int depth, Denotation den) {
    if (!allowed(a.source) || !allowed(a.target) || !in_fragment(which_, a.dec)) return;
    std::string key = to_string(a.source) + "|" + to_string(a.target) + "|" + to_string(a.dec) + "|";
    key.append(reinterpret_cast<const char*>(den.table.data()), den.table.size() * sizeof(Out));
    if (!seen_.emplace(std::move(key), static_cast<int>(classes.size())).second) return;
    int id = static_cast<int>(classes.size());
    by_source_[a.source].push_back(id);
    by_target_[a.target].push_back(id);
    classes.push_back({std::move(rep), a, depth, std::move(den)});
  }

  void leaf(const Term& t) {
    Arrow a;
    try {
      a = infer(t, m_.signature());
    } catch (const TypeError&) {
      return;
    }
    if (!allowed(a.source) || !allowed(a.target)) return;
    add(t, a, 1, denote(t, m_));
  }

  void leaves() {
    const Signature& sig = m_.signature();
    for (const Type& t : types_) {
      leaf(Term::id(t));
      leaf(Term::from_empty(t));
      leaf(Term::to_unit(t));
      if (t.kind() == TypeKind::Sum) {
        leaf(Term::inl(t.left(), t.right()));
        leaf(Term::inr(t.left(), t.right()));
      }
      if (t.kind() == TypeKind::Prod) {
        leaf(Term::proj1(t.left(), t.right()));
        leaf(Term::proj2(t.left(), t.right()));
      }
    }
    for (const auto& e : sig.exceptions) {
      leaf(Term::tag(e.name));
      leaf(Term::untag(e.name));
    }
    for (const auto& x : sig.locations) {
      leaf(Term::lookup(x.name));
      leaf(Term::update(x.name));
    }
    for (const auto& op : sig.ops) leaf(Term::op(op.name));
  }

  // Builds `shape` over child classes bound to ?0, ?1, ?2.
  void offer(const Term& shape, const std::vector<int>& kids, int depth) {
    ArrowMap typing;
    MetaDenotations env;
    Bindings reps;
    for (std::size_t i = 0; i < kids.size(); ++i) {
      std::string name = "?" + std::to_string(i);
      const Class& c = classes[kids[i]];
      typing.arrows.emplace(name, c.arrow);
      env.emplace(name, &c.den);
      reps.terms.emplace(name, c.rep);
    }
    Arrow a;
    try {
      a = infer(shape, m_.signature(), &typing);
    } catch (const TypeError&) {
      return;
    }
    if (!allowed(a.source) || !allowed(a.target) || !in_fragment(which_, a.dec)) return;
    Denotation den = denote(shape, m_, &env);
    add(instantiate(shape, reps), a, depth, std::move(den));
  }

  void grow(int d) {
    const int prev = static_cast<int>(classes.size());
    auto fresh = [&](int a, int b) {
      return std::max(classes[a].depth, classes[b].depth) == d - 1;
    };
    auto below = [&](const std::vector<int>& ids) {
      return std::vector<int>(ids.begin(),
                              std::lower_bound(ids.begin(), ids.end(), prev));
    };
    const Term comp = Term::comp(Term::meta("?0"), Term::meta("?1"));
    const Term copair = Term::copair(Term::meta("?0"), Term::meta("?1"));
    const Term pair = Term::pair(Term::meta("?0"), Term::meta("?1"));
    const Term cond = Term::if_(Term::meta("?0"), Term::meta("?1"), Term::meta("?2"));
    const Term loop = Term::while_(Term::meta("?0"), Term::meta("?1"));
    const Term down = Term::down(Term::meta("?0"));
    const Type boolean = Type::sum(Type::unit(), Type::unit());

    for (int g = 0; g < prev; ++g) {
      const Arrow ga = classes[g].arrow;
      for (int f : below(by_source_[ga.target])) {
        if (fresh(f, g)) offer(comp, {f, g}, d);
      }
      for (int h : below(by_target_[ga.target])) {
        if (fresh(g, h) && allowed(Type::sum(ga.source, classes[h].arrow.source))) {
          offer(copair, {g, h}, d);
        }
      }
      for (int h : below(by_source_[ga.source])) {
        if (fresh(g, h) && allowed(Type::prod(ga.target, classes[h].arrow.target))) {
          offer(pair, {g, h}, d);
        }
      }
    }
    if (which_ != RuleSetId::Combined) return;
    for (int b = 0; b < prev; ++b) {
      const Arrow ba = classes[b].arrow;
      if (!(ba.target == boolean)) continue;
      for (int f : below(by_source_[ba.source])) {
        const Type& tgt = classes[f].arrow.target;
        for (int g : below(by_source_[ba.source])) {
          if (!(classes[g].arrow.target == tgt)) continue;
          int deepest = std::max({classes[b].depth, classes[f].depth, classes[g].depth});
          if (deepest == d - 1) offer(cond, {b, f, g}, d);
        }
        if (tgt == ba.source && fresh(b, f)) offer(loop, {b, f}, d);
      }
    }
    for (int f = 0; f < prev; ++f) {
      if (classes[f].depth == d - 1 && classes[f].arrow.dec.exc == 2) offer(down, {f}, d);
    }
  }

  const Model& m_;
  RuleSetId which_;
  std::vector<Type> types_;
  std::unordered_map<std::string, int> seen_;
  std::map<Type, std::vector<int>> by_source_;
  std::map<Type, std::vector<int>> by_target_;
};

void collect_term_metas(const Term& t, std::vector<std::string>& out) {
  if (t.kind() == TermKind::Meta) {
    if (std::find(out.begin(), out.end(), t.name()) == out.end()) out.push_back(t.name());
    return;
  }
  for (const Term& a : t.args()) collect_term_metas(a, out);
}

void collect_type_metas(const Type& t, std::set<std::string>& out) {
  if (t.is_meta()) out.insert(t.name());
  if (t.kind() == TypeKind::Sum || t.kind() == TypeKind::Prod) {
    collect_type_metas(t.left(), out);
    collect_type_metas(t.right(), out);
  }
}

void collect_type_metas(const Term& t, std::set<std::string>& out) {
  for (const Type& ty : t.types()) collect_type_metas(ty, out);
  for (const Term& a : t.args()) collect_type_metas(a, out);
}


std::string projection_key(const Denotation& d, Strength s, int excs, int states) {
  long values = d.source_size + (s.exc_strict ? excs : 0);
  std::string key;
  key.reserve(values * states * 8);
  for (long i = 0; i < values * states; ++i) {
    const Out& o = d.table[i];
    Out p{o.value, s.st_strict && !o.timeout() ? o.state : 0};
    key.append(reinterpret_cast<const char*>(&p), sizeof(Out));
  }
  return key;
}

// Instances of one rule.
class RuleRunner {
 public:
  RuleRunner(const Rule& rule, RuleSetId which, const Model& m, const Universe& u,
             const std::vector<bool>* disabled, HarnessReport& report)
      : rule_(rule), which_(which), m_(m), u_(u), disabled_(disabled),
        report_(report) {}

  void run(const std::vector<Type>& universe) {
    for (const auto& [name, kind] : metavariables(rule_)) {
      bool bound_by_quantifier = false;
      for (const auto& p : rule_.premises) {
        if (p.quant != Quantifier::None && p.bound == name) bound_by_quantifier = true;
      }
      if (bound_by_quantifier) continue;
      bool derived = false;
      for (const auto& d : rule_.derived) derived = derived || d.var == name;
      switch (kind) {
        case MetaKind::Exception:
        case MetaKind::Location:
          names_.emplace_back(name, kind);
          break;
        case MetaKind::Flag:
          flags_.push_back(name);
          break;
        case MetaKind::Type:
          if (!derived) free_types_.push_back(name);
          break;
        case MetaKind::Term:
          break;
      }
    }
    universe_ = universe;
    assign_flags(0);
  }

 private:
  struct EqCheck {
    Term lhs;
    Term rhs;
    StrengthPattern strength;
    bool premise;
    int ready;
  };
  struct NodeCheck {
    Term node;
    int ready;
  };
  struct GuardCheck {
    Rule single;
    int ready;
  };

  void assign_flags(std::size_t i) {
    if (i == flags_.size()) return assign_names(0);
    for (bool v : {true, false}) {
      b_.flags[flags_[i]] = v;
      assign_flags(i + 1);
    }
    b_.flags.erase(flags_[i]);
  }

  void assign_names(std::size_t i) {
    if (i == names_.size()) return assign_types(0);
    const auto& pool = names_[i].second == MetaKind::Exception ? m_.signature().exceptions
                                                               : m_.signature().locations;
    for (const auto& nv : pool) {
      b_.names[names_[i].first] = nv.name;
      assign_names(i + 1);
    }
    b_.names.erase(names_[i].first);
  }

  void assign_types(std::size_t i) {
    if (i == free_types_.size()) return prepare();
    for (const Type& t : universe_) {
      b_.types[free_types_[i]] = t;
      assign_types(i + 1);
    }
    b_.types.erase(free_types_[i]);
  }

  int position(const std::string& meta) const {
    auto it = std::find(order_.begin(), order_.end(), meta);
    return it == order_.end() ? -2 : static_cast<int>(it - order_.begin());
  }

  // Position in the binding order after which everything `t` mentions is known.
  int ready_at(const Term& t) const {
    std::vector<std::string> terms;
    collect_term_metas(t, terms);
    std::set<std::string> types;
    collect_type_metas(t, types);
    int r = -1;
    for (const auto& m : terms) r = std::max(r, position(m));
    for (const auto& ty : types) {
      if (b_.types.count(ty)) continue;
      int p = -2;
      for (const auto& d : rule_.derived) {
        if (d.var == ty && (d.from == TypeDerivation::From::Source ||
                            d.from == TypeDerivation::From::Target)) {
          p = position(d.of);
        }
      }
      if (p == -2) return -2;  // never determined
      r = std::max(r, p);
    }
    return r;
  }

  void add_nodes(const Term& t) {
    if (t.kind() == TermKind::Meta) return;
    if (!t.args().empty()) nodes_.push_back({t, ready_at(t)});
    for (const Term& a : t.args()) add_nodes(a);
  }

  void prepare() {
    // Name-derived types.
    std::map<std::string, Type> saved = b_.types;
    for (const auto& d : rule_.derived) {
      if (d.from == TypeDerivation::From::ExceptionValue ||
          d.from == TypeDerivation::From::LocationValue) {
        const std::string& n = b_.names.at(d.of);
        const NamedValue* nv = d.from == TypeDerivation::From::ExceptionValue
                                   ? m_.signature().find_exception(n)
                                   : m_.signature().find_location(n);
        b_.types[d.var] = Type::base(nv->value_type);
      }
    }
    Bindings fixed;
    fixed.types = b_.types;
    fixed.names = b_.names;

    std::vector<EquationPattern> premises = expand_premises(rule_, m_.signature());
    order_.clear();
    for (const auto& p : premises) {
      collect_term_metas(p.lhs, order_);
      collect_term_metas(p.rhs, order_);
    }
    collect_term_metas(rule_.conclusion.lhs, order_);
    collect_term_metas(rule_.conclusion.rhs, order_);

    eqs_.clear();
    nodes_.clear();
    auto add_eq = [&](const EquationPattern& e, bool premise) {
      Term l = instantiate(e.lhs, fixed);
      Term r = instantiate(e.rhs, fixed);
      int ready = std::max(ready_at(l), ready_at(r));
      if (ready_at(l) == -2 || ready_at(r) == -2) ready = -2;
      eqs_.push_back({l, r, e.strength, premise, ready});
      add_nodes(l);
      add_nodes(r);
    };
    for (const auto& p : premises) add_eq(p, true);
    add_eq(rule_.conclusion, false);
    for (const auto& e : eqs_) {
      if (e.ready == -2) {
        b_.types = saved;
        return;  // a type that nothing determines: not enumerable
      }
    }
    guards_.clear();
    for (std::size_t i = 0; i < rule_.guards.size(); ++i) {
      if (disabled_ && i < disabled_->size() && (*disabled_)[i]) continue;
      Rule single;
      single.name = rule_.name;
      single.guards = {rule_.guards[i]};
      int ready = -1;
      const Guard& g = rule_.guards[i];
      if (g.kind != Guard::Kind::Distinct) ready = position(g.meta);
      guards_.push_back({std::move(single), ready});
    }
    typing_.arrows.clear();
    if (!ready_ok(-1, true)) {
      b_.types = saved;
      return;
    }
    assign_homs(0);
    b_.types = saved;
  }

  // Typing (stage A, decorations ignored) or full check (stage B) of
  // everything that became closed at position k.
  bool ready_ok(int k, bool full) {
    const Bindings tb = types_only();
    for (const auto& n : nodes_) {
      if (n.ready != k) continue;
      Arrow a;
      try {
        a = infer(instantiate(n.node, tb), m_.signature(), &typing_);
      } catch (const TypeError&) {
        return false;
      }
      if (full && !in_fragment(which_, a.dec)) return false;
    }
    for (const auto& e : eqs_) {
      if (e.ready != k) continue;
      Arrow l, r;
      try {
        l = infer(instantiate(e.lhs, tb), m_.signature(), &typing_);
        r = infer(instantiate(e.rhs, tb), m_.signature(), &typing_);
      } catch (const TypeError&) {
        return false;
      }
      if (!(l.source == r.source && l.target == r.target)) return false;
      if (full && !(in_fragment(which_, l.dec) && in_fragment(which_, r.dec))) return false;
      if (full && e.premise && !premise_holds(e)) return false;
    }
    if (full) {
      ArrowOf arrow_of = [&](const std::string& m) { return typing_.arrows.at(m); };
      for (const auto& g : guards_) {
        if (g.ready != k) continue;
        if (violated_guard(g.single, b_, arrow_of)) return false;
      }
    }
    return true;
  }

  Denotation side(const Term& t) {
    Term inst = instantiate(t, types_only());
    return denote(inst, m_, &env_);
  }

  Bindings types_only() const {
    Bindings b;
    b.types = b_.types;
    b.names = b_.names;
    return b;
  }

  const Denotation* side_ptr(const Term& t, Denotation& storage) {
    if (t.kind() == TermKind::Meta) return env_.at(t.name());
    storage = side(t);
    return &storage;
  }

  bool premise_holds(const EqCheck& e) {
    Denotation ls, rs;
    const Denotation* l = side_ptr(e.lhs, ls);
    const Denotation* r = side_ptr(e.rhs, rs);
    bool timeout = false;
    Strength s = *instantiate(e.strength, b_);
    return first_disagreement(*l, *r, s, m_, &timeout) < 0 && !timeout;
  }

  void set_derived(const std::string& meta, const Arrow& a) {
    for (const auto& d : rule_.derived) {
      if (d.of != meta) continue;
      if (d.from == TypeDerivation::From::Source) b_.types[d.var] = a.source;
      if (d.from == TypeDerivation::From::Target) b_.types[d.var] = a.target;
    }
  }

  void assign_homs(std::size_t k) {
    if (k == order_.size()) {
      homs_.assign(order_.size(), nullptr);
      for (std::size_t i = 0; i < order_.size(); ++i) {
        const Arrow& a = typing_.arrows.at(order_[i]);
        homs_[i] = &u_.by_hom.at({a.source, a.target});
      }
      bind(0);
      return;
    }
    const std::string& m = order_[k];
    for (const auto& [hom, ids] : u_.by_hom) {
      std::map<std::string, Type> saved = b_.types;
      typing_.arrows[m] = Arrow{hom.first, hom.second, {0, 0}};
      set_derived(m, typing_.arrows[m]);
      if (ready_ok(static_cast<int>(k), false)) assign_homs(k + 1);
      b_.types = std::move(saved);
    }
    typing_.arrows.erase(m);
  }

  // Candidates for order_[k]: a premise `?a REL ?m` with ?a bound pins ?m to
  // ?a's observation class.
  const std::vector<int>* solved(std::size_t k, const std::vector<int>& all) {
    const std::string& m = order_[k];
    for (const auto& e : eqs_) {
      if (!e.premise || e.lhs.kind() != TermKind::Meta || e.rhs.kind() != TermKind::Meta) continue;
      std::string other;
      if (e.rhs.name() == m) other = e.lhs.name();
      if (e.lhs.name() == m) other = e.rhs.name();
      if (other.empty() || other == m) continue;
      int p = position(other);
      if (p < 0 || p >= static_cast<int>(k)) continue;
      Strength s = *instantiate(e.strength, b_);
      auto& index = buckets_[{&all, s.exc_strict * 2 + s.st_strict}];
      if (index.empty()) {
        for (int id : all) {
          index[projection_key(u_.classes[id].den, s, m_.exception_count(), m_.state_count())]
              .push_back(id);
        }
      }
      std::string key =
          projection_key(*env_.at(other), s, m_.exception_count(), m_.state_count());
      auto it = index.find(key);
      static const std::vector<int> kNone;
      return it == index.end() ? &kNone : &it->second;
    }
    return nullptr;
  }

  void bind(std::size_t k) {
    if (k == order_.size()) return conclude();
    const std::string& m = order_[k];
    const std::vector<int>& all = *homs_[k];
    const std::vector<int>* candidates = solved(k, all);
    if (!candidates) candidates = &all;
    const Arrow typed = typing_.arrows.at(m);
    for (int id : *candidates) {
      const Class& c = u_.classes[id];
      typing_.arrows[m] = c.arrow;
      env_[m] = &c.den;
      b_.terms[m] = c.rep;
      if (ready_ok(static_cast<int>(k), true)) bind(k + 1);
    }
    typing_.arrows[m] = typed;
    env_.erase(m);
    b_.terms.erase(m);
  }

  std::string instance_text() const {
    std::string out;
    auto sep = [&]() {
      if (!out.empty()) out += "; ";
    };
    for (const auto& m : order_) {
      sep();
      out += m.substr(1) + " := " + pretty(b_.terms.at(m));
    }
    for (const auto& [n, v] : b_.names) {
      sep();
      out += n.substr(1) + " := " + v;
    }
    for (const auto& n : free_types_) {
      sep();
      out += n.substr(1) + " := " + to_string(b_.types.at(n));
    }
    for (const auto& [n, v] : b_.flags) {
      sep();
      out += n.substr(1) + " := " + (v ? "strict" : "weak");
    }
    return out;
  }

  void conclude() {
    const EqCheck& c = eqs_.back();
    Denotation ls, rs;
    const Denotation* l = side_ptr(c.lhs, ls);
    const Denotation* r = side_ptr(c.rhs, rs);
    Strength s = *instantiate(c.strength, b_);
    bool timeout = false;
    long at = first_disagreement(*l, *r, s, m_, &timeout);
    ++report_.instances[rule_.name];
    if (at < 0 && !timeout) return;
    Equation eq{instantiate(c.lhs, b_), instantiate(c.rhs, b_), s};
    HoldsResult h;
    if (at < 0) {
      h.kind = HoldsResult::Kind::Timeout;
      long n = static_cast<long>(l->table.size());
      for (at = 0; at < n && l->table[at].timeout() == r->table[at].timeout(); ++at) {
      }
    } else {
      h.kind = HoldsResult::Kind::Counterexample;
    }
    h.input_value = static_cast<int>(at / m_.state_count());
    h.input_state = static_cast<int>(at % m_.state_count());
    h.lhs = l->table[at];
    h.rhs = r->table[at];
    HarnessFinding f{rule_.name, instance_text(),
                     pretty(eq) + ": " + describe(h, l->source, l->target, m_)};
    if (h.kind == HoldsResult::Kind::Counterexample) {
      report_.counterexamples.push_back(std::move(f));
    } else {
      report_.timeouts.push_back(std::move(f));
    }
  }

  const Rule& rule_;
  RuleSetId which_;
  const Model& m_;
  const Universe& u_;
  const std::vector<bool>* disabled_;
  HarnessReport& report_;

  std::vector<Type> universe_;
  std::vector<std::pair<std::string, MetaKind>> names_;
  std::vector<std::string> flags_;
  std::vector<std::string> free_types_;

  Bindings b_;
  std::vector<std::string> order_;
  std::vector<EqCheck> eqs_;
  std::vector<NodeCheck> nodes_;
  std::vector<GuardCheck> guards_;
  ArrowMap typing_;
  MetaDenotations env_;
  std::vector<const std::vector<int>*> homs_;
  std::map<std::pair<const std::vector<int>*, int>,
           std::unordered_map<std::string, std::vector<int>>>
      buckets_;
};

}  // namespace

HarnessReport validate_ruleset(RuleSetId which, const Model& m, int depth_bound,
                               const HarnessOptions& options) {
  std::vector<Type> universe =
      options.universe.empty() ? default_universe(m.signature()) : options.universe;
  Universe u(m, which, depth_bound, universe);
  HarnessReport report;
  report.classes = static_cast<long>(u.classes.size());
  for (const Rule& rule : ruleset(which)) {
    if (rule.structural) continue;
    if (!options.rules.empty() &&
        std::find(options.rules.begin(), options.rules.end(), rule.name) == options.rules.end()) {
      continue;
    }
    const std::vector<bool>* disabled = nullptr;
    auto it = options.disabled_guards.find(rule.name);
    if (it != options.disabled_guards.end()) disabled = &it->second;
    report.instances[rule.name] = 0;
    RuleRunner(rule, which, m, u, disabled, report).run(universe);
  }
  std::sort(report.counterexamples.begin(), report.counterexamples.end());
  std::sort(report.timeouts.begin(), report.timeouts.end());
  return report;
}

}  // namespace decolog
