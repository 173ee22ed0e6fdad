#include "lcgeom/polynomial.hpp"

#include <cmath>
#include <cstdio>

namespace lcgeom::expr {

namespace {

std::string variable_key(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "v:%06zu", index);
  return buf;
}

void collect_dependencies(const Node& n, std::vector<bool>& deps) {
  switch (n.kind) {
    case NodeKind::kConstant: return;
    case NodeKind::kVariable: deps[n.var] = true; return;
    case NodeKind::kNegate:
    case NodeKind::kPow:
    case NodeKind::kCall: collect_dependencies(*n.lhs, deps); return;
    default:
      collect_dependencies(*n.lhs, deps);
      collect_dependencies(*n.rhs, deps);
  }
}

CanonicalPoly constant_poly(const VarsPtr& vars, const Rational& c) {
  CanonicalPoly p(vars);
  p.add_term({}, c);
  return p;
}

CanonicalPoly atom_poly(const VarsPtr& vars, const std::string& key, const Atom& atom, int exponent) {
  CanonicalPoly p(vars);
  p.add_atom(key, atom);
  p.add_term({{key, exponent}}, Rational(1));
  return p;
}

CanonicalPoly opaque(const VarsPtr& vars, const std::string& key, NodePtr node, int exponent = 1) {
  Atom atom;
  atom.node = std::move(node);
  atom.depends_on.assign(vars->size(), false);
  collect_dependencies(*atom.node, atom.depends_on);
  return atom_poly(vars, key, atom, exponent);
}

bool single_term(const CanonicalPoly& p) { return p.terms().size() == 1; }

// 1/p for a single-term p.
CanonicalPoly invert_single(const CanonicalPoly& p) {
  CanonicalPoly out(p.vars());
  const auto& [mono, coeff] = *p.terms().begin();
  Monomial inv;
  for (const auto& [k, e] : mono) inv[k] = -e;
  for (const auto& [k, a] : p.atoms()) out.add_atom(k, a);
  out.add_term(inv, Rational(1 / coeff));
  return out;
}

CanonicalPoly power_int(const CanonicalPoly& base, long e) {
  CanonicalPoly result = constant_poly(base.vars(), Rational(1));
  CanonicalPoly b = base;
  while (e > 0) {
    if (e & 1) result = result * b;
    e >>= 1;
    if (e > 0) b = b * b;
  }
  return result;
}

// Normalizes q to leading coefficient 1 and returns the stripped factor.
Rational make_monic(CanonicalPoly& q) {
  const Rational lead = q.terms().begin()->second;
  q = q.scaled(Rational(1 / lead));
  return lead;
}

CanonicalPoly canon(const NodePtr& n, const VarsPtr& vars);

CanonicalPoly reciprocal(const CanonicalPoly& q, long power) {
  if (q.is_zero()) throw DomainError("0", "division by zero in canonical expansion");
  if (single_term(q)) return power_int(invert_single(q), power);
  CanonicalPoly monic = q;
  const Rational lead = make_monic(monic);
  const Expression e = monic.to_expression();
  const std::string key = "inv(" + e.to_string() + ")";
  CanonicalPoly atom = opaque(q.vars(), key, raw::power(e.node(), Rational(-1)), static_cast<int>(power));
  mpq_class f = 1;
  for (long i = 0; i < power; ++i) f /= lead;
  return atom.scaled(f);
}

}  // namespace

bool CanonicalPoly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

void CanonicalPoly::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  Monomial clean;
  for (const auto& [k, e] : m) {
    if (e != 0) clean[k] = e;
  }
  auto [it, inserted] = terms_.emplace(clean, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

void CanonicalPoly::merge_atoms(const CanonicalPoly& o) {
  for (const auto& [k, a] : o.atoms_) atoms_.emplace(k, a);
}

CanonicalPoly CanonicalPoly::operator+(const CanonicalPoly& o) const {
  CanonicalPoly r = *this;
  r.merge_atoms(o);
  for (const auto& [m, c] : o.terms_) r.add_term(m, c);
  return r;
}

CanonicalPoly CanonicalPoly::operator-(const CanonicalPoly& o) const { return *this + o.scaled(Rational(-1)); }

CanonicalPoly CanonicalPoly::operator*(const CanonicalPoly& o) const {
  CanonicalPoly r(vars_);
  r.merge_atoms(*this);
  r.merge_atoms(o);
  for (const auto& [m1, c1] : terms_) {
    for (const auto& [m2, c2] : o.terms_) {
      Monomial m = m1;
      for (const auto& [k, e] : m2) m[k] += e;
      r.add_term(m, Rational(c1 * c2));
    }
  }
  return r;
}

CanonicalPoly CanonicalPoly::scaled(const Rational& c) const {
  CanonicalPoly r(vars_);
  r.atoms_ = atoms_;
  for (const auto& [m, coeff] : terms_) r.add_term(m, Rational(coeff * c));
  return r;
}

Expression CanonicalPoly::to_expression() const {
  Expression sum = Expression::constant(vars_, Rational(0));
  for (const auto& [mono, coeff] : terms_) {
    Expression term = Expression::constant(vars_, Rational(1));
    for (const auto& [key, e] : mono) {
      const Atom& atom = atoms_.at(key);
      term = term * pow(Expression(vars_, atom.node), Rational(e));
    }
    if (coeff < 0) {
      sum = sum - Rational(-coeff) * term;
    } else {
      sum = sum + coeff * term;
    }
  }
  return sum;
}

bool CanonicalPoly::split_by_variables(const std::vector<std::size_t>& vars,
                                       std::map<std::vector<int>, CanonicalPoly>& out) const {
  out.clear();
  std::vector<std::string> keys;
  for (std::size_t v : vars) keys.push_back(variable_key(v));
  for (const auto& [mono, coeff] : terms_) {
    std::vector<int> exps(vars.size(), 0);
    Monomial rest;
    for (const auto& [k, e] : mono) {
      bool matched = false;
      for (std::size_t i = 0; i < keys.size(); ++i) {
        if (k == keys[i]) {
          if (e < 0) return false;
          exps[i] = e;
          matched = true;
        }
      }
      if (matched) continue;
      const Atom& atom = atoms_.at(k);
      for (std::size_t v : vars) {
        if (atom.depends_on[v]) return false;
      }
      rest[k] = e;
    }
    auto it = out.find(exps);
    if (it == out.end()) it = out.emplace(exps, CanonicalPoly(vars_)).first;
    it->second.atoms_ = atoms_;
    it->second.add_term(rest, coeff);
  }
  return true;
}

namespace {

CanonicalPoly canon(const NodePtr& n, const VarsPtr& vars) {
  switch (n->kind) {
    case NodeKind::kConstant: {
      if (n->exact) return constant_poly(vars, *n->exact);
      if (!std::isfinite(n->value)) throw DomainError("constant", "non-finite constant");
      return constant_poly(vars, Rational(n->value));
    }
    case NodeKind::kVariable: {
      Atom atom;
      atom.node = n;
      atom.is_variable = true;
      atom.var = n->var;
      atom.depends_on.assign(vars->size(), false);
      atom.depends_on[n->var] = true;
      return atom_poly(vars, variable_key(n->var), atom, 1);
    }
    case NodeKind::kNegate: return canon(n->lhs, vars).scaled(Rational(-1));
    case NodeKind::kAdd: return canon(n->lhs, vars) + canon(n->rhs, vars);
    case NodeKind::kSub: return canon(n->lhs, vars) - canon(n->rhs, vars);
    case NodeKind::kMul: return canon(n->lhs, vars) * canon(n->rhs, vars);
    case NodeKind::kDiv: return canon(n->lhs, vars) * reciprocal(canon(n->rhs, vars), 1);
    case NodeKind::kPow: {
      CanonicalPoly base = canon(n->lhs, vars);
      if (is_integer(n->exponent)) {
        const long e = n->exponent.get_num().get_si();
        if (e >= 0) {
          if (single_term(base) || e <= 16) return power_int(base, e);
        } else {
          return reciprocal(base, -e);
        }
      }
      const Expression b = base.to_expression();
      const std::string key = "pow(" + b.to_string() + "," + n->exponent.get_str() + ")";
      return opaque(vars, key, raw::power(b.node(), n->exponent));
    }
    case NodeKind::kCall: {
      const Expression arg = canon(n->lhs, vars).to_expression();
      const Expression folded = call(n->func, arg);
      if (folded.is_constant()) return canon(folded.node(), vars);
      const std::string key = std::string(function_name(n->func)) + "(" + arg.to_string() + ")";
      return opaque(vars, key, folded.node());
    }
  }
  throw std::logic_error("canon: unknown node");
}

}  // namespace

CanonicalPoly canonicalize(const Expression& e) { return canon(e.node(), e.vars()); }

bool is_symbolically_zero(const Expression& e) { return canonicalize(e).is_zero(); }

bool symbolically_equal(const Expression& a, const Expression& b) { return is_symbolically_zero(a - b); }

Expression expand(const Expression& e) { return canonicalize(e).to_expression(); }

}  // namespace lcgeom::expr
