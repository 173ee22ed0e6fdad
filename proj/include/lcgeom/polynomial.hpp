#pragma once

// Canonical expanded form of an Expression: a finite sum of rational
// coefficients times Laurent monomials in "atoms". Atoms are the declared
// variables plus opaque subexpressions (function calls, fractional powers,
// reciprocals of sums) identified by their canonical printed form.
//
// Two expressions with equal canonical forms are equal as functions; the
// converse does not hold (no transcendental identities), so a non-empty form
// only means "not shown to be zero".

#include <map>
#include <string>
#include <vector>

#include "lcgeom/expr.hpp"

namespace lcgeom::expr {

struct Atom {
  NodePtr node;                     // the atom as an expression tree
  std::vector<bool> depends_on;     // per declared variable
  bool is_variable = false;
  std::size_t var = 0;              // when is_variable
};

using Monomial = std::map<std::string, int>;  // atom key -> nonzero exponent

class CanonicalPoly {
 public:
  explicit CanonicalPoly(VarsPtr vars) : vars_(std::move(vars)) {}

  const VarsPtr& vars() const { return vars_; }
  const std::map<Monomial, Rational>& terms() const { return terms_; }
  const std::map<std::string, Atom>& atoms() const { return atoms_; }

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;

  void add_term(const Monomial& m, const Rational& c);
  void add_atom(const std::string& key, const Atom& atom) { atoms_.emplace(key, atom); }

  CanonicalPoly operator+(const CanonicalPoly& o) const;
  CanonicalPoly operator-(const CanonicalPoly& o) const;
  CanonicalPoly operator*(const CanonicalPoly& o) const;
  CanonicalPoly scaled(const Rational& c) const;

  // Rebuild an Expression (terms in canonical order).
  Expression to_expression() const;

  // Split by powers of the given variables: key is the exponent vector of
  // those variables, value the remaining coefficient polynomial. Fails
  // (returns false) if a variable appears with a negative exponent or inside
  // an opaque atom.
  bool split_by_variables(const std::vector<std::size_t>& vars,
                          std::map<std::vector<int>, CanonicalPoly>& out) const;

 private:
  void merge_atoms(const CanonicalPoly& o);

  VarsPtr vars_;
  std::map<Monomial, Rational> terms_;
  std::map<std::string, Atom> atoms_;
};

CanonicalPoly canonicalize(const Expression& e);

// True when e expands to the zero polynomial.
bool is_symbolically_zero(const Expression& e);
bool symbolically_equal(const Expression& a, const Expression& b);

// Expand and rebuild: a normalized Expression equal to e.
Expression expand(const Expression& e);

}  // namespace lcgeom::expr
