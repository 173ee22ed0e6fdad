#pragma once

// Projective structures and the LC structures they induce on the
// projectivized cotangent bundle. The base has coordinates
// (x^1..x^n, u) = (x^1..x^{n+1}); indices below are 0-based, so the index
// m-1 = n refers to u.

#include <array>
#include <stdexcept>
#include <vector>

#include "lcgeom/expr.hpp"
#include "lcgeom/lc_core.hpp"

namespace lcgeom::proj {

using expr::Expression;
using expr::VarsPtr;

class ProjectiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotProjective : public ProjectiveError {
 public:
  using ProjectiveError::ProjectiveError;
};

class ChristoffelField {
 public:
  // All entries zero; m = n+1 >= 2.
  explicit ChristoffelField(std::size_t m);

  // x1..x{m-1}, u
  static VarsPtr variables(std::size_t m);

  std::size_t m() const { return m_; }
  std::size_t n() const { return m_ - 1; }
  const VarsPtr& vars() const { return vars_; }

  const Expression& get(std::size_t c, std::size_t a, std::size_t b) const { return g_[index(c, a, b)]; }
  // Sets both Gamma^c_ab and Gamma^c_ba.
  void set(std::size_t c, std::size_t a, std::size_t b, const Expression& e);

  // sum_a Gamma^a_{ac}
  Expression trace(std::size_t c) const;
  bool is_symmetric() const;   // symbolic
  bool is_trace_free() const;  // symbolic
  // Throws ProjectiveError unless symmetric and trace-free.
  void validate() const;

  // Gamma^c_ab - (delta^c_a tr_b + delta^c_b tr_a)/(m+1)
  ChristoffelField trace_free_part() const;

  double eval(std::size_t c, std::size_t a, std::size_t b, std::span<const double> x) const {
    return get(c, a, b).eval(x);
  }

 private:
  std::size_t index(std::size_t c, std::size_t a, std::size_t b) const { return (c * m_ + a) * m_ + b; }

  std::size_t m_;
  VarsPtr vars_;
  std::vector<Expression> g_;
};

// The cubic defining functions induced by a trace-free Gamma.
lc::LCStructure fij_from_christoffels(const ChristoffelField& gamma);

// Recovers the trace-free Gamma from cubic f_ij; throws NotProjective.
ChristoffelField christoffels_from_fij(const lc::LCStructure& s);

// m = 2: A_0 = -G^2_11, A_1 = G^1_11 - 2 G^2_12, A_2 = 2 G^1_12 - G^2_22, A_3 = G^1_22.
std::array<Expression, 4> ode_coeffs_dim2(const ChristoffelField& gamma);
ChristoffelField christoffels_from_ode_coeffs(const std::array<Expression, 4>& a);

// Gamma^c_ab + delta^c_a Y_b + delta^c_b Y_a with Y = d(fscale); not renormalized.
ChristoffelField projective_change(const ChristoffelField& gamma, const Expression& fscale);

}  // namespace lcgeom::proj
