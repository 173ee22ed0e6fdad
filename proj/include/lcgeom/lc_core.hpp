#pragma once

// Lagrangian contact structures in adapted coordinates (x^1..x^n, u, p_1..p_n),
// described by symmetric defining functions f_ij. Coordinate order everywhere
// is x (indices 0..n-1), u (index n), p (indices n+1..2n).

#include <Eigen/Dense>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lcgeom/expr.hpp"
#include "lcgeom/model.hpp"

namespace lcgeom::lc {

using expr::Expression;
using expr::VarsPtr;
using Vec = Eigen::VectorXd;

class StructureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LCStructure {
 public:
  // f must be n x n, symmetric as stored trees, over variables(n) (any
  // expression over a list with the same names is rebound).
  LCStructure(std::size_t n, std::vector<std::vector<Expression>> f);

  // Convenience: parse the n x n entries of f.
  static LCStructure from_strings(std::size_t n, const std::vector<std::vector<std::string>>& f);

  // x1..xn, u, p1..pn
  static VarsPtr variables(std::size_t n);

  std::size_t n() const { return n_; }
  std::size_t dim() const { return 2 * n_ + 1; }
  const VarsPtr& vars() const { return vars_; }
  const Expression& f(std::size_t i, std::size_t j) const { return f_[i][j]; }

  std::size_t x_index(std::size_t i) const { return i; }
  std::size_t u_index() const { return n_; }
  std::size_t p_index(std::size_t i) const { return n_ + 1 + i; }

  Eigen::MatrixXd f_at(const Vec& q) const;

  // X_i(F) = dF/dx^i + p_i dF/du + f_ij dF/dp_j as an Expression.
  Expression frame_derivative(std::size_t i, const Expression& F) const;

 private:
  std::size_t n_;
  VarsPtr vars_;
  std::vector<std::vector<Expression>> f_;
};

// The frame X_i of E at q, components in (x, u, p) order.
std::vector<Vec> frame_E(const LCStructure& s, const Vec& q);

struct CoframeValue {
  Vec sigma;
  std::vector<Vec> theta;
  std::vector<Vec> pi;
};

CoframeValue coframe(const LCStructure& s, const Vec& q);

// D[(i*n + j)*n + l] = X_i(f_jl) - X_j(f_il).
struct Defect {
  std::size_t n = 0;
  std::vector<double> values;
  double at(std::size_t i, std::size_t j, std::size_t l) const { return values[(i * n + j) * n + l]; }
  double max_abs() const;
};

Defect integrability_defect(const LCStructure& s, const Vec& q);
// Symbolic defect entries in the same layout.
std::vector<Expression> defect_expressions(const LCStructure& s);

struct Box {
  Vec lo;
  Vec hi;
};

struct IntegrabilityReport {
  bool integrable = false;
  bool symbolic_zero = false;  // every defect entry expands to 0
  double max_defect = 0.0;     // over the sampled points
  std::size_t samples = 0;
  std::size_t skipped = 0;     // sample points outside the expression domain
};

// Halton points in the box (deterministic).
std::vector<Vec> halton_points(const Box& box, std::size_t count);

IntegrabilityReport is_integrable(const LCStructure& s, const Box& box, double tol = 1e-10,
                                  std::size_t samples = 256);

// Coframe rescaled by a function fscale of (x, u, p):
// sigma^ = e^{2f} sigma, theta^i^ = e^f (theta^i - 2 f^i sigma),
// pi_i^ = e^f (pi_i + 2 f_i sigma), where df = f^i pi_i + f_i theta^i + f_0 sigma.
class RescaledCoframe {
 public:
  RescaledCoframe(const LCStructure& s, const Expression& fscale);

  CoframeValue at(const Vec& q) const;
  // (f^1..f^n, f_1..f_n, f_0) at q.
  Vec expansion(const Vec& q) const;

 private:
  LCStructure s_;
  Expression f_;
  std::vector<Expression> df_;
};

using model::TangentKind;

// Classification of a tangent vector through the coframe pairings.
TangentKind classify_point_vector(const LCStructure& s, const Vec& q, const Vec& v);

// Flat embedding: v = (x, u), w = (p, u - x.p); satisfies v.w' - v_{n+1} + w_{n+1} = 0
// where w' are the first n entries of w.
std::pair<qla::QVec, qla::QVec> flat_embedding(const qla::QVec& q);
Rational hyperquadric_residual(const qla::QVec& v, const qla::QVec& w);

}  // namespace lcgeom::lc
