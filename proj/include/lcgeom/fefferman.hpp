#pragma once

// Metric fields given by symbolic coefficients, and the Fefferman-type metrics
// of LC and projective structures. Symmetric products follow
// a (.) b = a (x) b + b (x) a.

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lcgeom/expr.hpp"
#include "lcgeom/lc_core.hpp"
#include "lcgeom/projective.hpp"

namespace lcgeom::feff {

using expr::Expression;
using expr::VarsPtr;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

class MetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotIntegrable : public MetricError {
 public:
  using MetricError::MetricError;
};

class MetricField {
 public:
  // g must be d x d and symmetric as stored trees.
  MetricField(VarsPtr coords, std::vector<std::vector<Expression>> g);

  std::size_t dim() const { return coords_->size(); }
  const VarsPtr& coords() const { return coords_; }
  const Expression& coefficient(std::size_t a, std::size_t b) const { return g_[a][b]; }

  Mat at(const Vec& q) const;
  Expression derivative(std::size_t a, std::size_t b, std::size_t k) const { return g_[a][b].diff(k); }

  // Counts of positive, negative and (|lambda| <= zero_tol) eigenvalues.
  struct Signature {
    int positive = 0;
    int negative = 0;
    int zero = 0;
  };
  Signature signature(const Vec& q, double zero_tol = 1e-10) const;

 private:
  VarsPtr coords_;
  std::vector<std::vector<Expression>> g_;
};

// x1..xn, u, p1..pn, s
VarsPtr fefferman_coords(std::size_t n);
// x1..xn, u, y1..y{n+1}
VarsPtr patterson_walker_coords(std::size_t n);

// theta^i (.) pi_i + sigma (.) varpi with
// varpi = 1/(n+2) sum_ij ( -1/(n+1) d2f_ij/dp_i dp_j sigma - 2 df_ij/dp_i theta^j ) + 2 ds.
MetricField build_fefferman(const lc::LCStructure& s);
// Same, after checking the integrability defect numerically on the box.
MetricField build_fefferman_guarded(const lc::LCStructure& s, const lc::Box& box, double tol = 1e-10);

// dx^a (.) dy_a - y_c Gamma^c_ab dx^a (.) dx^b
MetricField build_patterson_walker(const proj::ChristoffelField& gamma);
// (G^{n+1}_bc - p_k G^k_bc) dx^b (.) dx^c + dx^i (.) dp_i + 2 (du - p_i dx^i) (.) ds
MetricField build_fefferman_projective(const proj::ChristoffelField& gamma);

enum class Branch { kPositive, kNegative };

// (x, u, p, s) -> (x, u, y) with y_{n+1} = +-e^{-2s}, y_i = -p_i y_{n+1}.
Vec pw_transform(const Vec& q, Branch branch);
// Inverse: p_i = -y_i / y_{n+1}, s = -ln|y_{n+1}|/2.
Vec pw_inverse(const Vec& y);
// Jacobian of pw_transform at q.
Mat pw_jacobian(const Vec& q, Branch branch);
// J^T g_PW(pw_transform(q)) J.
Mat pw_pullback(const MetricField& pw, const Vec& q, Branch branch);

// max_ab |d g_ab / d coordinate| at q: symbolic, exactly 0 when no coefficient
// depends on the coordinate. With h > 0 a central difference is used instead.
double lie_derivative_check(const MetricField& g, std::size_t coordinate, const Vec& q, double h = 0.0);

}  // namespace lcgeom::feff
