#include "lcgeom/fefferman.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace lcgeom::feff {

namespace {

using Covector = std::vector<Expression>;

Expression zero(const VarsPtr& v) { return Expression::constant(v, Rational(0)); }
Expression one(const VarsPtr& v) { return Expression::constant(v, Rational(1)); }

Expression on(const Expression& e, const VarsPtr& vars) { return *e.vars() == *vars ? e : e.rebind(vars); }

// a (.) b accumulated into g
void add_sym(std::vector<std::vector<Expression>>& g, const Covector& a, const Covector& b) {
  const std::size_t d = g.size();
  for (std::size_t k = 0; k < d; ++k) {
    if (a[k].is_zero() && b[k].is_zero()) continue;
    for (std::size_t l = 0; l < d; ++l) {
      Expression term = a[k] * b[l] + b[k] * a[l];
      if (!term.is_zero()) g[k][l] = g[k][l] + term;
    }
  }
}

void symmetrize_storage(std::vector<std::vector<Expression>>& g) {
  for (std::size_t k = 0; k < g.size(); ++k) {
    for (std::size_t l = 0; l < k; ++l) g[k][l] = g[l][k];
  }
}

}  // namespace

MetricField::MetricField(VarsPtr coords, std::vector<std::vector<Expression>> g)
    : coords_(std::move(coords)), g_(std::move(g)) {
  const std::size_t d = coords_->size();
  if (g_.size() != d) throw MetricError("metric matrix has the wrong size");
  for (auto& row : g_) {
    if (row.size() != d) throw MetricError("metric matrix has the wrong size");
    for (auto& e : row) e = on(e, coords_);
  }
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a + 1; b < d; ++b) {
      if (!expr::structurally_equal(g_[a][b], g_[b][a])) throw MetricError("metric coefficients are not symmetric");
    }
  }
}

Mat MetricField::at(const Vec& q) const {
  const std::size_t d = dim();
  if (static_cast<std::size_t>(q.size()) != d) throw MetricError("point has the wrong dimension");
  const std::span<const double> pt(q.data(), d);
  Mat m(d, d);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a; b < d; ++b) {
      m(a, b) = g_[a][b].eval(pt);
      m(b, a) = m(a, b);
    }
  }
  return m;
}

MetricField::Signature MetricField::signature(const Vec& q, double zero_tol) const {
  Eigen::SelfAdjointEigenSolver<Mat> es(at(q), Eigen::EigenvaluesOnly);
  Signature s;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double l = es.eigenvalues()(i);
    if (std::abs(l) <= zero_tol) {
      ++s.zero;
    } else if (l > 0) {
      ++s.positive;
    } else {
      ++s.negative;
    }
  }
  return s;
}

VarsPtr fefferman_coords(std::size_t n) {
  auto names = lc::LCStructure::variables(n)->names();
  names.push_back("s");
  return expr::make_vars(std::move(names));
}

VarsPtr patterson_walker_coords(std::size_t n) {
  auto names = proj::ChristoffelField::variables(n + 1)->names();
  for (std::size_t a = 1; a <= n + 1; ++a) names.push_back("y" + std::to_string(a));
  return expr::make_vars(std::move(names));
}

MetricField build_fefferman(const lc::LCStructure& s) {
  const std::size_t n = s.n();
  const std::size_t d = 2 * n + 2;
  const std::size_t U = n;
  const std::size_t S = 2 * n + 1;
  auto P = [n](std::size_t i) { return n + 1 + i; };
  const VarsPtr v = fefferman_coords(n);

  std::vector<std::vector<Expression>> f(n, std::vector<Expression>(n, zero(v)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) f[i][j] = on(s.f(i, j), v);
  }

  Covector sigma(d, zero(v));
  sigma[U] = one(v);
  for (std::size_t i = 0; i < n; ++i) sigma[i] = -Expression::variable(v, P(i));

  std::vector<Covector> theta(n, Covector(d, zero(v)));
  std::vector<Covector> pi(n, Covector(d, zero(v)));
  for (std::size_t i = 0; i < n; ++i) {
    theta[i][i] = one(v);
    pi[i][P(i)] = one(v);
    for (std::size_t j = 0; j < n; ++j) pi[i][j] = -f[i][j];
  }

  // varpi
  Expression c_sigma = zero(v);
  std::vector<Expression> c_theta(n, zero(v));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Expression dfi = f[i][j].diff(P(i));
      c_sigma = c_sigma + dfi.diff(P(j));
      c_theta[j] = c_theta[j] + dfi;
    }
  }
  c_sigma = Rational(-1, static_cast<long>((n + 1) * (n + 2))) * c_sigma;
  for (auto& c : c_theta) c = Rational(-2, static_cast<long>(n + 2)) * c;
  Covector varpi(d, zero(v));
  for (std::size_t k = 0; k < d; ++k) {
    Expression e = c_sigma * sigma[k];
    for (std::size_t j = 0; j < n; ++j) e = e + c_theta[j] * theta[j][k];
    varpi[k] = e;
  }
  varpi[S] = varpi[S] + Rational(2);

  std::vector<std::vector<Expression>> g(d, std::vector<Expression>(d, zero(v)));
  for (std::size_t i = 0; i < n; ++i) add_sym(g, theta[i], pi[i]);
  add_sym(g, sigma, varpi);
  for (auto& row : g) {
    for (auto& e : row) e = e.simplified();
  }
  symmetrize_storage(g);
  return MetricField(v, std::move(g));
}

MetricField build_fefferman_guarded(const lc::LCStructure& s, const lc::Box& box, double tol) {
  const auto rep = lc::is_integrable(s, box, tol);
  if (!rep.integrable) {
    throw NotIntegrable("structure is not integrable on the box (max defect " + std::to_string(rep.max_defect) + ")");
  }
  return build_fefferman(s);
}

MetricField build_patterson_walker(const proj::ChristoffelField& gamma) {
  gamma.validate();
  const std::size_t m = gamma.m();
  const VarsPtr v = patterson_walker_coords(m - 1);
  std::vector<std::vector<Expression>> g(2 * m, std::vector<Expression>(2 * m, zero(v)));
  for (std::size_t a = 0; a < m; ++a) {
    g[a][m + a] = one(v);
    for (std::size_t b = a; b < m; ++b) {
      Expression e = zero(v);
      for (std::size_t c = 0; c < m; ++c) {
        e = e + Expression::variable(v, m + c) * on(gamma.get(c, a, b), v);
      }
      g[a][b] = (Rational(-2) * e).simplified();
    }
  }
  symmetrize_storage(g);
  return MetricField(v, std::move(g));
}

MetricField build_fefferman_projective(const proj::ChristoffelField& gamma) {
  gamma.validate();
  const std::size_t m = gamma.m();
  const std::size_t n = m - 1;
  const std::size_t d = 2 * n + 2;
  const std::size_t S = 2 * n + 1;
  const VarsPtr v = fefferman_coords(n);
  std::vector<std::vector<Expression>> g(d, std::vector<Expression>(d, zero(v)));
  // the base block uses indices 0..n, which coincide with x1..xn, u
  for (std::size_t b = 0; b < m; ++b) {
    for (std::size_t c = b; c < m; ++c) {
      Expression e = on(gamma.get(n, b, c), v);
      for (std::size_t k = 0; k < n; ++k) e = e - Expression::variable(v, n + 1 + k) * on(gamma.get(k, b, c), v);
      g[b][c] = (Rational(2) * e).simplified();
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    g[i][n + 1 + i] = one(v);
    g[i][S] = (Rational(-2) * Expression::variable(v, n + 1 + i)).simplified();
  }
  g[n][S] = Expression::constant(v, Rational(2));
  symmetrize_storage(g);
  return MetricField(v, std::move(g));
}

Vec pw_transform(const Vec& q, Branch branch) {
  const auto n = static_cast<Eigen::Index>((q.size() - 2) / 2);
  const double ylast = (branch == Branch::kPositive ? 1.0 : -1.0) * std::exp(-2.0 * q(2 * n + 1));
  Vec y(2 * n + 2);
  y.head(n + 1) = q.head(n + 1);
  for (Eigen::Index i = 0; i < n; ++i) y(n + 1 + i) = -q(n + 1 + i) * ylast;
  y(2 * n + 1) = ylast;
  return y;
}

Vec pw_inverse(const Vec& y) {
  const auto n = static_cast<Eigen::Index>((y.size() - 2) / 2);
  const double ylast = y(2 * n + 1);
  if (ylast == 0.0) throw MetricError("pw_inverse: y_{n+1} = 0 is outside the image");
  Vec q(2 * n + 2);
  q.head(n + 1) = y.head(n + 1);
  for (Eigen::Index i = 0; i < n; ++i) q(n + 1 + i) = -y(n + 1 + i) / ylast;
  q(2 * n + 1) = -0.5 * std::log(std::abs(ylast));
  return q;
}

Mat pw_jacobian(const Vec& q, Branch branch) {
  const auto n = static_cast<Eigen::Index>((q.size() - 2) / 2);
  const Eigen::Index d = 2 * n + 2;
  const Eigen::Index S = 2 * n + 1;
  const double ylast = (branch == Branch::kPositive ? 1.0 : -1.0) * std::exp(-2.0 * q(S));
  Mat J = Mat::Zero(d, d);
  for (Eigen::Index a = 0; a <= n; ++a) J(a, a) = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    J(n + 1 + i, n + 1 + i) = -ylast;
    J(n + 1 + i, S) = 2.0 * q(n + 1 + i) * ylast;
  }
  J(S, S) = -2.0 * ylast;
  return J;
}

Mat pw_pullback(const MetricField& pw, const Vec& q, Branch branch) {
  const Mat J = pw_jacobian(q, branch);
  return J.transpose() * pw.at(pw_transform(q, branch)) * J;
}

double lie_derivative_check(const MetricField& g, std::size_t coordinate, const Vec& q, double h) {
  const std::size_t d = g.dim();
  double worst = 0.0;
  if (h > 0.0) {
    Vec qp = q;
    Vec qm = q;
    qp(static_cast<Eigen::Index>(coordinate)) += h;
    qm(static_cast<Eigen::Index>(coordinate)) -= h;
    const Mat diff = (g.at(qp) - g.at(qm)) / (2.0 * h);
    return diff.cwiseAbs().maxCoeff();
  }
  const std::span<const double> pt(q.data(), d);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a; b < d; ++b) {
      const Expression& c = g.coefficient(a, b);
      if (!c.depends_on(coordinate)) continue;
      worst = std::max(worst, std::abs(c.diff(coordinate).eval(pt)));
    }
  }
  return worst;
}

}  // namespace lcgeom::feff
