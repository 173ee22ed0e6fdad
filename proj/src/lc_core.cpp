#include "lcgeom/lc_core.hpp"

#include <cmath>

#include "lcgeom/polynomial.hpp"

namespace lcgeom::lc {

VarsPtr LCStructure::variables(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= n; ++i) names.push_back("x" + std::to_string(i));
  names.push_back("u");
  for (std::size_t i = 1; i <= n; ++i) names.push_back("p" + std::to_string(i));
  return expr::make_vars(std::move(names));
}

LCStructure::LCStructure(std::size_t n, std::vector<std::vector<Expression>> f) : n_(n), vars_(variables(n)) {
  if (n == 0) throw StructureError("n must be positive");
  if (f.size() != n) throw StructureError("f must have n rows");
  for (auto& row : f) {
    if (row.size() != n) throw StructureError("f must have n columns");
    for (auto& e : row) {
      if (!(*e.vars() == *vars_)) e = e.rebind(vars_);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!expr::structurally_equal(f[i][j], f[j][i])) {
        throw StructureError("f is not symmetric: f" + std::to_string(i + 1) + std::to_string(j + 1) + " != f" +
                             std::to_string(j + 1) + std::to_string(i + 1));
      }
    }
  }
  f_ = std::move(f);
}

LCStructure LCStructure::from_strings(std::size_t n, const std::vector<std::vector<std::string>>& f) {
  const VarsPtr vars = variables(n);
  std::vector<std::vector<Expression>> parsed;
  for (const auto& row : f) {
    std::vector<Expression> r;
    for (const auto& s : row) r.push_back(expr::parse(s, vars));
    parsed.push_back(std::move(r));
  }
  return LCStructure(n, std::move(parsed));
}

Eigen::MatrixXd LCStructure::f_at(const Vec& q) const {
  if (static_cast<std::size_t>(q.size()) != dim()) throw StructureError("point has the wrong dimension");
  Eigen::MatrixXd m(n_, n_);
  const std::span<const double> pt(q.data(), dim());
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i; j < n_; ++j) {
      m(i, j) = f_[i][j].eval(pt);
      m(j, i) = m(i, j);
    }
  }
  return m;
}

Expression LCStructure::frame_derivative(std::size_t i, const Expression& F) const {
  Expression r = F.diff(x_index(i)) + Expression::variable(vars_, p_index(i)) * F.diff(u_index());
  for (std::size_t j = 0; j < n_; ++j) r = r + f_[i][j] * F.diff(p_index(j));
  return r;
}

std::vector<Vec> frame_E(const LCStructure& s, const Vec& q) {
  const Eigen::MatrixXd f = s.f_at(q);
  std::vector<Vec> out;
  for (std::size_t i = 0; i < s.n(); ++i) {
    Vec v = Vec::Zero(s.dim());
    v(s.x_index(i)) = 1.0;
    v(s.u_index()) = q(s.p_index(i));
    for (std::size_t j = 0; j < s.n(); ++j) v(s.p_index(j)) = f(i, j);
    out.push_back(v);
  }
  return out;
}

CoframeValue coframe(const LCStructure& s, const Vec& q) {
  const Eigen::MatrixXd f = s.f_at(q);
  CoframeValue c;
  c.sigma = Vec::Zero(s.dim());
  c.sigma(s.u_index()) = 1.0;
  for (std::size_t i = 0; i < s.n(); ++i) c.sigma(s.x_index(i)) = -q(s.p_index(i));
  for (std::size_t i = 0; i < s.n(); ++i) {
    Vec th = Vec::Zero(s.dim());
    th(s.x_index(i)) = 1.0;
    c.theta.push_back(th);
    Vec pi = Vec::Zero(s.dim());
    pi(s.p_index(i)) = 1.0;
    for (std::size_t j = 0; j < s.n(); ++j) pi(s.x_index(j)) = -f(i, j);
    c.pi.push_back(pi);
  }
  return c;
}

double Defect::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

std::vector<Expression> defect_expressions(const LCStructure& s) {
  const std::size_t n = s.n();
  std::vector<Expression> out;
  out.reserve(n * n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t l = 0; l < n; ++l) {
        if (i == j) {
          out.push_back(Expression::constant(s.vars(), Rational(0)));
          continue;
        }
        out.push_back(s.frame_derivative(i, s.f(j, l)) - s.frame_derivative(j, s.f(i, l)));
      }
    }
  }
  return out;
}

Defect integrability_defect(const LCStructure& s, const Vec& q) {
  Defect d;
  d.n = s.n();
  const std::span<const double> pt(q.data(), s.dim());
  for (const auto& e : defect_expressions(s)) d.values.push_back(e.eval(pt));
  return d;
}

std::vector<Vec> halton_points(const Box& box, std::size_t count) {
  static constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  const auto d = static_cast<std::size_t>(box.lo.size());
  if (d > std::size(kPrimes)) throw StructureError("halton_points: dimension too large");
  std::vector<Vec> pts;
  for (std::size_t k = 1; k <= count; ++k) {
    Vec p(d);
    for (std::size_t c = 0; c < d; ++c) {
      double f = 1.0;
      double r = 0.0;
      std::size_t i = k;
      while (i > 0) {
        f /= kPrimes[c];
        r += f * static_cast<double>(i % kPrimes[c]);
        i /= kPrimes[c];
      }
      p(c) = box.lo(c) + r * (box.hi(c) - box.lo(c));
    }
    pts.push_back(p);
  }
  return pts;
}

IntegrabilityReport is_integrable(const LCStructure& s, const Box& box, double tol, std::size_t samples) {
  IntegrabilityReport rep;
  const auto defects = defect_expressions(s);
  rep.symbolic_zero = true;
  for (const auto& e : defects) {
    if (!expr::is_symbolically_zero(e)) {
      rep.symbolic_zero = false;
      break;
    }
  }
  for (const Vec& q : halton_points(box, samples)) {
    const std::span<const double> pt(q.data(), s.dim());
    try {
      for (const auto& e : defects) rep.max_defect = std::max(rep.max_defect, std::abs(e.eval(pt)));
      ++rep.samples;
    } catch (const expr::DomainError&) {
      ++rep.skipped;
    }
  }
  rep.integrable = rep.symbolic_zero || (rep.samples > 0 && rep.max_defect <= tol);
  return rep;
}

RescaledCoframe::RescaledCoframe(const LCStructure& s, const Expression& fscale)
    : s_(s), f_(*fscale.vars() == *s.vars() ? fscale : fscale.rebind(s.vars())) {
  for (std::size_t k = 0; k < s.dim(); ++k) df_.push_back(f_.diff(k));
}

Vec RescaledCoframe::expansion(const Vec& q) const {
  const std::size_t n = s_.n();
  const std::size_t d = s_.dim();
  const CoframeValue c = coframe(s_, q);
  // rows: pi_1..pi_n, theta^1..theta^n, sigma
  Eigen::MatrixXd C(d, d);
  for (std::size_t i = 0; i < n; ++i) {
    C.row(i) = c.pi[i].transpose();
    C.row(n + i) = c.theta[i].transpose();
  }
  C.row(2 * n) = c.sigma.transpose();
  Vec df(d);
  const std::span<const double> pt(q.data(), d);
  for (std::size_t k = 0; k < d; ++k) df(k) = df_[k].eval(pt);
  return C.transpose().partialPivLu().solve(df);
}

CoframeValue RescaledCoframe::at(const Vec& q) const {
  const std::size_t n = s_.n();
  const CoframeValue c = coframe(s_, q);
  const Vec e = expansion(q);
  const double f = f_.eval(std::span<const double>(q.data(), s_.dim()));
  const double ef = std::exp(f);
  CoframeValue r;
  r.sigma = ef * ef * c.sigma;
  for (std::size_t i = 0; i < n; ++i) {
    r.theta.push_back(ef * (c.theta[i] - 2.0 * e(i) * c.sigma));
    r.pi.push_back(ef * (c.pi[i] + 2.0 * e(n + i) * c.sigma));
  }
  return r;
}

TangentKind classify_point_vector(const LCStructure& s, const Vec& q, const Vec& v) {
  const CoframeValue c = coframe(s, q);
  const double tol = 1e-12 * (1.0 + v.norm());
  auto zero = [tol](double x) { return std::abs(x) <= tol; };
  if (!zero(c.sigma.dot(v))) return TangentKind::kTransverse;
  double pairing = 0.0;
  bool theta_zero = true;
  bool pi_zero = true;
  for (std::size_t i = 0; i < s.n(); ++i) {
    const double th = c.theta[i].dot(v);
    const double pi = c.pi[i].dot(v);
    pairing += th * pi;
    theta_zero = theta_zero && zero(th);
    pi_zero = pi_zero && zero(pi);
  }
  if (!zero(pairing)) return TangentKind::kContactNonnull;
  if (theta_zero && pi_zero) return TangentKind::kZero;
  if (pi_zero) return TangentKind::kInE;
  if (theta_zero) return TangentKind::kInF;
  return TangentKind::kNullGeneric;
}

std::pair<qla::QVec, qla::QVec> flat_embedding(const qla::QVec& q) {
  if (q.size() % 2 == 0) throw StructureError("flat_embedding: point must have 2n+1 coordinates");
  const std::size_t n = q.size() / 2;
  qla::QVec v(q.begin(), q.begin() + static_cast<long>(n + 1));
  qla::QVec w(q.begin() + static_cast<long>(n + 1), q.end());
  Rational last = q[n];
  for (std::size_t j = 0; j < n; ++j) last -= q[j] * q[n + 1 + j];
  w.push_back(last);
  return {v, w};
}

Rational hyperquadric_residual(const qla::QVec& v, const qla::QVec& w) {
  const std::size_t n = v.size() - 1;
  Rational r = w[n] - v[n];
  for (std::size_t j = 0; j < n; ++j) r += v[j] * w[j];
  return r;
}

}  // namespace lcgeom::lc
