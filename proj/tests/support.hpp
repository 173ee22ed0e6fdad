#pragma once

// Shared generators and independent oracles for the test binaries.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "lcgeom/expr.hpp"
#include "lcgeom/lc_core.hpp"
#include "lcgeom/model.hpp"
#include "lcgeom/projective.hpp"

namespace testsupport {

using lcgeom::Rational;
using lcgeom::expr::Expression;
using lcgeom::expr::NodePtr;
using lcgeom::expr::VarsPtr;
namespace raw = lcgeom::expr::raw;
namespace qla = lcgeom::qla;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen_); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(gen_); }
  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }
  Rational rational(int range = 5, int max_den = 4) {
    Rational q(integer(-range, range), integer(1, max_den));
    q.canonicalize();
    return q;
  }
  Eigen::VectorXd vec(std::size_t d, double a, double b) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = uniform(a, b);
    return v;
  }

 private:
  std::mt19937_64 gen_;
};

// Random tree over `nvars` variables whose value stays moderate on [-1,1]^nvars:
// divisions, logs, roots and fractional powers get a positive shifted argument.
inline NodePtr random_node(Rng& rng, std::size_t nvars, int depth) {
  using lcgeom::expr::Function;
  using lcgeom::expr::NodeKind;
  if (depth <= 0 || rng.coin(0.25)) {
    if (rng.coin(0.6)) return raw::variable(static_cast<std::size_t>(rng.integer(0, static_cast<int>(nvars) - 1)));
    if (rng.coin(0.5)) return raw::constant(rng.rational(5, 4));
    return raw::constant(Rational(rng.integer(-300, 300), 100));
  }
  auto sub = [&] { return random_node(rng, nvars, depth - 1); };
  auto positive = [&] {
    // 1 + a^2
    return raw::binary(NodeKind::kAdd, raw::constant(Rational(1)), raw::power(sub(), Rational(2)));
  };
  switch (rng.integer(0, 11)) {
    case 0: return raw::negate(sub());
    case 1: return raw::binary(NodeKind::kAdd, sub(), sub());
    case 2: return raw::binary(NodeKind::kSub, sub(), sub());
    case 3:
    case 4: return raw::binary(NodeKind::kMul, sub(), sub());
    case 5: return raw::binary(NodeKind::kDiv, sub(), positive());
    case 6: return raw::power(sub(), Rational(rng.integer(0, 3)));
    case 7: return raw::power(positive(), Rational(rng.integer(-3, 3), 2));
    case 8: return raw::call(rng.coin() ? Function::kSin : Function::kCos, sub());
    case 9: return raw::call(rng.coin() ? Function::kLn : Function::kSqrt, positive());
    case 10: return raw::call(rng.coin() ? Function::kTanh : Function::kSinh, sub());
    default: return raw::call(rng.coin() ? Function::kExp : Function::kCosh, raw::call(Function::kSin, sub()));
  }
}

inline Expression random_expression(Rng& rng, const VarsPtr& vars, int depth = 4) {
  return Expression(vars, random_node(rng, vars->size(), depth));
}

// Random polynomial of degree <= deg in the given variable list, small
// rational coefficients.
inline Expression random_polynomial(Rng& rng, const VarsPtr& vars, int deg, double density = 0.35) {
  Expression out = Expression::constant(vars, Rational(0));
  const std::size_t m = vars->size();
  std::vector<int> e(m, 0);
  // enumerate exponent vectors with total degree <= deg
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
    if (i == m) {
      if (!rng.coin(density)) return;
      Expression term = Expression::constant(vars, rng.rational(4, 3));
      for (std::size_t k = 0; k < m; ++k) {
        if (e[k]) term = term * lcgeom::expr::pow(Expression::variable(vars, k), Rational(e[k]));
      }
      out = out + term;
      return;
    }
    for (int d = 0; d <= left; ++d) {
      e[i] = d;
      rec(i + 1, left - d);
    }
    e[i] = 0;
  };
  rec(0, deg);
  return out;
}

// Random trace-free Christoffel field with polynomial entries.
inline lcgeom::proj::ChristoffelField random_christoffel(Rng& rng, std::size_t m, int deg = 2) {
  lcgeom::proj::ChristoffelField g(m);
  for (std::size_t c = 0; c < m; ++c) {
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = a; b < m; ++b) {
        if (rng.coin(0.6)) g.set(c, a, b, random_polynomial(rng, g.vars(), deg));
      }
    }
  }
  return g.trace_free_part();
}

// ---- model

inline qla::QVec random_qvec(Rng& rng, std::size_t d, int range = 4) {
  qla::QVec v(d);
  for (auto& x : v) x = rng.rational(range, 3);
  return v;
}

// Random element of the kernel of the rows (nonzero unless the kernel is 0).
inline qla::QVec random_in_kernel(Rng& rng, const qla::QMat& rows, std::size_t d) {
  const auto basis = qla::kernel(rows, d);
  for (;;) {
    qla::QVec v = qla::zeros(d);
    for (const auto& b : basis) v = qla::axpy(rng.rational(4, 3), b, v);
    if (!qla::is_zero(v)) return v;
  }
}

inline lcgeom::model::PCLine random_line(Rng& rng, std::size_t n) {
  const std::size_t d = n + 2;
  qla::QVec plus;
  do {
    plus = random_qvec(rng, d);
  } while (qla::is_zero(plus));
  return lcgeom::model::make_line(plus, random_in_kernel(rng, {plus}, d));
}

// Rank of the Gram matrix of span{(v1+,0), (0,v1-), (v2+,0), (0,v2-)} in
// V = R^{n+2} (+) R^{n+2} with <a,b> = a+ . b- + a- . b+, and the real
// dimension of the span.
struct GramOracle {
  std::size_t span_dim = 0;
  std::size_t gram_rank = 0;
};

inline GramOracle gram_oracle(const lcgeom::model::PCLine& l1, const lcgeom::model::PCLine& l2) {
  const std::size_t d = l1.plus.size();
  auto embed = [d](const qla::QVec& plus, const qla::QVec& minus) {
    qla::QVec v(2 * d);
    for (std::size_t i = 0; i < d; ++i) {
      v[i] = plus[i];
      v[d + i] = minus[i];
    }
    return v;
  };
  const qla::QVec z = qla::zeros(d);
  const std::vector<qla::QVec> gens{embed(l1.plus, z), embed(z, l1.minus), embed(l2.plus, z), embed(z, l2.minus)};
  // Bilinear form matrix on V.
  qla::QMat B(2 * d, qla::QVec(2 * d, Rational(0)));
  for (std::size_t i = 0; i < d; ++i) {
    B[i][d + i] = 1;
    B[d + i][i] = 1;
  }
  // Basis of the span via row reduction of the generators.
  std::vector<qla::QVec> basis;
  for (const auto& g : gens) {
    auto trial = basis;
    trial.push_back(g);
    if (qla::rank(trial) > basis.size()) basis.push_back(g);
  }
  qla::QMat G(basis.size(), qla::QVec(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = 0; j < basis.size(); ++j) G[i][j] = qla::dot(basis[i], qla::mul(B, basis[j]));
  }
  return {basis.size(), qla::rank(G)};
}

}  // namespace testsupport
