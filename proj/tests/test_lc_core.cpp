#include <doctest.h>

#include <cmath>

#include "lcgeom/lc_core.hpp"
#include "support.hpp"

using namespace lcgeom;
using lc::LCStructure;
using lc::Vec;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

LCStructure example() { return LCStructure::from_strings(1, {{"0.5*(p1 + exp(-2*x1)*p1^3)"}}); }
LCStructure flat(std::size_t n) {
  return LCStructure::from_strings(n, std::vector<std::vector<std::string>>(n, std::vector<std::string>(n, "0")));
}
LCStructure f11_is_u() { return LCStructure::from_strings(2, {{"u", "0"}, {"0", "0"}}); }

// 2-form coefficients (d alpha)_{ab} = d_a alpha_b - d_b alpha_a of a covector
// field, by a 5-point stencil in each direction.
template <class Field>
Eigen::MatrixXd exterior_derivative(const Field& alpha, const Vec& q, double h = 1e-3) {
  const auto d = q.size();
  Eigen::MatrixXd J(d, d);  // J(a, b) = d_a alpha_b
  for (Eigen::Index a = 0; a < d; ++a) {
    auto shifted = [&](double t) {
      Vec p = q;
      p(a) += t;
      return alpha(p);
    };
    const Vec row = (-shifted(2 * h) + 8 * shifted(h) - 8 * shifted(-h) + shifted(-2 * h)) / (12 * h);
    J.row(a) = row.transpose();
  }
  return J - J.transpose();
}

Eigen::MatrixXd wedge(const Vec& a, const Vec& b) { return a * b.transpose() - b * a.transpose(); }

}  // namespace

TEST_CASE("frame_E examples") {
  auto X = lc::frame_E(flat(1), vec({0, 0, 0}));
  CHECK(X[0].isApprox(vec({1, 0, 0})));
  X = lc::frame_E(example(), vec({0, 0, 1}));
  CHECK((X[0] - vec({1, 1, 1})).norm() <= 1e-15);
  X = lc::frame_E(f11_is_u(), vec({0, 0, 5, 0, 0}));
  CHECK(X[0] == vec({1, 0, 0, 5, 0}));
  CHECK(X[1] == vec({0, 1, 0, 0, 0}));
}

TEST_CASE("coframe examples and annihilation") {
  auto c = lc::coframe(flat(1), vec({0, 0, 2}));
  CHECK(c.sigma == vec({-2, 1, 0}));
  CHECK(c.theta[0] == vec({1, 0, 0}));
  CHECK(c.pi[0] == vec({0, 0, 1}));
  c = lc::coframe(example(), vec({0, 0, 1}));
  CHECK((c.pi[0] - vec({-1, 0, 1})).norm() <= 1e-15);

  testsupport::Rng rng(3);
  const auto vars = LCStructure::variables(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f12 = testsupport::random_polynomial(rng, vars, 2);
    const LCStructure s(2, {{testsupport::random_polynomial(rng, vars, 2), f12},
                            {f12, testsupport::random_polynomial(rng, vars, 2)}});
    const Vec q = rng.vec(5, -1, 1);
    const auto X = lc::frame_E(s, q);
    const auto cf = lc::coframe(s, q);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(cf.sigma.dot(X[i]) == 0.0);
      for (std::size_t j = 0; j < 2; ++j) CHECK(cf.pi[j].dot(X[i]) == 0.0);
      const Vec dp = Vec::Unit(5, static_cast<Eigen::Index>(s.p_index(i)));
      CHECK(cf.sigma.dot(dp) == 0.0);
      for (std::size_t j = 0; j < 2; ++j) CHECK(cf.theta[j].dot(dp) == 0.0);
    }
    // d sigma = theta^i ^ pi_i, as a coefficient identity
    const Eigen::MatrixXd dsigma = exterior_derivative([&](const Vec& p) { return lc::coframe(s, p).sigma; }, q);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(5, 5);
    for (std::size_t i = 0; i < 2; ++i) rhs += wedge(cf.theta[i], cf.pi[i]);
    CHECK((dsigma - rhs).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("integrability defect") {
  CHECK(lc::integrability_defect(flat(2), vec({0.1, 0.2, 0.3, 0.4, 0.5})).max_abs() == 0.0);
  CHECK(lc::integrability_defect(example(), vec({0.1, 0.2, 0.3})).max_abs() == 0.0);
  for (double c : {-2.0, 0.0, 0.5, 3.0}) {
    const auto D = lc::integrability_defect(f11_is_u(), vec({0.3, -0.2, 1.0, 0.7, c}));
    CHECK(D.at(0, 1, 0) == doctest::Approx(-c));
    CHECK(D.at(1, 0, 0) == doctest::Approx(c));
  }

  testsupport::Rng rng(5);
  const auto vars = LCStructure::variables(2);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::vector<expr::Expression>> f(2);
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) f[i].push_back(testsupport::random_polynomial(rng, vars, 2));
    }
    f[1][0] = f[0][1];
    const LCStructure s(2, f);
    const auto D = lc::integrability_defect(s, rng.vec(5, -1, 1));
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) {
        for (std::size_t l = 0; l < 2; ++l) CHECK(D.at(i, j, l) == -D.at(j, i, l));
      }
    }
  }
}

TEST_CASE("is_integrable") {
  const lc::Box box2{Vec::Constant(5, -1), Vec::Constant(5, 1)};
  CHECK_FALSE(lc::is_integrable(f11_is_u(), box2).integrable);
  CHECK(lc::is_integrable(example(), {Vec::Constant(3, -1), Vec::Constant(3, 1)}).integrable);
  CHECK(lc::is_integrable(LCStructure::from_strings(1, {{"sin(u*p1) + x1^3"}}), {Vec::Constant(3, -1), Vec::Constant(3, 1)})
            .integrable);

  // potential family f_ij = d_i d_j phi(x), 20 random phi of degree <= 4
  testsupport::Rng rng(9);
  const auto vars = LCStructure::variables(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto phi = testsupport::random_polynomial(rng, vars, 4, 0.1).rebind(expr::make_vars({"x1", "x2", "u", "p1", "p2"}));
    const auto only_x = [&] {
      // keep the x-part: set u = p = 0
      auto e = phi;
      for (std::size_t k = 2; k < 5; ++k) e = e.substitute(k, expr::Expression::constant(e.vars(), Rational(0)));
      return e;
    }();
    std::vector<std::vector<expr::Expression>> f(2);
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) f[i].push_back(only_x.diff(i).diff(j));
    }
    const LCStructure s(2, f);
    const auto rep = lc::is_integrable(s, box2);
    CHECK(rep.integrable);
    CHECK(rep.symbolic_zero);
  }
}

TEST_CASE("rescaled coframe") {
  const LCStructure s = example();
  const auto vars = s.vars();
  testsupport::Rng rng(21);

  const lc::RescaledCoframe ident(s, expr::Expression::constant(vars, Rational(0)));
  for (int k = 0; k < 10; ++k) {
    const Vec q = rng.vec(3, -1, 1);
    const auto a = ident.at(q);
    const auto b = lc::coframe(s, q);
    CHECK(a.sigma == b.sigma);
    CHECK(a.theta[0] == b.theta[0]);
    CHECK(a.pi[0] == b.pi[0]);
  }

  const auto fscale = expr::parse("0.3*sin(x1 + 2*u) + 0.2*p1^2 - 0.1*x1*p1", vars);
  const lc::RescaledCoframe rc(s, fscale);
  double worst_d = 0.0;
  double worst_sigma = 0.0;
  double worst_compose = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Vec q = rng.vec(3, -1, 1);
    const auto hat = rc.at(q);
    const auto plain = lc::coframe(s, q);
    const double ef = std::exp(fscale.eval(std::span<const double>(q.data(), 3)));

    const Vec v = rng.vec(3, -2, 2);
    worst_sigma = std::max(worst_sigma, std::abs(hat.sigma.dot(v) - ef * ef * plain.sigma.dot(v)));

    const Eigen::MatrixXd dsig = exterior_derivative([&](const Vec& p) { return rc.at(p).sigma; }, q);
    worst_d = std::max(worst_d, (dsig - wedge(hat.theta[0], hat.pi[0])).cwiseAbs().maxCoeff());

    // Rescale the hat coframe by -fscale: expand dfscale in the hat coframe
    // and apply the same formulas.
    Eigen::Matrix3d basis;
    basis.row(0) = hat.pi[0].transpose();
    basis.row(1) = hat.theta[0].transpose();
    basis.row(2) = hat.sigma.transpose();
    Vec df(3);
    for (Eigen::Index a = 0; a < 3; ++a) df(a) = fscale.diff(static_cast<std::size_t>(a)).eval(std::span<const double>(q.data(), 3));
    const Eigen::Vector3d c = basis.transpose().fullPivLu().solve(df);  // df = c0 pi^ + c1 theta^ + c2 sigma^
    const double g = 1.0 / ef;  // e^{-f}
    const Vec sigma_back = g * g * hat.sigma;
    const Vec theta_back = g * (hat.theta[0] + 2.0 * c(0) * hat.sigma);
    const Vec pi_back = g * (hat.pi[0] - 2.0 * c(1) * hat.sigma);
    worst_compose = std::max({worst_compose, (sigma_back - plain.sigma).cwiseAbs().maxCoeff(),
                              (theta_back - plain.theta[0]).cwiseAbs().maxCoeff(),
                              (pi_back - plain.pi[0]).cwiseAbs().maxCoeff()});
  }
  CHECK(worst_sigma <= 1e-12);
  CHECK(worst_d <= 1e-10);
  CHECK(worst_compose <= 1e-10);
}

TEST_CASE("classify_point_vector") {
  using model::TangentKind;
  const LCStructure s = example();
  const Vec q = vec({0.2, 0.1, 0.7});
  CHECK(lc::classify_point_vector(s, q, vec({0, 1, 0})) == TangentKind::kTransverse);
  CHECK(lc::classify_point_vector(s, q, vec({0, 0, 1})) == TangentKind::kInF);
  CHECK(lc::classify_point_vector(s, q, Vec::Zero(3)) == TangentKind::kZero);
  CHECK(lc::classify_point_vector(s, q, lc::frame_E(s, q)[0]) == TangentKind::kInE);
  const LCStructure f2 = flat(2);
  CHECK(lc::classify_point_vector(f2, Vec::Zero(5), vec({1, 0, 0, 0, 1})) == TangentKind::kNullGeneric);
  CHECK(lc::classify_point_vector(f2, Vec::Zero(5), vec({1, 0, 0, 1, 0})) == TangentKind::kContactNonnull);
}

TEST_CASE("flat embedding") {
  auto [v0, w0] = lc::flat_embedding({0, 0, 0});
  CHECK(qla::is_zero(v0));
  CHECK(qla::is_zero(w0));
  auto [v, w] = lc::flat_embedding({1, 3, 2});
  CHECK(v == qla::QVec{1, 3});
  CHECK(w == qla::QVec{2, 1});
  CHECK(lc::hyperquadric_residual(v, w) == 0);

  testsupport::Rng rng(17);
  int zero = 0;
  for (int k = 0; k < 1000; ++k) {
    const std::size_t n = static_cast<std::size_t>(rng.integer(1, 4));
    const auto q = testsupport::random_qvec(rng, 2 * n + 1, 50);
    auto [a, b] = lc::flat_embedding(q);
    zero += lc::hyperquadric_residual(a, b) == 0;
  }
  CHECK(zero == 1000);
}
