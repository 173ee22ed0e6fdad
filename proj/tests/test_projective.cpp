#include <doctest.h>

#include <cmath>

#include "lcgeom/fefferman.hpp"
#include "lcgeom/polynomial.hpp"
#include "lcgeom/projective.hpp"
#include "support.hpp"

using namespace lcgeom;
using lc::LCStructure;
using proj::ChristoffelField;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

namespace {

bool same_field(const ChristoffelField& a, const ChristoffelField& b) {
  for (std::size_t c = 0; c < a.m(); ++c) {
    for (std::size_t i = 0; i < a.m(); ++i) {
      for (std::size_t j = 0; j < a.m(); ++j) {
        if (!expr::symbolically_equal(a.get(c, i, j), b.get(c, i, j))) return false;
      }
    }
  }
  return true;
}

ChristoffelField from_constants(std::size_t m, std::initializer_list<std::tuple<int, int, int, Rational>> entries) {
  ChristoffelField g(m);
  for (const auto& [c, a, b, v] : entries) {
    g.set(static_cast<std::size_t>(c - 1), static_cast<std::size_t>(a - 1), static_cast<std::size_t>(b - 1),
          expr::Expression::constant(g.vars(), v));
  }
  return g;
}

// Patterson-Walker coefficients dx^a (.) dy_a - y_c G^c_ab dx^a (.) dx^b for
// any symmetric G (no trace condition), evaluated at (x, y).
Mat pw_any(const ChristoffelField& g, const Vec& xy) {
  const auto m = static_cast<Eigen::Index>(g.m());
  Mat out = Mat::Zero(2 * m, 2 * m);
  const std::span<const double> x(xy.data(), g.m());
  for (Eigen::Index a = 0; a < m; ++a) {
    out(a, m + a) = out(m + a, a) = 1.0;
    for (Eigen::Index b = 0; b < m; ++b) {
      double e = 0.0;
      for (Eigen::Index c = 0; c < m; ++c) {
        e += xy(m + c) * g.eval(static_cast<std::size_t>(c), static_cast<std::size_t>(a), static_cast<std::size_t>(b), x);
      }
      out(a, b) = -2.0 * e;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("zero connection gives the flat structure") {
  for (std::size_t m : {2u, 3u, 4u}) {
    const auto s = proj::fij_from_christoffels(ChristoffelField(m));
    for (std::size_t i = 0; i < s.n(); ++i) {
      for (std::size_t j = 0; j < s.n(); ++j) CHECK(expr::is_symbolically_zero(s.f(i, j)));
    }
    const auto a = proj::ode_coeffs_dim2(ChristoffelField(2));
    for (const auto& e : a) CHECK(e.is_zero());
  }
}

TEST_CASE("dimension 2: f is the cubic with the ODE coefficients") {
  testsupport::Rng rng(31);
  for (int k = 0; k < 10; ++k) {
    const auto gamma = testsupport::random_christoffel(rng, 2, 2);
    const auto s = proj::fij_from_christoffels(gamma);
    const auto A = proj::ode_coeffs_dim2(gamma);
    const auto v = s.vars();
    const auto p = expr::Expression::variable(v, 2);
    const auto cubic = A[0].rebind(v) + A[1].rebind(v) * p + A[2].rebind(v) * expr::pow(p, Rational(2)) +
                       A[3].rebind(v) * expr::pow(p, Rational(3));
    CHECK(expr::symbolically_equal(s.f(0, 0), cubic));
  }
}

TEST_CASE("the (1,3,6,2) cubic") {
  const auto s = LCStructure::from_strings(1, {{"1 + 3*p1 + 6*p1^2 + 2*p1^3"}});
  const auto g = proj::christoffels_from_fij(s);
  const auto expect = from_constants(2, {{1, 1, 1, 1}, {1, 1, 2, 2}, {2, 1, 1, -1}, {1, 2, 2, 2}, {2, 1, 2, -1}, {2, 2, 2, -2}});
  CHECK(same_field(g, expect));
  CHECK(g.is_trace_free());

  std::array<expr::Expression, 4> A{expr::parse("1", g.vars()), expr::parse("3", g.vars()), expr::parse("6", g.vars()),
                                    expr::parse("2", g.vars())};
  const auto inv = proj::christoffels_from_ode_coeffs(A);
  CHECK(same_field(inv, expect));
  const auto back = proj::ode_coeffs_dim2(inv);
  for (std::size_t k = 0; k < 4; ++k) CHECK(expr::symbolically_equal(back[k], A[k]));
}

TEST_CASE("the example structure is projective") {
  const auto s = LCStructure::from_strings(1, {{"0.5*(p1 + exp(-2*x1)*p1^3)"}});
  const auto g = proj::christoffels_from_fij(s);
  const auto A = proj::ode_coeffs_dim2(g);
  const std::vector<double> pt{0.3, -0.7};
  CHECK(A[0].eval(pt) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(A[1].eval(pt) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(A[2].eval(pt) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(A[3].eval(pt) == doctest::Approx(0.5 * std::exp(-0.6)).epsilon(1e-15));
  const auto again = proj::fij_from_christoffels(g);
  CHECK(expr::symbolically_equal(again.f(0, 0), s.f(0, 0)));
}

TEST_CASE("non-projective structures are rejected") {
  CHECK_THROWS_AS(proj::christoffels_from_fij(LCStructure::from_strings(1, {{"p1^4"}})), proj::NotProjective);
  CHECK_THROWS_AS(proj::christoffels_from_fij(LCStructure::from_strings(1, {{"sin(p1)"}})), proj::NotProjective);
  CHECK_THROWS_AS(proj::christoffels_from_fij(LCStructure::from_strings(1, {{"1/(1 + p1^2)"}})), proj::NotProjective);
  // cubic but not of the projective pattern (n = 2)
  CHECK_THROWS_AS(proj::christoffels_from_fij(LCStructure::from_strings(2, {{"p2^3", "0"}, {"0", "0"}})),
                  proj::NotProjective);

  testsupport::Rng rng(2);
  for (int k = 0; k < 5; ++k) {
    const auto gamma = testsupport::random_christoffel(rng, 3, 1);
    auto s = proj::fij_from_christoffels(gamma);
    std::vector<std::vector<expr::Expression>> f{{s.f(0, 0), s.f(0, 1)}, {s.f(1, 0), s.f(1, 1)}};
    const auto quartic = expr::parse("x1*p1^2*p2^2", s.vars());
    f[1][1] = f[1][1] + quartic;
    CHECK_THROWS_AS(proj::christoffels_from_fij(LCStructure(2, f)), proj::NotProjective);
  }
}

TEST_CASE("round trip Gamma -> f -> Gamma") {
  testsupport::Rng rng(41);
  for (std::size_t m : {2u, 3u, 4u}) {
    for (int k = 0; k < 7; ++k) {
      const auto gamma = testsupport::random_christoffel(rng, m, 2);
      CHECK(same_field(proj::christoffels_from_fij(proj::fij_from_christoffels(gamma)), gamma));
    }
  }
}

TEST_CASE("projective change of connection") {
  testsupport::Rng rng(13);
  const auto gamma = testsupport::random_christoffel(rng, 3, 2);
  CHECK(same_field(proj::projective_change(gamma, expr::parse("0", gamma.vars())), gamma));

  const auto fscale = expr::parse("0.4*sin(x1) + 0.3*x2*u - 0.2*u^2", gamma.vars());
  const auto changed = proj::projective_change(gamma, fscale);
  CHECK_FALSE(changed.is_trace_free());
  CHECK(same_field(changed.trace_free_part(), gamma));

  // the defining functions see only the projective class
  const auto s0 = proj::fij_from_christoffels(gamma);
  const auto s1 = proj::fij_from_christoffels(changed);
  const auto s2 = proj::fij_from_christoffels(changed.trace_free_part());
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Vec q = rng.vec(5, -1, 1);
    worst = std::max(worst, (s0.f_at(q) - s1.f_at(q)).cwiseAbs().maxCoeff());
    worst = std::max(worst, (s0.f_at(q) - s2.f_at(q)).cwiseAbs().maxCoeff());
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("projective change is conformal on the Patterson-Walker metric") {
  // PW(G^) = e^{2f} Phi^* PW(G) with Phi(x, y) = (x, e^{-2f(x)} y), G^ the raw
  // projective change by df.
  testsupport::Rng rng(17);
  const std::size_t m = 2;
  const auto gamma = testsupport::random_christoffel(rng, m, 2);
  const auto fscale = expr::parse("0.5*cos(x1 - u) + 0.25*x1*u", gamma.vars());
  const auto changed = proj::projective_change(gamma, fscale);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Vec xy = rng.vec(2 * m, -1, 1);
    const std::span<const double> x(xy.data(), m);
    const double f = fscale.eval(x);
    const double w = std::exp(-2 * f);
    Vec image = xy;
    image.tail(m) *= w;
    Mat J = Mat::Identity(2 * m, 2 * m);
    for (std::size_t a = 0; a < m; ++a) {
      const double fa = fscale.diff(a).eval(x);
      for (std::size_t c = 0; c < m; ++c) J(static_cast<Eigen::Index>(m + c), static_cast<Eigen::Index>(a)) = -2 * fa * w * xy(static_cast<Eigen::Index>(m + c));
    }
    J.bottomRightCorner(m, m) *= w;
    const Mat pulled = std::exp(2 * f) * J.transpose() * pw_any(gamma, image) * J;
    worst = std::max(worst, (pulled - pw_any(changed, xy)).cwiseAbs().maxCoeff());
  }
  CHECK(worst <= 1e-12);
  // pw_any agrees with the library builder on trace-free input
  const Vec xy = rng.vec(2 * m, -1, 1);
  CHECK((pw_any(gamma, xy) - feff::build_patterson_walker(gamma).at(xy)).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("Christoffel field validation") {
  ChristoffelField g(2);
  CHECK_THROWS_AS(g.set(2, 0, 0, expr::parse("1", g.vars())), proj::ProjectiveError);
  CHECK_THROWS_AS(ChristoffelField(1), proj::ProjectiveError);
  g.set(0, 0, 1, expr::parse("x1", g.vars()));
  CHECK(g.is_symmetric());
  CHECK_FALSE(g.is_trace_free());
  CHECK(g.trace_free_part().is_trace_free());
  CHECK_THROWS_AS(g.validate(), proj::ProjectiveError);
}
