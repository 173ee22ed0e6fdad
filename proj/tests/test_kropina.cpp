#include <doctest.h>

#include <cmath>

#include "lcgeom/example.hpp"
#include "lcgeom/kropina.hpp"
#include "support.hpp"

using namespace lcgeom;
using curves::FeffermanCurves;
using kropina::KropinaDim3;
using lc::LCStructure;
using Vec = Eigen::VectorXd;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// (y' - p)^{-1} (p' - f - 2/3 f_p w - 1/6 f_pp w^2) for v = (1, y', p').
double closed_form(const LCStructure& s, const Vec& q, double y1, double p1) {
  const std::span<const double> pt(q.data(), 3);
  const auto& f = s.f(0, 0);
  const double w = y1 - q(2);
  return (p1 - f.eval(pt) - 2.0 / 3.0 * f.diff(2).eval(pt) * w - f.diff(2).diff(2).eval(pt) * w * w / 6.0) / w;
}

}  // namespace

TEST_CASE("Kropina function") {
  const FeffermanCurves flat(LCStructure::from_strings(1, {{"0"}}));
  CHECK(kropina::kropina_value(flat, vec({0, 0, 0}), vec({1, 1, 0})) == 0.0);
  CHECK_THROWS_AS(kropina::kropina_value(flat, vec({0, 0, 0}), vec({1, 0, 5})), kropina::ContactDirection);

  testsupport::Rng rng(23);
  const std::vector<LCStructure> structures{example::structure(), LCStructure::from_strings(1, {{"sin(x1)*p1"}}),
                                            LCStructure::from_strings(1, {{"p1^2 - u*p1^3 + x1"}}),
                                            LCStructure::from_strings(1, {{"exp(u)*cos(p1)"}})};
  double worst = 0.0;
  double worst_h = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const auto& s = structures[static_cast<std::size_t>(k) % structures.size()];
    const FeffermanCurves fc(s);
    const Vec q = rng.vec(3, -1, 1);
    double y1 = rng.uniform(-2, 2);
    if (std::abs(y1 - q(2)) < 0.1) y1 = q(2) + 0.5;
    const double p1 = rng.uniform(-2, 2);
    const double F = kropina::kropina_value(fc, q, vec({1, y1, p1}));
    const double cf = closed_form(s, q, y1, p1);
    worst = std::max(worst, std::abs(F - cf) / (1.0 + std::abs(cf)));
    // positively 1-homogeneous
    const double lam = rng.uniform(0.1, 5);
    worst_h = std::max(worst_h, std::abs(kropina::kropina_value(fc, q, lam * vec({1, y1, p1})) - lam * F) /
                                    (1.0 + std::abs(lam * F)));
  }
  CHECK(worst <= 1e-10);
  CHECK(worst_h <= 1e-12);
}

TEST_CASE("section change adds an exact 1-form") {
  testsupport::Rng rng(29);
  const auto s = LCStructure::from_strings(2, {{"x1*x2", "x1^2/2 + x2"}, {"x1^2/2 + x2", "x1"}});
  const FeffermanCurves fc(s);
  const auto section = expr::parse("0.3*sin(x1 + p2) - u*p1 + 0.5*x2^2", s.vars());
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Vec q = rng.vec(5, -1, 1);
    const Vec v = rng.vec(5, -1, 1);
    if (std::abs(lc::coframe(s, q).sigma.dot(v)) < 0.05) continue;
    double df = 0.0;
    for (std::size_t a = 0; a < 5; ++a) df += section.diff(a).eval(std::span<const double>(q.data(), 5)) * v(static_cast<Eigen::Index>(a));
    const double change = kropina::kropina_value(fc, q, v, section) - kropina::kropina_value(fc, q, v);
    worst = std::max(worst, std::abs(change - 2.0 * df));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("Euler-Lagrange system: flat straight line") {
  const KropinaDim3 k(LCStructure::from_strings(1, {{"0"}}));
  const auto r = k.residuals(0.3, 0.3, 1, 0, 0, 0, 0);
  CHECK(r.el_p == 0.0);
  CHECK(r.el_y == 0.0);
  const auto tr = k.integrate(0, 2, Eigen::Vector4d(0, 1, 0, 0), {});
  double worst = 0.0;
  for (const auto& s : tr.samples) worst = std::max(worst, std::abs(s.point(1) - s.point(0)) + std::abs(s.point(2)));
  CHECK(worst <= 1e-12);
}

TEST_CASE("Euler-Lagrange system: the example chain") {
  const double e = std::exp(1.0);
  const double D1 = -1.0 / (std::sqrt(e) - 1.0);
  const double D2 = std::sqrt(e) / (std::sqrt(e) - 1.0);
  double worst_p = 0.0;
  for (double x = 0.1; x <= 0.9; x += 0.05) {
    const double s = std::exp(x / 2);
    const double explicit_p = (std::sqrt(std::exp(x + 1)) - std::sqrt(std::exp(x))) / (std::sqrt(e) - std::sqrt(std::exp(x)));
    worst_p = std::max({worst_p, std::abs(s / (D1 * s + D2) - explicit_p) / explicit_p,
                        std::abs(example::chain_p(x) - explicit_p) / explicit_p});
  }
  CHECK(worst_p <= 1e-13);

  const KropinaDim3 k(example::structure());
  double worst = 0.0;
  for (double x = 0.1; x <= 0.9; x += 0.01) {
    const auto r = k.residuals(x, 0, 0, 0, example::chain_p(x), example::chain_p1(x), example::chain_p2(x));
    worst = std::max({worst, std::abs(r.el_p), std::abs(r.el_y)});
  }
  CHECK(worst <= 1e-8);
  // derivatives of the closed form agree with finite differences
  const double h = 1e-5;
  CHECK(example::chain_p1(0.4) == doctest::Approx((example::chain_p(0.4 + h) - example::chain_p(0.4 - h)) / (2 * h)).epsilon(1e-8));
  CHECK(example::chain_p2(0.4) == doctest::Approx((example::chain_p1(0.4 + h) - example::chain_p1(0.4 - h)) / (2 * h)).epsilon(1e-8));
  CHECK(example::chain_p1(0.1) == doctest::Approx(1.5750).epsilon(1e-4));
}

TEST_CASE("reparametrization invariance of the Euler-Lagrange equations") {
  // E_i = d/dt dF/dv^i - dF/dq^i along c(t) = (phi(t), 0, p(phi(t))), phi = t^3 + t,
  // from finite differences of the Kropina function in a general parameter.
  const FeffermanCurves fc(example::structure());
  auto curve = [](double t, double p_shift) {
    const double x = t * t * t + t;
    const double dx = 3 * t * t + 1;
    return std::pair<Vec, Vec>{vec({x, 0, example::chain_p(x) + p_shift * x * x}),
                               vec({dx, 0, (example::chain_p1(x) + 2 * p_shift * x) * dx})};
  };
  auto L = [&](const Vec& q, const Vec& v) { return kropina::kropina_value(fc, q, v); };
  auto el = [&](double t, double p_shift) {
    const double hv = 1e-5, ht = 1e-3;
    auto dL_dv = [&](double tt) {
      auto [q, v] = curve(tt, p_shift);
      Vec g(3);
      for (Eigen::Index i = 0; i < 3; ++i) {
        Vec vp = v, vm = v;
        vp(i) += hv;
        vm(i) -= hv;
        g(i) = (L(q, vp) - L(q, vm)) / (2 * hv);
      }
      return g;
    };
    auto [q, v] = curve(t, p_shift);
    Vec dL_dq(3);
    for (Eigen::Index i = 0; i < 3; ++i) {
      Vec qp = q, qm = q;
      qp(i) += hv;
      qm(i) -= hv;
      dL_dq(i) = (L(qp, v) - L(qm, v)) / (2 * hv);
    }
    const Vec ddt = (dL_dv(t + ht) - dL_dv(t - ht)) / (2 * ht);
    return (ddt - dL_dq).cwiseAbs().maxCoeff();
  };
  double on = 0.0;
  double off = 0.0;
  for (double t = 0.1; t <= 0.5; t += 0.1) {
    on = std::max(on, el(t, 0.0));
    off = std::max(off, el(t, 0.3));
  }
  INFO("EL residual on the chain " << on << ", off it " << off);
  CHECK(on <= 1e-4);
  CHECK(off > 1e-2);
}

TEST_CASE("two-point chains") {
  const KropinaDim3 k(example::structure());
  const double a = 0.1, b = 0.9;
  const auto res = k.shoot(a, b, 0, example::chain_p(a), 0, example::chain_p(b), 0.0,
                           (example::chain_p(b) - example::chain_p(a)) / (b - a), {});
  CHECK(res.mismatch <= 1e-9);
  CHECK(std::abs(res.y1_a) <= 1e-6);
  CHECK(res.p1_a == doctest::Approx(example::chain_p1(a)).epsilon(1e-6));
  double worst = 0.0;
  for (const auto& s : res.trajectory.samples) worst = std::max(worst, std::abs(s.point(2) - example::chain_p(s.point(0))));
  CHECK(worst <= 1e-6);

  CHECK_THROWS_AS(k.rhs(0.2, Eigen::Vector4d(0, 0.5, 0.5, 0)), kropina::TransversalityLost);
  CHECK_THROWS_AS(k.shoot(a, b, 0, example::chain_p(a), 0, example::chain_p(b), 0.0, 0.0, {}, 1e-9, 0),
                  kropina::ShootingFailed);
  CHECK_THROWS_AS(KropinaDim3(LCStructure::from_strings(2, {{"0", "0"}, {"0", "0"}})), curves::CurveError);
}
