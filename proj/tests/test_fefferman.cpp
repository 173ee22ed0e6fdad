#include <doctest.h>

#include <cmath>

#include "lcgeom/fefferman.hpp"
#include "lcgeom/polynomial.hpp"
#include "support.hpp"

using namespace lcgeom;
using feff::Mat;
using feff::Vec;
using lc::LCStructure;

namespace {

LCStructure example() { return LCStructure::from_strings(1, {{"0.5*(p1 + exp(-2*x1)*p1^3)"}}); }

Mat sym(const Vec& a, const Vec& b) { return a * b.transpose() + b * a.transpose(); }

Vec extend(const Vec& v) {
  Vec out = Vec::Zero(v.size() + 1);
  out.head(v.size()) = v;
  return out;
}

// theta^i (.) pi_i + sigma (.) varpi assembled from coframe values and
// derivatives of f at q; q carries s as its last entry.
Mat fefferman_oracle(const LCStructure& s, const Vec& q) {
  const std::size_t n = s.n();
  const auto d = static_cast<Eigen::Index>(s.dim());
  const Vec base = q.head(d);
  const auto cf = lc::coframe(s, base);
  const std::span<const double> pt(base.data(), s.dim());
  Vec varpi = Vec::Zero(d + 1);
  varpi(d) = 2.0;
  const Vec sigma = extend(cf.sigma);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto fp = s.f(i, j).diff(s.p_index(i));
      const double fpp = fp.diff(s.p_index(j)).eval(pt);
      varpi += (-fpp / static_cast<double>(n + 1) * sigma - 2.0 * fp.eval(pt) * extend(cf.theta[j])) /
               static_cast<double>(n + 2);
    }
  }
  Mat g = sym(sigma, varpi);
  for (std::size_t i = 0; i < n; ++i) g += sym(extend(cf.theta[i]), extend(cf.pi[i]));
  return g;
}

LCStructure random_potential_structure(testsupport::Rng& rng) {
  // f_ij = d_i d_j phi(x) + c_ij with a random cubic phi in x: integrable
  const auto xvars = expr::make_vars({"x1", "x2"});
  const auto phi = testsupport::random_polynomial(rng, xvars, 4, 0.3);
  std::vector<std::vector<expr::Expression>> f(2);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) f[i].push_back(phi.diff(i).diff(j).rebind(LCStructure::variables(2)));
  }
  return LCStructure(2, f);
}

}  // namespace

TEST_CASE("flat Fefferman metric") {
  const auto g = feff::build_fefferman(LCStructure::from_strings(1, {{"0"}}));
  const Mat G = g.at((Vec(4) << 0.3, -0.2, 0.7, 5.0).finished());
  Mat expect = Mat::Zero(4, 4);
  expect(0, 2) = expect(2, 0) = 1;
  expect(1, 3) = expect(3, 1) = 2;
  expect(0, 3) = expect(3, 0) = -2 * 0.7;
  CHECK((G - expect).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("varpi at the example point") {
  const auto g = feff::build_fefferman(example());
  const Vec q = (Vec(4) << 0, 0, 1, 0).finished();
  const Mat G = g.at(q);
  const Vec sigma = (Vec(4) << -1, 1, 0, 0).finished();
  // g(d_u, .) = varpi + varpi(d_u) sigma and g_uu = 2 varpi(d_u)
  const Vec varpi = G.row(1).transpose() - 0.5 * G(1, 1) * sigma;
  const Vec expect = -0.5 * sigma + (Vec(4) << -4.0 / 3.0, 0, 0, 2).finished();
  CHECK((varpi - expect).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("Fefferman metric against the coframe oracle") {
  testsupport::Rng rng(12);
  std::vector<LCStructure> structures{example(), LCStructure::from_strings(1, {{"sin(u)*p1^2 + x1*p1^4"}})};
  for (int k = 0; k < 3; ++k) structures.push_back(random_potential_structure(rng));
  for (const auto& s : structures) {
    const auto g = feff::build_fefferman(s);
    const std::size_t d = s.dim();
    const std::size_t S = d;
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const Vec q = rng.vec(d + 1, -1, 1);
      const Mat G = g.at(q);
      worst = std::max(worst, (G - fefferman_oracle(s, q)).cwiseAbs().maxCoeff());
      // g(d_s, v) = 2 sigma(v), exactly
      const Vec sigma = lc::coframe(s, q.head(static_cast<Eigen::Index>(d))).sigma;
      for (std::size_t a = 0; a < d; ++a) CHECK(G(S, a) == 2.0 * sigma(a));
      CHECK(G(S, S) == 0.0);
      const auto sig = g.signature(q);
      CHECK(sig.positive == static_cast<int>(s.n() + 1));
      CHECK(sig.negative == static_cast<int>(s.n() + 1));
    }
    CHECK(worst <= 1e-12);
    // coefficients do not involve s
    for (std::size_t a = 0; a <= S; ++a) {
      for (std::size_t b = 0; b <= S; ++b) CHECK_FALSE(g.coefficient(a, b).depends_on(S));
    }
  }
}

TEST_CASE("guarded build") {
  const auto s = LCStructure::from_strings(2, {{"u", "0"}, {"0", "0"}});
  CHECK_THROWS_AS(feff::build_fefferman_guarded(s, {Vec::Constant(5, -1), Vec::Constant(5, 1)}), feff::NotIntegrable);
  CHECK_NOTHROW(feff::build_fefferman_guarded(example(), {Vec::Constant(3, -1), Vec::Constant(3, 1)}));
}

TEST_CASE("Lie derivatives of coefficients") {
  const Vec q = (Vec(4) << 0.2, 0.1, 0.7, 0.4).finished();
  CHECK(feff::lie_derivative_check(feff::build_fefferman(example()), 3, q) == 0.0);
  CHECK(feff::lie_derivative_check(feff::build_fefferman(LCStructure::from_strings(1, {{"0"}})), 1, q) == 0.0);
  const double dx = feff::lie_derivative_check(feff::build_fefferman(example()), 0, q);
  CHECK(dx > 0.1);
  CHECK(feff::lie_derivative_check(feff::build_fefferman(example()), 0, q, 1e-5) == doctest::Approx(dx).epsilon(1e-6));
}

TEST_CASE("Patterson-Walker metric") {
  proj::ChristoffelField zero(2);
  const auto g0 = feff::build_patterson_walker(zero);
  const Vec y = (Vec(4) << 0.1, 0.2, 0.3, 0.4).finished();
  Mat expect = Mat::Zero(4, 4);
  expect(0, 2) = expect(2, 0) = expect(1, 3) = expect(3, 1) = 1;
  CHECK(g0.at(y) == expect);

  proj::ChristoffelField one(2);
  one.set(1, 0, 0, expr::parse("5/2", one.vars()));
  const auto g1 = feff::build_patterson_walker(one);
  Mat e1 = expect;
  e1(0, 0) = -2 * 0.4 * 2.5;  // -y_2 c dx^1 (.) dx^1
  CHECK((g1.at(y) - e1).cwiseAbs().maxCoeff() <= 1e-15);

  proj::ChristoffelField bad(2);
  bad.set(0, 0, 0, expr::parse("1", bad.vars()));
  CHECK_THROWS_AS(feff::build_patterson_walker(bad), proj::ProjectiveError);
  CHECK_THROWS_AS(feff::build_fefferman_projective(bad), proj::ProjectiveError);

  // projective Fefferman metric with Gamma = 0 is the flat Fefferman metric
  const auto flat = feff::build_fefferman(LCStructure::from_strings(1, {{"0"}}));
  const auto pf = feff::build_fefferman_projective(zero);
  CHECK(flat.at(y) == pf.at(y));
}

TEST_CASE("pw transform") {
  const Vec y = feff::pw_transform((Vec(4) << 0.5, 0.25, 0, 0).finished(), feff::Branch::kPositive);
  CHECK(y == (Vec(4) << 0.5, 0.25, 0, 1).finished());
  const Vec yn = feff::pw_transform((Vec(4) << 0.5, 0.25, 0, 0).finished(), feff::Branch::kNegative);
  CHECK(yn == (Vec(4) << 0.5, 0.25, 0, -1).finished());

  testsupport::Rng rng(4);
  double worst = 0.0;
  double worst_jac = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const std::size_t n = static_cast<std::size_t>(rng.integer(1, 3));
    const Vec q = rng.vec(2 * n + 2, -2, 2);
    const auto br = rng.coin() ? feff::Branch::kPositive : feff::Branch::kNegative;
    worst = std::max(worst, (feff::pw_inverse(feff::pw_transform(q, br)) - q).cwiseAbs().maxCoeff());
    if (k < 100) {
      Mat fd(q.size(), q.size());
      const double h = 1e-6;
      for (Eigen::Index a = 0; a < q.size(); ++a) {
        Vec qp = q, qm = q;
        qp(a) += h;
        qm(a) -= h;
        fd.col(a) = (feff::pw_transform(qp, br) - feff::pw_transform(qm, br)) / (2 * h);
      }
      worst_jac = std::max(worst_jac, (fd - feff::pw_jacobian(q, br)).cwiseAbs().maxCoeff());
    }
  }
  CHECK(worst <= 1e-12);
  CHECK(worst_jac <= 1e-6);
  CHECK_THROWS_AS(feff::pw_inverse((Vec(4) << 0, 0, 1, 0).finished()), feff::MetricError);
}

TEST_CASE("pullback of the Patterson-Walker metric") {
  testsupport::Rng rng(6);
  for (std::size_t m : {2u, 3u}) {
    const auto gamma = testsupport::random_christoffel(rng, m, 2);
    const auto pw = feff::build_patterson_walker(gamma);
    const auto pf = feff::build_fefferman_projective(gamma);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const Vec q = rng.vec(2 * m, -1, 1);
      for (auto br : {feff::Branch::kPositive, feff::Branch::kNegative}) {
        const double ylast = feff::pw_transform(q, br)(static_cast<Eigen::Index>(2 * m - 1));
        const Mat diff = feff::pw_pullback(pw, q, br) + ylast * pf.at(q);
        worst = std::max(worst, diff.cwiseAbs().maxCoeff() / std::abs(ylast));
      }
    }
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("metric field validation") {
  const auto v = expr::make_vars({"a", "b"});
  const auto one = expr::parse("1", v);
  const auto a = expr::parse("a", v);
  CHECK_THROWS_AS(feff::MetricField(v, {{one, a}, {one, one}}), feff::MetricError);
  CHECK_THROWS_AS(feff::MetricField(v, {{one}}), feff::MetricError);
  const feff::MetricField g(v, {{one, a}, {a, one}});
  CHECK_THROWS_AS(g.at(Vec::Zero(3)), feff::MetricError);
  const auto sig = g.signature((Vec(2) << 1.0, 0).finished());
  CHECK(sig.zero == 1);
  CHECK(sig.positive == 1);
}
