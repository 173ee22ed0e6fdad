#include "lcgeom/example.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "lcgeom/kropina.hpp"
#include "lcgeom/ode.hpp"

namespace lcgeom::example {

namespace {

const double kE = std::exp(1.0);

// p = s / (D1 s + D2) with s = e^{x/2}
const double kD1 = -1.0 / (std::sqrt(kE) - 1.0);
const double kD2 = std::sqrt(kE) / (std::sqrt(kE) - 1.0);

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::vector<double> grid(double a, double b, int count) {
  std::vector<double> xs;
  for (int i = 0; i < count; ++i) xs.push_back(a + (b - a) * i / (count - 1));
  return xs;
}

}  // namespace

lc::LCStructure structure(double coefficient) {
  const expr::VarsPtr vars = lc::LCStructure::variables(1);
  Rational c;
  c = coefficient;
  const expr::Expression f = c * expr::parse("p1 + exp(-2*x1)*p1^3", vars);
  return lc::LCStructure(1, {{f}});
}

double chain_p(double x) {
  const double s = std::exp(0.5 * x);
  return s / (kD1 * s + kD2);
}

double chain_p1(double x) {
  const double s = std::exp(0.5 * x);
  const double q = kD1 * s + kD2;
  return kD2 * s / (2.0 * q * q);
}

double chain_p2(double x) {
  const double s = std::exp(0.5 * x);
  const double q = kD1 * s + kD2;
  return kD2 * s * (kD2 - kD1 * s) / (4.0 * q * q * q);
}

double intersection_x() {
  const double r = std::sqrt(kE * (2.0 * kE - 1.0));
  return std::log(2.0 * r - (2.0 * kE - 1.0));
}

double intersection_y() { return 2.0 * std::sqrt(kE * (2.0 * kE - 1.0)) - 2.0 * kE; }

bool Report::all_passed() const {
  for (const Check& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

Report verify(const lc::LCStructure& s, const Options& opts) {
  if (s.n() != 1) throw lc::StructureError("the worked example is a dimension-3 (n = 1) structure");
  const expr::Expression& f = s.f(0, 0);
  auto f_at = [&](double x, double y, double p) {
    const double pt[3] = {x, y, p};
    return f.eval(std::span<const double>(pt, 3));
  };
  Report rep;

  // 1: both explicit paths solve y'' = f(x, y, y').
  {
    const expr::VarsPtr xv = expr::make_vars({"x"});
    const expr::Expression g0 = expr::parse("exp(x) - 1", xv);
    const expr::Expression g1 = expr::parse("2*exp(1)*sqrt(1 - exp(x - 1))", xv);
    double worst = 0.0;
    for (const auto& g : {g0, g1}) {
      const expr::Expression d1 = g.diff(0);
      const expr::Expression d2 = d1.diff(0);
      for (double x : grid(-1.0, 0.9, 191)) {
        const double pt[1] = {x};
        const std::span<const double> sp(pt, 1);
        worst = std::max(worst, std::abs(d2.eval(sp) - f_at(x, g.eval(sp), d1.eval(sp))));
      }
    }
    rep.checks.push_back({1, "explicit paths solve the path equation", worst <= opts.tol, worst, opts.tol,
                          "max |y'' - f(x, y, y')| over both paths, x in [-1, 0.9]"});
  }

  // 2: the chain p(x) along y = 0 satisfies the Euler-Lagrange system.
  {
    const kropina::KropinaDim3 el(s);
    double reduced = 0.0;
    double system = 0.0;
    for (double x : grid(0.0, 0.8, 81)) {
      const double p = chain_p(x), p1 = chain_p1(x), p2 = chain_p2(x);
      reduced = std::max(reduced, std::abs(p2 * p - 2.0 * p1 * p1 + 0.5 * p1 * p));
      const auto r = el.residuals(x, 0.0, 0.0, 0.0, p, p1, p2);
      system = std::max({system, std::abs(r.el_p), std::abs(r.el_y)});
    }
    const double worst = std::max(reduced, system);
    rep.checks.push_back({2, "chain along y = 0 solves the Euler-Lagrange system", worst <= opts.tol, worst, opts.tol,
                          "reduced equation residual " + fmt(reduced) + ", full system residual " + fmt(system) +
                              ", x in [0, 0.8]"});
  }

  // 3: the two explicit paths meet exactly once, at the closed-form point.
  {
    auto g0 = [](double x) { return std::exp(x) - 1.0; };
    auto g1 = [](double x) { return 2.0 * kE * std::sqrt(1.0 - std::exp(x - 1.0)); };
    // g0 increases and g1 decreases on x < 1, so a sign change is the unique root.
    double lo = -5.0, hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      (g0(mid) - g1(mid) < 0.0 ? lo : hi) = mid;
    }
    const double x = 0.5 * (lo + hi);
    const double y = g0(x);
    const double err = std::max(std::abs(x - intersection_x()), std::abs(y - intersection_y()));
    rep.checks.push_back({3, "explicit paths intersect at the closed-form point", err <= opts.tol, err, opts.tol,
                          "numeric (" + fmt(x) + ", " + fmt(y) + ")"});
  }

  // 4: the paths tangent to the chain along y = 0 miss that point.
  {
    const double xs = intersection_x();
    const double ys = intersection_y();
    double margin = std::numeric_limits<double>::infinity();
    double worst_x0 = 0.0;
    for (double x0 : opts.x0s) {
      const ode::Rhs rhs = [&](double x, const ode::State& st, ode::State& d) {
        d.resize(2);
        d << st(1), f_at(x, st(0), st(1));
      };
      double miss = std::numeric_limits<double>::infinity();
      try {
        const ode::Solution sol = ode::integrate(rhs, x0, Eigen::Vector2d(0.0, chain_p(x0)), xs, ode::Config{});
        miss = std::abs(sol.y.back()(0) - ys);
        if (!std::isfinite(miss)) miss = std::numeric_limits<double>::infinity();
      } catch (const ode::IntegrationError&) {
      } catch (const expr::DomainError&) {
      }
      if (miss < margin) {
        margin = miss;
        worst_x0 = x0;
      }
    }
    rep.checks.push_back({4, "paths of the chain miss the intersection point", margin > opts.margin, margin,
                          opts.margin, "smallest miss at x0 = " + fmt(worst_x0)});
  }
  return rep;
}

}  // namespace lcgeom::example
