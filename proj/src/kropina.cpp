#include "lcgeom/kropina.hpp"

#include <cmath>

namespace lcgeom::kropina {

double kropina_value(const curves::FeffermanCurves& fc, const Vec& q, const Vec& v,
                     const std::optional<expr::Expression>& section) {
  const lc::LCStructure& s = fc.structure();
  const auto d = static_cast<Eigen::Index>(s.dim());
  if (q.size() != d || v.size() != d) throw curves::CurveError("point/direction must have 2n+1 coordinates");
  const double sigma = lc::coframe(s, q).sigma.dot(v);
  if (std::abs(sigma) <= 1e-12 * (1.0 + v.norm())) {
    throw ContactDirection("Kropina function is undefined on contact directions (sigma(v) = 0)");
  }
  Vec point(d + 1);
  Vec vel(d + 1);
  double s0 = 0.0;
  double sdot = 0.0;
  if (section) {
    const expr::Expression sec = *section->vars() == *s.vars() ? *section : section->rebind(s.vars());
    const std::span<const double> pt(q.data(), s.dim());
    s0 = sec.eval(pt);
    for (Eigen::Index k = 0; k < d; ++k) {
      if (v(k) != 0.0 && sec.depends_on(k)) sdot += sec.diff(k).eval(pt) * v(k);
    }
  }
  point << q, s0;
  vel << v, sdot;
  return fc.solver().norm2(point, vel) / fc.K_pairing(point, vel);
}

KropinaDim3::KropinaDim3(const lc::LCStructure& s)
    : s_(s),
      d_{s.f(0, 0), s.f(0, 0), s.f(0, 0), s.f(0, 0), s.f(0, 0), s.f(0, 0), s.f(0, 0), s.f(0, 0), s.f(0, 0)} {
  if (s.n() != 1) throw curves::CurveError("the dimension-3 Euler-Lagrange system needs n = 1");
  const auto& f = s.f(0, 0);
  const expr::Expression fp = f.diff(2);
  const expr::Expression fpp = fp.diff(2);
  d_ = {f, f.diff(0), f.diff(1), fp, fpp, fpp.diff(2), fp.diff(1), fpp.diff(0), fpp.diff(1)};
}

KropinaDim3::Derivs KropinaDim3::derivs(double x, double y, double p) const {
  const double pt[3] = {x, y, p};
  const std::span<const double> sp(pt, 3);
  return {d_[0].eval(sp), d_[1].eval(sp), d_[2].eval(sp), d_[3].eval(sp), d_[4].eval(sp),
          d_[5].eval(sp), d_[6].eval(sp), d_[7].eval(sp), d_[8].eval(sp)};
}

Eigen::Vector4d KropinaDim3::rhs(double x, const Eigen::Vector4d& st) const {
  const double y = st(0), y1 = st(1), p = st(2), p1 = st(3);
  const double w = y1 - p;
  if (std::abs(w) < 1e-8) throw TransversalityLost("transversality lost: |y' - p| < 1e-8 at x = " + std::to_string(x));
  const Derivs D = derivs(x, y, p);
  const double w2 = w * w;
  const double w3 = w2 * w;
  const double y2 = D.f + D.fp * w + 0.5 * D.fpp * w2 + D.fppp * w3 / 6.0;
  const double fdot = D.fx + D.fy * y1 + D.fp * p1;
  const double dfpp = D.fppx + D.fppy * y1 + D.fppp * p1;
  const double bracket = 2.0 * (y2 - p1) * (p1 - D.f) + D.fy * w2 - dfpp * w3 / 6.0 + 2.0 * D.fpy * w3 / 3.0 +
                         D.fppy * w2 * w2 / 6.0;
  const double p2 = fdot + bracket / w;
  return {y1, y2, p1, p2};
}

KropinaDim3::Residuals KropinaDim3::residuals(double x, double y, double y1, double y2, double p, double p1,
                                              double p2) const {
  const Derivs D = derivs(x, y, p);
  const double w = y1 - p;
  const double w2 = w * w;
  const double w3 = w2 * w;
  Residuals r;
  r.el_p = y2 - D.f - D.fp * w - 0.5 * D.fpp * w2 - D.fppp * w3 / 6.0;
  const double fdot = D.fx + D.fy * y1 + D.fp * p1;
  const double dfpp = D.fppx + D.fppy * y1 + D.fppp * p1;
  r.el_y = (p2 - fdot) * w - 2.0 * (y2 - p1) * (p1 - D.f) - D.fy * w2 + dfpp * w3 / 6.0 - 2.0 * D.fpy * w3 / 3.0 -
           D.fppy * w2 * w2 / 6.0;
  return r;
}

curves::Trajectory KropinaDim3::integrate(double x0, double x1, const Eigen::Vector4d& init,
                                          const curves::IntegratorConfig& cfg,
                                          const std::optional<std::vector<double>>& output_points) const {
  const ode::Rhs f = [this](double x, const ode::State& y, ode::State& dy) {
    dy = rhs(x, Eigen::Vector4d(y));
  };
  ode::Options opts;
  opts.output_points = output_points;
  const ode::Solution sol = ode::integrate(f, x0, ode::State(init), x1, cfg.ode, opts);
  curves::Trajectory tr;
  tr.kind = curves::CurveKind::kKropinaGeodesic;
  tr.coords = s_.vars()->names();
  tr.stats = sol.stats;
  for (std::size_t k = 0; k < sol.t.size(); ++k) {
    const ode::State& st = sol.y[k];
    const Eigen::Vector4d d = rhs(sol.t[k], Eigen::Vector4d(st));
    curves::Sample smp;
    smp.t = sol.t[k];
    smp.point = Eigen::Vector3d(sol.t[k], st(0), st(2));
    smp.velocity = Eigen::Vector3d(1.0, st(1), st(3));
    smp.acceleration = Eigen::Vector3d(0.0, d(1), d(3));
    tr.samples.push_back(std::move(smp));
  }
  return tr;
}

KropinaDim3::ShootingResult KropinaDim3::shoot(double a, double b, double ya, double pa, double yb, double pb,
                                               double guess_y1, double guess_p1, const curves::IntegratorConfig& cfg,
                                               double tol, int max_iter) const {
  curves::IntegratorConfig c = cfg;
  c.ode.max_state_norm = std::min(c.ode.max_state_norm,
                                  1e6 * (1.0 + std::abs(ya) + std::abs(pa) + std::abs(yb) + std::abs(pb)));
  c.ode.max_steps = std::min<std::size_t>(c.ode.max_steps, 20000);
  auto mismatch = [&](const Eigen::Vector2d& u, curves::Trajectory* keep) -> std::optional<Eigen::Vector2d> {
    try {
      curves::Trajectory tr = integrate(a, b, Eigen::Vector4d(ya, u(0), pa, u(1)), c);
      const auto& last = tr.samples.back();
      Eigen::Vector2d r(last.point(1) - yb, last.point(2) - pb);
      if (!r.allFinite()) return std::nullopt;
      if (keep) *keep = std::move(tr);
      return r;
    } catch (const curves::CurveError&) {
      return std::nullopt;
    } catch (const ode::IntegrationError&) {
      return std::nullopt;
    } catch (const expr::DomainError&) {
      return std::nullopt;
    }
  };

  Eigen::Vector2d u(guess_y1, guess_p1);
  ShootingResult res;
  auto r = mismatch(u, &res.trajectory);
  // Guesses that blow up before b: shrink the p' guess toward 0.
  for (int k = 1; !r && k <= 12; ++k) {
    u(1) = guess_p1 * std::ldexp(1.0, -k);
    r = mismatch(u, &res.trajectory);
  }
  if (!r) throw ShootingFailed("shooting: initial guess does not integrate to the far endpoint");
  for (int it = 0; it < max_iter; ++it) {
    res.iterations = it;
    if (r->norm() <= tol) break;
    Eigen::Matrix2d J;
    for (int k = 0; k < 2; ++k) {
      Eigen::Vector2d du = Eigen::Vector2d::Zero();
      du(k) = 1e-7 * (1.0 + std::abs(u(k)));
      const auto rp = mismatch(u + du, nullptr);
      const auto rm = mismatch(u - du, nullptr);
      if (!rp || !rm) throw ShootingFailed("shooting: Jacobian evaluation failed");
      J.col(k) = (*rp - *rm) / (2.0 * du(k));
    }
    const Eigen::Vector2d step = J.fullPivLu().solve(-*r);
    if (!step.allFinite()) throw ShootingFailed("shooting: singular Jacobian");
    double lambda = 1.0;
    bool improved = false;
    for (int bt = 0; bt < 30; ++bt) {
      curves::Trajectory trial;
      const auto rt = mismatch(u + lambda * step, &trial);
      if (rt && rt->norm() < r->norm()) {
        u += lambda * step;
        r = rt;
        res.trajectory = std::move(trial);
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved) break;
  }
  res.y1_a = u(0);
  res.p1_a = u(1);
  res.mismatch = r->norm();
  if (res.mismatch > tol) {
    throw ShootingFailed("shooting did not converge (mismatch " + std::to_string(res.mismatch) + ")");
  }
  return res;
}

}  // namespace lcgeom::kropina
