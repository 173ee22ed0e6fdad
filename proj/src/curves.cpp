#include "lcgeom/curves.hpp"

#include <cmath>

#include "lcgeom/projective.hpp"

namespace lcgeom::curves {

using model::TangentKind;

ClassificationError::ClassificationError(TangentKind found, const std::string& what)
    : CurveError(what + " (direction is " + std::string(model::to_string(found)) + ")"), found_(found) {}

std::string_view to_string(CurveKind k) {
  switch (k) {
    case CurveKind::kGeodesic: return "geodesic";
    case CurveKind::kChain: return "chain";
    case CurveKind::kNullChain: return "null_chain";
    case CurveKind::kKropinaGeodesic: return "kropina_geodesic";
    case CurveKind::kKFlow: return "k_flow";
  }
  return "?";
}

GeodesicSolver::GeodesicSolver(feff::MetricField g) : g_(std::move(g)) {
  const std::size_t d = g_.dim();
  dg_.assign(d, std::vector<std::vector<std::optional<expr::Expression>>>(d, std::vector<std::optional<expr::Expression>>(d)));
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = a; b < d; ++b) {
        const auto& c = g_.coefficient(a, b);
        if (!c.depends_on(k)) continue;
        expr::Expression e = c.diff(k);
        if (e.is_zero()) continue;
        dg_[k][a][b] = e;
      }
    }
  }
}

void GeodesicSolver::derivatives_at(const Vec& q, std::vector<Eigen::MatrixXd>& dg) const {
  const std::size_t d = dim();
  const std::span<const double> pt(q.data(), d);
  dg.assign(d, Eigen::MatrixXd::Zero(d, d));
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = a; b < d; ++b) {
        if (!dg_[k][a][b]) continue;
        const double v = dg_[k][a][b]->eval(pt);
        dg[k](a, b) = v;
        dg[k](b, a) = v;
      }
    }
  }
}

namespace {

Eigen::FullPivLU<Eigen::MatrixXd> factor(const Eigen::MatrixXd& g) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(g);
  if (!lu.isInvertible()) throw CurveError("metric is singular at the current point");
  return lu;
}

std::vector<double> assemble_christoffel(const Eigen::MatrixXd& g, const std::vector<Eigen::MatrixXd>& dg) {
  const auto d = static_cast<std::size_t>(g.rows());
  const auto lu = factor(g);
  std::vector<double> out(d * d * d, 0.0);
  Vec rhs(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      for (std::size_t l = 0; l < d; ++l) rhs(l) = 0.5 * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
      const Vec gam = lu.solve(rhs);
      for (std::size_t k = 0; k < d; ++k) {
        out[(k * d + i) * d + j] = gam(k);
        out[(k * d + j) * d + i] = gam(k);
      }
    }
  }
  return out;
}

}  // namespace

std::vector<double> GeodesicSolver::christoffel(const Vec& q) const {
  std::vector<Eigen::MatrixXd> dg;
  derivatives_at(q, dg);
  return assemble_christoffel(g_.at(q), dg);
}

std::vector<double> GeodesicSolver::christoffel_fd(const Vec& q, double h) const {
  const std::size_t d = dim();
  std::vector<Eigen::MatrixXd> dg(d);
  for (std::size_t k = 0; k < d; ++k) {
    Vec qp = q;
    Vec qm = q;
    qp(k) += h;
    qm(k) -= h;
    dg[k] = (g_.at(qp) - g_.at(qm)) / (2.0 * h);
  }
  return assemble_christoffel(g_.at(q), dg);
}

Vec GeodesicSolver::acceleration(const Vec& q, const Vec& v) const {
  const std::size_t d = dim();
  std::vector<Eigen::MatrixXd> dg;
  derivatives_at(q, dg);
  Vec w = Vec::Zero(d);
  for (std::size_t i = 0; i < d; ++i) {
    if (v(i) != 0.0) w += v(i) * (dg[i] * v);
  }
  for (std::size_t l = 0; l < d; ++l) w(l) -= 0.5 * v.dot(dg[l] * v);
  return -factor(g_.at(q)).solve(w);
}

Trajectory GeodesicSolver::integrate(const Vec& q0, const Vec& v0, double t0, double t1, const IntegratorConfig& cfg,
                                     const ode::Options& opts) const {
  const auto d = static_cast<Eigen::Index>(dim());
  if (q0.size() != d || v0.size() != d) throw CurveError("initial data has the wrong dimension");
  ode::State y0(2 * d);
  y0 << q0, v0;
  const ode::Rhs rhs = [this, d](double, const ode::State& y, ode::State& dy) {
    dy.resize(2 * d);
    dy.head(d) = y.tail(d);
    dy.tail(d) = acceleration(y.head(d), y.tail(d));
  };
  const ode::Solution sol = ode::integrate(rhs, t0, y0, t1, cfg.ode, opts);

  Trajectory tr;
  tr.kind = CurveKind::kGeodesic;
  tr.coords = g_.coords()->names();
  tr.stats = sol.stats;
  const double e0 = norm2(q0, v0);
  tr.launched_null = std::abs(e0) <= 1e-12 * (1.0 + v0.squaredNorm());
  for (std::size_t k = 0; k < sol.t.size(); ++k) {
    Sample s;
    s.t = sol.t[k];
    s.point = sol.y[k].head(d);
    s.velocity = sol.y[k].tail(d);
    s.acceleration = acceleration(s.point, s.velocity);
    if (tr.launched_null) tr.max_null_drift = std::max(tr.max_null_drift, std::abs(norm2(s.point, s.velocity)));
    tr.samples.push_back(std::move(s));
  }
  if (tr.launched_null && tr.max_null_drift > cfg.null_drift_tol) {
    throw NullDriftError("null geodesic drifted: max |g(c',c')| = " + std::to_string(tr.max_null_drift));
  }
  if (sol.event_triggered) tr.notes.push_back("stopped by event");
  return tr;
}

ode::Event coordinate_event(std::size_t index, double value) {
  return [index, value](double, const ode::State& y) { return y(static_cast<Eigen::Index>(index)) - value; };
}

FeffermanCurves::FeffermanCurves(const lc::LCStructure& s) : s_(s), solver_(feff::build_fefferman(s)) {}

double FeffermanCurves::K_pairing(const Vec& point, const Vec& velocity) const {
  const std::size_t n = s_.n();
  double sigma = velocity(n);
  for (std::size_t i = 0; i < n; ++i) sigma -= point(n + 1 + i) * velocity(i);
  return 2.0 * sigma;
}

FeffermanCurves::Lift FeffermanCurves::null_lift(const Vec& q, const Vec& v, double k, double s0) const {
  const auto d = static_cast<Eigen::Index>(s_.dim());
  if (q.size() != d || v.size() != d) throw CurveError("point/direction must have 2n+1 coordinates");
  const TangentKind kind = lc::classify_point_vector(s_, q, v);
  Lift lift;
  lift.kind = kind;
  lift.point.resize(d + 1);
  lift.point << q, s0;
  lift.velocity.resize(d + 1);
  lift.velocity << v, 0.0;
  switch (kind) {
    case TangentKind::kTransverse: {
      const double sigma = lc::coframe(s_, q).sigma.dot(v);
      const double gmm = solver_.norm2(lift.point, lift.velocity);
      lift.velocity(d) = -gmm / (4.0 * sigma);
      break;
    }
    case TangentKind::kNullGeneric:
    case TangentKind::kInE:
    case TangentKind::kInF: lift.velocity(d) = k; break;
    case TangentKind::kContactNonnull: throw ClassificationError(kind, "contact non-null direction has no null lift");
    case TangentKind::kZero: throw ClassificationError(kind, "zero direction");
  }
  return lift;
}

LiftedCurve FeffermanCurves::run(const Lift& lift, CurveKind kind, double t0, double t1, const IntegratorConfig& cfg,
                                 const ode::Options& opts) const {
  LiftedCurve out;
  out.lift = solver_.integrate(lift.point, lift.velocity, t0, t1, cfg, opts);
  out.lift.kind = kind;
  out.max_null_drift = out.lift.max_null_drift;
  const auto d = static_cast<Eigen::Index>(s_.dim());
  out.projection.kind = kind;
  out.projection.coords = s_.vars()->names();
  out.projection.stats = out.lift.stats;
  out.projection.notes = out.lift.notes;
  out.min_abs_K_pairing = std::numeric_limits<double>::infinity();
  for (const Sample& s : out.lift.samples) {
    const double kp = std::abs(K_pairing(s.point, s.velocity));
    out.min_abs_K_pairing = std::min(out.min_abs_K_pairing, kp);
    out.max_abs_K_pairing = std::max(out.max_abs_K_pairing, kp);
    Sample p;
    p.t = s.t;
    p.point = s.point.head(d);
    p.velocity = s.velocity.head(d);
    p.acceleration = s.acceleration.head(d);
    out.projection.samples.push_back(std::move(p));
  }
  return out;
}

LiftedCurve FeffermanCurves::chain(const Vec& q, const Vec& v, double t0, double t1, const IntegratorConfig& cfg,
                                   double s0, const ode::Options& opts) const {
  const TangentKind kind = lc::classify_point_vector(s_, q, v);
  if (kind != TangentKind::kTransverse) throw ClassificationError(kind, "chain requires a transverse direction");
  return run(null_lift(q, v, 0.0, s0), CurveKind::kChain, t0, t1, cfg, opts);
}

LiftedCurve FeffermanCurves::null_chain(const Vec& q, const Vec& v, double k, double t0, double t1,
                                        const IntegratorConfig& cfg, double s0, const ode::Options& opts) const {
  const TangentKind kind = lc::classify_point_vector(s_, q, v);
  if (kind != TangentKind::kNullGeneric && kind != TangentKind::kInE && kind != TangentKind::kInF) {
    throw ClassificationError(kind, "null-chain requires a contact null direction");
  }
  LiftedCurve out = run(null_lift(q, v, k, s0), CurveKind::kNullChain, t0, t1, cfg, opts);
  if (kind != TangentKind::kNullGeneric) {
    out.projection.notes.push_back("extrapolated E/F lift: direction is " + std::string(model::to_string(kind)));
    out.lift.notes.push_back(out.projection.notes.back());
  }
  return out;
}

LiftedCurve FeffermanCurves::k_flow(const Vec& q, double s0, double t0, double t1, const IntegratorConfig& cfg) const {
  const auto d = static_cast<Eigen::Index>(s_.dim());
  if (q.size() != d) throw CurveError("point must have 2n+1 coordinates");
  Lift lift;
  lift.kind = TangentKind::kZero;
  lift.point.resize(d + 1);
  lift.point << q, s0;
  lift.velocity = Vec::Zero(d + 1);
  lift.velocity(d) = 1.0;
  return run(lift, CurveKind::kKFlow, t0, t1, cfg, {});
}

PathProjection project_to_paths(const lc::LCStructure& s, const Trajectory& traj) {
  const std::size_t n = s.n();
  const auto m = static_cast<Eigen::Index>(n + 1);
  std::optional<proj::ChristoffelField> gamma;
  try {
    gamma = proj::christoffels_from_fij(s);
  } catch (const proj::NotProjective&) {
  }
  if (!gamma && n != 1) throw CurveError("project_to_paths needs n = 1 or a projective structure");

  PathProjection out;
  if (n == 1) out.ode_residual.emplace();
  if (gamma) out.geodesic_residual.emplace();
  for (const Sample& smp : traj.samples) {
    const Vec x = smp.point.head(m);
    const Vec xd = smp.velocity.head(m);
    const Vec xdd = smp.acceleration.head(m);
    out.t.push_back(smp.t);
    out.base_points.push_back(x);
    if (n == 1) {
      const double yp = xd(1) / xd(0);
      const double ypp = (xdd(1) * xd(0) - xd(1) * xdd(0)) / std::pow(xd(0), 3);
      const std::vector<double> pt{x(0), x(1), yp};
      out.ode_residual->push_back(ypp - s.f(0, 0).eval(pt));
    }
    if (gamma) {
      const std::span<const double> pt(x.data(), static_cast<std::size_t>(m));
      Vec A = xdd;
      for (Eigen::Index a = 0; a < m; ++a) {
        for (Eigen::Index b = 0; b < m; ++b) {
          for (Eigen::Index c = 0; c < m; ++c) {
            const auto& e = gamma->get(a, b, c);
            if (e.is_zero()) continue;
            A(a) += e.eval(pt) * xd(b) * xd(c);
          }
        }
      }
      double worst = 0.0;
      for (Eigen::Index a = 0; a < m; ++a) {
        for (Eigen::Index b = a + 1; b < m; ++b) worst = std::max(worst, std::abs(A(a) * xd(b) - A(b) * xd(a)));
      }
      out.geodesic_residual->push_back(worst / std::pow(xd.norm(), 3));
    }
  }
  const auto& primary = gamma ? *out.geodesic_residual : *out.ode_residual;
  for (double r : primary) out.max_residual = std::max(out.max_residual, std::abs(r));
  return out;
}

}  // namespace lcgeom::curves
