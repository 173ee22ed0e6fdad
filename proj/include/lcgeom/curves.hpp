#pragma once

// Geodesics of metric fields and the canonical curves of LC structures
// obtained from null geodesics of the Fefferman metric.

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lcgeom/fefferman.hpp"
#include "lcgeom/lc_core.hpp"
#include "lcgeom/ode.hpp"

namespace lcgeom::curves {

using Vec = Eigen::VectorXd;

class CurveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The direction has the wrong classification for the requested curve.
class ClassificationError : public CurveError {
 public:
  ClassificationError(model::TangentKind found, const std::string& what);
  model::TangentKind found() const { return found_; }

 private:
  model::TangentKind found_;
};

class NullDriftError : public CurveError {
 public:
  using CurveError::CurveError;
};

enum class CurveKind { kGeodesic, kChain, kNullChain, kKropinaGeodesic, kKFlow };
std::string_view to_string(CurveKind k);

struct Sample {
  double t = 0.0;
  Vec point;
  Vec velocity;
  Vec acceleration;
};

struct Trajectory {
  CurveKind kind = CurveKind::kGeodesic;
  std::vector<std::string> coords;
  std::vector<Sample> samples;
  ode::Stats stats;
  bool launched_null = false;
  double max_null_drift = 0.0;  // max |g(c', c')| over samples, when launched null
  std::vector<std::string> notes;
};

struct IntegratorConfig {
  ode::Config ode;
  double null_drift_tol = 1e-8;
};

class GeodesicSolver {
 public:
  explicit GeodesicSolver(feff::MetricField g);

  const feff::MetricField& metric() const { return g_; }
  std::size_t dim() const { return g_.dim(); }

  // Gamma^k_ij stored at [(k*d + i)*d + j].
  std::vector<double> christoffel(const Vec& q) const;
  std::vector<double> christoffel_fd(const Vec& q, double h) const;

  // -Gamma(q)(v, v)
  Vec acceleration(const Vec& q, const Vec& v) const;

  // Launched null (|g(v0,v0)| <= 1e-12 (1 + |v0|^2)) geodesics are checked
  // against cfg.null_drift_tol at every sample; NullDriftError otherwise.
  // The event, if any, sees the state (q, v) stacked.
  Trajectory integrate(const Vec& q0, const Vec& v0, double t0, double t1, const IntegratorConfig& cfg,
                       const ode::Options& opts = {}) const;

  double norm2(const Vec& q, const Vec& v) const { return v.dot(g_.at(q) * v); }

 private:
  void derivatives_at(const Vec& q, std::vector<Eigen::MatrixXd>& dg) const;

  feff::MetricField g_;
  // dg_[k][a][b] = d g_ab / dx^k, nullopt where identically zero
  std::vector<std::vector<std::vector<std::optional<expr::Expression>>>> dg_;
};

// Stop when coordinate `index` of the position reaches `value`.
ode::Event coordinate_event(std::size_t index, double value);

struct LiftedCurve {
  Trajectory lift;        // on M x R_s
  Trajectory projection;  // on M
  double min_abs_K_pairing = 0.0;  // min |g(K, c')| along the lift
  double max_abs_K_pairing = 0.0;
  double max_null_drift = 0.0;
};

class FeffermanCurves {
 public:
  explicit FeffermanCurves(const lc::LCStructure& s);

  const lc::LCStructure& structure() const { return s_; }
  const feff::MetricField& metric() const { return solver_.metric(); }
  const GeodesicSolver& solver() const { return solver_; }

  struct Lift {
    Vec point;
    Vec velocity;
    model::TangentKind kind;
  };

  // Transverse v: the unique null lift, sdot = -g(v,v)/(4 sigma(v)).
  // Contact-null v (null_generic, in_E, in_F): sdot = k.
  Lift null_lift(const Vec& q, const Vec& v, double k, double s0) const;

  LiftedCurve chain(const Vec& q, const Vec& v, double t0, double t1, const IntegratorConfig& cfg, double s0 = 0.0,
                    const ode::Options& opts = {}) const;
  LiftedCurve null_chain(const Vec& q, const Vec& v, double k, double t0, double t1, const IntegratorConfig& cfg,
                         double s0 = 0.0, const ode::Options& opts = {}) const;
  LiftedCurve k_flow(const Vec& q, double s0, double t0, double t1, const IntegratorConfig& cfg) const;

  // g(K, V) = 2 sigma(V_M)
  double K_pairing(const Vec& point, const Vec& velocity) const;

 private:
  LiftedCurve run(const Lift& lift, CurveKind kind, double t0, double t1, const IntegratorConfig& cfg,
                  const ode::Options& opts) const;

  lc::LCStructure s_;
  GeodesicSolver solver_;
};

// Projection of a trajectory on M to the base (x, u) with a residual report.
struct PathProjection {
  std::vector<double> t;
  std::vector<Vec> base_points;
  // y'' - f(x, y, y') for n = 1
  std::optional<std::vector<double>> ode_residual;
  // |(x'' + G(x',x'))^a x'^b - (a <-> b)| / |x'|^3 for projective structures
  std::optional<std::vector<double>> geodesic_residual;
  double max_residual = 0.0;  // of the geodesic residual when available
};

PathProjection project_to_paths(const lc::LCStructure& s, const Trajectory& traj);

}  // namespace lcgeom::curves
