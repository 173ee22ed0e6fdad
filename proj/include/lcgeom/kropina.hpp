#pragma once

// Kropina pseudo-Finsler function of an LC structure and, for n = 1, the
// Euler-Lagrange system of its length functional in the x-parametrization:
// a curve x -> (x, y(x), p(x)) with w = y' - p.

#include <array>
#include <optional>

#include "lcgeom/curves.hpp"

namespace lcgeom::kropina {

using curves::Vec;

class ContactDirection : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TransversalityLost : public curves::CurveError {
 public:
  using curves::CurveError::CurveError;
};

class ShootingFailed : public curves::CurveError {
 public:
  using curves::CurveError::CurveError;
};

// F(v) = g(v^, v^) / g(K, v^) where v^ is the lift of v along the section
// s = section(x, u, p) (s = 0 when absent). Throws ContactDirection when
// |sigma(v)| <= 1e-12 (1 + |v|).
double kropina_value(const curves::FeffermanCurves& fc, const Vec& q, const Vec& v,
                     const std::optional<expr::Expression>& section = std::nullopt);

class KropinaDim3 {
 public:
  explicit KropinaDim3(const lc::LCStructure& s);

  // State (y, y', p, p') at x -> (y', y'', p', p'').
  Eigen::Vector4d rhs(double x, const Eigen::Vector4d& state) const;

  struct Residuals {
    double el_p;  // y'' - f - f_p w - f_pp w^2/2 - f_ppp w^3/6
    double el_y;  // the y-equation multiplied through by w
  };
  Residuals residuals(double x, double y, double y1, double y2, double p, double p1, double p2) const;

  // Initial-value mode on [x0, x1]; samples at every step, or exactly at
  // output_points when given. Point = (x, y, p), velocity = (1, y', p').
  curves::Trajectory integrate(double x0, double x1, const Eigen::Vector4d& init, const curves::IntegratorConfig& cfg,
                               const std::optional<std::vector<double>>& output_points = std::nullopt) const;

  struct ShootingResult {
    curves::Trajectory trajectory;
    double y1_a = 0.0;  // solved y'(a)
    double p1_a = 0.0;  // solved p'(a)
    double mismatch = 0.0;
    int iterations = 0;
  };
  // Chain with endpoints (a, ya, pa) and (b, yb, pb); unknowns (y'(a), p'(a)).
  ShootingResult shoot(double a, double b, double ya, double pa, double yb, double pb, double guess_y1,
                       double guess_p1, const curves::IntegratorConfig& cfg, double tol = 1e-9,
                       int max_iter = 60) const;

 private:
  struct Derivs {
    double f, fx, fy, fp, fpp, fppp, fpy, fppx, fppy;
  };
  Derivs derivs(double x, double y, double p) const;

  lc::LCStructure s_;
  // f, f_x, f_y, f_p, f_pp, f_ppp, f_py, f_ppx, f_ppy
  std::array<expr::Expression, 9> d_;
};

}  // namespace lcgeom::kropina
