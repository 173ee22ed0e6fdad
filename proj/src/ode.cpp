#include "lcgeom/ode.hpp"

#include <algorithm>
#include <cmath>

namespace lcgeom::ode {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

struct Step {
  State y1;
  State k1, k3, k4, k5, k6, k7;
  double err = 0.0;
};

Step rk_step(const Rhs& f, double t, const State& y, const State& k1, double h, const Config& cfg) {
  Step s;
  s.k1 = k1;
  State k2(y.size());
  State tmp = y + h * a21 * k1;
  f(t + c2 * h, tmp, k2);
  tmp = y + h * (a31 * k1 + a32 * k2);
  s.k3.resize(y.size());
  f(t + c3 * h, tmp, s.k3);
  tmp = y + h * (a41 * k1 + a42 * k2 + a43 * s.k3);
  s.k4.resize(y.size());
  f(t + c4 * h, tmp, s.k4);
  tmp = y + h * (a51 * k1 + a52 * k2 + a53 * s.k3 + a54 * s.k4);
  s.k5.resize(y.size());
  f(t + c5 * h, tmp, s.k5);
  tmp = y + h * (a61 * k1 + a62 * k2 + a63 * s.k3 + a64 * s.k4 + a65 * s.k5);
  s.k6.resize(y.size());
  f(t + h, tmp, s.k6);
  s.y1 = y + h * (a71 * k1 + a73 * s.k3 + a74 * s.k4 + a75 * s.k5 + a76 * s.k6);
  s.k7.resize(y.size());
  f(t + h, s.y1, s.k7);
  const State err = h * (e1 * k1 + e3 * s.k3 + e4 * s.k4 + e5 * s.k5 + e6 * s.k6 + e7 * s.k7);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y(i)), std::abs(s.y1(i)));
    acc += (err(i) / sc) * (err(i) / sc);
  }
  s.err = std::sqrt(acc / static_cast<double>(y.size()));
  return s;
}

// Continuous extension on [t, t+h]; theta in [0,1].
State dense(const State& y0, const Step& s, double h, double theta) {
  const State ydiff = s.y1 - y0;
  const State bspl = h * s.k1 - ydiff;
  const State r4 = ydiff - h * s.k7 - bspl;
  const State r5 = h * (d1 * s.k1 + d3 * s.k3 + d4 * s.k4 + d5 * s.k5 + d6 * s.k6 + d7 * s.k7);
  const double th1 = 1.0 - theta;
  return y0 + theta * (ydiff + th1 * (bspl + theta * (r4 + th1 * r5)));
}

bool finite(const State& y) { return y.allFinite(); }

}  // namespace

Solution integrate(const Rhs& f, double t0, const State& y0, double t1, const Config& cfg, const Options& opts) {
  if (!(cfg.rel_tol > 0 && cfg.abs_tol > 0 && cfg.initial_step > 0)) {
    throw IntegrationError("tolerances and initial step must be positive");
  }
  Solution sol;
  sol.t.push_back(t0);
  sol.y.push_back(y0);
  if (t1 == t0) return sol;
  const double dir = t1 > t0 ? 1.0 : -1.0;

  std::vector<double> outputs;
  if (opts.output_points) {
    for (double p : *opts.output_points) {
      if ((p - t0) * dir > 0 && (t1 - p) * dir >= 0) outputs.push_back(p);
    }
    std::sort(outputs.begin(), outputs.end(), [dir](double a, double b) { return a * dir < b * dir; });
  }
  std::size_t next_out = 0;

  double t = t0;
  State y = y0;
  State k1(y.size());
  f(t, y, k1);
  double h = dir * std::min(cfg.initial_step, std::abs(t1 - t0));
  double g_prev = opts.stop_event ? (*opts.stop_event)(t, y) : 0.0;

  while ((t1 - t) * dir > 0) {
    if (sol.stats.steps + sol.stats.rejected >= cfg.max_steps) {
      throw IntegrationError("maximum number of steps exceeded at t = " + std::to_string(t));
    }
    double target = t1;
    if (next_out < outputs.size()) target = outputs[next_out];
    h = dir * std::min({std::abs(h), cfg.max_step, std::abs(target - t)});
    bool lands = std::abs(target - (t + h)) <= 1e-13 * std::max(1.0, std::abs(target));
    if (lands) h = target - t;

    Step s = rk_step(f, t, y, k1, h, cfg);
    if (!finite(s.y1) || !std::isfinite(s.err)) {
      ++sol.stats.rejected;
      h *= 0.25;
      if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t))) throw IntegrationError("step size underflow (non-finite state)");
      continue;
    }
    if (s.err > 1.0) {
      ++sol.stats.rejected;
      h *= std::max(0.2, 0.9 * std::pow(s.err, -0.2));
      if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t))) throw IntegrationError("step size underflow");
      continue;
    }

    double t_new = lands ? target : t + h;
    // Terminal event inside this step: locate on the dense output, then re-step exactly.
    if (opts.stop_event) {
      const double g_new = (*opts.stop_event)(t_new, s.y1);
      if (g_prev == 0.0 || g_prev * g_new <= 0.0) {
        double lo = 0.0;
        double hi = 1.0;
        if (g_new != 0.0 && g_prev != 0.0) {
          for (int it = 0; it < 200 && (hi - lo) * std::abs(h) > opts.event_tol; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double gm = (*opts.stop_event)(t + mid * h, dense(y, s, h, mid));
            if (gm * g_prev > 0.0) {
              lo = mid;
            } else {
              hi = mid;
            }
          }
        }
        const double hh = (g_prev == 0.0) ? 0.0 : hi * h;
        if (hh != 0.0) {
          Step fin = rk_step(f, t, y, k1, hh, cfg);
          // record any output points before the event
          while (next_out < outputs.size() && (outputs[next_out] - (t + hh)) * dir < 0) {
            const double theta = (outputs[next_out] - t) / hh;
            sol.t.push_back(outputs[next_out]);
            sol.y.push_back(dense(y, fin, hh, theta));
            ++next_out;
          }
          t += hh;
          y = fin.y1;
          ++sol.stats.steps;
          sol.stats.max_error_estimate = std::max(sol.stats.max_error_estimate, fin.err);
        }
        sol.t.push_back(t);
        sol.y.push_back(y);
        sol.event_triggered = true;
        return sol;
      }
      g_prev = g_new;
    }

    if (s.y1.cwiseAbs().maxCoeff() > cfg.max_state_norm) {
      throw IntegrationError("solution blew up at t = " + std::to_string(t_new));
    }
    ++sol.stats.steps;
    sol.stats.max_error_estimate = std::max(sol.stats.max_error_estimate, s.err);
    t = t_new;
    y = s.y1;
    k1 = s.k7;
    const bool at_output = lands && next_out < outputs.size() && target == outputs[next_out];
    if (at_output) ++next_out;
    if (!opts.output_points || at_output || (t1 - t) * dir <= 0) {
      sol.t.push_back(t);
      sol.y.push_back(y);
    }
    const double fac = s.err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(s.err, -0.2), 0.2, 5.0);
    h *= fac;
  }
  // An output point equal to t1 would otherwise be recorded twice.
  if (sol.t.size() >= 2 && sol.t[sol.t.size() - 1] == sol.t[sol.t.size() - 2]) {
    sol.t.pop_back();
    sol.y.pop_back();
  }
  return sol;
}

}  // namespace lcgeom::ode
