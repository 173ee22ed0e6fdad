#pragma once

// Adaptive Dormand-Prince 5(4) integrator with exact landing on requested
// output points and on a terminal event.

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace lcgeom::ode {

using State = Eigen::VectorXd;
using Rhs = std::function<void(double t, const State& y, State& dydt)>;
// Terminal event: integration stops where the function changes sign.
using Event = std::function<double(double t, const State& y)>;

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Config {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double initial_step = 1e-3;
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 200000;
  // IntegrationError once the max-norm of the state exceeds this.
  double max_state_norm = std::numeric_limits<double>::infinity();
};

struct Stats {
  std::size_t steps = 0;
  std::size_t rejected = 0;
  double max_error_estimate = 0.0;  // largest accepted scaled error norm
};

struct Solution {
  std::vector<double> t;
  std::vector<State> y;
  Stats stats;
  bool event_triggered = false;
};

struct Options {
  // When set, samples are recorded exactly at these parameters (within the
  // span, in integration order) instead of at every accepted step.
  std::optional<std::vector<double>> output_points;
  std::optional<Event> stop_event;
  double event_tol = 1e-14;
};

// Integrates from t0 to t1 (t1 < t0 allowed). The initial point is always
// recorded; the final point is recorded whether reached by t1 or the event.
Solution integrate(const Rhs& f, double t0, const State& y0, double t1, const Config& cfg,
                   const Options& opts = {});

}  // namespace lcgeom::ode
