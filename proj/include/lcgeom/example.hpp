#pragma once

// End-to-end checks of the worked dimension-3 example
// f = (p + e^{-2x} p^3)/2: two explicit paths, the chain along y = 0, the
// intersection of the two paths, and the failure of the chain's paths to
// pass through it.

#include <string>
#include <vector>

#include "lcgeom/lc_core.hpp"

namespace lcgeom::example {

// (p + e^{-2x} p^3) * coefficient
lc::LCStructure structure(double coefficient = 0.5);

// p(x) = (sqrt(e^{x+1}) - sqrt(e^x)) / (sqrt(e) - sqrt(e^x)), x < 1
double chain_p(double x);
double chain_p1(double x);
double chain_p2(double x);

double intersection_x();
double intersection_y();

struct Check {
  int id = 0;
  std::string name;
  bool passed = false;
  double value = 0.0;      // residual, error or margin
  double threshold = 0.0;  // pass: value <= threshold (value > threshold for the margin)
  std::string detail;
};

struct Report {
  std::vector<Check> checks;
  bool all_passed() const;
};

struct Options {
  double tol = 1e-10;
  double margin = 1e-3;
  // start points of the chain's paths along y = 0
  std::vector<double> x0s{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
};

// n = 1 structures only.
Report verify(const lc::LCStructure& s, const Options& opts = {});

}  // namespace lcgeom::example
