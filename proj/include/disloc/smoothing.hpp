#pragma once

#include <functional>
#include <string>
#include <vector>

namespace disloc {

// Transition profile r used to blend the two quadratic interpolants across
// the middle strip: r == 0 left of t = -1/2, r == 1 right of t = +1/2,
// nondecreasing in between.  r and r' are supplied as a consistent pair;
// the singular jump density is proportional to r'.
struct SmoothingFunction {
  std::string name;
  std::function<double(double)> r;
  std::function<double(double)> r_prime;

  // Max of r' over [-1/2, 1/2] by dense symmetric sampling (hits t = 0).
  double sup_r_prime(int samples = 100000) const;
};

struct SmoothingCheck {
  bool endpoints_ok = false;   // r(-1/2) = 0 and r(1/2) = 1
  bool monotone_ok = false;    // r' >= -1e-12 on a dense grid
  bool consistent_ok = false;  // integral of r' equals r(1/2) - r(-1/2)
  double unit_mass_err = 0.0;  // | integral of r' - 1 |
  bool all_ok() const { return endpoints_ok && monotone_ok && consistent_ok; }
};
SmoothingCheck validate_smoothing(const SmoothingFunction& r);

// Catalog: "quintic" (default C^2 smoothstep), "bump" (C-infinity,
// normalized bump integral), and "corrupt" -- a deliberately broken
// non-monotone profile whose r' is inconsistent with r, admitted only when
// allow_corrupt is set (fault-injection for the closedness checks).
const SmoothingFunction& smoothing_catalog(const std::string& name, bool allow_corrupt = false);
std::vector<std::string> smoothing_catalog_names();

}  // namespace disloc
