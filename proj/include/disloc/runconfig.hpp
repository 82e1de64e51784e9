#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "disloc/quadrature.hpp"

namespace disloc {

// Configuration problems are reported as their own exception type so the
// front end can map them to its exit-code contract (2 = bad configuration,
// distinct from 1 = invariant failure).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string cmd = "build";  // build | check | converge | torsion | bravais
  std::string beta = "linear_y";
  std::string r = "quintic";
  double a = 0.5;
  bool allow_corrupt = false;  // admit the fault-injection smoothing profile
  unsigned long long seed = 7;
  int test_forms = 5;
  std::vector<int> n_list{1, 2, 4, 8, 16};
  int order = 8;
  double max_panel = 1.0 / 64;
  double tol = 1e-9;
  std::string out = "out";
  int grid_res = 257;    // layer-picture marching resolution
  double level_step = 0.1;  // layer-picture level spacing
};

// Shortest decimal string that parses back to exactly v.
std::string shortest_double(double v);

// key = value lines with [section] headers and '#' comments. Section names
// are decorative; keys are globally unique. Unknown keys are errors. Values
// layer on top of `base` (file over defaults, flags over file).
RunConfig parse_config_text(const std::string& text, RunConfig base = RunConfig());
RunConfig load_config_file(const std::string& path, RunConfig base = RunConfig());

// Canonical serialization; parsing it back reproduces the config bit for bit.
std::string canonical_config(const RunConfig& c);

void validate_config(const RunConfig& c);  // throws ConfigError
QuadratureSpec config_spec(const RunConfig& c);

}  // namespace disloc
