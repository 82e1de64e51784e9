#pragma once

#include <array>
#include <string>
#include <vector>

#include "disloc/homogenization.hpp"

namespace disloc {

struct BravaisOptions {
  double level_step = 0.1;  // potential difference between neighboring layers
  int grid_res = 257;       // marching-grid resolution across the unit square
};

// Layer picture of a (possibly dislocated) structure: level sets of the
// layering potential, traced one-sided across the cuts, with the cut overlay
// and the layer ends that terminate on the cut segments.
struct BravaisPicture {
  std::vector<std::array<double, 4>> layer_segments;  // x1, y1, x2, y2
  std::vector<CutSet::Segment> cut_segments;
  std::vector<Point> terminated_points;  // layer ends inside open cut segments
  double level_step = 0.1;

  int terminated_ends() const { return int(terminated_points.size()); }
  std::string svg() const;  // self-contained, deterministic text
};

BravaisPicture bravais_layers(const DislocationForm& form,
                              const BravaisOptions& opts = BravaisOptions());
BravaisPicture bravais_layers(const DislocationArray& array,
                              const BravaisOptions& opts = BravaisOptions());

}  // namespace disloc
