#pragma once

#include <functional>
#include <string>
#include <vector>

#include "disloc/geometry.hpp"
#include "disloc/parallel.hpp"

namespace disloc {

// Fixed-order Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_rule(int order);

struct QuadratureSpec {
  int order = 8;                // Gauss-Legendre points per panel (per axis)
  double max_panel = 1.0 / 64;  // maximum panel extent in either direction
  double tol = 1e-9;            // target absolute accuracy (reporting only)

  std::string canonical() const;
  unsigned long long hash() const;  // FNV-1a of canonical(); stamped into CSVs
};

// Declared discontinuity/kink geometry that quadrature panels must respect.
// horizontal_segments are genuine jump cuts (the integrand may be two-valued
// on them); vertical_lines and horizontal_lines are mere snap lines (tile
// seams and lattice skeleton) across which integrands lose smoothness but
// stay continuous.
struct CutSet {
  struct Segment {
    double x_lo = 0.0, x_hi = 0.0, y = 0.0;
    double length() const { return x_hi - x_lo; }
  };
  std::vector<Segment> horizontal_segments;
  std::vector<double> vertical_lines;
  std::vector<double> horizontal_lines;

  CutSet merged_with(const CutSet& other) const;
  double total_cut_length() const;
};

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  bool empty() const { return !(x1 > x0) || !(y1 > y0); }
  Rect intersect(const Rect& o) const;
};

using CovectorField = std::function<Covector(Point)>;

// Which side of a horizontal cut an on-cut evaluation point is displaced to
// (by 1e-12) before the field is sampled.
enum class CutSide { Below, Above };

// Integral of a scalar function over [a, b] with composite panels.
double integrate_segment(const std::function<double(double)>& f, double a, double b,
                         const QuadratureSpec& spec,
                         const std::vector<double>& snap_points = {});

// Line integral of a 1-form field along a polyline.  Panels split at cut and
// snap-line crossings and at most max_panel long.  A segment that crosses a
// horizontal cut transversally at an interior parameter is rejected; touching
// a cut at a segment endpoint is allowed.  Evaluation points landing exactly
// on a cut are displaced by 1e-12 to `side`.
double integrate_line(const CovectorField& field, const std::vector<Point>& polyline,
                      const CutSet& cuts, const QuadratureSpec& spec,
                      CutSide side = CutSide::Below);

// Integral of a scalar density over a rectangle with panels snapped to the
// cut geometry.  Interior Gauss nodes never land on a cut line.  Per-panel
// results are reduced pairwise in a fixed order: Serial and Parallel return
// bitwise-identical values.
double integrate_cell(const std::function<double(Point)>& density, const Rect& rect,
                      const CutSet& cuts, const QuadratureSpec& spec,
                      Exec exec = Exec::Parallel);

// Reference kernel kept for testing and benchmarking: same panel geometry,
// naive single-loop accumulation (no pairwise reduction, no threads).
double integrate_cell_plain(const std::function<double(Point)>& density, const Rect& rect,
                            const CutSet& cuts, const QuadratureSpec& spec);

// Max of |field| over a uniform res x res grid offset by half a cell so that
// samples avoid cut lines; used for the sup-norm factors of the convergence
// bound.  Exact max reduction, policy-independent.
double sup_norm(const std::function<double(Point)>& field, const Rect& rect,
                int resolution = 128, Exec exec = Exec::Parallel);

// Panel decomposition of [lo, hi] honoring interior break points and the
// max_panel limit.  Exposed for row-table construction in the builder.
std::vector<double> panel_edges(double lo, double hi, const std::vector<double>& breaks,
                                double max_panel);

}  // namespace disloc
