#pragma once

#include <array>
#include <memory>
#include <string>

#include "disloc/geometry.hpp"
#include "disloc/quadrature.hpp"
#include "disloc/smoothing.hpp"

namespace disloc {

// Disambiguates one-sided evaluation on the horizontal jump set.  Auto is
// valid anywhere the quantity is single-valued and throws where it is not.
enum class Side { Auto, Below, Above };

// Which quadratic interpolant (anchored at the left or right strip seam).
enum class Lane { Left, Right };

// The singular layering 1-form nu built from a nowhere-vanishing beta on the
// closed unit square.  nu is closed away from the horizontal segment
// Gamma = [1/2 - a/2, 1/2 + a/2] x {1/2}, equals beta on the vertical edges,
// shares beta's circulation, and its normal jump across Gamma carries that
// circulation with density (1/a) r'((x-1/2)/a).
//
// Evaluation uses the derived component formulas, never finite differences
// of the potential.  All 1-D integrals (boundary potential, horizontal
// potentials, the integrated db1/dy terms) run through composite
// Gauss-Legendre panels; per-row tables are memoized behind a shared mutex,
// so concurrent evaluation from OpenMP workers is safe and deterministic.
struct DislocationOptions {
  bool check_a_range = true;   // reject a outside [0.05, 0.95]
  bool warn_vanishing = true;  // sample |beta| and flag near-vanishing
};

class DislocationForm {
 public:
  using Options = DislocationOptions;

  DislocationForm(SmoothOneForm beta, double a, SmoothingFunction r,
                  QuadratureSpec spec = QuadratureSpec(), Options opts = Options());
  DislocationForm(DislocationForm&&) noexcept;
  DislocationForm& operator=(DislocationForm&&) noexcept;
  ~DislocationForm();

  // f0: integral of beta from (1, 1/2) counterclockwise along the boundary.
  // Two-valued at the anchor point itself: Auto/Above give 0, Below gives
  // the full circulation.  q must lie on the boundary.
  double boundary_potential(Point q, Side side = Side::Auto) const;

  // fbar: boundary potential continued horizontally from the nearest
  // vertical edge.  Defined outside the open middle strip; throws inside.
  double horizontal_potential(Point p, Side side = Side::Auto) const;

  // Quadratic interpolant (in x) of fbar anchored at the strip seam.
  double taylor_interpolant(Lane lane, Point p, Side side = Side::Auto) const;

  // The primitive f itself (discontinuous across Gamma and along the ray to
  // the right boundary; Auto resolves the ray to the below side and throws
  // on Gamma proper).
  double potential(Point p, Side side = Side::Auto) const;

  // The layering form nu.  Two-valued only on the open segment; Auto throws
  // there and works everywhere else on the closed square.
  Covector eval(Point p, Side side = Side::Auto) const;

  // Scalar jump density across Gamma: (below - above) of the dx component,
  // equal to (1/a) r'((x-1/2)/a) * circulation; 0 outside the segment.
  double jump(double x) const;

  double circulation() const { return circulation_; }
  double a() const { return a_; }
  double x_left() const { return x_left_; }
  double x_right() const { return x_right_; }
  CutSet::Segment cut_segment() const { return {x_left_, x_right_, 0.5}; }
  CutSet cuts() const;
  const SmoothOneForm& beta() const { return *beta_; }
  const SmoothingFunction& smoothing() const { return r_; }
  const QuadratureSpec& spec() const { return spec_; }
  bool vanishing_warning() const { return vanishing_warning_; }

  CovectorField evaluator(Side side = Side::Auto) const;

 private:
  struct CumTable {
    std::vector<double> edges;
    std::vector<double> prefix;
    std::function<double(double)> g;
    double total() const { return prefix.back(); }
    double prefix_at(double x, const GaussRule& rule) const;
  };
  struct Row {
    double b2_left = 0, b2_right = 0;
    double f0_left = 0, f0_right_above = 0, f0_right_below = 0;
    double fbar_L = 0, fbar_R_above = 0, fbar_R_below = 0;
    double nu2_L = 0, nu2_R = 0;          // dy component of nu at the seams
    double b_L = 0, b_R = 0;              // beta1 at the seams
    double c_L = 0, c_R = 0;              // d(beta1)/dx at the seams
    double bp_L = 0, bp_R = 0;            // d(beta1)/dy at the seams
    double cp_L = 0, cp_R = 0;            // d2(beta1)/dxdy at the seams
    CumTable b1_left, b1_right;           // prefix integrals of beta1
    CumTable db1dy_left, db1dy_right;     // prefix integrals of d(beta1)/dy
  };
  struct BoundaryEdge {
    Point P, Q;
    std::vector<double> tedges;
    std::vector<double> prefix;
  };
  struct RowCache;

  const Row& row(double y) const;
  Row build_row(double y) const;
  CumTable build_cum(double lo, double hi, std::function<double(double)> g) const;
  double edge_partial(int e, double t) const;
  double f0_left_at(double y) const;
  double f0_right_at(double y, Side side) const;
  struct Interpolants {
    double pL, pR, dpL_dx, dpR_dx, dpL_dy, dpR_dy;
  };
  Interpolants interpolants(const Row& row, double x, double fbar_R) const;
  double pick_fbar_R(const Row& row, Point p, Side side, const char* what) const;

  std::shared_ptr<const SmoothOneForm> beta_;
  double a_;
  SmoothingFunction r_;
  QuadratureSpec spec_;
  double x_left_, x_right_;
  double circulation_ = 0.0;
  bool vanishing_warning_ = false;
  std::array<BoundaryEdge, 5> edges_;
  std::array<double, 5> edge_start_{};
  std::unique_ptr<RowCache> rows_;
};

// Measured construction invariants, all of which should be at rounding level
// for a correct build: closedness off the cut (central-difference curl away
// from the cut row and the seams), tangential boundary match against the
// input field, circulation reproduction by an actual boundary loop integral,
// the horizontal-component identity off the strip, and the jump-density
// integral against the circulation.
struct ConstructionReport {
  double max_curl = 0.0;
  double max_boundary_mismatch = 0.0;
  double circulation_error = 0.0;
  double max_horizontal_mismatch = 0.0;
  double jump_identity_error = 0.0;
  int samples = 0;
};

ConstructionReport check_construction(const DislocationForm& form, int samples = 200,
                                      unsigned long long seed = 0xD15C0ULL);

}  // namespace disloc
