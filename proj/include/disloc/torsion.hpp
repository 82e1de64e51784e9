#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "disloc/homogenization.hpp"

namespace disloc {

// Tangent-vector components in the coordinate basis.
struct Vec2 {
  double v1 = 0.0, v2 = 0.0;
};

inline double vec_norm(Vec2 v) { return std::hypot(v.v1, v.v2); }

// Vector anchored at a reference point (Burgers vectors, torsion values).
struct TangentVector {
  Point at;
  Vec2 v;
};

// 2x2 matrix acting on tangent components, row-major.
struct Mat2 {
  double m11 = 1.0, m12 = 0.0;
  double m21 = 0.0, m22 = 1.0;

  Vec2 apply(Vec2 u) const {
    return {m11 * u.v1 + m12 * u.v2, m21 * u.v1 + m22 * u.v2};
  }
};

// One leg of a coframe: a smooth 1-form, a single layering construction, or
// an assembled array.  Singular legs carry cut geometry and a concentrated
// boundary representation (jump sums along their cut segments); smooth legs
// use their exact exterior derivative.
class CoframeMember {
 public:
  CoframeMember(SmoothOneForm form);
  CoframeMember(std::shared_ptr<const DislocationForm> form);
  CoframeMember(std::shared_ptr<const DislocationArray> array);

  bool singular() const;
  Covector eval(Point p, Side side = Side::Auto) const;
  CovectorField evaluator(Side side = Side::Auto) const;
  CutSet cuts() const;  // empty for smooth legs

  // d(theta) density: exact derivative fields for smooth legs, zero for
  // singular legs (closed away from their cuts).
  double d_density(Point p) const;

  // Boundary current against a test function: T_theta(d eta).  Smooth legs
  // integrate eta against the d(theta) density over the support of eta;
  // singular legs sum eta against their jump densities on the cut segments.
  double boundary(const TestFunction& eta, const QuadratureSpec& spec) const;

 private:
  std::variant<SmoothOneForm, std::shared_ptr<const DislocationForm>,
               std::shared_ptr<const DislocationArray>>
      impl_;
};

struct Coframe {
  CoframeMember theta1, theta2;

  CutSet cuts() const { return theta1.cuts().merged_with(theta2.cuts()); }
};

// Frame dual to the coframe at p: theta^i(e_j) = delta^i_j.
struct FrameAtPoint {
  Point p;
  Vec2 e1, e2;
};

// Inverts the 2x2 coframe component matrix at p.  Throws std::domain_error
// when the matrix is numerically singular (degenerate coframe).
FrameAtPoint dual_frame(const Coframe& cf, Point p, Side side = Side::Auto);

// Parallel transport p -> q of the connection that makes the dual frame
// parallel: E(q) * Theta(p).  Path independent by construction.
Mat2 parallel_transport(const Coframe& cf, Point p, Point q);

// Vector-valued torsion density of a smooth coframe, components anchored at
// p_ref: q -> e_i(p_ref) * d(theta^i)-density(q).  Throws for singular legs.
std::function<Vec2(Point)> torsion_density(const Coframe& cf, Point p_ref);

// Torsion current against a test function: e_i(p_ref) * T_{theta^i}(d eta),
// smooth legs via their exact derivative densities, singular legs
// concentrated on their cut segments.  p_ref must lie off every cut segment.
TangentVector torsion_current(const Coframe& cf, Point p_ref, const TestFunction& eta,
                              const QuadratureSpec& spec = QuadratureSpec());

// Burgers vector of a closed polyline loop: e_i(p_ref) * loop integral of
// theta^i.  The loop may touch cut segments only at their endpoints and may
// cross cut rows where no segment lies; transversal segment crossings throw.
TangentVector burgers_vector(const Coframe& cf, std::vector<Point> loop, Point p_ref,
                             const QuadratureSpec& spec = QuadratureSpec());

// True when p lies within tol of one of the cut segments (the genuine jump
// set; seam snap lines do not count, the fields are continuous there).
bool point_on_cuts(const CutSet& cuts, Point p, double tol = 1e-9);

// Default reference point for experiments.  Thirds never meet the cut rows
// (2j+1)/(2n) and stay outside every strip column once n >= 2, so the
// pointwise coframe gap at this point decays with n instead of stalling.
inline constexpr Point kTorsionRef{1.0 / 3.0, 1.0 / 3.0};

struct TorsionRow {
  int n = 0;
  std::string eta_id;
  double gap1 = 0.0, gap2 = 0.0;  // |T_n(eta) - T(eta)| per component
  double coframe_gap = 0.0;       // |mu_n(p_ref) - beta(p_ref)|, pointwise
  double slope1 = 0.0, slope2 = 0.0;  // cumulative LSQ slopes (NaN if undefined)
};

struct TorsionTable {
  Point p_ref;
  std::vector<TorsionRow> rows;

  std::string csv() const;  // header: n,eta_id,gap_component_1,gap_component_2,bound_note
  double max_gap(int n) const;  // max over both components and all etas
};

// Convergence of the concentrated torsion currents of the n x n arrays
// toward the smooth torsion current of {beta, partner}.  Throws
// std::invalid_argument when p_ref collides with a cut segment for some n,
// naming a nearby clear point in the message.
TorsionTable torsion_homogenization(const SmoothOneForm& beta, double a,
                                    const SmoothingFunction& r,
                                    const SmoothOneForm& partner, Point p_ref,
                                    const std::vector<TestFunction>& etas,
                                    const std::vector<int>& n_list,
                                    const QuadratureSpec& spec = QuadratureSpec());

}  // namespace disloc
