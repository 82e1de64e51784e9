#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace disloc {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }

// A covector (1-form value) at a point, expressed in the dx, dy basis.
struct Covector {
  double c1 = 0.0;  // dx component
  double c2 = 0.0;  // dy component
};

inline Covector operator+(Covector a, Covector b) { return {a.c1 + b.c1, a.c2 + b.c2}; }
inline Covector operator-(Covector a, Covector b) { return {a.c1 - b.c1, a.c2 - b.c2}; }
inline Covector operator*(double s, Covector w) { return {s * w.c1, s * w.c2}; }

// omega ^ alpha = (o1 a2 - o2 a1) dx^dy; returns the scalar density.
inline double wedge(Covector omega, Covector alpha) {
  return omega.c1 * alpha.c2 - omega.c2 * alpha.c1;
}

// Affine map p -> scale * (p + shift), i.e. a homothety composed with a
// pre-translation.  tile_map(n,k,j) sends the unit square onto cell (k,j)
// of the n x n grid.
struct AffineMap {
  double scale = 1.0;
  Point shift{0.0, 0.0};

  Point apply(Point p) const { return {scale * (p.x + shift.x), scale * (p.y + shift.y)}; }
  AffineMap inverse() const {
    if (!(scale > 0.0)) throw std::invalid_argument("AffineMap: scale must be positive");
    return {1.0 / scale, {-scale * shift.x, -scale * shift.y}};
  }
  // (this o other)(p) = this.apply(other.apply(p))
  AffineMap compose(const AffineMap& other) const {
    return {scale * other.scale, {other.shift.x + shift.x / other.scale,
                                  other.shift.y + shift.y / other.scale}};
  }
};

AffineMap tile_map(int n, int k, int j);

using ScalarField = std::function<double(Point)>;

// Smooth 1-form beta = b1 dx + b2 dy with hand-coded partial derivatives.
// The construction of the layering form needs d(b1)/dx exactly for the
// quadratic interpolants and the mixed second partial for their
// y-derivatives, so derivative evaluators are part of the data -- nothing
// here is ever differenced numerically.
struct SmoothOneForm {
  std::string name;
  ScalarField b1, b2;
  ScalarField db1_dx, db1_dy;
  ScalarField db2_dx, db2_dy;
  ScalarField d2b1_dxdx, d2b1_dxdy;

  Covector eval(Point p) const { return {b1(p), b2(p)}; }
};

struct TwoForm {
  std::string name;
  ScalarField density;  // coefficient of dx^dy
};

// d(beta) = (db2/dx - db1/dy) dx^dy.
TwoForm exterior_derivative(const SmoothOneForm& beta);

// Pullback of beta under the affine map m: components scale by m.scale and
// are evaluated at m(p); each derivative order picks up another factor.
SmoothOneForm pullback(const SmoothOneForm& beta, const AffineMap& m);

// Pushforward = pullback along the inverse map.
SmoothOneForm pushforward(const SmoothOneForm& beta, const AffineMap& m);
Covector pushforward(Covector w, const AffineMap& m);

// Named catalog of layering-field candidates used by the CLI and tests.
// Entries meant for coframe use are nowhere vanishing on the unit square;
// minus_y_dx is the exception (zero on y = 0) and serves scalar tests only.
const SmoothOneForm& beta_catalog(const std::string& name);
std::vector<std::string> beta_catalog_names();

// Verifies the hand-coded derivatives against centered finite differences
// of the value evaluators at `samples` interior points.  Returns the worst
// relative mismatch (relative to |analytic| + 1).
double validate_derivatives(const SmoothOneForm& beta, int samples = 200,
                            unsigned long long seed = 0x5eedULL);

}  // namespace disloc
