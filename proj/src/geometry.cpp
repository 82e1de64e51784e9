#include "disloc/geometry.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <random>

namespace disloc {

AffineMap tile_map(int n, int k, int j) {
  if (n < 1) throw std::invalid_argument("tile_map: n must be >= 1");
  if (k < 0 || k >= n || j < 0 || j >= n)
    throw std::invalid_argument("tile_map: tile index out of range");
  return {1.0 / n, {double(k), double(j)}};
}

TwoForm exterior_derivative(const SmoothOneForm& beta) {
  auto dx2 = beta.db2_dx;
  auto dy1 = beta.db1_dy;
  return {"d(" + beta.name + ")",
          [dx2, dy1](Point p) { return dx2(p) - dy1(p); }};
}

SmoothOneForm pullback(const SmoothOneForm& beta, const AffineMap& m) {
  const double s = m.scale;
  if (!(s > 0.0)) throw std::invalid_argument("pullback: map must be invertible (scale > 0)");
  auto wrap = [m](const ScalarField& f, double factor) -> ScalarField {
    return [m, f, factor](Point p) { return factor * f(m.apply(p)); };
  };
  SmoothOneForm out;
  out.name = beta.name + "*";
  out.b1 = wrap(beta.b1, s);
  out.b2 = wrap(beta.b2, s);
  out.db1_dx = wrap(beta.db1_dx, s * s);
  out.db1_dy = wrap(beta.db1_dy, s * s);
  out.db2_dx = wrap(beta.db2_dx, s * s);
  out.db2_dy = wrap(beta.db2_dy, s * s);
  out.d2b1_dxdx = wrap(beta.d2b1_dxdx, s * s * s);
  out.d2b1_dxdy = wrap(beta.d2b1_dxdy, s * s * s);
  return out;
}

SmoothOneForm pushforward(const SmoothOneForm& beta, const AffineMap& m) {
  return pullback(beta, m.inverse());
}

Covector pushforward(Covector w, const AffineMap& m) {
  return {w.c1 / m.scale, w.c2 / m.scale};
}

namespace {

ScalarField constant(double c) {
  return [c](Point) { return c; };
}

SmoothOneForm make_form(std::string name, ScalarField b1, ScalarField b2,
                        ScalarField db1_dx, ScalarField db1_dy,
                        ScalarField db2_dx, ScalarField db2_dy,
                        ScalarField d2b1_dxdx, ScalarField d2b1_dxdy) {
  SmoothOneForm f;
  f.name = std::move(name);
  f.b1 = std::move(b1);
  f.b2 = std::move(b2);
  f.db1_dx = std::move(db1_dx);
  f.db1_dy = std::move(db1_dy);
  f.db2_dx = std::move(db2_dx);
  f.db2_dy = std::move(db2_dy);
  f.d2b1_dxdx = std::move(d2b1_dxdx);
  f.d2b1_dxdy = std::move(d2b1_dxdy);
  return f;
}

const std::map<std::string, SmoothOneForm>& catalog() {
  static const std::map<std::string, SmoothOneForm> forms = [] {
    std::map<std::string, SmoothOneForm> m;
    const double pi = std::numbers::pi;
    m["dx"] = make_form("dx", constant(1), constant(0), constant(0), constant(0),
                        constant(0), constant(0), constant(0), constant(0));
    m["dy"] = make_form("dy", constant(0), constant(1), constant(0), constant(0),
                        constant(0), constant(0), constant(0), constant(0));
    m["dx_plus_dy"] = make_form("dx_plus_dy", constant(1), constant(1), constant(0),
                                constant(0), constant(0), constant(0), constant(0),
                                constant(0));
    // (1+x) dy: unit circulation around the unit square.
    m["linear_y"] = make_form(
        "linear_y", constant(0), [](Point p) { return 1.0 + p.x; }, constant(0),
        constant(0), constant(1), constant(0), constant(0), constant(0));
    // -y dx: same exterior derivative dx^dy, horizontal component active.
    // Vanishes on the bottom edge, so it is for scalar current experiments
    // only, never as a coframe member.
    m["minus_y_dx"] = make_form(
        "minus_y_dx", [](Point p) { return -p.y; }, constant(0), constant(0),
        constant(-1), constant(0), constant(0), constant(0), constant(0));
    // (1+x) dy + sin(pi y) dx: non-closed with a genuinely curved dx part.
    m["mixed_sin"] = make_form(
        "mixed_sin", [pi](Point p) { return std::sin(pi * p.y); },
        [](Point p) { return 1.0 + p.x; }, constant(0),
        [pi](Point p) { return pi * std::cos(pi * p.y); }, constant(1), constant(0),
        constant(0), constant(0));
    return m;
  }();
  return forms;
}

double uniform01(std::mt19937_64& rng) {
  return double(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

const SmoothOneForm& beta_catalog(const std::string& name) {
  const auto& m = catalog();
  auto it = m.find(name);
  if (it == m.end()) throw std::invalid_argument("unknown form in catalog: " + name);
  return it->second;
}

std::vector<std::string> beta_catalog_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : catalog()) names.push_back(k);
  return names;
}

double validate_derivatives(const SmoothOneForm& beta, int samples,
                            unsigned long long seed) {
  std::mt19937_64 rng(seed);
  const double h = 1e-4;
  double worst = 0.0;
  auto check = [&](double analytic, double fd) {
    const double rel = std::abs(analytic - fd) / (std::abs(analytic) + 1.0);
    if (rel > worst) worst = rel;
  };
  for (int i = 0; i < samples; ++i) {
    // Keep the stencil inside the square.
    Point p{2 * h + uniform01(rng) * (1 - 4 * h), 2 * h + uniform01(rng) * (1 - 4 * h)};
    const Point ex{h, 0}, ey{0, h};
    check(beta.db1_dx(p), (beta.b1(p + ex) - beta.b1(p - ex)) / (2 * h));
    check(beta.db1_dy(p), (beta.b1(p + ey) - beta.b1(p - ey)) / (2 * h));
    check(beta.db2_dx(p), (beta.b2(p + ex) - beta.b2(p - ex)) / (2 * h));
    check(beta.db2_dy(p), (beta.b2(p + ey) - beta.b2(p - ey)) / (2 * h));
    check(beta.d2b1_dxdx(p), (beta.db1_dx(p + ex) - beta.db1_dx(p - ex)) / (2 * h));
    check(beta.d2b1_dxdy(p), (beta.db1_dx(p + ey) - beta.db1_dx(p - ey)) / (2 * h));
  }
  return worst;
}

}  // namespace disloc
