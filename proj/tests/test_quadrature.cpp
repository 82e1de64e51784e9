#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "disloc/quadrature.hpp"

using namespace disloc;

TEST_CASE("gauss rule basics") {
  const GaussRule& r = gauss_rule(8);
  REQUIRE(r.nodes.size() == 8);
  double wsum = 0;
  for (double w : r.weights) wsum += w;
  CHECK(std::abs(wsum - 2.0) < 1e-14);
  for (size_t i = 0; i + 1 < r.nodes.size(); ++i) CHECK(r.nodes[i] < r.nodes[i + 1]);
  for (size_t i = 0; i < r.nodes.size(); ++i)
    CHECK(std::abs(r.nodes[i] + r.nodes[r.nodes.size() - 1 - i]) < 1e-15);
  CHECK_THROWS_AS(gauss_rule(1), std::invalid_argument);
  CHECK_THROWS_AS(gauss_rule(49), std::invalid_argument);
}

TEST_CASE("segment integrals") {
  QuadratureSpec spec;
  CHECK(std::abs(integrate_segment([](double x) { return x * x; }, 0, 1, spec) - 1.0 / 3) <
        1e-15);
  CHECK(std::abs(integrate_segment([](double x) { return std::sin(x); }, 0,
                                   std::numbers::pi, spec) -
                 2.0) < 1e-12);
  // orientation flips the sign
  CHECK(std::abs(integrate_segment([](double x) { return x * x; }, 1, 0, spec) + 1.0 / 3) <
        1e-15);
  // a declared break point makes a step function exact
  auto step = [](double x) { return x < 0.3 ? 1.0 : 2.0; };
  CHECK(std::abs(integrate_segment(step, 0, 1, spec, {0.3}) - 1.7) < 1e-13);
}

TEST_CASE("panel edges honour breaks and max width") {
  const auto e = panel_edges(0, 1, {0.3}, 0.25);
  CHECK(e.front() == 0.0);
  CHECK(e.back() == 1.0);
  bool has_break = false;
  for (double v : e) has_break = has_break || v == 0.3;
  CHECK(has_break);
  for (size_t i = 0; i + 1 < e.size(); ++i) {
    CHECK(e[i] < e[i + 1]);
    CHECK(e[i + 1] - e[i] <= 0.25 + 1e-12);
  }
}

TEST_CASE("cell integrals and policies") {
  QuadratureSpec spec;
  const Rect unit{0, 0, 1, 1};
  auto xy = [](Point p) { return p.x * p.y; };
  const double v = integrate_cell(xy, unit, {}, spec);
  CHECK(std::abs(v - 0.25) < 1e-14);
  CHECK(integrate_cell(xy, unit, {}, spec, Exec::Serial) == v);  // bitwise
  CHECK(std::abs(integrate_cell_plain(xy, unit, {}, spec) - 0.25) < 1e-13);

  // step density across a declared cut is integrated exactly
  CutSet cuts;
  cuts.horizontal_segments.push_back({0.0, 1.0, 0.5});
  auto step = [](Point p) { return p.y < 0.5 ? 1.0 : 3.0; };
  CHECK(std::abs(integrate_cell(step, unit, cuts, spec) - 2.0) < 1e-13);
  CHECK(integrate_cell(step, unit, cuts, spec, Exec::Serial) ==
        integrate_cell(step, unit, cuts, spec, Exec::Parallel));
}

TEST_CASE("line integrals along polylines") {
  QuadratureSpec spec;
  // circulation of (-y dx + x dy) around the unit square = twice the area
  CovectorField rot = [](Point p) { return Covector{-p.y, p.x}; };
  const std::vector<Point> loop{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}};
  CHECK(std::abs(integrate_line(rot, loop, {}, spec) - 2.0) < 1e-13);

  CovectorField dxf = [](Point) { return Covector{1, 0}; };
  CHECK(std::abs(integrate_line(dxf, {{0, 0}, {1, 1}}, {}, spec) - 1.0) < 1e-14);
}

TEST_CASE("transversal cut crossings are rejected, routed ones work") {
  QuadratureSpec spec;
  CutSet cuts;
  cuts.horizontal_segments.push_back({0.3, 0.7, 0.5});
  CovectorField dyf = [](Point) { return Covector{0, 1}; };
  CHECK_THROWS_AS(integrate_line(dyf, {{0.5, 0.3}, {0.5, 0.7}}, cuts, spec),
                  std::invalid_argument);
  const double v =
      integrate_line(dyf, {{0.5, 0.3}, {0.5, 0.5}, {0.5, 0.7}}, cuts, spec);
  CHECK(std::abs(v - 0.4) < 1e-14);
  // crossing outside the segment span is only a snap point, not an error
  const double w = integrate_line(dyf, {{0.1, 0.3}, {0.1, 0.7}}, cuts, spec);
  CHECK(std::abs(w - 0.4) < 1e-14);
}

TEST_CASE("sup norm on the offset grid") {
  auto f = [](Point) { return Covector{3, 4}; };
  auto mag = [f](Point p) {
    const Covector w = f(p);
    return std::hypot(w.c1, w.c2);
  };
  CHECK(sup_norm(mag, {0, 0, 1, 1}, 64) == 5.0);
  CHECK(sup_norm(mag, {0, 0, 1, 1}, 64, Exec::Serial) ==
        sup_norm(mag, {0, 0, 1, 1}, 64, Exec::Parallel));
}
