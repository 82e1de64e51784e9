#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "disloc/dislocation.hpp"

using namespace disloc;

namespace {

DislocationForm make(const char* beta, double a = 0.5, const char* r = "quintic") {
  return DislocationForm(beta_catalog(beta), a, smoothing_catalog(r));
}

double loop_integral(const DislocationForm& form, const std::vector<Point>& poly) {
  return integrate_line(form.evaluator(), poly, form.cuts(), form.spec());
}

}  // namespace

TEST_CASE("constant dx field: potentials are x - 1 and the form is exact") {
  const DislocationForm form = make("dx");
  CHECK(std::abs(form.circulation()) < 1e-14);
  // boundary potential walked counterclockwise from (1, 1/2)
  CHECK(std::abs(form.boundary_potential({0, 1}) - (-1.0)) < 1e-13);
  CHECK(std::abs(form.boundary_potential({0, 0}) - (-1.0)) < 1e-13);
  CHECK(std::abs(form.boundary_potential({1, 0}) - 0.0) < 1e-13);
  CHECK(std::abs(form.horizontal_potential({0.2, 0.7}) - (-0.8)) < 1e-13);
  CHECK(std::abs(form.potential({0.6, 0.9}) - (-0.4)) < 1e-12);
  CHECK(std::abs(form.potential({0.5, 0.5}, Side::Below) - (-0.5)) < 1e-12);

  std::mt19937_64 rng(7);
  auto u = [&] { return double(rng() >> 11) * 0x1.0p-53; };
  for (int i = 0; i < 50; ++i) {
    const Point p{u(), u()};
    const Covector w = form.eval(p, p.y == 0.5 ? Side::Below : Side::Auto);
    CHECK(std::abs(w.c1 - 1.0) < 1e-12);
    CHECK(std::abs(w.c2) < 1e-12);
  }
}

TEST_CASE("constant dy field: potential is y - 1/2 everywhere") {
  const DislocationForm form = make("dy");
  CHECK(std::abs(form.circulation()) < 1e-14);
  CHECK(std::abs(form.boundary_potential({1, 1}) - 0.5) < 1e-13);
  CHECK(std::abs(form.boundary_potential({0, 1}) - 0.5) < 1e-13);
  CHECK(std::abs(form.boundary_potential({0, 0}) - (-0.5)) < 1e-13);
  for (const Point p : {Point{0.1, 0.2}, Point{0.5, 0.8}, Point{0.6, 0.49},
                        Point{0.99, 0.01}, Point{0.3, 0.5}}) {
    // on the cut line the Auto side is only rejected inside the strip
    const Side side = (p.y == 0.5 && p.x > 0.25 && p.x <= 0.75) ? Side::Below : Side::Auto;
    CHECK(std::abs(form.potential(p, side) - (p.y - 0.5)) < 1e-12);
    const Covector w = form.eval(p, side);
    CHECK(std::abs(w.c1) < 1e-12);
    CHECK(std::abs(w.c2 - 1.0) < 1e-12);
  }
  // zero circulation: the two sides agree everywhere on the cut line
  CHECK(form.potential({0.6, 0.5}, Side::Below) == form.potential({0.6, 0.5}, Side::Above));
}

TEST_CASE("unit circulation field: jump density and one-sided traces") {
  const DislocationForm form = make("linear_y");  // (1+x) dy, circulation 1
  CHECK(std::abs(form.circulation() - 1.0) < 1e-12);
  CHECK(form.x_left() == 0.25);
  CHECK(form.x_right() == 0.75);

  // centered jump: (1/a) r'(0) * circulation = 2 * 1.875
  CHECK(std::abs(form.jump(0.5) - 3.75 * form.circulation()) < 1e-11);
  CHECK(form.jump(0.25) == 0.0);
  CHECK(form.jump(0.75) == 0.0);
  CHECK(form.jump(0.1) == 0.0);

  // the jump of the dx component equals the jump density; dy is continuous
  for (double x : {0.3, 0.45, 0.6, 0.7}) {
    const Covector below = form.eval({x, 0.5}, Side::Below);
    const Covector above = form.eval({x, 0.5}, Side::Above);
    CHECK(std::abs((below.c1 - above.c1) - form.jump(x)) < 1e-12);
    CHECK(std::abs(below.c2 - above.c2) < 1e-14);
  }

  // boundary compatibility on the vertical edges
  for (double y : {0.05, 0.3, 0.5, 0.77, 1.0}) {
    const Covector l = form.eval({0, y});
    const Covector r = form.eval({1, y});
    CHECK(std::abs(l.c1 - 0.0) < 1e-12);
    CHECK(std::abs(l.c2 - 1.0) < 1e-12);
    CHECK(std::abs(r.c1 - 0.0) < 1e-12);
    CHECK(std::abs(r.c2 - 2.0) < 1e-12);
  }

  // potential jumps: full circulation on the ray, r(t) * circulation on the cut
  const double ray_jump = form.potential({0.9, 0.5}, Side::Below) -
                          form.potential({0.9, 0.5}, Side::Above);
  CHECK(std::abs(ray_jump - form.circulation()) < 1e-12);
  CHECK(form.potential({0.9, 0.5}) == form.potential({0.9, 0.5}, Side::Below));
  const SmoothingFunction& q = smoothing_catalog("quintic");
  const double cut_jump = form.potential({0.6, 0.5}, Side::Below) -
                          form.potential({0.6, 0.5}, Side::Above);
  CHECK(std::abs(cut_jump - q.r(0.2) * form.circulation()) < 1e-12);

  // the form is single-valued on the ray
  const Covector rb = form.eval({0.9, 0.5}, Side::Below);
  const Covector ra = form.eval({0.9, 0.5}, Side::Above);
  CHECK(rb.c1 == ra.c1);
  CHECK(rb.c2 == ra.c2);
}

TEST_CASE("closedness: loops that avoid the cut have zero circulation") {
  for (const char* name : {"linear_y", "mixed_sin", "minus_y_dx"}) {
    const DislocationForm form = make(name);
    auto square_loop = [](Point c, double r) {
      return std::vector<Point>{{c.x - r, c.y - r},
                                {c.x + r, c.y - r},
                                {c.x + r, c.y + r},
                                {c.x - r, c.y + r},
                                {c.x - r, c.y - r}};
    };
    CHECK(std::abs(loop_integral(form, square_loop({0.2, 0.3}, 0.1))) < 1e-10);
    CHECK(std::abs(loop_integral(form, square_loop({0.8, 0.77}, 0.15))) < 1e-10);
    // inside the strip but below the cut line
    CHECK(std::abs(loop_integral(form, square_loop({0.5, 0.25}, 0.1))) < 1e-10);
    // straddling the left seam
    CHECK(std::abs(loop_integral(form, square_loop({0.25, 0.7}, 0.1))) < 1e-10);
  }
}

TEST_CASE("loops through the cut pick up the smoothed circulation") {
  const DislocationForm form = make("linear_y");
  const SmoothingFunction& q = smoothing_catalog("quintic");
  // counterclockwise, routed through the cut at x = 0.7 (up) and x = 0.3 (down)
  const std::vector<Point> partial{{0.3, 0.3}, {0.7, 0.3}, {0.7, 0.5}, {0.7, 0.7},
                                   {0.3, 0.7}, {0.3, 0.5}, {0.3, 0.3}};
  const double expect = form.circulation() * (q.r(0.4) - q.r(-0.4));
  CHECK(std::abs(loop_integral(form, partial) - expect) < 1e-10);

  // a loop around the whole segment sees the full circulation
  const std::vector<Point> full{{0.1, 0.2}, {0.9, 0.2}, {0.9, 0.5}, {0.9, 0.8},
                                {0.1, 0.8}, {0.1, 0.5}, {0.1, 0.2}};
  CHECK(std::abs(loop_integral(form, full) - form.circulation()) < 1e-10);
}

TEST_CASE("interpolants match the horizontal potential at the seams") {
  const DislocationForm form = make("mixed_sin");
  for (double y : {0.1, 0.4, 0.9}) {
    const Point seam_l{form.x_left(), y}, seam_r{form.x_right(), y};
    CHECK(std::abs(form.taylor_interpolant(Lane::Left, seam_l) -
                   form.horizontal_potential(seam_l)) < 1e-13);
    CHECK(std::abs(form.taylor_interpolant(Lane::Right, seam_r) -
                   form.horizontal_potential(seam_r)) < 1e-13);
  }
  // for a field with b1 independent of x the left interpolant is constant in x
  const DislocationForm ly = make("linear_y");
  CHECK(ly.taylor_interpolant(Lane::Left, {0.6, 0.3}) ==
        ly.taylor_interpolant(Lane::Left, {0.3, 0.3}));
}

TEST_CASE("side flags and domain errors") {
  const DislocationForm form = make("linear_y");
  CHECK_THROWS_AS(form.eval({0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(form.potential({0.6, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(form.potential({0.75, 0.5}), std::invalid_argument);
  CHECK_NOTHROW(form.potential({0.8, 0.5}));          // ray resolves to Below
  CHECK_NOTHROW(form.eval({0.25, 0.5}));              // seam itself is one-valued
  CHECK_NOTHROW(form.potential({0.2, 0.5}));          // left of the segment
  CHECK_THROWS_AS(form.horizontal_potential({0.5, 0.1}), std::domain_error);
  CHECK_THROWS_AS(form.boundary_potential({0.5, 0.5}), std::domain_error);
  CHECK_THROWS_AS(form.eval({1.5, 0.5}), std::domain_error);
  CHECK_THROWS_AS(form.eval({0.5, -0.5}), std::domain_error);

  CHECK(form.boundary_potential({1, 0.5}) == 0.0);
  CHECK(std::abs(form.boundary_potential({1, 0.5}, Side::Below) - form.circulation()) <
        1e-14);
}

TEST_CASE("strip width validation") {
  const SmoothOneForm& beta = beta_catalog("linear_y");
  const SmoothingFunction& r = smoothing_catalog("quintic");
  CHECK_THROWS_AS(DislocationForm(beta, 0.04, r), std::invalid_argument);
  CHECK_THROWS_AS(DislocationForm(beta, 0.96, r), std::invalid_argument);
  CHECK_THROWS_AS(DislocationForm(beta, 0.0, r), std::invalid_argument);
  CHECK_THROWS_AS(DislocationForm(beta, 1.0, r), std::invalid_argument);
  // the tile-level path admits narrow strips explicitly
  DislocationForm::Options opts;
  opts.check_a_range = false;
  CHECK_NOTHROW(DislocationForm(beta, 0.03125, r, QuadratureSpec(), opts));
}

TEST_CASE("curved field circulation matches its exterior derivative integral") {
  // for (1+x) dy + sin(pi y) dx the area integral of d(beta) is exactly 1
  const DislocationForm form = make("mixed_sin");
  CHECK(std::abs(form.circulation() - 1.0) < 1e-10);
}

TEST_CASE("vanishing detection") {
  CHECK(!make("linear_y").vanishing_warning());
  SmoothOneForm zero = beta_catalog("dx");
  zero.name = "zero";
  zero.b1 = [](Point) { return 0.0; };
  const DislocationForm form(zero, 0.5, smoothing_catalog("quintic"));
  CHECK(form.vanishing_warning());
}

TEST_CASE("evaluation is deterministic across instances and cache reuse") {
  const DislocationForm f1 = make("mixed_sin");
  const DislocationForm f2 = make("mixed_sin");
  std::mt19937_64 rng(42);
  auto u = [&] { return double(rng() >> 11) * 0x1.0p-53; };
  for (int i = 0; i < 200; ++i) {
    const Point p{u(), u()};
    const Covector a = f1.eval(p);
    const Covector b = f2.eval(p);
    const Covector c = f1.eval(p);  // warm row cache
    CHECK(a.c1 == b.c1);
    CHECK(a.c2 == b.c2);
    CHECK(a.c1 == c.c1);
    CHECK(a.c2 == c.c2);
  }
}
