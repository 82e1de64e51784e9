#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "disloc/homogenization.hpp"

using namespace disloc;

namespace {

DislocationArray make_array(const char* beta, double a, int n,
                            const char* r = "quintic") {
  return DislocationArray(beta_catalog(beta), a, smoothing_catalog(r), n);
}

}  // namespace

TEST_CASE("closed fields are reproduced exactly at every scale") {
  for (const char* name : {"dx", "dy"}) {
    const SmoothOneForm& beta = beta_catalog(name);
    for (int n : {1, 2, 4}) {
      DislocationArray arr = make_array(name, 0.5, n);
      double worst = 0.0;
      for (int i = 0; i < 33; ++i) {
        for (int j = 0; j < 33; ++j) {
          const Point p{(i + 0.37) / 33.0, (j + 0.41) / 33.0};
          const Covector mu = arr.eval(p);
          const Covector b = beta.eval(p);
          worst = std::max(worst, std::hypot(mu.c1 - b.c1, mu.c2 - b.c2));
        }
      }
      CAPTURE(name);
      CAPTURE(n);
      CHECK(worst < 1e-9);
    }
  }
}

TEST_CASE("tile circulations equal the cell integrals of d(beta)") {
  // (1+x) dy has d(beta) = dx^dy, so every quarter cell holds mass 1/4.
  DislocationArray lin = make_array("linear_y", 0.5, 2);
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k)
      CHECK(lin.tile_circulation(k, j) == doctest::Approx(0.25).epsilon(1e-9));

  // sin(pi y) dx + (1+x) dy: the cell mass is 1/4 minus the integral of
  // pi cos(pi y) over the half row, i.e. -1/4 below and +3/4 above.
  DislocationArray mix = make_array("mixed_sin", 0.5, 2);
  double total = 0.0;
  for (int k = 0; k < 2; ++k) {
    CHECK(mix.tile_circulation(k, 0) == doctest::Approx(-0.25).epsilon(1e-9));
    CHECK(mix.tile_circulation(k, 1) == doctest::Approx(0.75).epsilon(1e-9));
    total += mix.tile_circulation(k, 0) + mix.tile_circulation(k, 1);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("assembled field matches the macroscopic field on vertical cell edges") {
  DislocationArray arr = make_array("linear_y", 0.5, 2);
  const SmoothOneForm& beta = beta_catalog("linear_y");
  for (double y : {0.13, 0.37, 0.81}) {
    const Point p{0.5, y};
    const int j = y < 0.5 ? 0 : 1;
    const Covector left = arr.eval_in_cell(0, j, p);
    const Covector right = arr.eval_in_cell(1, j, p);
    const Covector b = beta.eval(p);
    CAPTURE(y);
    CHECK(std::abs(left.c1 - b.c1) < 1e-10);
    CHECK(std::abs(left.c2 - b.c2) < 1e-10);
    CHECK(std::abs(right.c1 - b.c1) < 1e-10);
    CHECK(std::abs(right.c2 - b.c2) < 1e-10);
  }
}

TEST_CASE("locate uses half-open cells clamped at the far edges") {
  DislocationArray arr = make_array("linear_y", 0.5, 4);
  int k = -1, j = -1;
  arr.locate({0.0, 0.0}, k, j);
  CHECK(k == 0);
  CHECK(j == 0);
  arr.locate({0.25, 0.5}, k, j);
  CHECK(k == 1);
  CHECK(j == 2);
  arr.locate({1.0, 1.0}, k, j);
  CHECK(k == 3);
  CHECK(j == 3);
}

TEST_CASE("assembled jump density and cut layout") {
  DislocationArray arr = make_array("linear_y", 0.5, 2);

  // Two cut rows (y = 1/4, 3/4), two segments per row of half-width 1/16.
  const CutSet cuts = arr.cuts();
  REQUIRE(cuts.horizontal_segments.size() == 4);

  // Peak of the first row's left segment: (n^2/a) r'(0) per unit of tile
  // circulation, with r'(0) = 15/8 and tile circulation 1/4.
  CHECK(arr.jump(0, 0.25) == doctest::Approx(3.75).epsilon(1e-9));
  CHECK(arr.jump(0, 0.25 + 0.0625) == 0.0);  // segment edge: profile is flat
  CHECK(arr.jump(0, 0.5) == 0.0);            // between segments

  // The mass of one segment is exactly the circulation of its cell.
  const double lo = 0.25 - 0.0625, hi = 0.25 + 0.0625;
  const int m = 2000;
  double mass = 0.0;
  for (int i = 0; i < m; ++i) {
    const double x = lo + (hi - lo) * (i + 0.5) / m;
    mass += arr.jump(0, x) * (hi - lo) / m;
  }
  CHECK(mass == doctest::Approx(arr.tile_circulation(0, 0)).epsilon(1e-5));
}

TEST_CASE("interior seams glue to first order") {
  for (const char* name : {"linear_y", "mixed_sin"}) {
    for (int n : {2, 4}) {
      DislocationArray arr = make_array(name, 0.5, n);
      const GluingReport rep = check_gluing(arr, 120);
      CAPTURE(name);
      CAPTURE(n);
      CHECK(rep.samples > 0);
      CHECK(rep.max_value_mismatch < 1e-11);
      CHECK(rep.max_derivative_mismatch < 1e-6);
      CHECK(rep.max_circulation_error < 1e-9);
    }
  }
}

TEST_CASE("single-cell array pairing gap matches the direct current difference") {
  const QuadratureSpec spec;
  const TestOneForm alpha = standard_test_forms(4, 2026)[0];
  const SmoothOneForm& beta = beta_catalog("linear_y");
  DislocationForm base(beta, 0.5, smoothing_catalog("quintic"));
  DislocationArray arr = make_array("linear_y", 0.5, 1);

  const double gap = pairing_gap(arr, alpha, Exec::Serial);
  const double direct =
      pair_current(base.evaluator(), base.cuts(), alpha, spec, Exec::Serial) -
      pair_current([&beta](Point p) { return beta.eval(p); }, CutSet{}, alpha,
                   spec, Exec::Serial);
  CHECK(std::abs(gap - direct) < 1e-7);
  CHECK(std::abs(gap) > 1e-8);  // the defect is genuinely nonzero at n = 1
}

TEST_CASE("serial and parallel pairing gaps agree bitwise") {
  DislocationArray arr = make_array("mixed_sin", 0.5, 2);
  const TestOneForm alpha = standard_test_forms(3, 99)[1];
  const double s = pairing_gap(arr, alpha, Exec::Serial);
  const double p = pairing_gap(arr, alpha, Exec::Parallel);
  CHECK(s == p);
}

TEST_CASE("boundary pairing through cuts equals the jump representation") {
  const QuadratureSpec spec;
  for (int n : {1, 2}) {
    DislocationArray arr = make_array("linear_y", 0.5, n);
    for (const TestFunction& f : standard_test_functions(3, 7)) {
      const double via_current =
          boundary_pairing(arr.evaluator(), arr.cuts(), f, spec, Exec::Serial);
      const double via_jump = array_boundary_jump_sum(arr, f);
      CAPTURE(n);
      CAPTURE(f.center.x);
      CHECK(std::abs(via_current - via_jump) < 1e-6);
    }
  }
}

TEST_CASE("convergence table: gaps within bound, decreasing, csv well-formed") {
  const std::vector<TestOneForm> tests = standard_test_forms(2, 11);
  const ConvergenceTable table =
      converge(beta_catalog("linear_y"), 0.5, smoothing_catalog("quintic"),
               {1, 2}, tests);
  REQUIRE(table.rows.size() == 4);
  CHECK(table.strip_sup > 0.0);
  CHECK(table.constant_C > 0.0);
  CHECK(table.sup_rp == doctest::Approx(1.875).epsilon(1e-6));
  for (const ConvergenceRow& row : table.rows) {
    CAPTURE(row.n);
    CAPTURE(row.test_id);
    CHECK(std::abs(row.gap) <= row.bound);
  }
  CHECK(table.max_gap(2) < table.max_gap(1));
  // The slope is undefined with one point and defined once n = 2 lands.
  CHECK(std::isnan(table.rows[0].slope_cum));
  CHECK(std::isfinite(table.rows[2].slope_cum));
  const std::string csv = table.csv();
  CHECK(csv.rfind("n,test_id,gap,bound,slope_cum\n", 0) == 0);
  CHECK(csv.find("nan") != std::string::npos);
  CHECK(csv.find("alpha_0") != std::string::npos);
}
