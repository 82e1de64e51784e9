#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "disloc/bravais.hpp"

using namespace disloc;

namespace {

DislocationForm make_form(const char* beta, double a = 0.5) {
  return DislocationForm(beta_catalog(beta), a, smoothing_catalog("quintic"));
}

DislocationArray make_assembly(const char* beta, int n, double a = 0.5) {
  return DislocationArray(beta_catalog(beta), a, smoothing_catalog("quintic"), n);
}

std::vector<double> distinct_sorted(std::vector<double> v, double tol) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v)
    if (out.empty() || x - out.back() > tol) out.push_back(x);
  return out;
}

// distinct values away from the square boundary, where levels that coincide
// with a potential plateau to machine precision may or may not emit a line
std::vector<double> interior_levels(const std::vector<double>& v) {
  std::vector<double> out;
  for (double x : distinct_sorted(v, 1e-6))
    if (x > 0.05 && x < 0.95) out.push_back(x);
  return out;
}

size_t count_substr(const std::string& s, const std::string& pat) {
  size_t c = 0;
  for (size_t pos = s.find(pat); pos != std::string::npos;
       pos = s.find(pat, pos + pat.size()))
    ++c;
  return c;
}

// level crossings of a sampled trace restricted to (lo, hi), by linear interp
std::vector<double> trace_crossings(const std::vector<double>& f, double level,
                                    double lo, double hi) {
  std::vector<double> xs;
  const int m = int(f.size()) - 1;
  for (int i = 0; i < m; ++i) {
    if ((f[i] > level) == (f[i + 1] > level)) continue;
    const double t = (level - f[i]) / (f[i + 1] - f[i]);
    const double x = (i + t) / m;
    if (x > lo && x < hi) xs.push_back(x);
  }
  return xs;
}

}  // namespace

TEST_CASE("vertical-gradient field draws equally spaced unbroken horizontal layers") {
  const BravaisPicture pic = bravais_layers(make_form("dy"), {0.1, 129});
  CHECK(pic.terminated_ends() == 0);
  CHECK(pic.cut_segments.size() == 1);
  REQUIRE(!pic.layer_segments.empty());
  std::vector<double> ys;
  for (const auto& s : pic.layer_segments) {
    CHECK(std::abs(s[1] - s[3]) < 1e-12);
    ys.push_back(s[1]);
  }
  const std::vector<double> lv = interior_levels(ys);
  REQUIRE(lv.size() == 9);
  for (int m = 0; m < 9; ++m) CHECK(std::abs(lv[m] - 0.1 * (m + 1)) < 1e-9);
}

TEST_CASE("horizontal-gradient field draws equally spaced vertical layers") {
  const BravaisPicture pic = bravais_layers(make_form("dx"), {0.1, 129});
  CHECK(pic.terminated_ends() == 0);
  REQUIRE(!pic.layer_segments.empty());
  std::vector<double> xs;
  for (const auto& s : pic.layer_segments) {
    CHECK(std::abs(s[0] - s[2]) < 1e-12);
    xs.push_back(s[0]);
  }
  const std::vector<double> lv = interior_levels(xs);
  REQUIRE(lv.size() == 9);
  for (int m = 0; m < 9; ++m) CHECK(std::abs(lv[m] - 0.1 * (m + 1)) < 1e-9);
}

TEST_CASE("layer ends on the cut match a one-sided trace oracle") {
  const DislocationForm form = make_form("linear_y");  // circulation 1
  const double h = 0.09;                               // incommensurate with plateaus
  const BravaisPicture pic = bravais_layers(form, {h, 257});

  // independent oracle: sample the two one-sided potential traces along the
  // cut row and count level crossings strictly inside the cut segment
  const int M = 4096;
  std::vector<double> fb(M + 1), fa(M + 1);
  for (int i = 0; i <= M; ++i) {
    const double x = double(i) / M;
    fb[i] = form.potential({x, 0.5}, Side::Below);
    fa[i] = form.potential({x, 0.5}, Side::Above);
  }
  const double margin = 2.0 / 257;
  const double lo = form.x_left() + margin, hi = form.x_right() - margin;
  double tmin = fb[0], tmax = fb[0];
  for (double v : fb) { tmin = std::min(tmin, v); tmax = std::max(tmax, v); }
  for (double v : fa) { tmin = std::min(tmin, v); tmax = std::max(tmax, v); }
  std::vector<double> oracle;
  for (long m = std::lround(std::ceil(tmin / h)); m <= std::lround(std::floor(tmax / h)); ++m) {
    for (double x : trace_crossings(fb, m * h, lo, hi)) oracle.push_back(x);
    for (double x : trace_crossings(fa, m * h, lo, hi)) oracle.push_back(x);
  }

  CHECK(oracle.size() == 11);  // floor(circulation / level_step)
  REQUIRE(pic.terminated_ends() == int(oracle.size()));
  std::vector<double> got;
  for (const Point& p : pic.terminated_points) {
    CHECK(std::abs(p.y - 0.5) < 1e-12);
    CHECK(p.x > form.x_left());
    CHECK(p.x < form.x_right());
    got.push_back(p.x);
  }
  std::sort(got.begin(), got.end());
  std::sort(oracle.begin(), oracle.end());
  for (size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - oracle[i]) < 5e-3);
}

TEST_CASE("array layer picture terminates layers on every cell cut") {
  const BravaisPicture pic = bravais_layers(make_assembly("linear_y", 2), {0.09, 257});
  REQUIRE(pic.cut_segments.size() == 4);
  for (const auto& seg : pic.cut_segments) {
    CHECK(std::abs((seg.x_hi - seg.x_lo) - 0.125) < 1e-12);
    CHECK((std::abs(seg.y - 0.25) < 1e-12 || std::abs(seg.y - 0.75) < 1e-12));
  }
  CHECK(pic.terminated_ends() >= 7);
  CHECK(pic.terminated_ends() <= 14);
  for (const Point& p : pic.terminated_points) {
    bool on_some_cut = false;
    for (const auto& seg : pic.cut_segments)
      on_some_cut = on_some_cut || (std::abs(p.y - seg.y) < 1e-12 &&
                                    p.x > seg.x_lo && p.x < seg.x_hi);
    CHECK(on_some_cut);
  }
  for (const auto& seg : pic.cut_segments) {
    int ends_here = 0;
    for (const Point& p : pic.terminated_points)
      if (std::abs(p.y - seg.y) < 1e-12 && p.x > seg.x_lo && p.x < seg.x_hi)
        ++ends_here;
    CHECK(ends_here >= 1);
    CHECK(ends_here <= 4);
  }
}

TEST_CASE("cell potentials are anchored consistently across the assembly") {
  const BravaisPicture pic = bravais_layers(make_assembly("dy", 2), {0.1, 257});
  CHECK(pic.terminated_ends() == 0);
  REQUIRE(!pic.layer_segments.empty());
  std::vector<double> ys;
  for (const auto& s : pic.layer_segments) {
    CHECK(std::abs(s[1] - s[3]) < 1e-12);
    ys.push_back(s[1]);
  }
  const std::vector<double> lv = distinct_sorted(ys, 1e-6);
  REQUIRE(lv.size() == 10);  // mismatched anchors would split the levels per cell
  for (int m = 0; m < 10; ++m) CHECK(std::abs(lv[m] - (0.05 + 0.1 * m)) < 1e-9);
}

TEST_CASE("svg rendering is deterministic and complete") {
  const std::string s1 = bravais_layers(make_form("linear_y"), {0.1, 129}).svg();
  const BravaisPicture pic = bravais_layers(make_form("linear_y"), {0.1, 129});
  const std::string s2 = pic.svg();
  CHECK(s1 == s2);
  CHECK(s1.rfind("<svg", 0) == 0);
  CHECK(count_substr(s1, "</svg>") == 1);
  CHECK(count_substr(s1, "<line") ==
        pic.layer_segments.size() + pic.cut_segments.size());
  CHECK(count_substr(s1, "<circle") == size_t(pic.terminated_ends()));
  CHECK(count_substr(s1, "#2b6cb0") == 1);
  CHECK(count_substr(s1, "#c62828") == 2);
}

TEST_CASE("rendering options are validated") {
  const DislocationForm form = make_form("dy", 0.4);
  const BravaisOptions bad_step{0.0, 129};
  const BravaisOptions bad_res{0.1, 8};
  CHECK_THROWS_AS(bravais_layers(form, bad_step), std::invalid_argument);
  CHECK_THROWS_AS(bravais_layers(form, bad_res), std::invalid_argument);
}
