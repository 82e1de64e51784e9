#include "disloc/homogenization.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>

#include "disloc/parallel.hpp"

namespace disloc {

namespace {

double uniform01(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Least-squares slope of log|gap| against log n; NaN with fewer than two
// usable points (zero gaps are unusable).
double lsq_slope(const std::vector<std::pair<int, double>>& pts) {
  std::vector<std::pair<double, double>> xy;
  for (const auto& [n, gap] : pts)
    if (gap != 0.0 && std::isfinite(gap))
      xy.emplace_back(std::log(double(n)), std::log(std::abs(gap)));
  if (xy.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : xy) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = double(xy.size());
  const double den = m * sxx - sx * sx;
  if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (m * sxy - sx * sy) / den;
}

}  // namespace

DislocationArray::DislocationArray(SmoothOneForm beta, double a, SmoothingFunction r,
                                   int n, QuadratureSpec spec)
    : beta_(std::move(beta)), a_(a), n_(n), spec_(spec) {
  if (n_ < 1) throw std::invalid_argument("array refinement n must be >= 1");
  if (!std::isfinite(a_) || a_ < 0.05 || a_ > 0.95)
    throw std::invalid_argument("strip width a must lie in [0.05, 0.95]");
  DislocationForm::Options opts;
  opts.check_a_range = false;  // cell strips are a/n, legitimately narrow
  opts.warn_vanishing = false;
  tiles_.reserve(std::size_t(n_) * n_);
  for (int j = 0; j < n_; ++j)
    for (int k = 0; k < n_; ++k)
      tiles_.emplace_back(pullback(beta_, tile_map(n_, k, j)), a_ / n_, r, spec_, opts);
}

const DislocationForm& DislocationArray::tile(int k, int j) const {
  if (k < 0 || k >= n_ || j < 0 || j >= n_)
    throw std::invalid_argument("tile index out of range");
  return tiles_[std::size_t(j) * n_ + k];
}

double DislocationArray::tile_circulation(int k, int j) const {
  return tile(k, j).circulation();
}

void DislocationArray::locate(Point p, int& k, int& j) const {
  k = std::clamp(int(std::floor(p.x * n_)), 0, n_ - 1);
  j = std::clamp(int(std::floor(p.y * n_)), 0, n_ - 1);
}

Covector DislocationArray::eval_in_cell(int k, int j, Point p, Side side) const {
  const DislocationForm& t = tile(k, j);
  const Point q{std::clamp(p.x * n_ - k, 0.0, 1.0), std::clamp(p.y * n_ - j, 0.0, 1.0)};
  const Covector w = t.eval(q, side);
  return {w.c1 * n_, w.c2 * n_};
}

Covector DislocationArray::eval(Point p, Side side) const {
  int k, j;
  locate(p, k, j);
  return eval_in_cell(k, j, p, side);
}

CovectorField DislocationArray::evaluator(Side side) const {
  return [this, side](Point p) { return eval(p, side); };
}

double DislocationArray::jump(int j, double x) const {
  if (j < 0 || j >= n_) throw std::invalid_argument("row index out of range");
  const int k = std::clamp(int(std::floor(x * n_)), 0, n_ - 1);
  // global jump = n * (cell jump at the cell abscissa)
  return n_ * tiles_[std::size_t(j) * n_ + k].jump(x * n_ - k);
}

CutSet DislocationArray::cuts() const {
  CutSet c;
  const double ta = tile_a();
  for (int j = 0; j < n_; ++j) {
    const double y = (j + 0.5) / n_;
    c.horizontal_lines.push_back(double(j) / n_);
    c.horizontal_lines.push_back(y);
    for (int k = 0; k < n_; ++k)
      c.horizontal_segments.push_back(
          {(k + 0.5 * (1 - ta)) / n_, (k + 0.5 * (1 + ta)) / n_, y});
  }
  c.horizontal_lines.push_back(1.0);
  for (int k = 0; k <= n_; ++k) c.vertical_lines.push_back(double(k) / n_);
  for (int k = 0; k < n_; ++k) {
    c.vertical_lines.push_back((k + 0.5 * (1 - ta)) / n_);
    c.vertical_lines.push_back((k + 0.5 * (1 + ta)) / n_);
  }
  return c;
}

GluingReport check_gluing(const DislocationArray& array, int samples,
                          unsigned long long seed) {
  GluingReport rep;
  const int n = array.n();
  std::mt19937_64 rng(seed);
  const double h = 1e-5;  // one-sided stencil pitch, well inside a cell

  auto one_sided = [&](int k, int j, Point p, Point dir) {
    // 3-point one-sided first derivative of the global field inside cell(k,j),
    // oriented along the positive axis regardless of which way the stencil
    // recedes, so the two sides of a seam are directly comparable.
    const double sgn = dir.x + dir.y;
    const Covector f0 = array.eval_in_cell(k, j, p);
    const Covector f1 = array.eval_in_cell(k, j, {p.x + h * dir.x, p.y + h * dir.y});
    const Covector f2 =
        array.eval_in_cell(k, j, {p.x + 2 * h * dir.x, p.y + 2 * h * dir.y});
    return Covector{sgn * (-3 * f0.c1 + 4 * f1.c1 - f2.c1) / (2 * h),
                    sgn * (-3 * f0.c2 + 4 * f1.c2 - f2.c2) / (2 * h)};
  };
  auto track = [&](Covector a, Covector b, double& slot) {
    slot = std::max(slot, std::max(std::abs(a.c1 - b.c1), std::abs(a.c2 - b.c2)));
  };

  if (n > 1) {
    for (int s = 0; s < samples; ++s) {
      const bool vertical = (s % 2 == 0);
      if (vertical) {
        const int k = 1 + int(uniform01(rng) * (n - 1));
        const int j = int(uniform01(rng) * n);
        // stay away from the cut row of this cell row
        double ty = 0.05 + 0.35 * uniform01(rng);
        if (uniform01(rng) < 0.5) ty = 1.0 - ty;
        const Point p{double(k) / n, (j + ty) / n};
        track(array.eval_in_cell(k - 1, j, p), array.eval_in_cell(k, j, p),
              rep.max_value_mismatch);
        track(one_sided(k - 1, j, p, {-1, 0}), one_sided(k, j, p, {1, 0}),
              rep.max_derivative_mismatch);
      } else {
        const int j = 1 + int(uniform01(rng) * (n - 1));
        const int k = int(uniform01(rng) * n);
        const double tx = 0.02 + 0.96 * uniform01(rng);
        const Point p{(k + tx) / n, double(j) / n};
        track(array.eval_in_cell(k, j - 1, p), array.eval_in_cell(k, j, p),
              rep.max_value_mismatch);
        track(one_sided(k, j - 1, p, {0, -1}), one_sided(k, j, p, {0, 1}),
              rep.max_derivative_mismatch);
      }
      ++rep.samples;
    }
  }

  const TwoForm dbeta = exterior_derivative(array.beta());
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      const Rect cell{double(k) / n, double(j) / n, (k + 1.0) / n, (j + 1.0) / n};
      const double area = integrate_cell(dbeta.density, cell, {}, array.spec(),
                                         Exec::Serial);
      rep.max_circulation_error = std::max(
          rep.max_circulation_error, std::abs(array.tile_circulation(k, j) - area));
    }
  return rep;
}

namespace {

// Nested product quadrature for one cell's gap contribution, in cell
// coordinates.  Panels in x resolve the strip transition (width a/n) finely
// and the smooth remainder coarsely; panels in y split at the cut row.
double cell_gap_integral(const DislocationForm& tile, const TestOneForm& alpha,
                         const AffineMap& to_global, int n, const QuadratureSpec& spec) {
  const Rect cell{to_global.apply({0, 0}).x, to_global.apply({0, 0}).y,
                  to_global.apply({1, 1}).x, to_global.apply({1, 1}).y};
  const Rect region = alpha.support.intersect({0, 0, 1, 1}).intersect(cell);
  if (region.empty()) return 0.0;
  // map the restricted region into cell coordinates
  const double rx0 = std::clamp(region.x0 * n - std::round(cell.x0 * n), 0.0, 1.0);
  const double rx1 = std::clamp(region.x1 * n - std::round(cell.x0 * n), 0.0, 1.0);
  const double ry0 = std::clamp(region.y0 * n - std::round(cell.y0 * n), 0.0, 1.0);
  const double ry1 = std::clamp(region.y1 * n - std::round(cell.y0 * n), 0.0, 1.0);
  if (!(rx1 > rx0) || !(ry1 > ry0)) return 0.0;

  const double xl = tile.x_left(), xr = tile.x_right();
  const double coarse = 1.0 / 16, fine = tile.a() / 8;
  // x panel edges: coarse off the strip, fine across it
  std::vector<double> xe;
  auto append = [&xe](const std::vector<double>& more) {
    for (double v : more)
      if (xe.empty() || v > xe.back()) xe.push_back(v);
  };
  if (rx0 < xl) append(panel_edges(rx0, std::min(rx1, xl), {}, coarse));
  if (rx1 > xl && rx0 < xr)
    append(panel_edges(std::max(rx0, xl), std::min(rx1, xr), {}, fine));
  if (rx1 > xr) append(panel_edges(std::max(rx0, xr), rx1, {}, coarse));
  const std::vector<double> ye = panel_edges(ry0, ry1, {0.5}, coarse);

  const GaussRule& rule = gauss_rule(spec.order);
  const double s = 1.0 / n;  // pullback factor for the test form
  auto integrand = [&](double qx, double qy) {
    const Point q{qx, qy};
    const Covector nu = tile.eval(q);
    const Covector b = tile.beta().eval(q);
    const Covector at = s * alpha.alpha(to_global.apply(q));
    return wedge(nu - b, at);
  };

  std::vector<double> ypart;
  ypart.reserve((ye.size() - 1) * rule.nodes.size());
  for (std::size_t yi = 0; yi + 1 < ye.size(); ++yi) {
    const double cy = 0.5 * (ye[yi] + ye[yi + 1]), hy = 0.5 * (ye[yi + 1] - ye[yi]);
    for (std::size_t qy = 0; qy < rule.nodes.size(); ++qy) {
      const double y = cy + hy * rule.nodes[qy];
      std::vector<double> xpart(xe.size() - 1, 0.0);
      for (std::size_t xi = 0; xi + 1 < xe.size(); ++xi) {
        const double cx = 0.5 * (xe[xi] + xe[xi + 1]), hx = 0.5 * (xe[xi + 1] - xe[xi]);
        double acc = 0.0;
        for (std::size_t qx = 0; qx < rule.nodes.size(); ++qx)
          acc += rule.weights[qx] * integrand(cx + hx * rule.nodes[qx], y);
        xpart[xi] = acc * hx;
      }
      ypart.push_back(rule.weights[qy] * hy * pairwise_sum(xpart));
    }
  }
  return pairwise_sum(ypart);
}

}  // namespace

double pairing_gap(const DislocationArray& array, const TestOneForm& alpha, Exec exec) {
  const int n = array.n();
  return indexed_sum(std::size_t(n) * n, exec, [&](std::size_t id) {
    const int k = int(id % n), j = int(id / n);
    return cell_gap_integral(array.tile(k, j), alpha, tile_map(n, k, j), n,
                             array.spec());
  });
}

double array_boundary_jump_sum(const DislocationArray& array, const TestFunction& f) {
  const int n = array.n();
  const double ta = array.tile_a();
  std::vector<double> part;
  for (int j = 0; j < n; ++j) {
    const double y = (j + 0.5) / n;
    double lo, hi;
    f.slice(y, lo, hi);
    if (!(hi > lo)) continue;
    for (int k = 0; k < n; ++k) {
      const double slo = std::max(lo, (k + 0.5 * (1 - ta)) / n);
      const double shi = std::min(hi, (k + 0.5 * (1 + ta)) / n);
      if (!(shi > slo)) continue;
      auto integrand = [&array, &f, j, y](double x) {
        return f.value({x, y}) * array.jump(j, x);
      };
      QuadratureSpec spec = array.spec();
      spec.max_panel = std::max(ta / (8 * n), 1e-9);  // resolve the profile
      part.push_back(integrate_segment(integrand, slo, shi, spec));
    }
  }
  return pairwise_sum(part);
}

std::string ConvergenceTable::csv() const {
  std::string out = "n,test_id,gap,bound,slope_cum\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n);
    out += ',';
    out += r.test_id;
    out += ',';
    out += g17(r.gap);
    out += ',';
    out += g17(r.bound);
    out += ',';
    out += g17(r.slope_cum);
    out += '\n';
  }
  return out;
}

double ConvergenceTable::max_gap(int n) const {
  double m = 0.0;
  for (const auto& r : rows)
    if (r.n == n) m = std::max(m, std::abs(r.gap));
  return m;
}

ConvergenceTable converge(const SmoothOneForm& beta, double a, const SmoothingFunction& r,
                          const std::vector<int>& n_list,
                          const std::vector<TestOneForm>& tests,
                          const QuadratureSpec& spec) {
  ConvergenceTable table;
  if (n_list.empty()) throw std::invalid_argument("converge: n_list must not be empty");
  if (tests.empty()) throw std::invalid_argument("converge: need at least one test form");

  // Bound ingredients.  The strip constant is measured once on the base
  // (n = 1) construction: S1 = sup over the strip of |nu_a - beta|.
  const DislocationForm base(beta, a, r, spec);
  auto diff_mag = [&](Point p) {
    const Covector d = base.eval(p) - beta.eval(p);
    return std::hypot(d.c1, d.c2);
  };
  table.strip_sup =
      sup_norm(diff_mag, {base.x_left(), 0.0, base.x_right(), 1.0}, 256, Exec::Serial);
  table.sup_rp = r.sup_r_prime();
  table.constant_C = a * table.strip_sup / table.sup_rp;
  table.sup_d2x = sup_norm([&beta](Point p) { return std::abs(beta.db2_dx(p)); },
                           {0, 0, 1, 1}, 128, Exec::Serial);
  table.sup_d1y = sup_norm([&beta](Point p) { return std::abs(beta.db1_dy(p)); },
                           {0, 0, 1, 1}, 128, Exec::Serial);
  const double factor = table.sup_d2x + table.sup_d1y + a * table.strip_sup;

  std::vector<std::vector<std::pair<int, double>>> history(tests.size());
  for (int n : n_list) {
    const DislocationArray array(beta, a, r, n, spec);
    for (std::size_t t = 0; t < tests.size(); ++t) {
      ConvergenceRow row;
      row.n = n;
      row.test_id = tests[t].id;
      row.gap = pairing_gap(array, tests[t]);
      row.bound = tests[t].sup_value / n * factor;
      history[t].emplace_back(n, row.gap);
      row.slope_cum = lsq_slope(history[t]);
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

}  // namespace disloc
