#include "disloc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace disloc {

namespace {

constexpr double kOnCutEps = 1e-13;   // "exactly on a cut" detection width
constexpr double kCutOffset = 1e-12;  // displacement applied to on-cut points

GaussRule compute_rule(int order) {
  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const double pi = std::numbers::pi;
  for (int i = 0; i < order; ++i) {
    // Newton on P_n with the Chebyshev-like initial guess.
    double x = std::cos(pi * (i + 0.75) / (order + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[order - 1 - i] = x;
    rule.weights[order - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
  return rule;
}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end(),
                      [](double a, double b) { return std::abs(a - b) < 1e-14; }),
          v.end());
  return v;
}

}  // namespace

const GaussRule& gauss_rule(int order) {
  if (order < 2 || order > 48) throw std::invalid_argument("gauss_rule: order out of range [2,48]");
  static std::map<int, GaussRule> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_rule(order)).first;
  return it->second;
}

std::string QuadratureSpec::canonical() const {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "order=%d;max_panel=%.17g;tol=%.17g", order, max_panel, tol);
  return buf;
}

unsigned long long QuadratureSpec::hash() const {
  unsigned long long h = 1469598103934665603ULL;
  for (char c : canonical()) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

CutSet CutSet::merged_with(const CutSet& other) const {
  CutSet out = *this;
  out.horizontal_segments.insert(out.horizontal_segments.end(),
                                 other.horizontal_segments.begin(),
                                 other.horizontal_segments.end());
  out.vertical_lines.insert(out.vertical_lines.end(), other.vertical_lines.begin(),
                            other.vertical_lines.end());
  out.horizontal_lines.insert(out.horizontal_lines.end(), other.horizontal_lines.begin(),
                              other.horizontal_lines.end());
  return out;
}

double CutSet::total_cut_length() const {
  double total = 0.0;
  for (const auto& s : horizontal_segments) total += s.length();
  return total;
}

Rect Rect::intersect(const Rect& o) const {
  return {std::max(x0, o.x0), std::max(y0, o.y0), std::min(x1, o.x1), std::min(y1, o.y1)};
}

std::vector<double> panel_edges(double lo, double hi, const std::vector<double>& breaks,
                                double max_panel) {
  if (!(hi > lo)) return {lo, hi};
  std::vector<double> pts{lo, hi};
  for (double b : breaks)
    if (b > lo + 1e-14 && b < hi - 1e-14) pts.push_back(b);
  pts = sorted_unique(pts);
  std::vector<double> edges;
  edges.push_back(pts.front());
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i], b = pts[i + 1];
    const int parts = std::max(1, (int)std::ceil((b - a) / max_panel - 1e-12));
    for (int p = 1; p < parts; ++p) edges.push_back(a + (b - a) * p / parts);
    edges.push_back(b);  // land exactly on the break / endpoint
  }
  return edges;
}

double integrate_segment(const std::function<double(double)>& f, double a, double b,
                         const QuadratureSpec& spec, const std::vector<double>& snap_points) {
  if (a == b) return 0.0;
  const double sign = a < b ? 1.0 : -1.0;
  const double lo = std::min(a, b), hi = std::max(a, b);
  const auto edges = panel_edges(lo, hi, snap_points, spec.max_panel);
  const GaussRule& rule = gauss_rule(spec.order);
  std::vector<double> part(edges.size() - 1, 0.0);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double c = 0.5 * (edges[i] + edges[i + 1]);
    const double h = 0.5 * (edges[i + 1] - edges[i]);
    double s = 0.0;
    for (int q = 0; q < spec.order; ++q) s += rule.weights[q] * f(c + h * rule.nodes[q]);
    part[i] = s * h;
  }
  return sign * pairwise_sum(part);
}

namespace {

// Points exactly on a horizontal cut are displaced to the declared side.
Point displace_off_cuts(Point p, const CutSet& cuts, CutSide side) {
  for (const auto& seg : cuts.horizontal_segments) {
    if (std::abs(p.y - seg.y) < kOnCutEps && p.x >= seg.x_lo - kOnCutEps &&
        p.x <= seg.x_hi + kOnCutEps) {
      p.y = seg.y + (side == CutSide::Below ? -kCutOffset : kCutOffset);
      return p;
    }
  }
  return p;
}

}  // namespace

double integrate_line(const CovectorField& field, const std::vector<Point>& polyline,
                      const CutSet& cuts, const QuadratureSpec& spec, CutSide side) {
  if (polyline.size() < 2) throw std::invalid_argument("integrate_line: need at least 2 points");
  const GaussRule& rule = gauss_rule(spec.order);

  std::vector<double> seg_results;
  for (std::size_t s = 0; s + 1 < polyline.size(); ++s) {
    const Point P = polyline[s], Q = polyline[s + 1];
    const Point d = Q - P;
    const double len = std::hypot(d.x, d.y);
    if (len < 1e-15) continue;

    // Parameter splits at crossings of cuts and snap lines.
    std::vector<double> splits{0.0, 1.0};
    auto add_y_crossing = [&](double yc) {
      if ((P.y - yc) * (Q.y - yc) < 0.0) splits.push_back((yc - P.y) / d.y);
    };
    auto add_x_crossing = [&](double xc) {
      if ((P.x - xc) * (Q.x - xc) < 0.0) splits.push_back((xc - P.x) / d.x);
    };
    for (const auto& seg : cuts.horizontal_segments) {
      if ((P.y - seg.y) * (Q.y - seg.y) < 0.0) {
        const double t = (seg.y - P.y) / d.y;
        const double xc = P.x + t * d.x;
        if (xc > seg.x_lo - 1e-12 && xc < seg.x_hi + 1e-12) {
          if (t > 1e-12 && t < 1.0 - 1e-12) {
            char buf[160];
            std::snprintf(buf, sizeof(buf),
                          "integrate_line: path crosses a cut transversally at (%.6g, %.6g); "
                          "route the polyline through the crossing point instead",
                          xc, seg.y);
            throw std::invalid_argument(buf);
          }
          splits.push_back(t);
        } else {
          splits.push_back(t);  // crossing the extension line: snap only
        }
      }
    }
    for (double v : cuts.vertical_lines) add_x_crossing(v);
    for (double hline : cuts.horizontal_lines) add_y_crossing(hline);
    splits = sorted_unique(splits);

    // Subdivide to max_panel (in arc length) and integrate.
    std::vector<double> section;
    for (std::size_t i = 0; i + 1 < splits.size(); ++i) {
      const double t0 = std::max(0.0, splits[i]), t1 = std::min(1.0, splits[i + 1]);
      if (!(t1 > t0)) continue;
      const int parts = std::max(1, (int)std::ceil((t1 - t0) * len / spec.max_panel - 1e-12));
      for (int p = 0; p < parts; ++p) {
        const double a = t0 + (t1 - t0) * p / parts;
        const double b = t0 + (t1 - t0) * (p + 1) / parts;
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        double acc = 0.0;
        for (int q = 0; q < spec.order; ++q) {
          const double t = c + h * rule.nodes[q];
          Point pt{P.x + t * d.x, P.y + t * d.y};
          pt = displace_off_cuts(pt, cuts, side);
          const Covector w = field(pt);
          if (!std::isfinite(w.c1) || !std::isfinite(w.c2))
            throw std::runtime_error("integrate_line: non-finite field value");
          acc += rule.weights[q] * (w.c1 * d.x + w.c2 * d.y);
        }
        section.push_back(acc * h);
      }
    }
    seg_results.push_back(pairwise_sum(section));
  }
  return pairwise_sum(seg_results);
}

namespace {

struct PanelGrid {
  std::vector<double> xe, ye;  // panel edges
};

PanelGrid cell_panels(const Rect& rect, const CutSet& cuts, const QuadratureSpec& spec) {
  std::vector<double> xb, yb;
  for (double v : cuts.vertical_lines) xb.push_back(v);
  for (double hline : cuts.horizontal_lines) yb.push_back(hline);
  for (const auto& seg : cuts.horizontal_segments) {
    yb.push_back(seg.y);
    xb.push_back(seg.x_lo);
    xb.push_back(seg.x_hi);
  }
  return {panel_edges(rect.x0, rect.x1, xb, spec.max_panel),
          panel_edges(rect.y0, rect.y1, yb, spec.max_panel)};
}

double panel_integral(const std::function<double(Point)>& density, const GaussRule& rule,
                      double x0, double x1, double y0, double y1) {
  const double cx = 0.5 * (x0 + x1), hx = 0.5 * (x1 - x0);
  const double cy = 0.5 * (y0 + y1), hy = 0.5 * (y1 - y0);
  double acc = 0.0;
  for (std::size_t qy = 0; qy < rule.nodes.size(); ++qy) {
    const double y = cy + hy * rule.nodes[qy];
    double row = 0.0;
    for (std::size_t qx = 0; qx < rule.nodes.size(); ++qx) {
      const double v = density({cx + hx * rule.nodes[qx], y});
      if (!std::isfinite(v)) throw std::runtime_error("integrate_cell: non-finite density value");
      row += rule.weights[qx] * v;
    }
    acc += rule.weights[qy] * row;
  }
  return acc * hx * hy;
}

}  // namespace

double integrate_cell(const std::function<double(Point)>& density, const Rect& rect,
                      const CutSet& cuts, const QuadratureSpec& spec, Exec exec) {
  if (rect.empty()) return 0.0;
  const PanelGrid g = cell_panels(rect, cuts, spec);
  const GaussRule& rule = gauss_rule(spec.order);
  const std::size_t nx = g.xe.size() - 1, ny = g.ye.size() - 1;
  return indexed_sum(nx * ny, exec, [&](std::size_t id) {
    const std::size_t ix = id % nx, iy = id / nx;
    return panel_integral(density, rule, g.xe[ix], g.xe[ix + 1], g.ye[iy], g.ye[iy + 1]);
  });
}

double integrate_cell_plain(const std::function<double(Point)>& density, const Rect& rect,
                            const CutSet& cuts, const QuadratureSpec& spec) {
  if (rect.empty()) return 0.0;
  const PanelGrid g = cell_panels(rect, cuts, spec);
  const GaussRule& rule = gauss_rule(spec.order);
  double total = 0.0;
  for (std::size_t iy = 0; iy + 1 < g.ye.size(); ++iy)
    for (std::size_t ix = 0; ix + 1 < g.xe.size(); ++ix)
      total += panel_integral(density, rule, g.xe[ix], g.xe[ix + 1], g.ye[iy], g.ye[iy + 1]);
  return total;
}

double sup_norm(const std::function<double(Point)>& field, const Rect& rect, int resolution,
                Exec exec) {
  if (resolution < 2) throw std::invalid_argument("sup_norm: resolution must be >= 2");
  if (rect.empty()) return 0.0;
  const double dx = rect.width() / resolution, dy = rect.height() / resolution;
  std::vector<double> row_max(resolution, 0.0);
  auto row = [&](std::size_t j) {
    const double y = rect.y0 + (j + 0.5) * dy;
    double m = 0.0;
    for (int i = 0; i < resolution; ++i) {
      const double v = std::abs(field({rect.x0 + (i + 0.5) * dx, y}));
      if (v > m) m = v;
    }
    return m;
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static) num_threads(worker_count())
    for (long long j = 0; j < resolution; ++j) row_max[j] = row(j);
  } else {
    for (int j = 0; j < resolution; ++j) row_max[j] = row(j);
  }
  return *std::max_element(row_max.begin(), row_max.end());
}

}  // namespace disloc
