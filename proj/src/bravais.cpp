#include "disloc/bravais.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <utility>

namespace disloc {

namespace {

// potential provider: cell (k, j), tile coordinates q, side for the tile cut
using CellPotential = std::function<double(int, int, Point, Side)>;
// global extent of the cut segment of cell (k, j)
using CellSlit = std::function<CutSet::Segment(int, int)>;

// node values of one half of one cell, sampled one-sided on the cut row
struct HalfGrid {
  int k = 0, j = 0;
  bool upper = false;
  int mx = 0, my = 0;  // squares per axis; nodes are (mx + 1) x (my + 1)
  std::vector<double> v;

  double at(int i, int jj) const { return v[size_t(jj) * (mx + 1) + i]; }
};

struct EdgePoint {
  double x = 0, y = 0;
};

EdgePoint lerp_edge(double xa, double ya, double va, double xb, double yb,
                    double vb, double level) {
  double t = (vb == va) ? 0.5 : (level - va) / (vb - va);
  t = std::clamp(t, 0.0, 1.0);
  return {xa + t * (xb - xa), ya + t * (yb - ya)};
}

// level crossings of one node row, as global x positions (ascending)
std::vector<double> row_crossings(const HalfGrid& g, int row, double level,
                                  int n) {
  std::vector<double> xs;
  for (int i = 0; i < g.mx; ++i) {
    const double va = g.at(i, row), vb = g.at(i + 1, row);
    if ((va > level) == (vb > level)) continue;
    const double xa = (g.k + double(i) / g.mx) / n;
    const double xb = (g.k + double(i + 1) / g.mx) / n;
    xs.push_back(lerp_edge(xa, 0, va, xb, 0, vb, level).x);
  }
  return xs;
}

void march_half(const HalfGrid& g, double level, int n,
                std::vector<std::array<double, 4>>& out) {
  const auto node_x = [&](int i) { return (g.k + double(i) / g.mx) / n; };
  const auto node_y = [&](int jj) {
    const double qy = g.upper ? 0.5 + 0.5 * jj / g.my : 0.5 * jj / g.my;
    return (g.j + qy) / n;
  };
  const auto push = [&](EdgePoint a, EdgePoint b) {
    if (std::hypot(b.x - a.x, b.y - a.y) < 1e-12) return;
    out.push_back({a.x, a.y, b.x, b.y});
  };

  for (int jj = 0; jj < g.my; ++jj) {
    for (int i = 0; i < g.mx; ++i) {
      const double vbl = g.at(i, jj), vbr = g.at(i + 1, jj);
      const double vtr = g.at(i + 1, jj + 1), vtl = g.at(i, jj + 1);
      const int code = (vbl > level ? 1 : 0) | (vbr > level ? 2 : 0) |
                       (vtr > level ? 4 : 0) | (vtl > level ? 8 : 0);
      if (code == 0 || code == 15) continue;

      const double x0 = node_x(i), x1 = node_x(i + 1);
      const double y0 = node_y(jj), y1 = node_y(jj + 1);
      const auto B = [&] { return lerp_edge(x0, y0, vbl, x1, y0, vbr, level); };
      const auto R = [&] { return lerp_edge(x1, y0, vbr, x1, y1, vtr, level); };
      const auto T = [&] { return lerp_edge(x0, y1, vtl, x1, y1, vtr, level); };
      const auto L = [&] { return lerp_edge(x0, y0, vbl, x0, y1, vtl, level); };

      switch (code) {
        case 1: push(L(), B()); break;
        case 2: push(B(), R()); break;
        case 3: push(L(), R()); break;
        case 4: push(T(), R()); break;
        case 6: push(B(), T()); break;
        case 7: push(L(), T()); break;
        case 8: push(L(), T()); break;
        case 9: push(B(), T()); break;
        case 11: push(T(), R()); break;
        case 12: push(L(), R()); break;
        case 13: push(B(), R()); break;
        case 14: push(L(), B()); break;
        case 5: {
          const double c = 0.25 * (vbl + vbr + vtr + vtl);
          if (c > level) {
            push(L(), T());
            push(B(), R());
          } else {
            push(L(), B());
            push(T(), R());
          }
          break;
        }
        case 10: {
          const double c = 0.25 * (vbl + vbr + vtr + vtl);
          if (c > level) {
            push(L(), B());
            push(T(), R());
          } else {
            push(L(), T());
            push(B(), R());
          }
          break;
        }
        default: break;
      }
    }
  }
}

BravaisPicture render(int n, const CellPotential& pot, const CellSlit& slit,
                      const BravaisOptions& opts) {
  if (!(opts.level_step > 0.0))
    throw std::invalid_argument("layer rendering: level step must be positive");
  if (opts.grid_res < 16)
    throw std::invalid_argument(
        "layer rendering: grid resolution must be at least 16");

  // Anchor per-cell additive constants so the potential agrees across shared
  // cell edges (it is continuous there; only the cut segments carry jumps).
  // Chain along the bottom row, then up each column, sampling shared edges
  // away from the cut rows.
  std::vector<double> offset(size_t(n) * n, 0.0);
  const auto C = [&](int k, int j) -> double& {
    return offset[size_t(j) * n + k];
  };
  for (int k = 0; k + 1 < n; ++k)
    C(k + 1, 0) = C(k, 0) + pot(k, 0, {1.0, 0.3}, Side::Auto) -
                  pot(k + 1, 0, {0.0, 0.3}, Side::Auto);
  for (int j = 0; j + 1 < n; ++j)
    for (int k = 0; k < n; ++k)
      C(k, j + 1) = C(k, j) + pot(k, j, {0.3, 1.0}, Side::Auto) -
                    pot(k, j + 1, {0.3, 0.0}, Side::Auto);

  const int mx = std::max(8, opts.grid_res / n);
  const int my = std::max(4, mx / 2);

  std::vector<HalfGrid> grids;
  grids.reserve(size_t(n) * n * 2);
  double gmin = 1e300, gmax = -1e300;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int half = 0; half < 2; ++half) {
        HalfGrid g;
        g.k = k;
        g.j = j;
        g.upper = (half == 1);
        g.mx = mx;
        g.my = my;
        g.v.resize(size_t(mx + 1) * (my + 1));
        const Side side = g.upper ? Side::Above : Side::Below;
        for (int jj = 0; jj <= my; ++jj) {
          const double qy = g.upper ? 0.5 + 0.5 * jj / my : 0.5 * jj / my;
          for (int i = 0; i <= mx; ++i) {
            const double val = pot(k, j, {double(i) / mx, qy}, side) + C(k, j);
            g.v[size_t(jj) * (mx + 1) + i] = val;
            gmin = std::min(gmin, val);
            gmax = std::max(gmax, val);
          }
        }
        grids.push_back(std::move(g));
      }

  BravaisPicture pic;
  pic.level_step = opts.level_step;
  const double h = opts.level_step;
  const long lo = std::lround(std::ceil(gmin / h));
  const long hi = std::lround(std::floor(gmax / h));

  // Layer ends: a level line meeting the cut row from one side continues to
  // the other side only where the two one-sided traces cross the level at
  // (nearly) the same x; unmatched crossings inside the open cut segment are
  // terminated layers.
  const double tol = 2.0 / (double(n) * mx);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      const HalfGrid& below = grids[(size_t(j) * n + k) * 2];
      const HalfGrid& above = grids[(size_t(j) * n + k) * 2 + 1];
      const CutSet::Segment seg = slit(k, j);
      pic.cut_segments.push_back(seg);
      const auto inside = [&](double x) {
        return x > seg.x_lo + tol && x < seg.x_hi - tol;
      };
      for (long lv = lo; lv <= hi; ++lv) {
        const double level = lv * h;
        const std::vector<double> xb = row_crossings(below, below.my, level, n);
        const std::vector<double> xa = row_crossings(above, 0, level, n);
        size_t ib = 0, ia = 0;
        const auto take = [&](double x) {
          if (inside(x)) pic.terminated_points.push_back({x, seg.y});
        };
        while (ib < xb.size() && ia < xa.size()) {
          if (std::abs(xb[ib] - xa[ia]) <= tol) {
            ++ib;
            ++ia;
          } else if (xb[ib] < xa[ia]) {
            take(xb[ib++]);
          } else {
            take(xa[ia++]);
          }
        }
        for (; ib < xb.size(); ++ib) take(xb[ib]);
        for (; ia < xa.size(); ++ia) take(xa[ia]);
      }
    }

  for (const HalfGrid& g : grids)
    for (long lv = lo; lv <= hi; ++lv)
      march_half(g, lv * h, n, pic.layer_segments);

  return pic;
}

void append(std::string& out, const char* fmt, double a, double b, double c,
            double d) {
  char buf[192];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c, d);
  out += buf;
}

}  // namespace

std::string BravaisPicture::svg() const {
  std::string out;
  out +=
      "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 1000\">\n";
  out +=
      "<rect x=\"0\" y=\"0\" width=\"1000\" height=\"1000\" fill=\"#ffffff\" "
      "stroke=\"#444444\" stroke-width=\"2\"/>\n";
  out += "<g stroke=\"#2b6cb0\" stroke-width=\"1.2\" stroke-linecap=\"round\">\n";
  for (const auto& s : layer_segments)
    append(out, "<line x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\"/>\n",
           1000 * s[0], 1000 * (1 - s[1]), 1000 * s[2], 1000 * (1 - s[3]));
  out += "</g>\n";
  out += "<g stroke=\"#c62828\" stroke-width=\"5\" stroke-linecap=\"round\">\n";
  for (const auto& c : cut_segments)
    append(out, "<line x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\"/>\n",
           1000 * c.x_lo, 1000 * (1 - c.y), 1000 * c.x_hi, 1000 * (1 - c.y));
  out += "</g>\n";
  out += "<g fill=\"#c62828\" stroke=\"none\">\n";
  for (const Point& p : terminated_points) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"4\"/>\n",
                  1000 * p.x, 1000 * (1 - p.y));
    out += buf;
  }
  out += "</g>\n</svg>\n";
  return out;
}

BravaisPicture bravais_layers(const DislocationForm& form,
                              const BravaisOptions& opts) {
  const CellPotential pot = [&form](int, int, Point q, Side side) {
    return form.potential(q, side);
  };
  const CellSlit slit = [&form](int, int) { return form.cut_segment(); };
  return render(1, pot, slit, opts);
}

BravaisPicture bravais_layers(const DislocationArray& array,
                              const BravaisOptions& opts) {
  const int n = array.n();
  const CellPotential pot = [&array](int k, int j, Point q, Side side) {
    return array.tile(k, j).potential(q, side);
  };
  const CellSlit slit = [&array, n](int k, int j) {
    const DislocationForm& t = array.tile(k, j);
    return CutSet::Segment{(k + t.x_left()) / double(n),
                           (k + t.x_right()) / double(n),
                           (j + 0.5) / double(n)};
  };
  return render(n, pot, slit, opts);
}

}  // namespace disloc
