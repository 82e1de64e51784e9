#include "disloc/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "disloc/quadrature.hpp"

namespace disloc {

namespace {

double clamp01(double s) { return s < 0.0 ? 0.0 : (s > 1.0 ? 1.0 : s); }

// C^2 quintic smoothstep on s = t + 1/2.
double quintic_r(double t) {
  const double s = clamp01(t + 0.5);
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}
double quintic_rp(double t) {
  const double s = t + 0.5;
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double u = s * (1.0 - s);
  return 30.0 * u * u;
}

// C-infinity profile: normalized integral of exp(-1/(1/4 - t^2)).
struct BumpTables {
  std::vector<double> edges;
  std::vector<double> prefix;  // prefix[i] = integral over edges[0..i]
  double total = 0.0;
};

double bump_density(double t) {
  const double q = 0.25 - t * t;
  return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
}

const BumpTables& bump_tables() {
  static const BumpTables tables = [] {
    BumpTables tb;
    const int panels = 1024;
    const GaussRule& rule = gauss_rule(12);
    tb.edges.resize(panels + 1);
    tb.prefix.resize(panels + 1, 0.0);
    for (int i = 0; i <= panels; ++i) tb.edges[i] = -0.5 + double(i) / panels;
    for (int i = 0; i < panels; ++i) {
      const double c = 0.5 * (tb.edges[i] + tb.edges[i + 1]);
      const double h = 0.5 * (tb.edges[i + 1] - tb.edges[i]);
      double s = 0.0;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q)
        s += rule.weights[q] * bump_density(c + h * rule.nodes[q]);
      tb.prefix[i + 1] = tb.prefix[i] + s * h;
    }
    tb.total = tb.prefix[panels];
    return tb;
  }();
  return tables;
}

double bump_r(double t) {
  const BumpTables& tb = bump_tables();
  if (t <= -0.5) return 0.0;
  if (t >= 0.5) return 1.0;
  const auto it = std::upper_bound(tb.edges.begin(), tb.edges.end(), t);
  const std::size_t i = std::max<std::ptrdiff_t>(0, it - tb.edges.begin() - 1);
  // Partial panel on [edges[i], t].
  const GaussRule& rule = gauss_rule(12);
  const double c = 0.5 * (tb.edges[i] + t), h = 0.5 * (t - tb.edges[i]);
  double s = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q)
    s += rule.weights[q] * bump_density(c + h * rule.nodes[q]);
  return (tb.prefix[i] + s * h) / tb.total;
}

double bump_rp(double t) { return bump_density(t) / bump_tables().total; }

// Fault-injection profile: r dips (non-monotone) while r' is left as the
// quintic derivative, so the pair is inconsistent and d(nu) != 0.
double corrupt_r(double t) {
  return quintic_r(t) + 0.35 * std::sin(2.0 * std::numbers::pi * clamp01(t + 0.5));
}

}  // namespace

double SmoothingFunction::sup_r_prime(int samples) const {
  double m = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double t = -0.5 + double(i) / samples;
    m = std::max(m, r_prime(t));
  }
  return m;
}

SmoothingCheck validate_smoothing(const SmoothingFunction& f) {
  SmoothingCheck out;
  out.endpoints_ok = std::abs(f.r(-0.5)) < 1e-12 && std::abs(f.r(0.5) - 1.0) < 1e-12;
  out.monotone_ok = true;
  const int n = 4096;
  for (int i = 0; i <= n && out.monotone_ok; ++i) {
    const double t = -0.5 + double(i) / n;
    if (f.r_prime(t) < -1e-12) out.monotone_ok = false;
    if (i > 0 && f.r(t) < f.r(-0.5 + double(i - 1) / n) - 1e-9) out.monotone_ok = false;
  }
  QuadratureSpec spec;
  spec.max_panel = 1.0 / 256;
  const double mass = integrate_segment(f.r_prime, -0.5, 0.5, spec);
  out.unit_mass_err = std::abs(mass - 1.0);
  out.consistent_ok = std::abs(mass - (f.r(0.5) - f.r(-0.5))) < 1e-8;
  // The mass identity alone misses a stale derivative whose integral happens
  // to match, so also compare r' pointwise against a centered difference of r
  // away from the endpoints.
  const double h = 1e-5;
  for (int i = 1; i < 128 && out.consistent_ok; ++i) {
    const double t = -0.5 + (i / 128.0) * (1.0 - 2 * h);
    const double fd = (f.r(t + h) - f.r(t - h)) / (2 * h);
    if (std::abs(f.r_prime(t) - fd) > 1e-4 * (1.0 + std::abs(fd)))
      out.consistent_ok = false;
  }
  return out;
}

const SmoothingFunction& smoothing_catalog(const std::string& name, bool allow_corrupt) {
  static const SmoothingFunction quintic{"quintic", quintic_r, quintic_rp};
  static const SmoothingFunction bump{"bump", bump_r, bump_rp};
  static const SmoothingFunction corrupt{"corrupt", corrupt_r, quintic_rp};
  if (name == "quintic") return quintic;
  if (name == "bump") return bump;
  if (name == "corrupt") {
    if (!allow_corrupt)
      throw std::invalid_argument(
          "smoothing profile 'corrupt' is a fault-injection profile; enable it explicitly");
    return corrupt;
  }
  throw std::invalid_argument("unknown smoothing profile: " + name);
}

std::vector<std::string> smoothing_catalog_names() { return {"quintic", "bump", "corrupt"}; }

}  // namespace disloc
