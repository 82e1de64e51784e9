#include "disloc/current.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

namespace disloc {

namespace {

double uniform01(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

Rect union_rect(Rect a, const Rect& b) {
  if (b.empty()) return a;
  if (a.empty()) return b;
  return {std::min(a.x0, b.x0), std::min(a.y0, b.y0), std::max(a.x1, b.x1),
          std::max(a.y1, b.y1)};
}

}  // namespace

double TestFunction::value(Point p) const {
  const double dx = p.x - center.x, dy = p.y - center.y;
  const double rho2 = (dx * dx + dy * dy) / (radius * radius);
  if (rho2 >= 1.0) return 0.0;
  const double w = 1.0 - rho2;
  return amplitude * w * w * w;
}

Covector TestFunction::gradient(Point p) const {
  const double dx = p.x - center.x, dy = p.y - center.y;
  const double rho2 = (dx * dx + dy * dy) / (radius * radius);
  if (rho2 >= 1.0) return {0.0, 0.0};
  const double w = 1.0 - rho2;
  const double s = -6.0 * amplitude * w * w / (radius * radius);
  return {s * dx, s * dy};
}

double TestFunction::mass() const {
  const double pi = 3.14159265358979323846;
  return amplitude * pi * radius * radius / 4.0;
}

Rect TestFunction::bbox() const {
  return Rect{center.x - radius, center.y - radius, center.x + radius,
              center.y + radius}
      .intersect({0, 0, 1, 1});
}

void TestFunction::slice(double level, double& lo, double& hi) const {
  const double d = std::abs(level - center.y);
  if (d >= radius) {
    lo = 1.0;
    hi = 0.0;
    return;
  }
  const double w = std::sqrt(radius * radius - d * d);
  lo = center.x - w;
  hi = center.x + w;
}

TestOneForm TestOneForm::from_bumps(std::string id, std::vector<TestFunction> dx_parts,
                                    std::vector<TestFunction> dy_parts) {
  TestOneForm out;
  out.id = std::move(id);
  Rect box{1, 1, 0, 0};  // deliberately empty
  for (const auto& f : dx_parts) box = union_rect(box, f.bbox());
  for (const auto& f : dy_parts) box = union_rect(box, f.bbox());
  out.support = box;
  out.alpha = [dx_parts, dy_parts](Point p) {
    double a1 = 0, a2 = 0;
    for (const auto& f : dx_parts) a1 += f.value(p);
    for (const auto& f : dy_parts) a2 += f.value(p);
    return Covector{a1, a2};
  };
  out.d_density = [dx_parts, dy_parts](Point p) {
    double d = 0;
    for (const auto& f : dy_parts) d += f.gradient(p).c1;   // d(a2)/dx
    for (const auto& f : dx_parts) d -= f.gradient(p).c2;   // -d(a1)/dy
    return d;
  };
  if (!out.support.empty()) {
    auto mag = [&out](Point p) {
      const Covector w = out.alpha(p);
      return std::hypot(w.c1, w.c2);
    };
    out.sup_value = sup_norm(mag, out.support, 256, Exec::Serial);
  }
  return out;
}

TestOneForm TestOneForm::exact(std::string id, TestFunction f) {
  TestOneForm out;
  out.id = std::move(id);
  out.support = f.bbox();
  out.alpha = [f](Point p) { return f.gradient(p); };
  out.d_density = [](Point) { return 0.0; };  // d(d f) = 0 identically
  auto mag = [f](Point p) {
    const Covector w = f.gradient(p);
    return std::hypot(w.c1, w.c2);
  };
  out.sup_value = sup_norm(mag, out.support, 256, Exec::Serial);
  return out;
}

std::vector<TestFunction> standard_test_functions(int count, unsigned long long seed) {
  if (count < 1) throw std::invalid_argument("standard_test_functions: count must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<TestFunction> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    TestFunction f;
    f.radius = 0.12 + 0.18 * uniform01(rng);
    const double m = f.radius + 0.02;  // keep the closed disc inside the square
    f.center = {m + (1 - 2 * m) * uniform01(rng), m + (1 - 2 * m) * uniform01(rng)};
    f.amplitude = 0.5 + uniform01(rng);
    out.push_back(f);
  }
  return out;
}

std::vector<TestOneForm> standard_test_forms(int count, unsigned long long seed) {
  if (count < 1) throw std::invalid_argument("standard_test_forms: count must be >= 1");
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<TestOneForm> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    auto bump = [&rng] {
      TestFunction f;
      f.radius = 0.12 + 0.18 * uniform01(rng);
      const double m = f.radius + 0.02;
      f.center = {m + (1 - 2 * m) * uniform01(rng), m + (1 - 2 * m) * uniform01(rng)};
      f.amplitude = 0.5 + uniform01(rng);
      return f;
    };
    const std::string id = "alpha_" + std::to_string(i);
    if (i % 2 == 0) {
      out.push_back(TestOneForm::from_bumps(id, {bump()}, {bump()}));
    } else {
      out.push_back(TestOneForm::exact(id, bump()));
    }
  }
  return out;
}

double pair_current(const CovectorField& omega, const CutSet& cuts,
                    const TestOneForm& alpha, const QuadratureSpec& spec, Exec exec) {
  const Rect region = alpha.support.intersect({0, 0, 1, 1});
  if (region.empty()) return 0.0;
  auto density = [&omega, &alpha](Point p) { return wedge(omega(p), alpha.alpha(p)); };
  return integrate_cell(density, region, cuts, spec, exec);
}

double boundary_pairing(const CovectorField& omega, const CutSet& cuts,
                        const TestFunction& f, const QuadratureSpec& spec, Exec exec) {
  return pair_current(omega, cuts, TestOneForm::exact("d_test", f), spec, exec);
}

double boundary_jump_sum(const DislocationForm& form, const TestFunction& f) {
  double lo, hi;
  f.slice(0.5, lo, hi);
  lo = std::max(lo, form.x_left());
  hi = std::min(hi, form.x_right());
  if (!(hi > lo)) return 0.0;
  auto integrand = [&form, &f](double x) { return f.value({x, 0.5}) * form.jump(x); };
  return integrate_segment(integrand, lo, hi, form.spec());
}

std::string pairing_csv(const std::vector<PairingResult>& rows) {
  std::string out = "form_id,test_id,value,spec_hash\n";
  char buf[96];
  for (const PairingResult& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%016llx\n", r.value, r.spec_hash);
    out += r.form_id + "," + r.test_id + "," + buf;
  }
  return out;
}

}  // namespace disloc
