#include "disloc/torsion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <utility>

namespace disloc {

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// LSQ slope of log(gap) against log(n); zero and non-finite gaps carry no
// information about the rate and are skipped.
double lsq_slope(const std::vector<std::pair<int, double>>& history) {
  std::vector<double> xs, ys;
  for (const auto& [n, gap] : history)
    if (std::isfinite(gap) && gap > 0.0) {
      xs.push_back(std::log(double(n)));
      ys.push_back(std::log(gap));
    }
  if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= double(xs.size());
  my /= double(ys.size());
  double cov = 0.0, var = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    cov += (xs[i] - mx) * (ys[i] - my);
    var += (xs[i] - mx) * (xs[i] - mx);
  }
  return cov / var;
}

// Cut-segment layout of the n x n assembly, built without constructing the
// tiles themselves (cheap reference-point validation).
CutSet assembly_cut_segments(double a, int n) {
  CutSet cuts;
  const double half = a / (2.0 * n * n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      const double cx = (k + 0.5) / n;
      cuts.horizontal_segments.push_back({cx - half, cx + half, (j + 0.5) / n});
    }
  return cuts;
}

}  // namespace

CoframeMember::CoframeMember(SmoothOneForm form) : impl_(std::move(form)) {}

CoframeMember::CoframeMember(std::shared_ptr<const DislocationForm> form)
    : impl_(std::move(form)) {
  if (!std::get<std::shared_ptr<const DislocationForm>>(impl_))
    throw std::invalid_argument("coframe member: null layering form");
}

CoframeMember::CoframeMember(std::shared_ptr<const DislocationArray> array)
    : impl_(std::move(array)) {
  if (!std::get<std::shared_ptr<const DislocationArray>>(impl_))
    throw std::invalid_argument("coframe member: null assembly");
}

bool CoframeMember::singular() const {
  return !std::holds_alternative<SmoothOneForm>(impl_);
}

Covector CoframeMember::eval(Point p, Side side) const {
  if (const auto* smooth = std::get_if<SmoothOneForm>(&impl_)) return smooth->eval(p);
  if (const auto* form = std::get_if<std::shared_ptr<const DislocationForm>>(&impl_))
    return (*form)->eval(p, side);
  return std::get<std::shared_ptr<const DislocationArray>>(impl_)->eval(p, side);
}

CovectorField CoframeMember::evaluator(Side side) const {
  if (const auto* smooth = std::get_if<SmoothOneForm>(&impl_)) {
    const SmoothOneForm form = *smooth;
    return [form](Point p) { return form.eval(p); };
  }
  if (const auto* form = std::get_if<std::shared_ptr<const DislocationForm>>(&impl_))
    return (*form)->evaluator(side);
  return std::get<std::shared_ptr<const DislocationArray>>(impl_)->evaluator(side);
}

CutSet CoframeMember::cuts() const {
  if (std::holds_alternative<SmoothOneForm>(impl_)) return {};
  if (const auto* form = std::get_if<std::shared_ptr<const DislocationForm>>(&impl_))
    return (*form)->cuts();
  return std::get<std::shared_ptr<const DislocationArray>>(impl_)->cuts();
}

double CoframeMember::d_density(Point p) const {
  if (const auto* smooth = std::get_if<SmoothOneForm>(&impl_))
    return smooth->db2_dx(p) - smooth->db1_dy(p);
  return 0.0;  // layering constructions are closed away from their cuts
}

double CoframeMember::boundary(const TestFunction& eta, const QuadratureSpec& spec) const {
  if (const auto* smooth = std::get_if<SmoothOneForm>(&impl_)) {
    const SmoothOneForm& form = *smooth;
    return integrate_cell(
        [&form, &eta](Point q) {
          return eta.value(q) * (form.db2_dx(q) - form.db1_dy(q));
        },
        eta.bbox(), {}, spec, Exec::Serial);
  }
  if (const auto* form = std::get_if<std::shared_ptr<const DislocationForm>>(&impl_))
    return boundary_jump_sum(**form, eta);
  return array_boundary_jump_sum(
      *std::get<std::shared_ptr<const DislocationArray>>(impl_), eta);
}

FrameAtPoint dual_frame(const Coframe& cf, Point p, Side side) {
  const Covector t1 = cf.theta1.eval(p, side);
  const Covector t2 = cf.theta2.eval(p, side);
  const double det = t1.c1 * t2.c2 - t1.c2 * t2.c1;
  if (!(std::abs(det) > 1e-14))
    throw std::domain_error("degenerate coframe at (" + g17(p.x) + ", " + g17(p.y) +
                            "): |det| = " + g17(std::abs(det)));
  return {p, {t2.c2 / det, -t2.c1 / det}, {-t1.c2 / det, t1.c1 / det}};
}

Mat2 parallel_transport(const Coframe& cf, Point p, Point q) {
  const FrameAtPoint fq = dual_frame(cf, q);
  const Covector t1 = cf.theta1.eval(p);
  const Covector t2 = cf.theta2.eval(p);
  return {fq.e1.v1 * t1.c1 + fq.e2.v1 * t2.c1, fq.e1.v1 * t1.c2 + fq.e2.v1 * t2.c2,
          fq.e1.v2 * t1.c1 + fq.e2.v2 * t2.c1, fq.e1.v2 * t1.c2 + fq.e2.v2 * t2.c2};
}

std::function<Vec2(Point)> torsion_density(const Coframe& cf, Point p_ref) {
  if (cf.theta1.singular() || cf.theta2.singular())
    throw std::invalid_argument(
        "torsion density requires a smooth coframe; pair the torsion current "
        "with test functions for singular members");
  const FrameAtPoint fr = dual_frame(cf, p_ref);
  const Coframe copy = cf;
  return [copy, fr](Point q) {
    const double d1 = copy.theta1.d_density(q);
    const double d2 = copy.theta2.d_density(q);
    return Vec2{fr.e1.v1 * d1 + fr.e2.v1 * d2, fr.e1.v2 * d1 + fr.e2.v2 * d2};
  };
}

TangentVector torsion_current(const Coframe& cf, Point p_ref, const TestFunction& eta,
                              const QuadratureSpec& spec) {
  if (point_on_cuts(cf.cuts(), p_ref))
    throw std::domain_error("torsion reference point (" + g17(p_ref.x) + ", " +
                            g17(p_ref.y) + ") lies on a cut segment");
  const FrameAtPoint fr = dual_frame(cf, p_ref);
  const double s1 = cf.theta1.boundary(eta, spec);
  const double s2 = cf.theta2.boundary(eta, spec);
  return {p_ref, {fr.e1.v1 * s1 + fr.e2.v1 * s2, fr.e1.v2 * s1 + fr.e2.v2 * s2}};
}

TangentVector burgers_vector(const Coframe& cf, std::vector<Point> loop, Point p_ref,
                             const QuadratureSpec& spec) {
  if (loop.size() < 3)
    throw std::invalid_argument("burgers loop needs at least three vertices");
  if (loop.front().x != loop.back().x || loop.front().y != loop.back().y)
    loop.push_back(loop.front());
  const CutSet cuts = cf.cuts();
  if (point_on_cuts(cuts, p_ref))
    throw std::domain_error("burgers reference point (" + g17(p_ref.x) + ", " +
                            g17(p_ref.y) + ") lies on a cut segment");
  const FrameAtPoint fr = dual_frame(cf, p_ref);
  const double c1 = integrate_line(cf.theta1.evaluator(), loop, cuts, spec);
  const double c2 = integrate_line(cf.theta2.evaluator(), loop, cuts, spec);
  return {p_ref, {fr.e1.v1 * c1 + fr.e2.v1 * c2, fr.e1.v2 * c1 + fr.e2.v2 * c2}};
}

bool point_on_cuts(const CutSet& cuts, Point p, double tol) {
  for (const CutSet::Segment& s : cuts.horizontal_segments)
    if (std::abs(p.y - s.y) <= tol && p.x >= s.x_lo - tol && p.x <= s.x_hi + tol)
      return true;
  return false;
}

std::string TorsionTable::csv() const {
  std::string out = "n,eta_id,gap_component_1,gap_component_2,bound_note\n";
  for (const TorsionRow& row : rows) {
    out += std::to_string(row.n);
    out += ',';
    out += row.eta_id;
    out += ',';
    out += g17(row.gap1);
    out += ',';
    out += g17(row.gap2);
    out += ",coframe_gap=";
    out += g17(row.coframe_gap);
    out += '\n';
  }
  return out;
}

double TorsionTable::max_gap(int n) const {
  double m = 0.0;
  for (const TorsionRow& row : rows)
    if (row.n == n) m = std::max(m, std::max(row.gap1, row.gap2));
  return m;
}

TorsionTable torsion_homogenization(const SmoothOneForm& beta, double a,
                                    const SmoothingFunction& r,
                                    const SmoothOneForm& partner, Point p_ref,
                                    const std::vector<TestFunction>& etas,
                                    const std::vector<int>& n_list,
                                    const QuadratureSpec& spec) {
  if (etas.empty())
    throw std::invalid_argument("torsion experiment: no test functions");
  if (n_list.empty())
    throw std::invalid_argument("torsion experiment: empty n list");

  auto clear_of_all = [&](Point p) {
    if (!(p.x > 0.0 && p.x < 1.0 && p.y > 0.0 && p.y < 1.0)) return false;
    for (int n : n_list)
      if (point_on_cuts(assembly_cut_segments(a, n), p, 1e-9)) return false;
    return true;
  };
  if (!clear_of_all(p_ref)) {
    Point s = p_ref;
    for (int m = 1; m <= 64 && !clear_of_all(s); ++m)
      s = {p_ref.x, 0.05 + std::fmod(p_ref.y + m * 0.0137921, 0.9)};
    throw std::invalid_argument(
        "torsion reference point (" + g17(p_ref.x) + ", " + g17(p_ref.y) +
        ") lies on a cut segment for some n; suggested reference point: (" +
        g17(s.x) + ", " + g17(s.y) + ")");
  }

  TorsionTable table;
  table.p_ref = p_ref;

  const Coframe limit{CoframeMember(beta), CoframeMember(partner)};
  const FrameAtPoint fr = dual_frame(limit, p_ref);
  std::vector<double> s1_limit(etas.size()), s2(etas.size());
  for (size_t t = 0; t < etas.size(); ++t) {
    s1_limit[t] = limit.theta1.boundary(etas[t], spec);
    s2[t] = limit.theta2.boundary(etas[t], spec);
  }

  std::vector<std::vector<std::pair<int, double>>> hist1(etas.size()), hist2(etas.size());
  for (int n : n_list) {
    const auto array = std::make_shared<const DislocationArray>(beta, a, r, n, spec);
    const Coframe cfn{CoframeMember(array), CoframeMember(partner)};
    const FrameAtPoint frn = dual_frame(cfn, p_ref);
    const Covector mu = array->eval(p_ref);
    const Covector b = beta.eval(p_ref);
    const double coframe_gap = std::hypot(mu.c1 - b.c1, mu.c2 - b.c2);
    for (size_t t = 0; t < etas.size(); ++t) {
      const double s1n = cfn.theta1.boundary(etas[t], spec);
      const Vec2 limit_v{fr.e1.v1 * s1_limit[t] + fr.e2.v1 * s2[t],
                         fr.e1.v2 * s1_limit[t] + fr.e2.v2 * s2[t]};
      const Vec2 vn{frn.e1.v1 * s1n + frn.e2.v1 * s2[t],
                    frn.e1.v2 * s1n + frn.e2.v2 * s2[t]};
      TorsionRow row;
      row.n = n;
      row.eta_id = "eta_" + std::to_string(t);
      row.gap1 = std::abs(vn.v1 - limit_v.v1);
      row.gap2 = std::abs(vn.v2 - limit_v.v2);
      row.coframe_gap = coframe_gap;
      hist1[t].push_back({n, row.gap1});
      hist2[t].push_back({n, row.gap2});
      row.slope1 = lsq_slope(hist1[t]);
      row.slope2 = lsq_slope(hist2[t]);
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

}  // namespace disloc
