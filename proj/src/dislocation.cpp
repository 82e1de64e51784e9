#include "disloc/dislocation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <initializer_list>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <stdexcept>
#include <unordered_map>

namespace disloc {

namespace {

constexpr double kDomainSlack = 1e-9;
constexpr double kBoundaryTol = 1e-12;

double gauss_panel(const std::function<double(double)>& g, double lo, double hi,
                   const GaussRule& rule) {
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  double s = 0.0;
  for (size_t i = 0; i < rule.nodes.size(); ++i)
    s += rule.weights[i] * g(mid + half * rule.nodes[i]);
  return s * half;
}

[[noreturn]] void throw_needs_side(const char* what, Point p) {
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "%s is two-valued at (%.17g, %.17g); pass Side::Below or Side::Above",
                what, p.x, p.y);
  throw std::invalid_argument(buf);
}

Point clamp_to_square(Point p, const char* what) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y) || p.x < -kDomainSlack ||
      p.x > 1.0 + kDomainSlack || p.y < -kDomainSlack || p.y > 1.0 + kDomainSlack) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s: point (%.17g, %.17g) is outside the unit square",
                  what, p.x, p.y);
    throw std::domain_error(buf);
  }
  return {std::clamp(p.x, 0.0, 1.0), std::clamp(p.y, 0.0, 1.0)};
}

}  // namespace

struct DislocationForm::RowCache {
  mutable std::shared_mutex mutex;
  std::unordered_map<std::uint64_t, Row> rows;
};

DislocationForm::DislocationForm(DislocationForm&&) noexcept = default;
DislocationForm& DislocationForm::operator=(DislocationForm&&) noexcept = default;
DislocationForm::~DislocationForm() = default;

DislocationForm::DislocationForm(SmoothOneForm beta, double a, SmoothingFunction r,
                                 QuadratureSpec spec, Options opts)
    : beta_(std::make_shared<const SmoothOneForm>(std::move(beta))),
      a_(a),
      r_(std::move(r)),
      spec_(spec),
      rows_(std::make_unique<RowCache>()) {
  if (!std::isfinite(a_) || a_ <= 0.0 || a_ >= 1.0)
    throw std::invalid_argument("strip width a must lie in (0, 1)");
  if (opts.check_a_range && (a_ < 0.05 || a_ > 0.95))
    throw std::invalid_argument("strip width a must lie in [0.05, 0.95]");
  if (!beta_->b1 || !beta_->b2 || !beta_->db1_dx || !beta_->db1_dy || !beta_->db2_dx ||
      !beta_->db2_dy || !beta_->d2b1_dxdx || !beta_->d2b1_dxdy)
    throw std::invalid_argument("all field and derivative evaluators must be set");
  x_left_ = 0.5 - 0.5 * a_;
  x_right_ = 0.5 + 0.5 * a_;

  // Counterclockwise boundary from the anchor (1, 1/2).
  const Point corners[6] = {{1, 0.5}, {1, 1}, {0, 1}, {0, 0}, {1, 0}, {1, 0.5}};
  const GaussRule& rule = gauss_rule(spec_.order);
  double running = 0.0;
  for (int e = 0; e < 5; ++e) {
    BoundaryEdge& edge = edges_[e];
    edge.P = corners[e];
    edge.Q = corners[e + 1];
    const Point d = edge.Q - edge.P;
    const double len = std::hypot(d.x, d.y);
    edge.tedges = panel_edges(0.0, 1.0, {}, spec_.max_panel / len);
    edge.prefix.assign(edge.tedges.size(), 0.0);
    auto integrand = [this, &edge, d](double t) {
      const Covector w = beta_->eval(edge.P + t * d);
      return w.c1 * d.x + w.c2 * d.y;
    };
    for (size_t i = 0; i + 1 < edge.tedges.size(); ++i)
      edge.prefix[i + 1] =
          edge.prefix[i] + gauss_panel(integrand, edge.tedges[i], edge.tedges[i + 1], rule);
    edge_start_[e] = running;
    running += edge.prefix.back();
  }
  circulation_ = running;

  if (opts.warn_vanishing) {
    double min_norm = std::numeric_limits<double>::infinity();
    const int res = 64;
    for (int i = 0; i < res; ++i)
      for (int j = 0; j < res; ++j) {
        const Point p{(i + 0.5) / res, (j + 0.5) / res};
        const Covector w = beta_->eval(p);
        min_norm = std::min(min_norm, std::hypot(w.c1, w.c2));
      }
    vanishing_warning_ = !(min_norm > 1e-12);
  }
}

double DislocationForm::edge_partial(int e, double t) const {
  const BoundaryEdge& edge = edges_[e];
  t = std::clamp(t, 0.0, 1.0);
  const auto& te = edge.tedges;
  size_t i = std::upper_bound(te.begin(), te.end(), t) - te.begin();
  i = (i == 0) ? 0 : i - 1;
  if (i + 1 >= te.size()) i = te.size() - 2;
  const Point d = edge.Q - edge.P;
  auto integrand = [this, &edge, d](double s) {
    const Covector w = beta_->eval(edge.P + s * d);
    return w.c1 * d.x + w.c2 * d.y;
  };
  return edge.prefix[i] + gauss_panel(integrand, te[i], t, gauss_rule(spec_.order));
}

double DislocationForm::f0_left_at(double y) const {
  return edge_start_[2] + edge_partial(2, 1.0 - y);
}

double DislocationForm::f0_right_at(double y, Side side) const {
  if (y > 0.5) return edge_partial(0, 2.0 * (y - 0.5));
  if (y < 0.5) return edge_start_[4] + edge_partial(4, 2.0 * y);
  if (side == Side::Below) return circulation_;
  return 0.0;  // Auto and Above agree at the anchor
}

double DislocationForm::boundary_potential(Point q, Side side) const {
  q = clamp_to_square(q, "boundary_potential");
  const bool on_right = std::abs(q.x - 1.0) <= kBoundaryTol;
  const bool on_top = std::abs(q.y - 1.0) <= kBoundaryTol;
  const bool on_left = std::abs(q.x) <= kBoundaryTol;
  const bool on_bottom = std::abs(q.y) <= kBoundaryTol;
  if (on_right) {
    if (std::abs(q.y - 0.5) <= kBoundaryTol && side == Side::Auto)
      return 0.0;  // the anchor itself; Auto matches Above by convention
    return f0_right_at(q.y, side);
  }
  if (on_top) return edge_start_[1] + edge_partial(1, 1.0 - q.x);
  if (on_left) return f0_left_at(q.y);
  if (on_bottom) return edge_start_[3] + edge_partial(3, q.x);
  char buf[120];
  std::snprintf(buf, sizeof buf,
                "boundary_potential: (%.17g, %.17g) is not on the boundary", q.x, q.y);
  throw std::domain_error(buf);
}

DislocationForm::CumTable DislocationForm::build_cum(double lo, double hi,
                                                     std::function<double(double)> g) const {
  CumTable t;
  t.g = std::move(g);
  t.edges = panel_edges(lo, hi, {}, spec_.max_panel);
  t.prefix.assign(t.edges.size(), 0.0);
  const GaussRule& rule = gauss_rule(spec_.order);
  for (size_t i = 0; i + 1 < t.edges.size(); ++i)
    t.prefix[i + 1] = t.prefix[i] + gauss_panel(t.g, t.edges[i], t.edges[i + 1], rule);
  return t;
}

double DislocationForm::CumTable::prefix_at(double x, const GaussRule& rule) const {
  x = std::clamp(x, edges.front(), edges.back());
  size_t i = std::upper_bound(edges.begin(), edges.end(), x) - edges.begin();
  i = (i == 0) ? 0 : i - 1;
  if (i + 1 >= edges.size()) i = edges.size() - 2;
  return prefix[i] + gauss_panel(g, edges[i], x, rule);
}

DislocationForm::Row DislocationForm::build_row(double y) const {
  Row row;
  auto beta = beta_;
  row.b2_left = beta->b2({0.0, y});
  row.b2_right = beta->b2({1.0, y});
  row.f0_left = f0_left_at(y);
  if (y == 0.5) {
    row.f0_right_above = 0.0;
    row.f0_right_below = circulation_;
  } else {
    const double v = f0_right_at(y, Side::Auto);
    row.f0_right_above = v;
    row.f0_right_below = v;
  }

  row.b1_left = build_cum(0.0, x_left_, [beta, y](double x) { return beta->b1({x, y}); });
  row.b1_right = build_cum(x_right_, 1.0, [beta, y](double x) { return beta->b1({x, y}); });
  row.db1dy_left =
      build_cum(0.0, x_left_, [beta, y](double x) { return beta->db1_dy({x, y}); });
  row.db1dy_right =
      build_cum(x_right_, 1.0, [beta, y](double x) { return beta->db1_dy({x, y}); });

  row.fbar_L = row.f0_left + row.b1_left.total();
  row.fbar_R_above = row.f0_right_above - row.b1_right.total();
  row.fbar_R_below = row.f0_right_below - row.b1_right.total();
  row.nu2_L = row.b2_left + row.db1dy_left.total();
  row.nu2_R = row.b2_right - row.db1dy_right.total();

  const Point seam_L{x_left_, y}, seam_R{x_right_, y};
  row.b_L = beta->b1(seam_L);
  row.b_R = beta->b1(seam_R);
  row.c_L = beta->db1_dx(seam_L);
  row.c_R = beta->db1_dx(seam_R);
  row.bp_L = beta->db1_dy(seam_L);
  row.bp_R = beta->db1_dy(seam_R);
  row.cp_L = beta->d2b1_dxdy(seam_L);
  row.cp_R = beta->d2b1_dxdy(seam_R);
  return row;
}

const DislocationForm::Row& DislocationForm::row(double y) const {
  const std::uint64_t key = std::bit_cast<std::uint64_t>(y);
  {
    std::shared_lock lock(rows_->mutex);
    auto it = rows_->rows.find(key);
    if (it != rows_->rows.end()) return it->second;
  }
  Row fresh = build_row(y);
  std::unique_lock lock(rows_->mutex);
  auto [it, inserted] = rows_->rows.try_emplace(key, std::move(fresh));
  (void)inserted;  // a racing builder computed the identical row
  return it->second;
}

DislocationForm::Interpolants DislocationForm::interpolants(const Row& row, double x,
                                                            double fbar_R) const {
  const double uL = x - x_left_, uR = x - x_right_;
  Interpolants out;
  out.pL = row.fbar_L + row.b_L * uL + 0.5 * row.c_L * uL * uL;
  out.pR = fbar_R + row.b_R * uR + 0.5 * row.c_R * uR * uR;
  out.dpL_dx = row.b_L + row.c_L * uL;
  out.dpR_dx = row.b_R + row.c_R * uR;
  out.dpL_dy = row.nu2_L + row.bp_L * uL + 0.5 * row.cp_L * uL * uL;
  out.dpR_dy = row.nu2_R + row.bp_R * uR + 0.5 * row.cp_R * uR * uR;
  return out;
}

double DislocationForm::pick_fbar_R(const Row& row, Point p, Side side,
                                    const char* what) const {
  if (p.y != 0.5) return row.fbar_R_above;  // single-valued off the cut line
  switch (side) {
    case Side::Below: return row.fbar_R_below;
    case Side::Above: return row.fbar_R_above;
    case Side::Auto: break;
  }
  throw_needs_side(what, p);
}

double DislocationForm::horizontal_potential(Point p, Side side) const {
  p = clamp_to_square(p, "horizontal_potential");
  const Row& r = row(p.y);
  const GaussRule& rule = gauss_rule(spec_.order);
  if (p.x <= x_left_) return r.f0_left + r.b1_left.prefix_at(p.x, rule);
  if (p.x >= x_right_) {
    double f0r;
    if (p.y != 0.5) {
      f0r = r.f0_right_above;
    } else if (side == Side::Below || side == Side::Auto) {
      f0r = r.f0_right_below;  // Auto resolves the ray to the below side
    } else {
      f0r = r.f0_right_above;
    }
    return f0r + r.b1_right.prefix_at(p.x, rule) - r.b1_right.total();
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "horizontal_potential: (%.17g, %.17g) lies inside the middle strip",
                p.x, p.y);
  throw std::domain_error(buf);
}

double DislocationForm::taylor_interpolant(Lane lane, Point p, Side side) const {
  p = clamp_to_square(p, "taylor_interpolant");
  const Row& r = row(p.y);
  if (lane == Lane::Left) {
    const double uL = p.x - x_left_;
    return r.fbar_L + r.b_L * uL + 0.5 * r.c_L * uL * uL;
  }
  const double fbar_R = pick_fbar_R(r, p, side, "taylor_interpolant (right)");
  const double uR = p.x - x_right_;
  return fbar_R + r.b_R * uR + 0.5 * r.c_R * uR * uR;
}

double DislocationForm::potential(Point p, Side side) const {
  p = clamp_to_square(p, "potential");
  const Row& r = row(p.y);
  const GaussRule& rule = gauss_rule(spec_.order);
  if (p.x <= x_left_) return r.f0_left + r.b1_left.prefix_at(p.x, rule);
  if (p.x >= x_right_) {
    double f0r;
    if (p.y != 0.5) {
      f0r = r.f0_right_above;
    } else if (p.x == x_right_) {
      // the right end of the jump segment proper: genuinely two-valued
      if (side == Side::Auto) throw_needs_side("potential", p);
      f0r = (side == Side::Below) ? r.f0_right_below : r.f0_right_above;
    } else if (side == Side::Below || side == Side::Auto) {
      f0r = r.f0_right_below;  // Auto resolves the ray to the below side
    } else {
      f0r = r.f0_right_above;
    }
    return f0r + r.b1_right.prefix_at(p.x, rule) - r.b1_right.total();
  }
  if (p.y == 0.5 && side == Side::Auto) throw_needs_side("potential", p);
  const double fbar_R =
      (p.y != 0.5) ? r.fbar_R_above
                   : (side == Side::Below ? r.fbar_R_below : r.fbar_R_above);
  const Interpolants ip = interpolants(r, p.x, fbar_R);
  const double t = (p.x - 0.5) / a_;
  const double rt = r_.r(t);
  return (1.0 - rt) * ip.pL + rt * ip.pR;
}

Covector DislocationForm::eval(Point p, Side side) const {
  p = clamp_to_square(p, "eval");
  const Row& r = row(p.y);
  const GaussRule& rule = gauss_rule(spec_.order);
  if (p.x <= x_left_)
    return {beta_->b1(p), r.b2_left + r.db1dy_left.prefix_at(p.x, rule)};
  if (p.x >= x_right_)
    return {beta_->b1(p),
            r.b2_right + r.db1dy_right.prefix_at(p.x, rule) - r.db1dy_right.total()};
  double fbar_R;
  if (p.y != 0.5) {
    fbar_R = r.fbar_R_above;
  } else if (side == Side::Below) {
    fbar_R = r.fbar_R_below;
  } else if (side == Side::Above) {
    fbar_R = r.fbar_R_above;
  } else {
    throw_needs_side("eval", p);
  }
  const Interpolants ip = interpolants(r, p.x, fbar_R);
  const double t = (p.x - 0.5) / a_;
  const double rt = r_.r(t);
  const double rpt = r_.r_prime(t);
  return {(rpt / a_) * (ip.pR - ip.pL) + (1.0 - rt) * ip.dpL_dx + rt * ip.dpR_dx,
          (1.0 - rt) * ip.dpL_dy + rt * ip.dpR_dy};
}

double DislocationForm::jump(double x) const {
  const double t = (x - 0.5) / a_;
  if (t <= -0.5 || t >= 0.5) return 0.0;
  return (r_.r_prime(t) / a_) * circulation_;
}

CutSet DislocationForm::cuts() const {
  CutSet c;
  c.horizontal_segments.push_back(cut_segment());
  c.vertical_lines = {x_left_, x_right_};
  c.horizontal_lines = {0.5};
  return c;
}

CovectorField DislocationForm::evaluator(Side side) const {
  return [this, side](Point p) { return eval(p, side); };
}

ConstructionReport check_construction(const DislocationForm& form, int samples,
                                      unsigned long long seed) {
  ConstructionReport rep;
  rep.samples = samples;
  const SmoothOneForm& beta = form.beta();
  std::mt19937_64 rng(seed);
  const auto u = [&rng] { return double(rng() >> 11) * 0x1.0p-53; };

  const double h = 1e-5;
  const double margin = 1e-3;
  const auto near_any = [&](double x, std::initializer_list<double> bands) {
    for (double b : bands)
      if (std::abs(x - b) < 8 * h) return true;
    return false;
  };
  for (int i = 0; i < samples; ++i) {
    Point p{margin + (1 - 2 * margin) * u(), margin + (1 - 2 * margin) * u()};
    // measure closedness away from the cut row and the strip seams, where
    // one-sided derivatives make a central stencil meaningless
    while (near_any(p.y, {0.5}) ||
           near_any(p.x, {form.x_left(), form.x_right()})) {
      p = {margin + (1 - 2 * margin) * u(), margin + (1 - 2 * margin) * u()};
    }
    const double d2dx = (form.eval({p.x + h, p.y}).c2 - form.eval({p.x - h, p.y}).c2) / (2 * h);
    const double d1dy = (form.eval({p.x, p.y + h}).c1 - form.eval({p.x, p.y - h}).c1) / (2 * h);
    rep.max_curl = std::max(rep.max_curl, std::abs(d2dx - d1dy));
  }

  // tangential component of the form restricted to each boundary edge
  for (int k = 0; k <= samples; ++k) {
    const double t = double(k) / samples;
    rep.max_boundary_mismatch = std::max(
        {rep.max_boundary_mismatch,
         std::abs(form.eval({t, 0.0}).c1 - beta.eval({t, 0.0}).c1),
         std::abs(form.eval({t, 1.0}).c1 - beta.eval({t, 1.0}).c1),
         std::abs(form.eval({0.0, t}).c2 - beta.eval({0.0, t}).c2),
         std::abs(form.eval({1.0, t}).c2 - beta.eval({1.0, t}).c2)});
  }

  const std::vector<Point> boundary{{1, 0.5}, {1, 1}, {0, 1}, {0, 0}, {1, 0}, {1, 0.5}};
  const double loop = integrate_line(form.evaluator(), boundary, form.cuts(), form.spec());
  rep.circulation_error = std::abs(loop - form.circulation());

  for (int i = 0; i < samples; ++i) {
    double x = u() * (form.x_left() - 1e-6);
    if (i % 2) x = form.x_right() + 1e-6 + u() * (1 - form.x_right() - 1e-6);
    const Point p{x, u()};
    const Side side = (p.y == 0.5) ? Side::Below : Side::Auto;
    rep.max_horizontal_mismatch =
        std::max(rep.max_horizontal_mismatch,
                 std::abs(form.eval(p, side).c1 - beta.eval(p).c1));
  }

  const double jump_mass = integrate_segment([&form](double x) { return form.jump(x); },
                                             form.x_left(), form.x_right(), form.spec());
  rep.jump_identity_error = std::abs(jump_mass - form.circulation());
  return rep;
}

}  // namespace disloc
