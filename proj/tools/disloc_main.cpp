#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "disloc/bravais.hpp"
#include "disloc/current.hpp"
#include "disloc/homogenization.hpp"
#include "disloc/parallel.hpp"
#include "disloc/runconfig.hpp"
#include "disloc/torsion.hpp"

using namespace disloc;
using json = nlohmann::ordered_json;

namespace {

struct CheckLine {
  std::string name;
  double measured = 0.0;
  double gate = 0.0;
  bool pass = false;
};

void write_file(const std::string& dir, const std::string& name,
                const std::string& text) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
  const std::string path = dir + "/" + name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.flush();
  if (!out) throw ConfigError("cannot write '" + path + "'");
}

std::string spec_hash_hex(const QuadratureSpec& spec) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", spec.hash());
  return buf;
}

std::string form_id(const RunConfig& cfg) {
  return "nu(" + cfg.beta + ",a=" + shortest_double(cfg.a) + "," + cfg.r + ")";
}

std::vector<int> unique_sorted(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

double loglog_slope(const std::vector<std::pair<int, double>>& pts) {
  std::vector<double> lx, ly;
  for (const auto& [n, g] : pts)
    if (g > 0 && std::isfinite(g)) {
      lx.push_back(std::log(double(n)));
      ly.push_back(std::log(g));
    }
  if (lx.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double m = double(lx.size());
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

json point_json(Point p) { return json::array({p.x, p.y}); }

json loop_json(const std::vector<Point>& loop) {
  json j = json::array();
  for (const Point& p : loop) j.push_back(point_json(p));
  return j;
}

// rectangle routed counterclockwise and closed
std::vector<Point> rect_loop(double x0, double y0, double x1, double y1) {
  return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}, {x0, y0}};
}

struct BurgersProbe {
  std::vector<Point> enclosing, defect_free;
  TangentVector b_enclosing{}, b_defect_free{};
  Point p_ref{1.0 / 34, 1.0 / 34};
  double expected = 0.0;       // circulation carried by the enclosing loop
  double enclosing_error = 0;  // |B - circulation * e1(p_ref)|
  double defect_free_error = 0;
};

BurgersProbe run_burgers(const DislocationForm& form, const SmoothOneForm& partner,
                         std::shared_ptr<const DislocationForm> shared,
                         const QuadratureSpec& spec) {
  BurgersProbe probe;
  const Coframe cf{CoframeMember(std::move(shared)), CoframeMember(partner)};
  const double delta = std::min(0.04, form.x_left() / 2);
  probe.enclosing = rect_loop(form.x_left() - delta, 0.3, form.x_right() + delta, 0.7);
  probe.defect_free = rect_loop(0.1, 0.05, 0.9, 0.2);
  probe.expected = form.circulation();
  probe.b_enclosing = burgers_vector(cf, probe.enclosing, probe.p_ref, spec);
  probe.b_defect_free = burgers_vector(cf, probe.defect_free, probe.p_ref, spec);
  const FrameAtPoint fr = dual_frame(cf, probe.p_ref);
  probe.enclosing_error = std::hypot(probe.b_enclosing.v.v1 - probe.expected * fr.e1.v1,
                                     probe.b_enclosing.v.v2 - probe.expected * fr.e1.v2);
  probe.defect_free_error = std::hypot(probe.b_defect_free.v.v1, probe.b_defect_free.v.v2);
  return probe;
}

json burgers_json(const BurgersProbe& p) {
  json j;
  j["p_ref"] = point_json(p.p_ref);
  j["loop_enclosing"] = loop_json(p.enclosing);
  j["burgers_enclosing"] = json::array({p.b_enclosing.v.v1, p.b_enclosing.v.v2});
  j["expected_circulation"] = p.expected;
  j["enclosing_error"] = p.enclosing_error;
  j["loop_defect_free"] = loop_json(p.defect_free);
  j["burgers_defect_free"] = json::array({p.b_defect_free.v.v1, p.b_defect_free.v.v2});
  j["defect_free_error"] = p.defect_free_error;
  return j;
}

int run_build(const RunConfig& cfg) {
  const QuadratureSpec spec = config_spec(cfg);
  const SmoothOneForm& beta = beta_catalog(cfg.beta);
  const SmoothingFunction& r = smoothing_catalog(cfg.r, cfg.allow_corrupt);
  const DislocationForm form(beta, cfg.a, r, spec);
  const double jump_integral = integrate_segment(
      [&form](double x) { return form.jump(x); }, form.x_left(), form.x_right(), spec);

  json summary;
  summary["command"] = "build";
  summary["form"] = form_id(cfg);
  summary["spec"] = spec.canonical();
  summary["spec_hash"] = spec_hash_hex(spec);
  summary["circulation"] = form.circulation();
  summary["jump_integral"] = jump_integral;
  summary["vanishing_warning"] = form.vanishing_warning();
  summary["cut"] = {{"x_left", form.x_left()},
                    {"x_right", form.x_right()},
                    {"y", 0.5},
                    {"length", form.x_right() - form.x_left()}};
  json arrays = json::array();
  for (int n : unique_sorted(cfg.n_list)) {
    const DislocationArray arr(beta, cfg.a, r, n, spec);
    const CutSet cuts = arr.cuts();
    double total = 0.0;
    json segs = json::array();
    for (const auto& s : cuts.horizontal_segments) {
      total += s.x_hi - s.x_lo;
      segs.push_back(json::array({s.x_lo, s.x_hi, s.y}));
    }
    arrays.push_back({{"n", n},
                      {"cut_segments", int(cuts.horizontal_segments.size())},
                      {"total_cut_length", total},
                      {"segments", segs}});
  }
  summary["arrays"] = arrays;

  std::vector<PairingResult> pairs;
  for (const TestOneForm& alpha : standard_test_forms(cfg.test_forms, cfg.seed))
    pairs.push_back({form_id(cfg), alpha.id,
                     pair_current(form.evaluator(), form.cuts(), alpha, spec),
                     spec.hash()});

  json desc;
  desc["field"] = cfg.beta;
  desc["a"] = cfg.a;
  desc["smoothing"] = cfg.r;
  desc["spec"] = spec.canonical();
  desc["circulation"] = form.circulation();
  desc["cut_segment"] = json::array({form.x_left(), form.x_right(), 0.5});
  desc["vanishing_warning"] = form.vanishing_warning();

  write_file(cfg.out, "config.ini", canonical_config(cfg));
  write_file(cfg.out, "form.json", desc.dump(2) + "\n");
  write_file(cfg.out, "pairings.csv", pairing_csv(pairs));
  write_file(cfg.out, "summary.json", summary.dump(2) + "\n");
  std::printf("build %s: circulation %s, jump integral %s -> %s/summary.json\n",
              form_id(cfg).c_str(), shortest_double(form.circulation()).c_str(),
              shortest_double(jump_integral).c_str(), cfg.out.c_str());
  return 0;
}

int run_check(const RunConfig& cfg) {
  const QuadratureSpec spec = config_spec(cfg);
  const SmoothOneForm& beta = beta_catalog(cfg.beta);
  const SmoothingFunction& r = smoothing_catalog(cfg.r, cfg.allow_corrupt);
  std::vector<CheckLine> checks;
  const auto add = [&checks](std::string name, double measured, double gate) {
    checks.push_back(
        {std::move(name), measured, gate, std::isfinite(measured) && measured <= gate});
  };

  const SmoothingCheck sc = validate_smoothing(r);
  add("smoothing_endpoints", sc.endpoints_ok ? 0.0 : 1.0, 0.5);
  add("smoothing_monotone", sc.monotone_ok ? 0.0 : 1.0, 0.5);
  add("smoothing_consistency", sc.consistent_ok ? sc.unit_mass_err : 1.0, 1e-6);
  add("field_derivatives", validate_derivatives(beta), 1e-5);

  const DislocationForm form(beta, cfg.a, r, spec);
  const ConstructionReport cr = check_construction(form);
  add("construction_closedness", cr.max_curl, 1e-4);
  add("construction_boundary_match", cr.max_boundary_mismatch, 1e-10);
  add("construction_circulation", cr.circulation_error, 1e-8);
  add("construction_horizontal_identity", cr.max_horizontal_mismatch, 1e-10);
  add("construction_jump_identity", cr.jump_identity_error, 1e-8);

  for (const char* closed : {"dx", "dy"}) {
    const SmoothOneForm& cb = beta_catalog(closed);
    const DislocationForm cf(cb, cfg.a, r, spec);
    double sup = 0.0;
    for (int i = 0; i <= 32; ++i)
      for (int j = 0; j <= 32; ++j) {
        const Point p{(i + 0.7) / 33, (j + 0.3) / 33};
        const Covector w = cf.eval(p);
        const Covector b = cb.eval(p);
        sup = std::max({sup, std::abs(w.c1 - b.c1), std::abs(w.c2 - b.c2)});
      }
    add(std::string("exactness_") + closed, sup, 1e-9);
  }

  int ng = 2;
  for (int n : unique_sorted(cfg.n_list))
    if (n > 1) {
      ng = n;
      break;
    }
  const GluingReport gr = check_gluing(DislocationArray(beta, cfg.a, r, ng, spec));
  add("gluing_value", gr.max_value_mismatch, 1e-6);
  add("gluing_derivative", gr.max_derivative_mismatch, 1e-6);
  add("gluing_circulation", gr.max_circulation_error, 1e-8);

  double cross = 0.0;
  for (const TestFunction& f : standard_test_functions(3, cfg.seed))
    cross = std::max(cross,
                     std::abs(boundary_pairing(form.evaluator(), form.cuts(), f, spec) -
                              boundary_jump_sum(form, f)));
  add("boundary_cross_validation", cross, 1e-7);

  const SmoothOneForm& partner = beta_catalog(cfg.beta == "dx" ? "dy" : "dx");
  const Coframe smooth{CoframeMember(beta), CoframeMember(partner)};
  const TestFunction eta{{0.5, 0.5}, 0.3, 1.0};
  const TangentVector tc = torsion_current(smooth, kTorsionRef, eta, spec);
  const auto dens = torsion_density(smooth, kTorsionRef);
  const double t1 = integrate_cell([&](Point p) { return eta.value(p) * dens(p).v1; },
                                   eta.bbox(), CutSet(), spec, Exec::Serial);
  const double t2 = integrate_cell([&](Point p) { return eta.value(p) * dens(p).v2; },
                                   eta.bbox(), CutSet(), spec, Exec::Serial);
  add("torsion_smooth_density", std::hypot(tc.v.v1 - t1, tc.v.v2 - t2), 1e-8);

  auto shared = std::make_shared<const DislocationForm>(beta, cfg.a, r, spec);
  const Coframe sing{CoframeMember(shared), CoframeMember(partner)};
  const TangentVector ts = torsion_current(sing, kTorsionRef, eta, spec);
  const FrameAtPoint fr = dual_frame(sing, kTorsionRef);
  const double T1 = boundary_pairing(shared->evaluator(), shared->cuts(), eta, spec);
  add("torsion_singular_cross",
      std::hypot(ts.v.v1 - fr.e1.v1 * T1, ts.v.v2 - fr.e1.v2 * T1), 1e-7);

  const BurgersProbe probe = run_burgers(form, partner, shared, spec);
  add("burgers_enclosing", probe.enclosing_error, 1e-6);
  add("burgers_defect_free", probe.defect_free_error, 1e-9);

  json rep;
  rep["command"] = "check";
  rep["form"] = form_id(cfg);
  rep["spec_hash"] = spec_hash_hex(spec);
  json list = json::array();
  bool all = true;
  for (const CheckLine& c : checks) {
    all = all && c.pass;
    list.push_back({{"name", c.name}, {"measured", c.measured}, {"gate", c.gate},
                    {"pass", c.pass}});
    std::printf("%s %s: measured %s (gate %s)\n", c.pass ? "PASS" : "FAIL",
                c.name.c_str(), shortest_double(c.measured).c_str(),
                shortest_double(c.gate).c_str());
  }
  rep["checks"] = list;
  rep["all_pass"] = all;
  write_file(cfg.out, "config.ini", canonical_config(cfg));
  write_file(cfg.out, "summary.json", rep.dump(2) + "\n");
  std::printf("check %s: %s\n", form_id(cfg).c_str(), all ? "all pass" : "FAILURES");
  return all ? 0 : 1;
}

int run_converge(const RunConfig& cfg) {
  const QuadratureSpec spec = config_spec(cfg);
  const SmoothOneForm& beta = beta_catalog(cfg.beta);
  const SmoothingFunction& r = smoothing_catalog(cfg.r, cfg.allow_corrupt);
  const std::vector<TestOneForm> tests = standard_test_forms(cfg.test_forms, cfg.seed);
  const ConvergenceTable table = converge(beta, cfg.a, r, cfg.n_list, tests, spec);

  json rows = json::array();
  bool all_ok = true;
  std::map<std::string, double> final_slope;
  for (const ConvergenceRow& row : table.rows) {
    const bool ok = std::abs(row.gap) <= row.bound;
    all_ok = all_ok && ok;
    rows.push_back({{"n", row.n}, {"test_id", row.test_id}, {"gap", row.gap},
                    {"bound", row.bound}, {"within_bound", ok},
                    {"slope_cum", row.slope_cum}});
    final_slope[row.test_id] = row.slope_cum;
  }
  std::vector<std::pair<int, double>> mg;
  for (int n : unique_sorted(cfg.n_list)) mg.push_back({n, table.max_gap(n)});

  json summary;
  summary["command"] = "converge";
  summary["form"] = form_id(cfg);
  summary["spec_hash"] = spec_hash_hex(spec);
  summary["strip_sup"] = table.strip_sup;
  summary["constant_C"] = table.constant_C;
  summary["sup_d2x"] = table.sup_d2x;
  summary["sup_d1y"] = table.sup_d1y;
  summary["sup_r_prime"] = table.sup_rp;
  json slopes = json::object();
  for (const auto& [id, s] : final_slope) slopes[id] = s;
  summary["slope_per_test"] = slopes;
  summary["max_gap_slope"] = loglog_slope(mg);
  json gaps = json::object();
  for (const auto& [n, g] : mg) gaps[std::to_string(n)] = g;
  summary["max_gap_per_n"] = gaps;
  summary["all_within_bound"] = all_ok;
  summary["rows"] = rows;

  write_file(cfg.out, "config.ini", canonical_config(cfg));
  write_file(cfg.out, "table.csv", table.csv());
  write_file(cfg.out, "summary.json", summary.dump(2) + "\n");
  std::printf("converge %s: max-gap slope %s, bounds %s -> %s/table.csv\n",
              form_id(cfg).c_str(), shortest_double(loglog_slope(mg)).c_str(),
              all_ok ? "hold" : "VIOLATED", cfg.out.c_str());
  return all_ok ? 0 : 1;
}

int run_torsion(const RunConfig& cfg) {
  const QuadratureSpec spec = config_spec(cfg);
  const SmoothOneForm& beta = beta_catalog(cfg.beta);
  const SmoothingFunction& r = smoothing_catalog(cfg.r, cfg.allow_corrupt);
  const SmoothOneForm& partner = beta_catalog(cfg.beta == "dx" ? "dy" : "dx");
  const std::vector<TestFunction> etas = standard_test_functions(cfg.test_forms, cfg.seed);
  const TorsionTable table =
      torsion_homogenization(beta, cfg.a, r, partner, kTorsionRef, etas, cfg.n_list, spec);

  const DislocationForm form(beta, cfg.a, r, spec);
  auto shared = std::make_shared<const DislocationForm>(beta, cfg.a, r, spec);
  const BurgersProbe probe = run_burgers(form, partner, shared, spec);

  json summary;
  summary["command"] = "torsion";
  summary["form"] = form_id(cfg);
  summary["partner"] = partner.name;
  summary["spec_hash"] = spec_hash_hex(spec);
  summary["p_ref"] = point_json(table.p_ref);
  json gaps = json::object();
  for (int n : unique_sorted(cfg.n_list)) gaps[std::to_string(n)] = table.max_gap(n);
  summary["max_gap_per_n"] = gaps;
  json slopes = json::object();
  std::map<std::string, std::pair<double, double>> fin;
  for (const TorsionRow& row : table.rows) fin[row.eta_id] = {row.slope1, row.slope2};
  for (const auto& [id, s] : fin)
    slopes[id] = json::array({s.first, s.second});
  summary["slope_per_eta"] = slopes;
  summary["burgers"] = burgers_json(probe);

  write_file(cfg.out, "config.ini", canonical_config(cfg));
  write_file(cfg.out, "torsion.csv", table.csv());
  write_file(cfg.out, "burgers.json", burgers_json(probe).dump(2) + "\n");
  write_file(cfg.out, "summary.json", summary.dump(2) + "\n");
  const bool ok = probe.enclosing_error <= 1e-6 && probe.defect_free_error <= 1e-9;
  std::printf("torsion %s: burgers enclosing error %s, defect-free error %s -> %s/torsion.csv\n",
              form_id(cfg).c_str(), shortest_double(probe.enclosing_error).c_str(),
              shortest_double(probe.defect_free_error).c_str(), cfg.out.c_str());
  return ok ? 0 : 1;
}

int run_bravais(const RunConfig& cfg) {
  const QuadratureSpec spec = config_spec(cfg);
  const SmoothOneForm& beta = beta_catalog(cfg.beta);
  const SmoothingFunction& r = smoothing_catalog(cfg.r, cfg.allow_corrupt);
  const BravaisOptions opts{cfg.level_step, cfg.grid_res};
  const int n = cfg.n_list.front();
  const BravaisPicture pic =
      n == 1 ? bravais_layers(DislocationForm(beta, cfg.a, r, spec), opts)
             : bravais_layers(DislocationArray(beta, cfg.a, r, n, spec), opts);

  json summary;
  summary["command"] = "bravais";
  summary["form"] = form_id(cfg);
  summary["n"] = n;
  summary["level_step"] = pic.level_step;
  summary["grid_res"] = cfg.grid_res;
  summary["layer_segments"] = pic.layer_segments.size();
  summary["cut_segments"] = pic.cut_segments.size();
  summary["terminated_ends"] = pic.terminated_ends();
  json pts = json::array();
  for (const Point& p : pic.terminated_points) pts.push_back(point_json(p));
  summary["terminated_points"] = pts;

  write_file(cfg.out, "config.ini", canonical_config(cfg));
  write_file(cfg.out, "bravais.svg", pic.svg());
  write_file(cfg.out, "summary.json", summary.dump(2) + "\n");
  std::printf("bravais %s (n=%d): %d terminated layer end(s) -> %s/bravais.svg\n",
              form_id(cfg).c_str(), n, pic.terminated_ends(), cfg.out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"singular layering forms: construction, currents, convergence, torsion"};
  std::string config_path;
  std::string f_cmd, f_beta, f_r, f_a, f_nlist, f_tol, f_order, f_maxpanel, f_out,
      f_seed, f_testforms, f_gridres, f_levelstep;
  bool f_allow = false;

  app.add_option("--config", config_path, "configuration file (key = value, [sections])");
  auto* o_cmd = app.add_option("--cmd", f_cmd, "build|check|converge|torsion|bravais");
  auto* o_beta = app.add_option("--beta", f_beta, "field catalog key");
  auto* o_a = app.add_option("--a", f_a, "strip parameter in [0.05, 0.95]");
  auto* o_r = app.add_option("--r", f_r, "smoothing profile catalog key");
  auto* o_nlist = app.add_option("--n-list", f_nlist, "comma-separated array sizes");
  auto* o_tol = app.add_option("--tol", f_tol, "quadrature accuracy target");
  auto* o_order = app.add_option("--order", f_order, "Gauss points per panel [2,48]");
  auto* o_maxpanel = app.add_option("--max-panel", f_maxpanel, "max panel extent");
  auto* o_out = app.add_option("--out", f_out, "output directory");
  auto* o_seed = app.add_option("--seed", f_seed, "test family seed");
  auto* o_testforms = app.add_option("--test-forms", f_testforms, "test family size");
  auto* o_gridres = app.add_option("--grid-res", f_gridres, "layer-picture resolution");
  auto* o_levelstep = app.add_option("--level-step", f_levelstep, "layer level spacing");
  auto* o_allow = app.add_flag("--allow-corrupt", f_allow,
                               "admit the fault-injection smoothing profile");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config_file(config_path, cfg);
    std::string ov;
    const auto override_kv = [&ov](const CLI::Option* o, const char* key,
                                   const std::string& v) {
      if (o->count()) ov += std::string(key) + " = " + v + "\n";
    };
    override_kv(o_cmd, "cmd", f_cmd);
    override_kv(o_beta, "beta", f_beta);
    override_kv(o_a, "a", f_a);
    override_kv(o_r, "r", f_r);
    override_kv(o_nlist, "n_list", f_nlist);
    override_kv(o_tol, "tol", f_tol);
    override_kv(o_order, "order", f_order);
    override_kv(o_maxpanel, "max_panel", f_maxpanel);
    override_kv(o_out, "out", f_out);
    override_kv(o_seed, "seed", f_seed);
    override_kv(o_testforms, "test_forms", f_testforms);
    override_kv(o_gridres, "grid_res", f_gridres);
    override_kv(o_levelstep, "level_step", f_levelstep);
    if (o_allow->count()) ov += "allow_corrupt = true\n";
    cfg = parse_config_text(ov, cfg);
    validate_config(cfg);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  }

  const auto t0 = std::chrono::steady_clock::now();
  int rc = 0;
  try {
    if (cfg.cmd == "build") rc = run_build(cfg);
    else if (cfg.cmd == "check") rc = run_check(cfg);
    else if (cfg.cmd == "converge") rc = run_converge(cfg);
    else if (cfg.cmd == "torsion") rc = run_torsion(cfg);
    else rc = run_bravais(cfg);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::fprintf(stderr, "[%s] wall time %.2fs, %d worker(s)\n", cfg.cmd.c_str(), secs,
               worker_count());
  return rc;
}
