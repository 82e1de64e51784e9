#include "disloc/runconfig.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "disloc/geometry.hpp"
#include "disloc/smoothing.hpp"

namespace disloc {

namespace {

std::string trim(const std::string& s) {
  const size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& what) { throw ConfigError(what); }

double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    bad("configuration key '" + key + "': cannot parse number from '" + v + "'");
  return x;
}

long long parse_int(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    bad("configuration key '" + key + "': cannot parse integer from '" + v + "'");
  return x;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  bad("configuration key '" + key + "': expected true/false, got '" + v + "'");
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::string item;
  std::stringstream in(v);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) bad("configuration key '" + key + "': empty list entry");
    out.push_back(int(parse_int(key, item)));
  }
  if (out.empty()) bad("configuration key '" + key + "': empty list");
  return out;
}

void apply_key(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "cmd") c.cmd = value;
  else if (key == "beta") c.beta = value;
  else if (key == "r") c.r = value;
  else if (key == "a") c.a = parse_double(key, value);
  else if (key == "allow_corrupt") c.allow_corrupt = parse_bool(key, value);
  else if (key == "seed") c.seed = (unsigned long long)parse_int(key, value);
  else if (key == "test_forms") c.test_forms = int(parse_int(key, value));
  else if (key == "n_list") c.n_list = parse_int_list(key, value);
  else if (key == "order") c.order = int(parse_int(key, value));
  else if (key == "max_panel") c.max_panel = parse_double(key, value);
  else if (key == "tol") c.tol = parse_double(key, value);
  else if (key == "out" || key == "dir") c.out = value;
  else if (key == "grid_res") c.grid_res = int(parse_int(key, value));
  else if (key == "level_step") c.level_step = parse_double(key, value);
  else bad("unknown configuration key '" + key + "'");
}

}  // namespace

std::string shortest_double(double v) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

RunConfig parse_config_text(const std::string& text, RunConfig base) {
  std::stringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        bad("config line " + std::to_string(lineno) + ": malformed section header");
      continue;  // sections are decorative; keys are globally unique
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      bad("config line " + std::to_string(lineno) + ": expected key = value");
    apply_key(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), std::move(base));
}

std::string canonical_config(const RunConfig& c) {
  std::string s;
  s += "[run]\n";
  s += "cmd = " + c.cmd + "\n";
  s += "beta = " + c.beta + "\n";
  s += "r = " + c.r + "\n";
  s += "a = " + shortest_double(c.a) + "\n";
  s += "allow_corrupt = " + std::string(c.allow_corrupt ? "true" : "false") + "\n";
  s += "seed = " + std::to_string(c.seed) + "\n";
  s += "test_forms = " + std::to_string(c.test_forms) + "\n";
  s += "\n[grid]\n";
  s += "n_list = ";
  for (size_t i = 0; i < c.n_list.size(); ++i)
    s += (i ? "," : "") + std::to_string(c.n_list[i]);
  s += "\n";
  s += "\n[quadrature]\n";
  s += "order = " + std::to_string(c.order) + "\n";
  s += "max_panel = " + shortest_double(c.max_panel) + "\n";
  s += "tol = " + shortest_double(c.tol) + "\n";
  s += "\n[output]\n";
  s += "dir = " + c.out + "\n";
  s += "grid_res = " + std::to_string(c.grid_res) + "\n";
  s += "level_step = " + shortest_double(c.level_step) + "\n";
  return s;
}

void validate_config(const RunConfig& c) {
  static const std::vector<std::string> cmds{"build", "check", "converge",
                                             "torsion", "bravais"};
  if (std::find(cmds.begin(), cmds.end(), c.cmd) == cmds.end())
    bad("unknown command '" + c.cmd + "' (build|check|converge|torsion|bravais)");

  const std::vector<std::string> betas = beta_catalog_names();
  if (std::find(betas.begin(), betas.end(), c.beta) == betas.end())
    bad("unknown field '" + c.beta + "' in the catalog");

  const std::vector<std::string> rs = smoothing_catalog_names();
  if (std::find(rs.begin(), rs.end(), c.r) == rs.end())
    bad("unknown smoothing profile '" + c.r + "'");
  if (c.r == "corrupt" && !c.allow_corrupt)
    bad("smoothing profile 'corrupt' is fault-injection only; pass --allow-corrupt");

  if (!(c.a >= 0.05 && c.a <= 0.95))
    bad("strip parameter a = " + shortest_double(c.a) +
        " outside the admissible range [0.05, 0.95]");
  if (c.n_list.empty()) bad("n_list must be nonempty");
  for (int n : c.n_list)
    if (n < 1 || n > 128) bad("n_list entries must lie in [1, 128]");
  if (c.order < 2 || c.order > 48) bad("quadrature order must lie in [2, 48]");
  if (!(c.max_panel > 1e-6 && c.max_panel <= 0.5))
    bad("max_panel must lie in (1e-6, 0.5]");
  if (!(c.tol > 0 && c.tol <= 1e-2)) bad("tol must lie in (0, 1e-2]");
  if (c.test_forms < 1 || c.test_forms > 64)
    bad("test_forms must lie in [1, 64]");
  if (c.grid_res < 16 || c.grid_res > 4097)
    bad("grid_res must lie in [16, 4097]");
  if (!(c.level_step > 1e-4 && c.level_step <= 10))
    bad("level_step must lie in (1e-4, 10]");
  if (c.out.empty()) bad("output directory must not be empty");
}

QuadratureSpec config_spec(const RunConfig& c) {
  QuadratureSpec spec;
  spec.order = c.order;
  spec.max_panel = c.max_panel;
  spec.tol = c.tol;
  return spec;
}

}  // namespace disloc
