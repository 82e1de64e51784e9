#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kBase = fs::temp_directory_path() / "layering_cli_test";

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(DISLOC_CLI_PATH) + " " + args + " >/dev/null 2>/dev/null";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return in ? ss.str() : std::string();
}

fs::path fresh_dir(const char* name) {
  const fs::path dir = kBase / name;
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("build writes its outputs and reruns byte-identically") {
  const fs::path out = fresh_dir("build");
  CHECK(run_cli("--cmd build --out " + out.string()) == 0);
  const std::string summary = slurp(out / "summary.json");
  const std::string pairings = slurp(out / "pairings.csv");
  const std::string config = slurp(out / "config.ini");
  const std::string form = slurp(out / "form.json");
  REQUIRE(!summary.empty());
  REQUIRE(!pairings.empty());
  CHECK(pairings.rfind("form_id,test_id,value,spec_hash\n", 0) == 0);
  CHECK(summary.find("\"circulation\"") != std::string::npos);
  CHECK(config.rfind("[run]\n", 0) == 0);
  CHECK(!form.empty());

  CHECK(run_cli("--cmd build --out " + out.string()) == 0);
  CHECK(slurp(out / "summary.json") == summary);
  CHECK(slurp(out / "pairings.csv") == pairings);
  CHECK(slurp(out / "config.ini") == config);
  CHECK(slurp(out / "form.json") == form);
}

TEST_CASE("check passes on the default configuration") {
  const fs::path out = fresh_dir("check");
  CHECK(run_cli("--cmd check --out " + out.string()) == 0);
  const std::string summary = slurp(out / "summary.json");
  CHECK(summary.find("\"all_pass\": true") != std::string::npos);
}

TEST_CASE("configuration errors exit with code 2 before any compute") {
  const std::string out = " --out " + fresh_dir("err").string();
  CHECK(run_cli("--beta nope" + out) == 2);
  CHECK(run_cli("--a 0.01" + out) == 2);
  CHECK(run_cli("--a 0.99" + out) == 2);
  CHECK(run_cli("--r corrupt" + out) == 2);
  CHECK(run_cli("--cmd fly" + out) == 2);
  CHECK(run_cli("--order 99" + out) == 2);
  CHECK(run_cli("--n-list 1,0" + out) == 2);
  CHECK(run_cli("--totally-unknown-flag" + out) == 2);
  CHECK(run_cli("--config does_not_exist.ini" + out) == 2);
  CHECK(!fs::exists(fresh_dir("err") / "summary.json"));
}

TEST_CASE("fault-injected profile builds but fails the runtime checks") {
  const fs::path out = fresh_dir("corrupt");
  CHECK(run_cli("--r corrupt --allow-corrupt --cmd check --out " + out.string()) == 1);
  const std::string summary = slurp(out / "summary.json");
  CHECK(summary.find("\"all_pass\": false") != std::string::npos);
  CHECK(summary.find("\"pass\": false") != std::string::npos);
}

TEST_CASE("flags win over the config file") {
  const fs::path out = fresh_dir("precedence");
  fs::create_directories(out);
  const fs::path ini = out / "base.ini";
  {
    std::ofstream f(ini);
    f << "beta = dy\na = 0.25\norder = 12\n";
  }
  CHECK(run_cli("--config " + ini.string() + " --beta dx --cmd build --out " +
                out.string()) == 0);
  const std::string config = slurp(out / "config.ini");
  CHECK(config.find("beta = dx") != std::string::npos);   // flag override
  CHECK(config.find("a = 0.25") != std::string::npos);    // file survives
  CHECK(config.find("order = 12") != std::string::npos);  // file survives
}

TEST_CASE("converge writes the experiment table") {
  const fs::path out = fresh_dir("converge");
  CHECK(run_cli("--cmd converge --n-list 1,2 --test-forms 2 --out " + out.string()) == 0);
  const std::string csv = slurp(out / "table.csv");
  CHECK(csv.rfind("n,test_id,gap,bound,slope_cum\n", 0) == 0);
  CHECK(csv.find("\r") == std::string::npos);
  CHECK(csv.find(",") != std::string::npos);
  const std::string summary = slurp(out / "summary.json");
  CHECK(summary.find("\"all_within_bound\": true") != std::string::npos);
}

TEST_CASE("torsion writes table and loop records") {
  const fs::path out = fresh_dir("torsion");
  CHECK(run_cli("--cmd torsion --n-list 1,2 --test-forms 2 --out " + out.string()) == 0);
  CHECK(slurp(out / "torsion.csv")
            .rfind("n,eta_id,gap_component_1,gap_component_2,bound_note\n", 0) == 0);
  CHECK(slurp(out / "burgers.json").find("\"burgers_enclosing\"") != std::string::npos);
}

TEST_CASE("layer picture renders to SVG deterministically") {
  const fs::path out = fresh_dir("bravais");
  CHECK(run_cli("--cmd bravais --n-list 2 --out " + out.string()) == 0);
  const std::string svg = slurp(out / "bravais.svg");
  REQUIRE(!svg.empty());
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(run_cli("--cmd bravais --n-list 2 --out " + out.string()) == 0);
  CHECK(slurp(out / "bravais.svg") == svg);
}

TEST_CASE("help exits cleanly") { CHECK(run_cli("--help") == 0); }
