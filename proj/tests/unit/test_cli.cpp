#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "edsr/cli.hpp"

using namespace edsr;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "edsr_cli_tests";
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "edsr_sim");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

const std::string kConfigs = EDSR_CONFIG_DIR;

// Small Monte Carlo lineshape, fast enough for unit tests.
const std::string kSmall = R"([run]
experiment = lineshape
seed = 5
[drive]
f_center = 26.5 GHz
fm_depth = 10 MHz
duration = 10 us
rabi_so = 1 MHz
[sweep]
field_origin = so_resonance
b_start = -2 mT
b_stop = 2 mT
b_step = 0.5 mT
ensemble_mode = monte-carlo
mc_samples = 3
[measurement]
shots = 200
)";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("missing --config prints usage and exits 1") {
  const auto r = invoke({});
  CHECK(r.code == 1);
  CHECK(r.err.find("--config") != std::string::npos);
  CHECK(invoke({"--config"}).code == 1);
  CHECK(invoke({"--config", "x.cfg", "--bogus"}).code == 1);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("config errors exit 1") {
  CHECK(invoke({"--config", (scratch() / "missing.cfg").string()}).code == 1);
  const auto bad = write_file("bad.cfg", "[run]\nexperiment = lineshape\nfm_dept = 1 MHz\n");
  const auto r = invoke({"--config", bad.string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("fm_dept") != std::string::npos);
  CHECK(invoke({"--config", (fs::path(kConfigs) / "fig4a.cfg").string(), "--threads", "0"}).code == 1);
}

TEST_CASE("runtime errors exit 2") {
  // Grid coarser than sigma / 2 is only detected when the sweep runs.
  std::string text = kSmall;
  text.replace(text.find("ensemble_mode = monte-carlo"), 27, "ensemble_mode = convolution");
  text += "[nuclear]\nsigma = 0.5 mT\n";
  const auto cfg = write_file("coarse.cfg", text);
  const auto r = invoke({"--config", cfg.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("sigma") != std::string::npos);
  CHECK(invoke({"--config", cfg.string(), "--output", "/nonexistent-dir/x.csv"}).code == 2);
}

TEST_CASE("same config and seed give byte-identical files") {
  const auto cfg = write_file("small.cfg", kSmall);
  const auto a = scratch() / "a.csv";
  const auto b = scratch() / "b.csv";
  const auto c = scratch() / "c.csv";
  REQUIRE(invoke({"--config", cfg.string(), "--output", a.string()}).code == 0);
  REQUIRE(invoke({"--config", cfg.string(), "--output", b.string(), "--threads", "3"}).code == 0);
  REQUIRE(invoke({"--config", cfg.string(), "--output", c.string(), "--seed", "6"}).code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a) != slurp(c));
  CHECK(slurp(c).find("# seed = 6") != std::string::npos);
}

TEST_CASE("config echo re-runs the experiment exactly") {
  const auto cfg = write_file("echo.cfg", kSmall);
  const auto out = scratch() / "echo.csv";
  REQUIRE(invoke({"--config", cfg.string(), "--output", out.string()}).code == 0);
  const auto parsed = read_results_csv_file(out.string());
  CHECK(parsed.table.rows.size() == 9);
  const auto rerun_cfg = write_file("rerun.cfg", parsed.config_echo);
  const auto rerun = scratch() / "rerun.csv";
  REQUIRE(invoke({"--config", rerun_cfg.string(), "--output", rerun.string()}).code == 0);
  CHECK(slurp(rerun) == slurp(out));
}

TEST_CASE("shipped fast configs run") {
  for (const char* name : {"rwa-validate.cfg", "fig4b.cfg", "fixedfreq-null.cfg"}) {
    CAPTURE(name);
    const auto r = invoke({"--config", (fs::path(kConfigs) / name).string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("# experiment = ") != std::string::npos);
  }
}

TEST_CASE("json-lines output and verbose echo") {
  const auto dup = write_file("dup.cfg", kSmall + "[run]\nseed = 6\n");
  CHECK(invoke({"--config", dup.string()}).code == 1);  // a key given twice
  std::string text = kSmall;
  text.replace(text.find("seed = 5"), 8, "seed = 5\noutput_format = json-lines");
  const auto json_cfg = write_file("json2.cfg", text);
  const auto r = invoke({"--config", json_cfg.string(), "--verbose"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("{\"b_tesla\":", 0) == 0);
  CHECK(r.err.find("[drive]") != std::string::npos);
}

}
