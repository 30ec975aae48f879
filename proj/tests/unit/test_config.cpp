#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <string>

#include "edsr/config.hpp"

using namespace edsr;

namespace {

const std::string kLineshape = R"(
[run]
experiment = lineshape
seed = 3

[drive]
f_center = 26.5 GHz
fm_depth = 40 MHz
duration = 500 us
rabi_so = 1.25 rad/us
rabi_hf = 0.63 rad/us
hf_ratio = 1, 0.5, 0.25

[sweep]
field_origin = so_resonance
b_start = -5 mT
b_stop = 20 mT
)";

std::size_t error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return 9999;
}

std::string error_text(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("units are normalised to SI") {
  const auto cfg = parse_config(kLineshape);
  const auto& s = cfg.sweep;
  CHECK(s.program.schedule.fm_depth == 4.0e7);
  CHECK(s.program.schedule.f_center == 26.5e9);
  CHECK(s.program.schedule.duration == doctest::Approx(500e-6));
  CHECK(s.program.rabi_so == doctest::Approx(1.25e6 / (2 * std::numbers::pi)));
  REQUIRE(s.program.species.size() == 3);
  CHECK(s.program.species[1].name == "Ga69");
  CHECK(s.program.species[1].rabi_hf == doctest::Approx(0.5 * 0.63e6 / (2 * std::numbers::pi)));
  const double b_so = larmor_to_field(26.5e9, -0.339);
  CHECK(s.b_start == doctest::Approx(b_so - 5e-3));
  CHECK(s.b_stop == doctest::Approx(b_so + 20e-3));
  CHECK(s.seed == 3);
}

TEST_CASE("documented defaults") {
  const auto cfg = parse_config(kLineshape);
  const auto& s = cfg.sweep;
  CHECK(s.electron.g_factor == -0.339);
  CHECK(s.electron.t2 == doctest::Approx(100e-6));
  CHECK(s.b_step == doctest::Approx(0.25e-3));
  CHECK(s.nuclear.sigma == doctest::Approx(0.5e-3));
  CHECK(s.nuclear.correlation_time == 1.0);
  CHECK_FALSE(s.measurement.has_value());
  CHECK(s.ensemble_mode == EnsembleMode::Convolution);
  CHECK(s.propagation.frame == Frame::Rotating);
  CHECK(s.propagation.dt == 0.0);
  CHECK(s.propagation.steps_per_period == 40.0);
  CHECK(s.threads == 1);
  CHECK(cfg.output_format == OutputFormat::Csv);
  CHECK(cfg.output_path.empty());
  CHECK(s.program.schedule.shape == ChirpShape::Up);
}

TEST_CASE("g factor") {
  const auto cfg = parse_config(kLineshape + "[electron]\ng_factor = -0.339\nt2 = inf\n");
  CHECK(cfg.sweep.electron.g_factor == -0.339);
  CHECK(std::isinf(cfg.sweep.electron.t2));
  CHECK_THROWS_AS(parse_config(kLineshape + "[electron]\ng_factor = 0\n"), ConfigError);
}

TEST_CASE("unknown keys name the key and line") {
  const std::string text = replace(kLineshape, "fm_depth = 40 MHz", "fm_dept = 40 MHz");
  CHECK(error_text(text).find("fm_dept") != std::string::npos);
  CHECK(error_line(text) == 8);
  CHECK(error_text(kLineshape + "[plot]\n").find("plot") != std::string::npos);
  CHECK(error_line("rabi = 1 MHz\n") == 1);
}

TEST_CASE("unit mismatches and malformed values") {
  CHECK(error_text(replace(kLineshape, "40 MHz", "40 mT")).find("unit") != std::string::npos);
  CHECK(error_line(replace(kLineshape, "40 MHz", "40 mT")) == 8);
  CHECK(error_text(replace(kLineshape, "40 MHz", "40")).find("needs a frequency unit") !=
        std::string::npos);
  CHECK(error_text(replace(kLineshape, "40 MHz", "40 furlongs")).find("unknown unit") !=
        std::string::npos);
  CHECK(error_text(replace(kLineshape, "40 MHz", "forty MHz")).find("expected a number") !=
        std::string::npos);
  CHECK_THROWS_AS(parse_config(replace(kLineshape, "seed = 3", "seed = -3")), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(kLineshape, "seed = 3", "seed = 3\nseed = 4")), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(kLineshape, "[run]", "[run")), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(kLineshape, "seed = 3", "seed 3")), ConfigError);
}

TEST_CASE("mandatory keys") {
  CHECK(error_text(replace(kLineshape, "hf_ratio = 1, 0.5, 0.25", "")).find("hf_ratio") !=
        std::string::npos);
  CHECK(error_text(replace(kLineshape, "experiment = lineshape", "")).find("experiment") !=
        std::string::npos);
  CHECK(error_text(replace(kLineshape, "b_stop = 20 mT", "")).find("b_stop") != std::string::npos);
  CHECK(error_text(replace(kLineshape, "hf_ratio = 1, 0.5, 0.25", "hf_ratio = 1, 1")).find(
            "one entry per species") != std::string::npos);
  // No hyperfine drive: ratios are not needed.
  CHECK_NOTHROW(parse_config(replace(replace(kLineshape, "hf_ratio = 1, 0.5, 0.25", ""),
                                     "rabi_hf = 0.63 rad/us", "")));
  CHECK_THROWS_AS(parse_config(replace(kLineshape, "lineshape", "spectrum")), ConfigError);
}

TEST_CASE("experiment specific sections") {
  const auto parity = parse_config(R"(
[run]
experiment = parity
[drive]
duration = 100 us
rabi_so = 1 MHz
rabi_hf = 0.8 MHz
[parity]
field = 5.5 T
fm_depth = 100 MHz
center_offsets = 40 MHz, -15 MHz
)");
  const double fl = field_to_larmor(5.5, -0.339);
  const auto centers = parity.parity.window_centers(-0.339);
  CHECK(centers[0] == doctest::Approx(fl + 40e6));
  CHECK(centers[1] == doctest::Approx(fl - 15e6));
  CHECK(parity.sweep.program.schedule.f_center == doctest::Approx(fl));

  const auto dur = parse_config(R"(
[run]
experiment = duration
[drive]
f_center = 26.5 GHz
fm_depth = 75 MHz
rabi_so = 0.2 MHz
[duration]
field = 5.57 T
durations = 10 us, 20 us, 0.05 ms, 100 us
fit_p_max = true
)");
  CHECK(dur.duration.durations.size() == 4);
  CHECK(dur.duration.durations[2] == doctest::Approx(50e-6));
  CHECK(dur.duration.fit_p_max);
  CHECK(dur.sweep.program.schedule.duration == doctest::Approx(10e-6));

  const auto lz = parse_config("[run]\nexperiment = lz-table\nthreads = 2\n[lz]\nratios = 1, 2\n");
  CHECK(lz.lz.ratios == std::vector<double>{1.0, 2.0});
  CHECK(lz.lz.threads == 2);
  const auto rwa = parse_config("[run]\nexperiment = validate-rwa\n[rwa]\nf_larmor = 0.3 GHz\n");
  CHECK(rwa.rwa.f_larmor == doctest::Approx(300e6));
  CHECK(rwa.rwa.lab.frame == Frame::Lab);

  CHECK_THROWS_AS(parse_config("[run]\nexperiment = fixedfreq\n[drive]\nf_center = 26.5 GHz\n"
                               "fm_depth = 1 MHz\nduration = 1 us\nrabi_so = 1 MHz\n[sweep]\n"
                               "b_start = 5 T\nb_stop = 6 T\n"),
                  ConfigError);
}

TEST_CASE("canonical text parses back to the same configuration") {
  const std::string dir = EDSR_CONFIG_DIR;
  int seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".cfg") continue;
    ++seen;
    CAPTURE(entry.path().string());
    const RunConfig cfg = load_config(entry.path().string());
    const std::string text = to_config_text(cfg);
    const RunConfig back = parse_config(text);
    CHECK(to_config_text(back) == text);
    CHECK(back.sweep.b_start == cfg.sweep.b_start);
    CHECK(back.sweep.program.rabi_so == cfg.sweep.program.rabi_so);
    for (std::size_t i = 0; i < cfg.sweep.program.species.size(); ++i) {
      CHECK(back.sweep.program.species[i].rabi_hf == cfg.sweep.program.species[i].rabi_hf);
    }
  }
  CHECK(seen >= 5);
  // Unequal ratios that do not survive a division round trip.
  const auto odd = parse_config(replace(kLineshape, "1, 0.5, 0.25", "1, 0.3, 0.7"));
  const auto back = parse_config(to_config_text(odd));
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.sweep.program.species[i].rabi_hf == odd.sweep.program.species[i].rabi_hf);
  }
  CHECK_THROWS_AS(load_config(dir + "/does-not-exist.cfg"), ConfigError);
}

}
