#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include <json.hpp>

#include "edsr/results_io.hpp"

using namespace edsr;

TEST_SUITE("results_io") {

TEST_CASE("empty result writes header and config block") {
  std::ostringstream out;
  write_results(out, lineshape_table({}), "[run]\nexperiment = lineshape\n", OutputFormat::Csv);
  CHECK(out.str() == "# [run]\n# experiment = lineshape\nb_tesla,p_down_true,p_down_measured\n");
}

TEST_CASE("CSV round trip to 1e-9 relative") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<LineshapePoint> pts;
  for (int i = 0; i < 500; ++i) {
    pts.push_back({5.585 + u(rng) * 1e-2, std::abs(u(rng)) * std::pow(10.0, -9 * std::abs(u(rng))),
                   std::abs(u(rng))});
  }
  auto table = lineshape_table(pts);
  table.notes.push_back("fit_rabi_hz = 200000");
  std::stringstream io;
  write_results(io, table, "[run]\n\nexperiment = lineshape\n", OutputFormat::Csv);
  const auto parsed = read_results_csv(io);
  CHECK(parsed.config_echo == "[run]\n\nexperiment = lineshape\n");
  CHECK(parsed.table.columns == table.columns);
  CHECK(parsed.table.notes == table.notes);
  REQUIRE(parsed.table.rows.size() == pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t c = 0; c < 3; ++c) {
      const double a = table.rows[i][c];
      const double b = parsed.table.rows[i][c];
      CHECK(std::abs(a - b) <= 1e-9 * std::abs(a));
    }
  }
}

TEST_CASE("JSON lines use the CSV header as keys") {
  const std::vector<ParityPoint> pts{{26.5e9, 1, 0.98}, {26.6e9, 0, 0.01}};
  const auto table = parity_table(pts);
  std::stringstream io;
  write_results(io, table, "ignored", OutputFormat::JsonLines);
  std::string line;
  int n = 0;
  while (std::getline(io, line)) {
    const auto obj = nlohmann::json::parse(line);
    REQUIRE(obj.size() == table.columns.size());
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      CHECK(obj.at(table.columns[c]).get<double>() == table.rows[n][c]);
    }
    ++n;
  }
  CHECK(n == 2);
}

TEST_CASE("tables per experiment") {
  CHECK(duration_table({}).columns.front() == "duration_s");
  CHECK(lz_results_table({}).columns.size() == 7);
  const auto t = rwa_table(RwaCheckConfig{}, RwaCheckResult{0.5, 0.4, 0.1});
  CHECK(t.rows.at(0).at(6) == 0.1);
  CHECK(format_number(1.0 / 3.0) == "0.3333333333");
}

TEST_CASE("I/O failures name the path") {
  const std::string bad = "/nonexistent-dir/out.csv";
  try {
    write_results(bad, lineshape_table({}), "", OutputFormat::Csv);
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find(bad) != std::string::npos);
  }
  CHECK_THROWS(read_results_csv_file(bad));
  std::istringstream no_header("# only comments\n");
  CHECK_THROWS(read_results_csv(no_header));
  std::istringstream ragged("a,b\n1,2,3\n");
  CHECK_THROWS(read_results_csv(ragged));
}

}
