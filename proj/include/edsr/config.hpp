#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "edsr/sweep.hpp"

namespace edsr {

enum class Experiment { Lineshape, Duration, Parity, FixedFreq, LzTable, ValidateRwa };
enum class OutputFormat { Csv, JsonLines };

const char* to_string(Experiment experiment);
Experiment experiment_from_string(const std::string& text);
const char* to_string(OutputFormat format);
OutputFormat output_format_from_string(const std::string& text);

/// Raised for malformed or inconsistent configuration. line() is the 1-based
/// line of the offending entry, or 0 when the problem is not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct DurationOptions {
  double field = 0.0;  // T
  std::vector<double> durations;
  double p_max = 1.0;
  bool fit_p_max = false;
};

struct ParityOptions {
  double field = 0.0;     // T
  double fm_depth = 0.0;  // Hz
  // Window centres relative to the electron Larmor frequency at `field`.
  std::vector<double> center_offsets;

  std::vector<double> window_centers(double g_factor) const;
};

struct FixedFreqOptions {
  double measurement_time = 1.0;  // s per grid point
  std::size_t cycles = 100;       // single-shot cycles per grid point
};

/// Everything needed to run one experiment. All quantities are SI (Hz, T, s);
/// fields are absolute.
struct RunConfig {
  Experiment experiment = Experiment::Lineshape;
  SweepConfig sweep;  // also carries drive, electron, integrator, seed, threads
  DurationOptions duration;
  ParityOptions parity;
  FixedFreqOptions fixedfreq;
  LzTableConfig lz;
  RwaCheckConfig rwa;
  std::string output_path;  // empty: standard output
  OutputFormat output_format = OutputFormat::Csv;

  void validate() const;
};

/// Parses the sectioned key = value grammar described in the README.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical text of a configuration: absolute fields, SI units, full
/// precision. parse_config(to_config_text(c)) reproduces c exactly except
/// for threads and output path, which do not affect results.
std::string to_config_text(const RunConfig& cfg);

}  // namespace edsr
