#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace edsr {

struct NuclearFieldModel {
  double sigma = 0.5e-3;          // T
  double correlation_time = 1.0;  // s, drift model only

  void validate() const;
};

struct MeasurementModel {
  double fidelity_up = 0.95;
  double fidelity_down = 0.80;
  std::size_t shots = 1000;

  void validate() const;
};

struct CurvePoint {
  double b = 0.0;  // T
  double p = 0.0;
};

/// Deterministic random stream keyed by a seed and a tuple of stream indices
/// (for example point index and sample index).
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::initializer_list<std::uint64_t> indices);

  double normal();
  double uniform();
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Discrete convolution with a normalised Gaussian kernel truncated at
/// +-5 sigma. Near the ends the kernel is renormalised over the available
/// samples. Requires a uniform grid with spacing <= sigma / 2.
std::vector<CurvePoint> convolve_gaussian(std::span<const CurvePoint> curve, double sigma);

double sample_nuclear_offset(const NuclearFieldModel& model, RandomStream& stream);

/// Stationary Ornstein-Uhlenbeck trace sampled every dt over [0, total],
/// started from a stationary draw. Requires dt < correlation_time / 10.
std::vector<double> ou_field_trace(const NuclearFieldModel& model, double dt, double total,
                                   RandomStream& stream);

/// Probability of reading "down" given the true spin-down probability.
double apply_measurement_fidelity(double p_down, const MeasurementModel& model);

/// Fraction of "down" outcomes in a binomial draw of the given size.
double sample_shots(double p, std::size_t shots, RandomStream& stream);

}  // namespace edsr
