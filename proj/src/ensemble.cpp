#include "edsr/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace edsr {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::mt19937_64 make_engine(std::uint64_t seed, std::initializer_list<std::uint64_t> indices) {
  std::uint64_t state = seed;
  std::uint64_t key = splitmix64(state);
  for (std::uint64_t index : indices) {
    state ^= index + 0x632BE59BD9B4E019ULL + (key << 6) + (key >> 2);
    key = splitmix64(state);
  }
  std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32),
                    static_cast<std::uint32_t>(splitmix64(state)),
                    static_cast<std::uint32_t>(splitmix64(state))};
  return std::mt19937_64(seq);
}

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
  }
}

}  // namespace

void NuclearFieldModel::validate() const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("nuclear sigma must be non-negative");
  }
  if (!(correlation_time > 0.0)) {
    throw std::invalid_argument("nuclear correlation_time must be positive");
  }
}

void MeasurementModel::validate() const {
  check_probability(fidelity_up, "fidelity_up");
  check_probability(fidelity_down, "fidelity_down");
  if (shots < 1) {
    throw std::invalid_argument("shots must be at least 1");
  }
}

RandomStream::RandomStream(std::uint64_t seed, std::initializer_list<std::uint64_t> indices)
    : engine_(make_engine(seed, indices)) {}

double RandomStream::normal() { return normal_(engine_); }

double RandomStream::uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

std::vector<CurvePoint> convolve_gaussian(std::span<const CurvePoint> curve, double sigma) {
  if (!(sigma >= 0.0)) {
    throw std::invalid_argument("convolution sigma must be non-negative");
  }
  std::vector<CurvePoint> out(curve.begin(), curve.end());
  if (sigma == 0.0 || curve.size() < 2) return out;

  const double spacing = (curve.back().b - curve.front().b) / static_cast<double>(curve.size() - 1);
  if (!(spacing > 0.0)) {
    throw std::invalid_argument("convolution grid must be increasing");
  }
  for (std::size_t i = 1; i < curve.size(); ++i) {
    const double step = curve[i].b - curve[i - 1].b;
    if (std::abs(step - spacing) > 1e-6 * spacing) {
      throw std::invalid_argument("convolution grid is not uniform");
    }
  }
  if (spacing > 0.5 * sigma * (1.0 + 1e-9)) {
    throw std::invalid_argument("convolution grid spacing exceeds sigma / 2");
  }

  const auto half_width = static_cast<std::ptrdiff_t>(std::floor(5.0 * sigma / spacing));
  std::vector<double> kernel(static_cast<std::size_t>(2 * half_width + 1));
  for (std::ptrdiff_t k = -half_width; k <= half_width; ++k) {
    const double x = static_cast<double>(k) * spacing / sigma;
    kernel[static_cast<std::size_t>(k + half_width)] = std::exp(-0.5 * x * x);
  }

  const auto n = static_cast<std::ptrdiff_t>(curve.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    double weight = 0.0;
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half_width);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + half_width);
    for (std::ptrdiff_t j = lo; j <= hi; ++j) {
      const double w = kernel[static_cast<std::size_t>(j - i + half_width)];
      acc += w * curve[static_cast<std::size_t>(j)].p;
      weight += w;
    }
    out[static_cast<std::size_t>(i)].p = acc / weight;
  }
  return out;
}

double sample_nuclear_offset(const NuclearFieldModel& model, RandomStream& stream) {
  model.validate();
  if (model.sigma == 0.0) return 0.0;
  return model.sigma * stream.normal();
}

std::vector<double> ou_field_trace(const NuclearFieldModel& model, double dt, double total,
                                   RandomStream& stream) {
  model.validate();
  if (!(dt > 0.0) || !(dt < model.correlation_time / 10.0)) {
    throw std::invalid_argument("OU step must satisfy 0 < dt < correlation_time / 10");
  }
  if (!(total >= 0.0)) {
    throw std::invalid_argument("OU trace length must be non-negative");
  }
  const auto count = static_cast<std::size_t>(std::floor(total / dt * (1.0 + 1e-12))) + 1;
  std::vector<double> trace(count, 0.0);
  if (model.sigma == 0.0) return trace;
  const double keep = std::exp(-dt / model.correlation_time);
  const double kick = model.sigma * std::sqrt(-std::expm1(-2.0 * dt / model.correlation_time));
  trace[0] = model.sigma * stream.normal();
  for (std::size_t i = 1; i < count; ++i) {
    trace[i] = trace[i - 1] * keep + kick * stream.normal();
  }
  return trace;
}

double apply_measurement_fidelity(double p_down, const MeasurementModel& model) {
  check_probability(p_down, "p_down");
  return p_down * model.fidelity_down + (1.0 - p_down) * (1.0 - model.fidelity_up);
}

double sample_shots(double p, std::size_t shots, RandomStream& stream) {
  check_probability(p, "shot probability");
  if (shots < 1) {
    throw std::invalid_argument("shots must be at least 1");
  }
  std::binomial_distribution<std::uint64_t> draw(shots, p);
  return static_cast<double>(draw(stream.engine())) / static_cast<double>(shots);
}

}  // namespace edsr
