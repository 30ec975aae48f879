#include "edsr/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "edsr/parallel.hpp"

namespace edsr {

namespace {

// Stream tags keep the random streams of different purposes disjoint.
constexpr std::uint64_t kTagOffset = 1;
constexpr std::uint64_t kTagShots = 2;
constexpr std::uint64_t kTagDrift = 3;
constexpr std::uint64_t kTagCycles = 4;

double clamp_probability(double p) { return std::clamp(p, 0.0, 1.0); }

double propagate_p_down(const SweepConfig& cfg, const DriveProgram& program, double field,
                        double overhauser = 0.0) {
  PropagationConfig prop = cfg.propagation;
  prop.record_trajectory = false;
  try {
    const auto result =
        propagate(DensityMatrix::spin_up(), program, field, cfg.electron, prop, overhauser);
    return clamp_probability(result.final_state.p_down());
  } catch (const std::exception& e) {
    throw std::runtime_error("propagation failed at B = " + std::to_string(field) +
                             " T: " + e.what());
  }
}

double measured_value(const SweepConfig& cfg, double p_true, std::uint64_t index, bool sample) {
  if (!cfg.measurement) return p_true;
  const double mapped = apply_measurement_fidelity(p_true, *cfg.measurement);
  if (!sample) return mapped;
  RandomStream stream(cfg.seed, {kTagShots, index});
  return sample_shots(mapped, cfg.measurement->shots, stream);
}

// First crossing of `level` walking from `begin` towards `end` (inclusive).
std::optional<double> crossing(std::span<const LineshapePoint> points, double level, bool forward) {
  const auto n = static_cast<std::ptrdiff_t>(points.size());
  for (std::ptrdiff_t k = 1; k < n; ++k) {
    const std::ptrdiff_t i = forward ? k - 1 : n - k;
    const std::ptrdiff_t j = forward ? k : n - k - 1;
    const double a = points[static_cast<std::size_t>(i)].p_down_true;
    const double b = points[static_cast<std::size_t>(j)].p_down_true;
    if (a < level && b >= level) {
      const double ba = points[static_cast<std::size_t>(i)].b;
      const double bb = points[static_cast<std::size_t>(j)].b;
      return ba + (level - a) / (b - a) * (bb - ba);
    }
  }
  return std::nullopt;
}

}  // namespace

const char* to_string(EnsembleMode mode) {
  return mode == EnsembleMode::MonteCarlo ? "monte-carlo" : "convolution";
}

EnsembleMode ensemble_mode_from_string(const std::string& text) {
  if (text == "convolution") return EnsembleMode::Convolution;
  if (text == "monte-carlo") return EnsembleMode::MonteCarlo;
  throw std::invalid_argument("unknown ensemble mode '" + text + "'");
}

void SweepConfig::validate() const {
  if (!(b_step > 0.0)) throw std::invalid_argument("b_step must be positive");
  if (!(b_start < b_stop)) throw std::invalid_argument("b_start must be below b_stop");
  if (!(b_start >= 0.0)) throw std::invalid_argument("b_start must be non-negative");
  if (ensemble_mode == EnsembleMode::MonteCarlo && mc_samples < 1) {
    throw std::invalid_argument("mc_samples must be at least 1");
  }
  program.validate();
  electron.validate();
  nuclear.validate();
  if (measurement) measurement->validate();
}

std::vector<double> SweepConfig::field_grid() const {
  validate();
  const auto intervals = static_cast<std::size_t>(std::floor((b_stop - b_start) / b_step + 1e-9));
  std::vector<double> grid(intervals + 1);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = b_start + static_cast<double>(i) * b_step;
  }
  return grid;
}

std::vector<LineshapePoint> field_sweep_lineshape(const SweepConfig& cfg) {
  const std::vector<double> grid = cfg.field_grid();
  const bool monte_carlo = cfg.ensemble_mode == EnsembleMode::MonteCarlo;
  if (!monte_carlo && cfg.nuclear.sigma > 0.0 && cfg.b_step > 0.5 * cfg.nuclear.sigma) {
    throw std::invalid_argument("b_step must be at most sigma / 2 in convolution mode");
  }

  std::vector<double> p_true(grid.size(), 0.0);
  if (monte_carlo) {
    const std::size_t samples = cfg.mc_samples;
    std::vector<double> draws(grid.size() * samples, 0.0);
    parallel_for(draws.size(), cfg.threads, [&](std::size_t task) {
      const std::size_t point = task / samples;
      const std::size_t sample = task % samples;
      RandomStream stream(cfg.seed, {kTagOffset, point, sample});
      const double offset = sample_nuclear_offset(cfg.nuclear, stream);
      draws[task] = propagate_p_down(cfg, cfg.program, grid[point], offset);
    });
    for (std::size_t i = 0; i < grid.size(); ++i) {
      double sum = 0.0;
      for (std::size_t s = 0; s < samples; ++s) sum += draws[i * samples + s];
      p_true[i] = clamp_probability(sum / static_cast<double>(samples));
    }
  } else {
    parallel_for(grid.size(), cfg.threads,
                 [&](std::size_t i) { p_true[i] = propagate_p_down(cfg, cfg.program, grid[i]); });
    std::vector<CurvePoint> curve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) curve[i] = {grid[i], p_true[i]};
    const auto smoothed = convolve_gaussian(curve, cfg.nuclear.sigma);
    for (std::size_t i = 0; i < grid.size(); ++i) p_true[i] = clamp_probability(smoothed[i].p);
  }

  std::vector<LineshapePoint> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out[i] = {grid[i], p_true[i], measured_value(cfg, p_true[i], i, monte_carlo)};
  }
  return out;
}

std::vector<DurationSample> duration_sweep(const SweepConfig& cfg,
                                           std::span<const double> durations, double field) {
  if (durations.empty()) {
    throw std::invalid_argument("duration sweep needs at least one duration");
  }
  cfg.program.validate();
  cfg.electron.validate();
  if (cfg.measurement) cfg.measurement->validate();
  const bool sample = cfg.ensemble_mode == EnsembleMode::MonteCarlo;
  std::vector<DurationSample> out(durations.size());
  parallel_for(durations.size(), cfg.threads, [&](std::size_t i) {
    DriveProgram program = cfg.program;
    program.schedule.duration = durations[i];
    const double p = propagate_p_down(cfg, program, field);
    out[i] = {durations[i], p, measured_value(cfg, p, i, sample)};
  });
  return out;
}

std::vector<DurationSweepPoint> to_sweep_points(std::span<const DurationSample> samples,
                                                bool measured) {
  std::vector<DurationSweepPoint> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    out.push_back({s.burst_duration, measured ? s.p_down_measured : s.p_down_true});
  }
  return out;
}

int resonances_in_window(const DriveProgram& program, double field, double g_factor) {
  const double lo = program.schedule.f_center - 0.5 * program.schedule.fm_depth;
  const double hi = program.schedule.f_center + 0.5 * program.schedule.fm_depth;
  const double f_larmor = field_to_larmor(field, g_factor);
  auto inside = [&](double f) { return f >= lo && f <= hi; };
  int count = 0;
  if (program.rabi_so > 0.0 && inside(f_larmor)) ++count;
  for (const auto& s : program.species) {
    if (s.rabi_hf > 0.0 && inside(f_larmor - s.gamma * field)) ++count;
  }
  return count;
}

std::vector<ParityPoint> parity_scan(const SweepConfig& cfg, std::span<const double> window_centers,
                                     double fm_depth, double field) {
  if (window_centers.empty()) {
    throw std::invalid_argument("parity scan needs at least one window");
  }
  std::vector<ParityPoint> out(window_centers.size());
  parallel_for(window_centers.size(), cfg.threads, [&](std::size_t i) {
    DriveProgram program = cfg.program;
    program.schedule.f_center = window_centers[i];
    program.schedule.fm_depth = fm_depth;
    program.validate();
    out[i] = {window_centers[i], resonances_in_window(program, field, cfg.electron.g_factor),
              propagate_p_down(cfg, program, field)};
  });
  return out;
}

std::vector<LineshapePoint> fixed_frequency_sweep(const SweepConfig& cfg,
                                                  double measurement_time_per_point,
                                                  std::size_t cycles_per_point) {
  if (cfg.program.schedule.fm_depth != 0.0) {
    throw std::invalid_argument("fixed-frequency sweep requires fm_depth = 0");
  }
  if (!(measurement_time_per_point > 0.0) || cycles_per_point < 1) {
    throw std::invalid_argument("fixed-frequency sweep needs a positive measurement time and cycles");
  }
  const std::vector<double> grid = cfg.field_grid();
  const double cycle_period = measurement_time_per_point / static_cast<double>(cycles_per_point);
  const std::size_t total_cycles = grid.size() * cycles_per_point;

  RandomStream drift_stream(cfg.seed, {kTagDrift});
  const std::vector<double> drift = ou_field_trace(
      cfg.nuclear, cycle_period, cycle_period * static_cast<double>(total_cycles - 1), drift_stream);

  const MeasurementModel readout = cfg.measurement.value_or(MeasurementModel{1.0, 1.0, 1});
  std::vector<LineshapePoint> out(grid.size());
  parallel_for(grid.size(), cfg.threads, [&](std::size_t i) {
    RandomStream shots(cfg.seed, {kTagCycles, i});
    double sum_true = 0.0;
    std::size_t downs = 0;
    for (std::size_t c = 0; c < cycles_per_point; ++c) {
      const double offset = drift[i * cycles_per_point + c];
      const double p = propagate_p_down(cfg, cfg.program, grid[i], offset);
      sum_true += p;
      if (shots.uniform() < apply_measurement_fidelity(p, readout)) ++downs;
    }
    const auto cycles = static_cast<double>(cycles_per_point);
    out[i] = {grid[i], clamp_probability(sum_true / cycles), static_cast<double>(downs) / cycles};
  });
  return out;
}

double binomial_noise_floor(double p, std::size_t shots) {
  if (shots < 1) throw std::invalid_argument("shots must be at least 1");
  return std::sqrt(p * (1.0 - p) / static_cast<double>(shots));
}

std::vector<LzTableRow> lz_table(const LzTableConfig& cfg) {
  if (!(cfg.rabi > 0.0)) throw std::invalid_argument("lz table needs rabi > 0");
  if (!(cfg.window_factor >= 20.0)) {
    throw std::invalid_argument("chirp window must span at least 20 transition widths");
  }
  const double field = larmor_to_field(cfg.f_center, cfg.electron.g_factor);
  std::vector<LzTableRow> rows(cfg.ratios.size());
  parallel_for(rows.size(), cfg.threads, [&](std::size_t i) {
    const double ratio = cfg.ratios[i];
    if (!(ratio > 0.0)) throw std::invalid_argument("adiabaticity ratios must be positive");
    LzTableRow row;
    row.adiabaticity_ratio = ratio;
    row.rabi = cfg.rabi;
    row.rate = std::numbers::pi * std::numbers::pi * cfg.rabi * cfg.rabi / ratio;
    row.fm_depth = cfg.window_factor * std::max(cfg.rabi, std::sqrt(row.rate));
    row.duration = row.fm_depth / row.rate;
    row.p_landau_zener = landau_zener_flip_probability(row.rabi, row.rate);

    DriveProgram program;
    program.schedule = {cfg.f_center, row.fm_depth, row.duration, ChirpShape::Up};
    program.rabi_so = cfg.rabi;
    row.p_propagated =
        propagate(DensityMatrix::spin_up(), program, field, cfg.electron, cfg.propagation)
            .final_state.p_down();
    rows[i] = row;
  });
  return rows;
}

RwaCheckResult validate_rwa(const RwaCheckConfig& cfg) {
  if (cfg.rotating.frame != Frame::Rotating || cfg.lab.frame != Frame::Lab) {
    throw std::invalid_argument("RWA check needs one rotating and one lab propagation config");
  }
  DriveProgram program;
  program.schedule = {cfg.f_larmor, cfg.fm_depth, cfg.duration, ChirpShape::Up};
  program.rabi_so = cfg.rabi;
  const double field = larmor_to_field(cfg.f_larmor, cfg.electron.g_factor);
  RwaCheckResult result;
  result.p_rotating =
      propagate_rotating(DensityMatrix::spin_up(), program, field, cfg.electron, cfg.rotating)
          .final_state.p_down();
  result.p_lab = propagate_lab(DensityMatrix::spin_up(), program, field, cfg.electron, cfg.lab)
                     .final_state.p_down();
  result.abs_diff = std::abs(result.p_rotating - result.p_lab);
  return result;
}

double window_mean(std::span<const LineshapePoint> points, double lo, double hi) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& p : points) {
    if (p.b >= lo && p.b <= hi) {
      sum += p.p_down_true;
      ++count;
    }
  }
  if (count == 0) throw std::invalid_argument("window contains no grid points");
  return sum / static_cast<double>(count);
}

FieldInterval support_interval(std::span<const LineshapePoint> points, double fraction) {
  if (points.size() < 2) throw std::invalid_argument("support needs at least two points");
  double peak = 0.0;
  for (const auto& p : points) peak = std::max(peak, p.p_down_true);
  if (!(peak > 0.0)) throw std::invalid_argument("lineshape is identically zero");
  const double level = fraction * peak;
  const auto lo = crossing(points, level, true);
  const auto hi = crossing(points, level, false);
  if (!lo || !hi) throw std::invalid_argument("lineshape does not return below the support level");
  return {*lo, *hi};
}

double flank_width(std::span<const LineshapePoint> points, FlankSide side, double plateau_window) {
  const bool rising = side == FlankSide::Rising;
  const FieldInterval support = support_interval(points, 0.5);
  const double edge = rising ? support.lo : support.hi;
  double plateau = 0.0;
  for (const auto& p : points) {
    const bool inside = rising ? (p.b >= edge && p.b <= edge + plateau_window)
                               : (p.b <= edge && p.b >= edge - plateau_window);
    if (inside) plateau = std::max(plateau, p.p_down_true);
  }
  const auto at10 = crossing(points, 0.1 * plateau, rising);
  const auto at90 = crossing(points, 0.9 * plateau, rising);
  if (!at10 || !at90) throw std::invalid_argument("flank levels not crossed");
  return std::abs(*at90 - *at10);
}

}  // namespace edsr
