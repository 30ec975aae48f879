#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "edsr/analytic.hpp"
#include "edsr/drive.hpp"
#include "edsr/ensemble.hpp"
#include "edsr/integrator.hpp"
#include "edsr/spin_core.hpp"

namespace edsr {

enum class EnsembleMode { Convolution, MonteCarlo };

const char* to_string(EnsembleMode mode);
EnsembleMode ensemble_mode_from_string(const std::string& text);

/// Describes one simulated experiment. Every sweep point draws its random
/// numbers from streams keyed by (seed, point index, sample index), so the
/// output does not depend on `threads`.
struct SweepConfig {
  double b_start = 0.0;      // T
  double b_stop = 0.0;       // T
  double b_step = 0.25e-3;   // T
  DriveProgram program;
  ElectronParams electron;
  NuclearFieldModel nuclear;
  std::optional<MeasurementModel> measurement;
  EnsembleMode ensemble_mode = EnsembleMode::Convolution;
  std::size_t mc_samples = 20;
  std::uint64_t seed = 0;
  PropagationConfig propagation;
  std::size_t threads = 1;

  void validate() const;
  std::vector<double> field_grid() const;
};

struct LineshapePoint {
  double b = 0.0;
  double p_down_true = 0.0;
  double p_down_measured = 0.0;
};

/// Spin-down probability after the full multi-tone burst, starting from
/// spin up, on every grid field. Convolution mode simulates at the nominal
/// field and convolves with the nuclear-field Gaussian; Monte Carlo mode
/// averages mc_samples propagations with random Overhauser offsets and, when
/// a measurement model is present, samples the read-out shots.
std::vector<LineshapePoint> field_sweep_lineshape(const SweepConfig& cfg);

struct DurationSample {
  double burst_duration = 0.0;
  double p_down_true = 0.0;
  double p_down_measured = 0.0;
};

/// One propagation per burst duration at a fixed field, FM depth held fixed.
std::vector<DurationSample> duration_sweep(const SweepConfig& cfg,
                                           std::span<const double> durations, double field);

std::vector<DurationSweepPoint> to_sweep_points(std::span<const DurationSample> samples,
                                                bool measured);

struct ParityPoint {
  double f_center = 0.0;
  int resonances_covered = 0;
  double p_down = 0.0;
};

/// Number of driven resonances (tones with non-zero amplitude) whose
/// resonance frequency lies inside f_center +- fm_depth / 2 at this field.
int resonances_in_window(const DriveProgram& program, double field, double g_factor);

/// Repeats the burst for each chirp window centre at a fixed field.
std::vector<ParityPoint> parity_scan(const SweepConfig& cfg, std::span<const double> window_centers,
                                     double fm_depth, double field);

/// Fixed-frequency experiment with a slowly drifting nuclear field. Each
/// grid point is measured for measurement_time_per_point with
/// cycles_per_point single-shot cycles; the Overhauser field follows one
/// Ornstein-Uhlenbeck trace across the whole sweep.
std::vector<LineshapePoint> fixed_frequency_sweep(const SweepConfig& cfg,
                                                  double measurement_time_per_point,
                                                  std::size_t cycles_per_point);

/// Standard deviation of a binomial estimate of p from `shots` samples.
double binomial_noise_floor(double p, std::size_t shots);

struct LzTableConfig {
  double rabi = 1e6;
  std::vector<double> ratios{0.1, 0.3, 1.0, 3.0, 10.0};
  // Chirp window in units of the transition width max(rabi, sqrt(rate)).
  double window_factor = 400.0;
  double f_center = 26.5e9;
  ElectronParams electron{-0.339, std::numeric_limits<double>::infinity()};
  PropagationConfig propagation;
  std::size_t threads = 1;
};

struct LzTableRow {
  double adiabaticity_ratio = 0.0;
  double rabi = 0.0;
  double rate = 0.0;
  double fm_depth = 0.0;
  double duration = 0.0;
  double p_landau_zener = 0.0;
  double p_propagated = 0.0;
};

/// Single-tone chirps through resonance compared with the Landau-Zener formula.
std::vector<LzTableRow> lz_table(const LzTableConfig& cfg);

struct RwaCheckConfig {
  double f_larmor = 200e6;
  double rabi = 1e6;
  double fm_depth = 10e6;
  double duration = 50e-6;
  ElectronParams electron{-0.339, std::numeric_limits<double>::infinity()};
  PropagationConfig rotating;
  PropagationConfig lab{0.0, 160.0, Frame::Lab};
};

struct RwaCheckResult {
  double p_rotating = 0.0;
  double p_lab = 0.0;
  double abs_diff = 0.0;
};

/// Same up-chirp propagated in both frames, resonant at the chirp centre.
RwaCheckResult validate_rwa(const RwaCheckConfig& cfg);

// Lineshape metrics, evaluated on p_down_true.

/// Mean over grid points with b in [lo, hi].
double window_mean(std::span<const LineshapePoint> points, double lo, double hi);

struct FieldInterval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

/// Outermost crossings of fraction * max(p), linearly interpolated.
FieldInterval support_interval(std::span<const LineshapePoint> points, double fraction = 0.5);

enum class FlankSide { Rising, Falling };

/// 10-90 % width of the outer rising (low-field) or falling (high-field)
/// flank. Levels are relative to the local plateau: the maximum within
/// plateau_window inside the half-height crossing.
double flank_width(std::span<const LineshapePoint> points, FlankSide side,
                   double plateau_window = 3e-3);

}  // namespace edsr
