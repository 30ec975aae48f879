#pragma once

#include <vector>

namespace edsr {

struct DurationSweepPoint {
  double burst_duration = 0.0;  // s
  double p_down = 0.0;
};

/// Landau-Zener flip probability 1 - exp(-pi Omega^2 / (2 alpha)) for a linear
/// sweep through resonance, with Omega = 2 pi rabi and alpha = 2 pi rate.
double landau_zener_flip_probability(double rabi, double rate);

/// The Landau-Zener exponent pi^2 rabi^2 / rate.
double landau_zener_exponent(double rabi, double rate);

/// Omega^2 / ((2/pi) d omega/dt). Values above one are adiabatic; the ratio
/// equals the Landau-Zener exponent.
double adiabaticity_ratio(double rabi, double rate);

/// Magnitude of the rotating-frame field for a drive amplitude b1 (T) and a
/// detuning (Hz).
double effective_field(double detuning, double b1, double g_factor);

/// Field amplitude of a transverse drive with the given Rabi frequency.
double rabi_to_drive_field(double rabi, double g_factor);

struct RabiFit {
  double rabi = 0.0;           // Hz
  double tau0 = 0.0;           // s
  double p_max = 0.0;
  double rms_residual = 0.0;
  int iterations = 0;
};

struct RabiFitOptions {
  bool fit_p_max = false;
  int max_iterations = 200;
};

/// Fits p(tau) = p_max (1 - exp(-tau / tau0)) to a burst-duration sweep at fixed
/// FM depth and converts tau0 to a Rabi frequency through the Landau-Zener
/// exponent pi^2 rabi^2 tau / fm_depth. When options.fit_p_max is set, p_max
/// is only the starting value.
RabiFit extract_rabi_from_duration_sweep(const std::vector<DurationSweepPoint>& points,
                                         double fm_depth, double p_max,
                                         const RabiFitOptions& options = {});

/// Two independent passages with flip probability p each.
double double_passage_probability(double p_single);

}  // namespace edsr
