#pragma once

#include <map>
#include <string>
#include <vector>

namespace edsr {

/// Nuclear species that mediates hyperfine EDSR. gamma is the shift of the
/// resonance condition per tesla (nuclear Larmor frequency / B).
struct NuclearSpecies {
  std::string name;
  double gamma = 0.0;    // Hz/T
  double rabi_hf = 0.0;  // Hz

  void validate() const;
};

namespace species {
inline constexpr double kAs75Gamma = 7.318e6;
inline constexpr double kGa69Gamma = 10.24e6;
inline constexpr double kGa71Gamma = 13.02e6;

NuclearSpecies as75(double rabi_hf = 0.0);
NuclearSpecies ga69(double rabi_hf = 0.0);
NuclearSpecies ga71(double rabi_hf = 0.0);

/// Built-in species by name ("As75", "Ga69", "Ga71"); throws for others.
NuclearSpecies by_name(const std::string& name, double rabi_hf = 0.0);

/// The three GaAs species with hyperfine Rabi frequencies rabi_as * ratio.
std::vector<NuclearSpecies> gaas(double rabi_as, double ratio_ga69 = 1.0,
                                 double ratio_ga71 = 1.0);
}  // namespace species

enum class ChirpShape { Up, Down, Triangle };

const char* to_string(ChirpShape shape);
ChirpShape chirp_shape_from_string(const std::string& text);

struct ChirpSchedule {
  double f_center = 0.0;  // Hz
  double fm_depth = 0.0;  // Hz, full excursion
  double duration = 0.0;  // s
  ChirpShape shape = ChirpShape::Up;

  void validate() const;

  /// |df/dt| during each leg of the chirp.
  double rate() const;
};

struct DriveProgram {
  ChirpSchedule schedule;
  double rabi_so = 0.0;  // Hz
  std::vector<NuclearSpecies> species;

  void validate() const;

  /// Largest hyperfine tone offset among tones with non-zero amplitude.
  double max_active_offset(double field) const;
  bool has_active_hyperfine() const;
};

struct ResonanceFields {
  double b_so = 0.0;
  std::map<std::string, double> b_species;
};

/// Fields at which a drive at f_drive satisfies the spin-orbit condition and
/// each species' hyperfine condition f_drive + gamma B = f_L(B).
ResonanceFields resonance_fields(double f_drive, double g_factor,
                                 const std::vector<NuclearSpecies>& species);

/// Field excursion swept through by a chirp of the given depth.
double fm_depth_to_field_span(double fm_depth, double g_factor);

double instantaneous_frequency(const ChirpSchedule& schedule, double t);

/// Accumulated carrier phase in cycles, integral of f from 0 to t.
double carrier_cycles(const ChirpSchedule& schedule, double t);

/// Tone 0 is the spin-orbit tone; tone i+1 corresponds to species[i].
std::vector<double> detunings(const DriveProgram& program, double t, double field,
                              double g_factor);

}  // namespace edsr
