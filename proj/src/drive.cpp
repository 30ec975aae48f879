#include "edsr/drive.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "edsr/spin_core.hpp"

namespace edsr {

void NuclearSpecies::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("species " + name + ": gamma must be positive");
  }
  if (!(rabi_hf >= 0.0) || !std::isfinite(rabi_hf)) {
    throw std::invalid_argument("species " + name + ": rabi_hf must be non-negative");
  }
}

namespace species {

NuclearSpecies as75(double rabi_hf) { return {"As75", kAs75Gamma, rabi_hf}; }
NuclearSpecies ga69(double rabi_hf) { return {"Ga69", kGa69Gamma, rabi_hf}; }
NuclearSpecies ga71(double rabi_hf) { return {"Ga71", kGa71Gamma, rabi_hf}; }

NuclearSpecies by_name(const std::string& name, double rabi_hf) {
  if (name == "As75") return as75(rabi_hf);
  if (name == "Ga69") return ga69(rabi_hf);
  if (name == "Ga71") return ga71(rabi_hf);
  throw std::invalid_argument("unknown nuclear species '" + name + "'");
}

std::vector<NuclearSpecies> gaas(double rabi_as, double ratio_ga69, double ratio_ga71) {
  return {as75(rabi_as), ga69(rabi_as * ratio_ga69), ga71(rabi_as * ratio_ga71)};
}

}  // namespace species

const char* to_string(ChirpShape shape) {
  switch (shape) {
    case ChirpShape::Up:
      return "up";
    case ChirpShape::Down:
      return "down";
    case ChirpShape::Triangle:
      return "triangle";
  }
  return "up";
}

ChirpShape chirp_shape_from_string(const std::string& text) {
  if (text == "up") return ChirpShape::Up;
  if (text == "down") return ChirpShape::Down;
  if (text == "triangle") return ChirpShape::Triangle;
  throw std::invalid_argument("unknown chirp shape '" + text + "'");
}

void ChirpSchedule::validate() const {
  if (!(f_center > 0.0) || !std::isfinite(f_center)) {
    throw std::invalid_argument("chirp f_center must be positive");
  }
  if (!(fm_depth >= 0.0) || !std::isfinite(fm_depth)) {
    throw std::invalid_argument("chirp fm_depth must be non-negative");
  }
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw std::invalid_argument("chirp duration must be positive");
  }
  if (fm_depth / 2.0 >= f_center) {
    throw std::invalid_argument("chirp would reach non-positive frequencies");
  }
}

double ChirpSchedule::rate() const {
  return shape == ChirpShape::Triangle ? 2.0 * fm_depth / duration : fm_depth / duration;
}

void DriveProgram::validate() const {
  schedule.validate();
  if (!(rabi_so >= 0.0) || !std::isfinite(rabi_so)) {
    throw std::invalid_argument("rabi_so must be non-negative");
  }
  std::set<std::string> names;
  for (const auto& s : species) {
    s.validate();
    if (!names.insert(s.name).second) {
      throw std::invalid_argument("duplicate species '" + s.name + "'");
    }
  }
}

double DriveProgram::max_active_offset(double field) const {
  double offset = 0.0;
  for (const auto& s : species) {
    if (s.rabi_hf > 0.0) offset = std::max(offset, s.gamma * field);
  }
  return offset;
}

bool DriveProgram::has_active_hyperfine() const {
  return std::any_of(species.begin(), species.end(),
                     [](const NuclearSpecies& s) { return s.rabi_hf > 0.0; });
}

ResonanceFields resonance_fields(double f_drive, double g_factor,
                                 const std::vector<NuclearSpecies>& species) {
  if (!(f_drive > 0.0)) {
    throw std::invalid_argument("drive frequency must be positive");
  }
  const double k = larmor_per_tesla(g_factor);
  ResonanceFields out;
  out.b_so = f_drive / k;
  for (const auto& s : species) {
    if (s.gamma >= k) {
      throw std::invalid_argument("species " + s.name +
                                  ": nuclear shift exceeds electron Larmor slope");
    }
    out.b_species[s.name] = f_drive / (k - s.gamma);
  }
  return out;
}

double fm_depth_to_field_span(double fm_depth, double g_factor) {
  if (fm_depth < 0.0) {
    throw std::invalid_argument("fm_depth must be non-negative");
  }
  return fm_depth / larmor_per_tesla(g_factor);
}

namespace {

void check_time(const ChirpSchedule& schedule, double t) {
  if (!(t >= 0.0) || t > schedule.duration * (1.0 + 1e-12)) {
    throw std::out_of_range("time outside the burst");
  }
}

}  // namespace

double instantaneous_frequency(const ChirpSchedule& schedule, double t) {
  check_time(schedule, t);
  const double lo = schedule.f_center - 0.5 * schedule.fm_depth;
  const double hi = schedule.f_center + 0.5 * schedule.fm_depth;
  const double rate = schedule.rate();
  switch (schedule.shape) {
    case ChirpShape::Up:
      return lo + rate * t;
    case ChirpShape::Down:
      return hi - rate * t;
    case ChirpShape::Triangle: {
      const double half = 0.5 * schedule.duration;
      return t <= half ? lo + rate * t : hi - rate * (t - half);
    }
  }
  return schedule.f_center;
}

double carrier_cycles(const ChirpSchedule& schedule, double t) {
  check_time(schedule, t);
  const double lo = schedule.f_center - 0.5 * schedule.fm_depth;
  const double hi = schedule.f_center + 0.5 * schedule.fm_depth;
  const double rate = schedule.rate();
  switch (schedule.shape) {
    case ChirpShape::Up:
      return lo * t + 0.5 * rate * t * t;
    case ChirpShape::Down:
      return hi * t - 0.5 * rate * t * t;
    case ChirpShape::Triangle: {
      const double half = 0.5 * schedule.duration;
      if (t <= half) return lo * t + 0.5 * rate * t * t;
      const double s = t - half;
      return lo * half + 0.5 * rate * half * half + hi * s - 0.5 * rate * s * s;
    }
  }
  return schedule.f_center * t;
}

std::vector<double> detunings(const DriveProgram& program, double t, double field,
                              double g_factor) {
  const double f = instantaneous_frequency(program.schedule, t);
  const double f_larmor = field_to_larmor(field, g_factor);
  std::vector<double> out;
  out.reserve(program.species.size() + 1);
  out.push_back(f - f_larmor);
  for (const auto& s : program.species) {
    out.push_back(f + s.gamma * field - f_larmor);
  }
  return out;
}

}  // namespace edsr
