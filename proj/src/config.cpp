#include "edsr/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

namespace edsr {

namespace {

enum class Dim { None, Frequency, Field, Time, Integer, Word, Text, Bool };

struct KeyInfo {
  Dim dim;
  bool list = false;
};

// Every key the grammar knows, by section. Anything else is rejected.
const std::map<std::string, std::map<std::string, KeyInfo>>& grammar() {
  static const std::map<std::string, std::map<std::string, KeyInfo>> g{
      {"run",
       {{"experiment", {Dim::Word}},
        {"seed", {Dim::Integer}},
        {"threads", {Dim::Integer}},
        {"output", {Dim::Text}},
        {"output_format", {Dim::Word}}}},
      {"electron", {{"g_factor", {Dim::None}}, {"t2", {Dim::Time}}}},
      {"drive",
       {{"f_center", {Dim::Frequency}},
        {"fm_depth", {Dim::Frequency}},
        {"duration", {Dim::Time}},
        {"shape", {Dim::Word}},
        {"rabi_so", {Dim::Frequency}},
        {"rabi_hf", {Dim::Frequency}},
        {"species", {Dim::Word, true}},
        {"hf_ratio", {Dim::None, true}}}},
      {"sweep",
       {{"b_start", {Dim::Field}},
        {"b_stop", {Dim::Field}},
        {"b_step", {Dim::Field}},
        {"field_origin", {Dim::Word}},
        {"ensemble_mode", {Dim::Word}},
        {"mc_samples", {Dim::Integer}}}},
      {"nuclear", {{"sigma", {Dim::Field}}, {"correlation_time", {Dim::Time}}}},
      {"measurement",
       {{"fidelity_up", {Dim::None}}, {"fidelity_down", {Dim::None}}, {"shots", {Dim::Integer}}}},
      {"integrator",
       {{"frame", {Dim::Word}}, {"dt", {Dim::Time}}, {"steps_per_period", {Dim::None}}}},
      {"duration",
       {{"field", {Dim::Field}},
        {"durations", {Dim::Time, true}},
        {"p_max", {Dim::None}},
        {"fit_p_max", {Dim::Bool}}}},
      {"parity",
       {{"field", {Dim::Field}},
        {"fm_depth", {Dim::Frequency}},
        {"center_offsets", {Dim::Frequency, true}}}},
      {"fixedfreq", {{"measurement_time", {Dim::Time}}, {"cycles", {Dim::Integer}}}},
      {"lz",
       {{"rabi", {Dim::Frequency}},
        {"ratios", {Dim::None, true}},
        {"window_factor", {Dim::None}},
        {"f_center", {Dim::Frequency}}}},
      {"rwa",
       {{"f_larmor", {Dim::Frequency}},
        {"rabi", {Dim::Frequency}},
        {"fm_depth", {Dim::Frequency}},
        {"duration", {Dim::Time}},
        {"lab_steps_per_period", {Dim::None}}}},
  };
  return g;
}

const char* dim_name(Dim d) {
  switch (d) {
    case Dim::Frequency: return "frequency";
    case Dim::Field: return "magnetic field";
    case Dim::Time: return "time";
    default: return "dimensionless";
  }
}

struct Unit {
  Dim dim;
  double scale;
};

const std::map<std::string, Unit>& units() {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  static const std::map<std::string, Unit> u{
      {"Hz", {Dim::Frequency, 1.0}},       {"kHz", {Dim::Frequency, 1e3}},
      {"MHz", {Dim::Frequency, 1e6}},      {"GHz", {Dim::Frequency, 1e9}},
      {"rad/s", {Dim::Frequency, 1.0 / two_pi}},
      {"rad/us", {Dim::Frequency, 1e6 / two_pi}},
      {"T", {Dim::Field, 1.0}},            {"mT", {Dim::Field, 1e-3}},
      {"uT", {Dim::Field, 1e-6}},          {"s", {Dim::Time, 1.0}},
      {"ms", {Dim::Time, 1e-3}},           {"us", {Dim::Time, 1e-6}},
      {"ns", {Dim::Time, 1e-9}},
  };
  return u;
}

std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) items.push_back(trim(item));
  if (items.size() == 1 && items[0].empty()) items.clear();
  return items;
}

struct Entry {
  std::string value;
  std::size_t line = 0;
};

// Parses "<number> [unit]" for a quantity of dimension `dim`.
double parse_quantity(const std::string& text, Dim dim, std::size_t line, const std::string& key) {
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr == begin || std::isnan(value)) {
    throw ConfigError(line, "'" + key + "': expected a number, got '" + text + "'");
  }
  const std::string unit = trim(std::string_view(ptr, static_cast<std::size_t>(end - ptr)));
  if (std::isinf(value)) {
    if (!unit.empty() && units().count(unit) == 0) {
      throw ConfigError(line, "'" + key + "': unknown unit '" + unit + "'");
    }
    return value;
  }
  if (dim == Dim::None) {
    if (!unit.empty()) {
      throw ConfigError(line, "'" + key + "' is dimensionless but has unit '" + unit + "'");
    }
    return value;
  }
  if (unit.empty()) {
    throw ConfigError(line, "'" + key + "' needs a " + std::string(dim_name(dim)) + " unit");
  }
  const auto it = units().find(unit);
  if (it == units().end()) {
    throw ConfigError(line, "'" + key + "': unknown unit '" + unit + "'");
  }
  if (it->second.dim != dim) {
    throw ConfigError(line, "'" + key + "': unit '" + unit + "' is a " +
                                dim_name(it->second.dim) + " unit, expected " + dim_name(dim));
  }
  return value * it->second.scale;
}

class Document {
 public:
  explicit Document(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    std::string section;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
      ++line;
      std::string content = raw;
      const auto hash = content.find('#');
      if (hash != std::string::npos) content.erase(hash);
      content = trim(content);
      if (content.empty()) continue;
      if (content.front() == '[') {
        if (content.back() != ']') throw ConfigError(line, "unterminated section header");
        section = trim(std::string_view(content).substr(1, content.size() - 2));
        if (grammar().count(section) == 0) {
          throw ConfigError(line, "unknown section '[" + section + "]'");
        }
        sections_.insert(section);
        continue;
      }
      const auto eq = content.find('=');
      if (eq == std::string::npos) {
        throw ConfigError(line, "expected 'key = value', got '" + content + "'");
      }
      const std::string key = trim(std::string_view(content).substr(0, eq));
      const std::string value = trim(std::string_view(content).substr(eq + 1));
      if (section.empty()) throw ConfigError(line, "key '" + key + "' outside any section");
      const auto& keys = grammar().at(section);
      const auto info = keys.find(key);
      if (info == keys.end()) {
        throw ConfigError(line, "unknown key '" + key + "' in section [" + section + "]");
      }
      const std::string full = section + "." + key;
      if (entries_.count(full)) throw ConfigError(line, "duplicate key '" + key + "'");
      check_syntax(info->second, value, line, key);
      entries_[full] = {value, line};
    }
  }

  bool has_section(const std::string& s) const { return sections_.count(s) > 0; }
  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  std::size_t line_of(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }

  const Entry* find(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }

  double quantity(const std::string& key, double fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    return parse_quantity(e->value, info(key).dim, e->line, key);
  }

  double required_quantity(const std::string& key, const std::string& why) const {
    require(key, why);
    return quantity(key, 0.0);
  }

  std::vector<double> quantities(const std::string& key, std::vector<double> fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    std::vector<double> out;
    for (const auto& item : split_list(e->value)) {
      out.push_back(parse_quantity(item, info(key).dim, e->line, key));
    }
    return out;
  }

  std::vector<std::string> words(const std::string& key, std::vector<std::string> fallback) const {
    const Entry* e = find(key);
    return e ? split_list(e->value) : fallback;
  }

  std::string word(const std::string& key, const std::string& fallback) const {
    const Entry* e = find(key);
    return e ? e->value : fallback;
  }

  std::uint64_t integer(const std::string& key, std::uint64_t fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
    if (ec != std::errc() || ptr != e->value.data() + e->value.size()) {
      throw ConfigError(e->line, "'" + key + "': expected a non-negative integer");
    }
    return v;
  }

  bool flag(const std::string& key, bool fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    return e->value == "true" || e->value == "yes" || e->value == "1";
  }

  void require(const std::string& key, const std::string& why) const {
    if (!has(key)) {
      const auto dot = key.find('.');
      throw ConfigError(0, "missing mandatory key '" + key.substr(dot + 1) + "' in [" +
                               key.substr(0, dot) + "] (" + why + ")");
    }
  }

  // Runs `fn`, tagging any library validation error with the key's line.
  template <typename Fn>
  auto at(const std::string& key, Fn&& fn) const {
    try {
      return fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(line_of(key), "'" + key.substr(key.find('.') + 1) + "': " + e.what());
    }
  }

 private:
  static KeyInfo info(const std::string& full) {
    const auto dot = full.find('.');
    return grammar().at(full.substr(0, dot)).at(full.substr(dot + 1));
  }

  static void check_syntax(const KeyInfo& info, const std::string& value, std::size_t line,
                           const std::string& key) {
    if (value.empty() && !info.list) throw ConfigError(line, "'" + key + "' has no value");
    if (info.dim == Dim::Bool && value != "true" && value != "false" && value != "yes" &&
        value != "no" && value != "1" && value != "0") {
      throw ConfigError(line, "'" + key + "': expected true or false");
    }
    if (info.dim == Dim::None || info.dim == Dim::Frequency || info.dim == Dim::Field ||
        info.dim == Dim::Time) {
      const auto items = info.list ? split_list(value) : std::vector<std::string>{value};
      for (const auto& item : items) parse_quantity(item, info.dim, line, key);
    }
  }

  std::map<std::string, Entry> entries_;
  std::set<std::string> sections_;
};

std::string number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string join(const std::vector<double>& values, const char* unit) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += number(values[i]);
    if (*unit) out += std::string(" ") + unit;
  }
  return out;
}

bool uses_field_grid(Experiment e) {
  return e == Experiment::Lineshape || e == Experiment::FixedFreq;
}

}  // namespace

ConfigError::ConfigError(std::size_t line, const std::string& message)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message : message),
      line_(line) {}

const char* to_string(Experiment experiment) {
  switch (experiment) {
    case Experiment::Lineshape: return "lineshape";
    case Experiment::Duration: return "duration";
    case Experiment::Parity: return "parity";
    case Experiment::FixedFreq: return "fixedfreq";
    case Experiment::LzTable: return "lz-table";
    case Experiment::ValidateRwa: return "validate-rwa";
  }
  return "?";
}

Experiment experiment_from_string(const std::string& text) {
  for (auto e : {Experiment::Lineshape, Experiment::Duration, Experiment::Parity,
                 Experiment::FixedFreq, Experiment::LzTable, Experiment::ValidateRwa}) {
    if (text == to_string(e)) return e;
  }
  throw std::invalid_argument("unknown experiment '" + text + "'");
}

const char* to_string(OutputFormat format) {
  return format == OutputFormat::Csv ? "csv" : "json-lines";
}

OutputFormat output_format_from_string(const std::string& text) {
  if (text == "csv") return OutputFormat::Csv;
  if (text == "json-lines") return OutputFormat::JsonLines;
  throw std::invalid_argument("unknown output format '" + text + "'");
}

std::vector<double> ParityOptions::window_centers(double g_factor) const {
  const double f_larmor = field_to_larmor(field, g_factor);
  std::vector<double> out;
  out.reserve(center_offsets.size());
  for (double offset : center_offsets) out.push_back(f_larmor + offset);
  return out;
}

void RunConfig::validate() const {
  sweep.electron.validate();
  if (sweep.measurement) sweep.measurement->validate();
  sweep.nuclear.validate();
  if (sweep.propagation.steps_per_period < 20.0) {
    throw std::invalid_argument("steps_per_period must be at least 20");
  }
  switch (experiment) {
    case Experiment::Lineshape:
    case Experiment::FixedFreq:
      sweep.validate();
      if (experiment == Experiment::FixedFreq) {
        if (sweep.program.schedule.fm_depth != 0.0) {
          throw std::invalid_argument("fixedfreq needs fm_depth = 0");
        }
        if (!(fixedfreq.measurement_time > 0.0) || fixedfreq.cycles < 1) {
          throw std::invalid_argument("fixedfreq needs measurement_time > 0 and cycles >= 1");
        }
      }
      break;
    case Experiment::Duration:
      sweep.program.validate();
      if (duration.durations.size() < 4) {
        throw std::invalid_argument("duration sweep needs at least four durations");
      }
      for (double d : duration.durations) {
        if (!(d > 0.0)) throw std::invalid_argument("durations must be positive");
      }
      if (!(duration.field > 0.0)) throw std::invalid_argument("duration field must be positive");
      if (!(duration.p_max > 0.0 && duration.p_max <= 1.0)) {
        throw std::invalid_argument("p_max must be in (0, 1]");
      }
      break;
    case Experiment::Parity:
      sweep.program.validate();
      if (!(parity.field > 0.0)) throw std::invalid_argument("parity field must be positive");
      if (!(parity.fm_depth > 0.0)) throw std::invalid_argument("parity fm_depth must be positive");
      if (parity.center_offsets.empty()) {
        throw std::invalid_argument("parity scan needs center_offsets");
      }
      break;
    case Experiment::LzTable:
      if (!(lz.rabi > 0.0)) throw std::invalid_argument("lz rabi must be positive");
      if (lz.ratios.empty()) throw std::invalid_argument("lz ratios must not be empty");
      if (!(lz.window_factor >= 20.0)) throw std::invalid_argument("window_factor must be >= 20");
      if (!(lz.f_center > 0.0)) throw std::invalid_argument("lz f_center must be positive");
      break;
    case Experiment::ValidateRwa:
      if (!(rwa.f_larmor > 0.0 && rwa.rabi >= 0.0 && rwa.fm_depth >= 0.0 && rwa.duration > 0.0)) {
        throw std::invalid_argument("rwa parameters out of range");
      }
      if (rwa.lab.steps_per_period < 20.0) {
        throw std::invalid_argument("lab_steps_per_period must be at least 20");
      }
      break;
  }
}

RunConfig parse_config(const std::string& text) {
  const Document doc(text);
  RunConfig cfg;

  doc.require("run.experiment", "selects the experiment");
  cfg.experiment = doc.at("run.experiment",
                          [&] { return experiment_from_string(doc.word("run.experiment", "")); });
  const Experiment exp = cfg.experiment;
  SweepConfig& s = cfg.sweep;
  s.seed = doc.integer("run.seed", 1);
  s.threads = doc.integer("run.threads", 1);
  if (s.threads < 1) throw ConfigError(doc.line_of("run.threads"), "'threads' must be >= 1");
  cfg.output_path = doc.word("run.output", "");
  cfg.output_format = doc.at("run.output_format", [&] {
    return output_format_from_string(doc.word("run.output_format", "csv"));
  });

  s.electron.g_factor = doc.quantity("electron.g_factor", -0.339);
  s.electron.t2 = doc.quantity("electron.t2", 100e-6);
  doc.at("electron.g_factor", [&] {
    if (s.electron.g_factor == 0.0) throw std::invalid_argument("g_factor must be non-zero");
    return 0;
  });
  doc.at("electron.t2", [&] { s.electron.validate(); return 0; });

  // Drive.
  const bool needs_center = exp == Experiment::Lineshape || exp == Experiment::Duration ||
                            exp == Experiment::FixedFreq;
  const bool needs_drive = needs_center || exp == Experiment::Parity;
  ChirpSchedule& sched = s.program.schedule;
  if (needs_center) {
    sched.f_center = doc.required_quantity("drive.f_center", "sets the carrier");
  } else {
    sched.f_center = doc.quantity("drive.f_center", 0.0);
  }
  if (exp == Experiment::Lineshape || exp == Experiment::Duration) {
    sched.fm_depth = doc.required_quantity("drive.fm_depth", "sets the chirp");
  } else {
    sched.fm_depth = doc.quantity("drive.fm_depth", 0.0);
  }
  if (exp == Experiment::Duration) {
    sched.duration = doc.quantity("drive.duration", 0.0);
  } else if (needs_drive) {
    sched.duration = doc.required_quantity("drive.duration", "sets the burst length");
  } else {
    sched.duration = doc.quantity("drive.duration", 0.0);
  }
  sched.shape = doc.at("drive.shape",
                       [&] { return chirp_shape_from_string(doc.word("drive.shape", "up")); });
  if (needs_drive) {
    s.program.rabi_so = doc.required_quantity("drive.rabi_so", "spin-orbit drive amplitude");
  } else {
    s.program.rabi_so = doc.quantity("drive.rabi_so", 0.0);
  }
  const double rabi_hf = doc.quantity("drive.rabi_hf", 0.0);
  const auto names = doc.words("drive.species", {"As75", "Ga69", "Ga71"});
  if (rabi_hf > 0.0 && !names.empty() && exp == Experiment::Lineshape) {
    doc.require("drive.hf_ratio", "relative hyperfine amplitudes are needed for a lineshape");
  }
  const auto ratios = doc.quantities("drive.hf_ratio", std::vector<double>(names.size(), 1.0));
  if (ratios.size() != names.size()) {
    throw ConfigError(doc.line_of("drive.hf_ratio"),
                      "'hf_ratio' needs one entry per species (" + std::to_string(names.size()) +
                          ")");
  }
  s.program.species.clear();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (ratios[i] < 0.0) throw ConfigError(doc.line_of("drive.hf_ratio"), "negative hf_ratio");
    s.program.species.push_back(
        doc.at("drive.species", [&] { return species::by_name(names[i], rabi_hf * ratios[i]); }));
  }

  // Field origin: relative fields are offsets from the spin-orbit resonance.
  const std::string origin = doc.word("sweep.field_origin", "absolute");
  double field_zero = 0.0;
  if (origin == "so_resonance") {
    if (!(sched.f_center > 0.0)) {
      throw ConfigError(doc.line_of("sweep.field_origin"),
                        "field_origin = so_resonance needs drive.f_center");
    }
    field_zero = larmor_to_field(sched.f_center, s.electron.g_factor);
  } else if (origin != "absolute") {
    throw ConfigError(doc.line_of("sweep.field_origin"),
                      "'field_origin' must be absolute or so_resonance");
  }
  auto field = [&](const std::string& key, double fallback) {
    return doc.has(key) ? field_zero + doc.quantity(key, 0.0) : fallback;
  };

  if (uses_field_grid(exp)) {
    doc.require("sweep.b_start", "start of the field sweep");
    doc.require("sweep.b_stop", "end of the field sweep");
  }
  s.b_start = field("sweep.b_start", 0.0);
  s.b_stop = field("sweep.b_stop", 0.0);
  s.b_step = doc.quantity("sweep.b_step", 0.25e-3);
  s.ensemble_mode = doc.at("sweep.ensemble_mode", [&] {
    return ensemble_mode_from_string(doc.word("sweep.ensemble_mode", "convolution"));
  });
  s.mc_samples = doc.integer("sweep.mc_samples", 20);

  s.nuclear.sigma = doc.quantity("nuclear.sigma", 0.5e-3);
  s.nuclear.correlation_time = doc.quantity("nuclear.correlation_time", 1.0);

  if (doc.has_section("measurement")) {
    MeasurementModel m;
    m.fidelity_up = doc.quantity("measurement.fidelity_up", m.fidelity_up);
    m.fidelity_down = doc.quantity("measurement.fidelity_down", m.fidelity_down);
    m.shots = doc.integer("measurement.shots", m.shots);
    s.measurement = m;
  }

  s.propagation.frame =
      doc.at("integrator.frame", [&] { return frame_from_string(doc.word("integrator.frame", "rotating")); });
  s.propagation.dt = doc.quantity("integrator.dt", 0.0);
  s.propagation.steps_per_period = doc.quantity("integrator.steps_per_period", 40.0);

  if (exp == Experiment::Duration) {
    doc.require("duration.field", "field of the duration sweep");
    doc.require("duration.durations", "burst durations");
  }
  cfg.duration.field = field("duration.field", 0.0);
  cfg.duration.durations = doc.quantities("duration.durations", {});
  cfg.duration.p_max = doc.quantity("duration.p_max", 1.0);
  cfg.duration.fit_p_max = doc.flag("duration.fit_p_max", false);
  if (exp == Experiment::Duration && sched.duration == 0.0 && !cfg.duration.durations.empty()) {
    sched.duration = cfg.duration.durations.front();
  }

  if (exp == Experiment::Parity) {
    doc.require("parity.field", "field of the parity scan");
    doc.require("parity.fm_depth", "chirp depth of each window");
    doc.require("parity.center_offsets", "window centres relative to the Larmor frequency");
  }
  cfg.parity.field = field("parity.field", 0.0);
  cfg.parity.fm_depth = doc.quantity("parity.fm_depth", 0.0);
  cfg.parity.center_offsets = doc.quantities("parity.center_offsets", {});
  if (exp == Experiment::Parity) {
    if (!(cfg.parity.field > 0.0)) {
      throw ConfigError(doc.line_of("parity.field"), "'field' must be positive");
    }
    if (sched.f_center == 0.0) sched.f_center = field_to_larmor(cfg.parity.field, s.electron.g_factor);
    if (sched.fm_depth == 0.0) sched.fm_depth = cfg.parity.fm_depth;
  }

  cfg.fixedfreq.measurement_time = doc.quantity("fixedfreq.measurement_time", 1.0);
  cfg.fixedfreq.cycles = doc.integer("fixedfreq.cycles", 100);

  cfg.lz.rabi = doc.quantity("lz.rabi", cfg.lz.rabi);
  cfg.lz.ratios = doc.quantities("lz.ratios", cfg.lz.ratios);
  cfg.lz.window_factor = doc.quantity("lz.window_factor", cfg.lz.window_factor);
  cfg.lz.f_center = doc.quantity("lz.f_center", cfg.lz.f_center);
  cfg.lz.electron = s.electron;
  cfg.lz.propagation = s.propagation;
  cfg.lz.propagation.frame = Frame::Rotating;
  cfg.lz.threads = s.threads;

  cfg.rwa.f_larmor = doc.quantity("rwa.f_larmor", cfg.rwa.f_larmor);
  cfg.rwa.rabi = doc.quantity("rwa.rabi", cfg.rwa.rabi);
  cfg.rwa.fm_depth = doc.quantity("rwa.fm_depth", cfg.rwa.fm_depth);
  cfg.rwa.duration = doc.quantity("rwa.duration", cfg.rwa.duration);
  cfg.rwa.electron = s.electron;
  cfg.rwa.rotating = s.propagation;
  cfg.rwa.rotating.frame = Frame::Rotating;
  cfg.rwa.lab.steps_per_period =
      doc.quantity("rwa.lab_steps_per_period", cfg.rwa.lab.steps_per_period);
  cfg.rwa.lab.frame = Frame::Lab;

  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(0, std::string("invalid configuration: ") + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_config_text(const RunConfig& cfg) {
  const SweepConfig& s = cfg.sweep;
  const ChirpSchedule& sched = s.program.schedule;
  std::ostringstream out;
  out << "[run]\n"
      << "experiment = " << to_string(cfg.experiment) << "\n"
      << "seed = " << s.seed << "\n"
      << "output_format = " << to_string(cfg.output_format) << "\n";

  out << "\n[electron]\n"
      << "g_factor = " << number(s.electron.g_factor) << "\n"
      << "t2 = " << number(s.electron.t2) << (std::isinf(s.electron.t2) ? "" : " s") << "\n";

  // Hyperfine amplitudes are written as a reference amplitude and ratios.
  // When the ratios would not reproduce the amplitudes bit for bit, the
  // reference is 1 Hz and the ratios carry the amplitudes themselves.
  double rabi_hf = 0.0;
  for (const auto& sp : s.program.species) rabi_hf = std::max(rabi_hf, sp.rabi_hf);
  std::vector<double> ratios;
  std::string names;
  bool exact = true;
  for (const auto& sp : s.program.species) {
    const double r = rabi_hf > 0.0 ? sp.rabi_hf / rabi_hf : 1.0;
    exact = exact && (rabi_hf * r == sp.rabi_hf);
    ratios.push_back(r);
    names += (names.empty() ? "" : ", ") + sp.name;
  }
  if (!exact) {
    rabi_hf = 1.0;
    for (std::size_t i = 0; i < ratios.size(); ++i) ratios[i] = s.program.species[i].rabi_hf;
  }
  out << "\n[drive]\n"
      << "f_center = " << number(sched.f_center) << " Hz\n"
      << "fm_depth = " << number(sched.fm_depth) << " Hz\n"
      << "duration = " << number(sched.duration) << " s\n"
      << "shape = " << to_string(sched.shape) << "\n"
      << "rabi_so = " << number(s.program.rabi_so) << " Hz\n"
      << "rabi_hf = " << number(rabi_hf) << " Hz\n"
      << "species = " << names << "\n"
      << "hf_ratio = " << join(ratios, "") << "\n";

  out << "\n[sweep]\n"
      << "field_origin = absolute\n"
      << "b_start = " << number(s.b_start) << " T\n"
      << "b_stop = " << number(s.b_stop) << " T\n"
      << "b_step = " << number(s.b_step) << " T\n"
      << "ensemble_mode = " << to_string(s.ensemble_mode) << "\n"
      << "mc_samples = " << s.mc_samples << "\n";

  out << "\n[nuclear]\n"
      << "sigma = " << number(s.nuclear.sigma) << " T\n"
      << "correlation_time = " << number(s.nuclear.correlation_time) << " s\n";

  if (s.measurement) {
    out << "\n[measurement]\n"
        << "fidelity_up = " << number(s.measurement->fidelity_up) << "\n"
        << "fidelity_down = " << number(s.measurement->fidelity_down) << "\n"
        << "shots = " << s.measurement->shots << "\n";
  }

  out << "\n[integrator]\n"
      << "frame = " << to_string(s.propagation.frame) << "\n"
      << "dt = " << number(s.propagation.dt) << " s\n"
      << "steps_per_period = " << number(s.propagation.steps_per_period) << "\n";

  switch (cfg.experiment) {
    case Experiment::Duration:
      out << "\n[duration]\n"
          << "field = " << number(cfg.duration.field) << " T\n"
          << "durations = " << join(cfg.duration.durations, "s") << "\n"
          << "p_max = " << number(cfg.duration.p_max) << "\n"
          << "fit_p_max = " << (cfg.duration.fit_p_max ? "true" : "false") << "\n";
      break;
    case Experiment::Parity:
      out << "\n[parity]\n"
          << "field = " << number(cfg.parity.field) << " T\n"
          << "fm_depth = " << number(cfg.parity.fm_depth) << " Hz\n"
          << "center_offsets = " << join(cfg.parity.center_offsets, "Hz") << "\n";
      break;
    case Experiment::FixedFreq:
      out << "\n[fixedfreq]\n"
          << "measurement_time = " << number(cfg.fixedfreq.measurement_time) << " s\n"
          << "cycles = " << cfg.fixedfreq.cycles << "\n";
      break;
    case Experiment::LzTable:
      out << "\n[lz]\n"
          << "rabi = " << number(cfg.lz.rabi) << " Hz\n"
          << "ratios = " << join(cfg.lz.ratios, "") << "\n"
          << "window_factor = " << number(cfg.lz.window_factor) << "\n"
          << "f_center = " << number(cfg.lz.f_center) << " Hz\n";
      break;
    case Experiment::ValidateRwa:
      out << "\n[rwa]\n"
          << "f_larmor = " << number(cfg.rwa.f_larmor) << " Hz\n"
          << "rabi = " << number(cfg.rwa.rabi) << " Hz\n"
          << "fm_depth = " << number(cfg.rwa.fm_depth) << " Hz\n"
          << "duration = " << number(cfg.rwa.duration) << " s\n"
          << "lab_steps_per_period = " << number(cfg.rwa.lab.steps_per_period) << "\n";
      break;
    case Experiment::Lineshape:
      break;
  }
  return out.str();
}

}  // namespace edsr
