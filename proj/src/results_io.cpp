#include "edsr/results_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace edsr {

ResultTable lineshape_table(std::span<const LineshapePoint> points) {
  ResultTable t;
  t.columns = {"b_tesla", "p_down_true", "p_down_measured"};
  for (const auto& p : points) t.rows.push_back({p.b, p.p_down_true, p.p_down_measured});
  return t;
}

ResultTable duration_table(std::span<const DurationSample> samples) {
  ResultTable t;
  t.columns = {"duration_s", "p_down_true", "p_down_measured"};
  for (const auto& s : samples) t.rows.push_back({s.burst_duration, s.p_down_true, s.p_down_measured});
  return t;
}

ResultTable parity_table(std::span<const ParityPoint> points) {
  ResultTable t;
  t.columns = {"f_center_hz", "resonances_covered", "p_down"};
  for (const auto& p : points) {
    t.rows.push_back({p.f_center, static_cast<double>(p.resonances_covered), p.p_down});
  }
  return t;
}

ResultTable lz_results_table(std::span<const LzTableRow> rows) {
  ResultTable t;
  t.columns = {"adiabaticity_ratio", "rabi_hz", "rate_hz_per_s", "fm_depth_hz",
               "duration_s", "p_landau_zener", "p_propagated"};
  for (const auto& r : rows) {
    t.rows.push_back({r.adiabaticity_ratio, r.rabi, r.rate, r.fm_depth, r.duration,
                      r.p_landau_zener, r.p_propagated});
  }
  return t;
}

ResultTable rwa_table(const RwaCheckConfig& cfg, const RwaCheckResult& result) {
  ResultTable t;
  t.columns = {"f_larmor_hz", "rabi_hz", "fm_depth_hz", "duration_s",
               "p_rotating", "p_lab", "abs_diff"};
  t.rows.push_back({cfg.f_larmor, cfg.rabi, cfg.fm_depth, cfg.duration, result.p_rotating,
                    result.p_lab, result.abs_diff});
  return t;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_results(std::ostream& out, const ResultTable& table, const std::string& config_echo,
                   OutputFormat format) {
  if (format == OutputFormat::JsonLines) {
    for (const auto& row : table.rows) {
      nlohmann::ordered_json obj;
      for (std::size_t c = 0; c < table.columns.size(); ++c) obj[table.columns[c]] = row.at(c);
      out << obj.dump() << '\n';
    }
    return;
  }
  std::istringstream echo(config_echo);
  std::string line;
  while (std::getline(echo, line)) out << (line.empty() ? "#" : "# " + line) << '\n';
  for (const auto& note : table.notes) out << "#! " << note << '\n';
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    out << (c ? "," : "") << table.columns[c];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_number(row[c]);
    out << '\n';
  }
}

void write_results(const std::string& path, const ResultTable& table,
                   const std::string& config_echo, OutputFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  write_results(out, table, config_echo, format);
  out.flush();
  if (!out) throw std::runtime_error("failed writing output file '" + path + "'");
}

ParsedResults read_results_csv(std::istream& in) {
  ParsedResults parsed;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.rfind("#!", 0) == 0) {
      parsed.table.notes.push_back(line.size() > 3 ? line.substr(3) : "");
    } else if (line.rfind('#', 0) == 0) {
      parsed.config_echo += (line.size() > 2 ? line.substr(2) : "") + "\n";
    } else if (line.empty()) {
      continue;
    } else {
      std::vector<std::string> fields;
      std::stringstream ss(line);
      std::string field;
      while (std::getline(ss, field, ',')) fields.push_back(field);
      if (!header) {
        parsed.table.columns = fields;
        header = true;
        continue;
      }
      if (fields.size() != parsed.table.columns.size()) {
        throw std::runtime_error("row with " + std::to_string(fields.size()) +
                                 " fields, expected " +
                                 std::to_string(parsed.table.columns.size()));
      }
      std::vector<double> row;
      for (const auto& f : fields) row.push_back(std::stod(f));
      parsed.table.rows.push_back(std::move(row));
    }
  }
  if (!header) throw std::runtime_error("results file has no header row");
  return parsed;
}

ParsedResults read_results_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read results file '" + path + "'");
  return read_results_csv(in);
}

}  // namespace edsr
