#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "edsr/config.hpp"
#include "edsr/sweep.hpp"

namespace edsr {

/// Column-oriented result of one experiment. `notes` are derived scalars
/// (fit results, summary values) written as comment lines.
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> notes;
};

ResultTable lineshape_table(std::span<const LineshapePoint> points);
ResultTable duration_table(std::span<const DurationSample> samples);
ResultTable parity_table(std::span<const ParityPoint> points);
ResultTable lz_results_table(std::span<const LzTableRow> rows);
ResultTable rwa_table(const RwaCheckConfig& cfg, const RwaCheckResult& result);

/// Numbers are written with 10 significant digits.
std::string format_number(double v);

/// CSV: '#'-prefixed config echo, '#!' notes, header row, data rows.
/// JSON lines: one object per row, keys equal to the CSV header.
void write_results(std::ostream& out, const ResultTable& table, const std::string& config_echo,
                   OutputFormat format);
/// Throws std::runtime_error naming the path on I/O failure.
void write_results(const std::string& path, const ResultTable& table,
                   const std::string& config_echo, OutputFormat format);

struct ParsedResults {
  std::string config_echo;  // the echoed config text, comment markers removed
  ResultTable table;
};

ParsedResults read_results_csv(std::istream& in);
ParsedResults read_results_csv_file(const std::string& path);

}  // namespace edsr
