#include "edsr/cli.hpp"

#include <chrono>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

namespace edsr {

namespace {

void log_line(std::ostream* log, const std::string& text) {
  if (log) *log << text << std::endl;
}

ResultTable run_duration(const RunConfig& cfg, std::ostream* log) {
  const auto samples = duration_sweep(cfg.sweep, cfg.duration.durations, cfg.duration.field);
  ResultTable table = duration_table(samples);
  const bool measured = cfg.sweep.measurement.has_value();
  try {
    RabiFitOptions options;
    options.fit_p_max = cfg.duration.fit_p_max;
    const RabiFit fit = extract_rabi_from_duration_sweep(to_sweep_points(samples, measured),
                                                         cfg.sweep.program.schedule.fm_depth,
                                                         cfg.duration.p_max, options);
    table.notes.push_back("fit_rabi_hz = " + format_number(fit.rabi));
    table.notes.push_back("fit_tau0_s = " + format_number(fit.tau0));
    table.notes.push_back("fit_p_max = " + format_number(fit.p_max));
    table.notes.push_back("fit_rms_residual = " + format_number(fit.rms_residual));
    log_line(log, "fitted Rabi frequency " + format_number(fit.rabi * 1e-6) + " MHz");
  } catch (const std::exception& e) {
    table.notes.push_back(std::string("fit_error = ") + e.what());
    log_line(log, std::string("fit failed: ") + e.what());
  }
  return table;
}

ResultTable run_fixedfreq(const RunConfig& cfg) {
  const auto points =
      fixed_frequency_sweep(cfg.sweep, cfg.fixedfreq.measurement_time, cfg.fixedfreq.cycles);
  ResultTable table = lineshape_table(points);
  const MeasurementModel readout = cfg.sweep.measurement.value_or(MeasurementModel{1.0, 1.0, 1});
  const double baseline = apply_measurement_fidelity(0.0, readout);
  const double floor = binomial_noise_floor(baseline, cfg.fixedfreq.cycles);
  double peak = 0.0;
  for (const auto& p : points) peak = std::max(peak, p.p_down_measured - baseline);
  table.notes.push_back("baseline = " + format_number(baseline));
  table.notes.push_back("noise_floor = " + format_number(floor));
  table.notes.push_back("peak_excess = " + format_number(peak));
  return table;
}

}  // namespace

ResultTable run_experiment(const RunConfig& cfg, std::ostream* log) {
  cfg.validate();
  log_line(log, std::string("running ") + to_string(cfg.experiment));
  const auto start = std::chrono::steady_clock::now();
  ResultTable table;
  switch (cfg.experiment) {
    case Experiment::Lineshape:
      table = lineshape_table(field_sweep_lineshape(cfg.sweep));
      break;
    case Experiment::Duration:
      table = run_duration(cfg, log);
      break;
    case Experiment::Parity: {
      const auto centers = cfg.parity.window_centers(cfg.sweep.electron.g_factor);
      table = parity_table(parity_scan(cfg.sweep, centers, cfg.parity.fm_depth, cfg.parity.field));
      break;
    }
    case Experiment::FixedFreq:
      table = run_fixedfreq(cfg);
      break;
    case Experiment::LzTable:
      table = lz_results_table(lz_table(cfg.lz));
      break;
    case Experiment::ValidateRwa:
      table = rwa_table(cfg.rwa, validate_rwa(cfg.rwa));
      break;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  log_line(log, "done: " + std::to_string(table.rows.size()) + " rows in " +
                    format_number(seconds) + " s");
  return table;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Chirped EDSR simulator: field-swept lineshapes, burst-duration and parity scans."};
  app.name(args.empty() ? "edsr_sim" : args.front());
  std::string config_path;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  std::string output;
  bool verbose = false;
  app.add_option("--config", config_path, "Experiment configuration file")->required();
  auto* seed_opt = app.add_option("--seed", seed, "Random seed (overrides the config)");
  auto* threads_opt =
      app.add_option("--threads", threads, "Worker threads (overrides the config)")
          ->check(CLI::PositiveNumber);
  app.add_option("--output", output, "Output file (default: config output, else stdout)");
  app.add_flag("--verbose", verbose, "Echo the resolved configuration to stderr");

  std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(rest.begin(), rest.end());  // CLI11 consumes a reversed vector
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitConfig;
  }

  RunConfig cfg;
  try {
    cfg = load_config(config_path);
    if (*seed_opt) cfg.sweep.seed = seed;
    if (*threads_opt) {
      cfg.sweep.threads = threads;
      cfg.lz.threads = threads;
    }
    if (!output.empty()) cfg.output_path = output;
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  const std::string echo = to_config_text(cfg);
  if (verbose) err << echo << "\n";
  try {
    const ResultTable table = run_experiment(cfg, &err);
    if (cfg.output_path.empty()) {
      write_results(out, table, echo, cfg.output_format);
    } else {
      write_results(cfg.output_path, table, echo, cfg.output_format);
      err << "wrote " << cfg.output_path << "\n";
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace edsr
