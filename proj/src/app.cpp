#include "atomsplit/app.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "atomsplit/csv.hpp"
#include "atomsplit/shells.hpp"

namespace atomsplit {

namespace {

namespace fs = std::filesystem;
using Metadata = std::vector<std::pair<std::string, std::string>>;

fs::path prepare_output(const RunConfig& config) {
  const fs::path dir(config.output);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

// Config entries that change results; output location and worker count do not.
Metadata config_metadata(const RunConfig& config) {
  Metadata meta{{"tool_version", kToolVersion}};
  std::istringstream lines(format_config(config));
  std::string line;
  while (std::getline(lines, line)) {
    const auto eq = line.find(" = ");
    std::string key = line.substr(0, eq);
    if (key == "output" || key == "jobs" || key == "resume") continue;
    meta.emplace_back(std::move(key), line.substr(eq + 3));
  }
  return meta;
}

void add(Metadata& meta, std::string key, double value) { meta.emplace_back(std::move(key), format_number(value)); }
void add(Metadata& meta, std::string key, long value) { meta.emplace_back(std::move(key), std::to_string(value)); }
void add(Metadata& meta, std::string key, bool value) { meta.emplace_back(std::move(key), value ? "true" : "false"); }

SimParams sim_params(const RunConfig& config, const ModulationProfile& profile) {
  SimParams params{config.tau_end, config.dt ? *config.dt : default_time_step(profile), config.delta_p};
  params.validate();
  return params;
}

RunOutcome write_density(const RunConfig& config, const std::string& name) {
  const fs::path dir = prepare_output(config);
  const DensityRun run = run_density(config);

  Table table{{"p", "density"}, {}};
  for (std::size_t i = 0; i < run.distribution.p.size(); ++i)
    table.rows.push_back({run.distribution.p[i], run.distribution.density[i]});
  const fs::path csv = dir / (name + ".csv");
  emit_csv(table, csv);

  Metadata meta = config_metadata(config);
  add(meta, "resolved_shells", static_cast<long>(run.shell_halfwidth));
  add(meta, "resolved_dt", run.result.dt);
  add(meta, "steps", run.result.steps);
  add(meta, "norm_drift", run.result.norm_drift);
  add(meta, "boundary_mass", run.result.boundary_mass);
  add(meta, "truncation_warning", run.result.truncation_warning);
  add(meta, "mass", run.distribution.mass());
  add(meta, "splitting_metric", run.report.metric);
  add(meta, "peak_count", static_cast<long>(run.report.peaks.size()));
  for (std::size_t i = 0; i < run.report.peaks.size() && i < 4; ++i) {
    const std::string prefix = "peak_" + std::to_string(i + 1);
    add(meta, prefix + "_location", run.report.peaks[i].location);
    add(meta, prefix + "_height", run.report.peaks[i].height);
    add(meta, prefix + "_window_mass", run.report.peaks[i].window_mass);
  }
  const fs::path sidecar = dir / (name + ".meta");
  emit_metadata(meta, sidecar);

  RunOutcome outcome{{csv, sidecar}, !run.result.truncation_warning, {}};
  std::ostringstream os;
  os << name << ": N = " << run.shell_halfwidth << ", steps = " << run.result.steps
     << ", norm drift = " << run.result.norm_drift << ", splitting metric = " << run.report.metric;
  if (run.report.peaks.size() >= 2)
    os << ", top peaks at " << run.report.peaks[0].location << " and " << run.report.peaks[1].location;
  outcome.messages.push_back(os.str());
  if (run.result.truncation_warning) {
    std::ostringstream warn;
    warn << "warning: boundary mass " << run.result.boundary_mass << " exceeds " << config.boundary_threshold
         << "; increase shells";
    outcome.messages.push_back(warn.str());
  }
  return outcome;
}

}  // namespace

ModulationProfile profile_from(const RunConfig& config) {
  if (config.epsilon == 0.0) return ModulationProfile::constant(config.r0_squared);
  return ModulationProfile::harmonic(config.r0_squared, config.epsilon, config.nu, config.phi0);
}

RunConfig preset_config(const RunConfig& config, FigurePreset preset) {
  RunConfig out = config;
  out.mode = Mode::Figure;
  out.preset = preset;
  out.phi0 = 0.0;
  out.delta_p = 0.5;
  out.tau_end = 0.567;
  switch (preset) {
    case FigurePreset::Fig1:
      out.r0_squared = kFig1Coupling;
      out.epsilon = 0.0;
      out.nu = 0.0;
      out.tau_end = five_shell_period(kFig1Coupling);
      out.drop_kinetic = true;
      out.shells = 2;
      break;
    case FigurePreset::Fig2:
      out.r0_squared = 320.0;
      out.epsilon = 0.0;
      out.nu = 0.0;
      break;
    case FigurePreset::Fig3:
      out.r0_squared = 280.0;
      out.epsilon = 0.8;
      out.nu = 29.0;
      break;
  }
  return out;
}

DensityRun run_density(const RunConfig& config) {
  const ModulationProfile profile = profile_from(config);
  const SimParams params = sim_params(config, profile);
  const int halfwidth =
      config.shells ? *config.shells
                    : auto_truncation(profile, params, config.truncation_tol, {config.sublattices, 256, config.jobs});
  const MomentumGrid grid(config.sublattices, halfwidth);
  PropagationOptions options;
  options.norm_tolerance = config.norm_tolerance;
  options.boundary_threshold = config.boundary_threshold;
  options.jobs = config.jobs;
  PropagationResult result = propagate(gaussian_initial(grid, params.delta_p), profile, params, options);
  MomentumDistribution dist = distribution(result.final_state);
  SplittingReport report = splitting_report(dist, {config.p_star, config.halfwidth, config.min_height_fraction});
  return {std::move(result), halfwidth, std::move(dist), std::move(report)};
}

RunOutcome run_shells(const RunConfig& config) {
  const fs::path dir = prepare_output(config);
  const ModulationProfile profile = profile_from(config);
  const int halfwidth = config.shells ? *config.shells : 2;
  const std::vector<double> samples = uniform_samples(config.tau_end, config.samples);
  const auto trajectory = integrate_shells(halfwidth, profile, config.tau_end, config.tol, config.drop_kinetic, samples);

  const double closed_coupling = config.closed_form_coupling == ClosedFormCoupling::R0Squared
                                     ? config.r0_squared
                                     : cycle_average_coupling(profile);
  const bool three = halfwidth == 1 && !config.drop_kinetic;
  const bool five = halfwidth == 2 && config.drop_kinetic;

  Table table;
  table.header.push_back("tau");
  for (int n = 0; n <= halfwidth; ++n) table.header.push_back("a" + std::to_string(n));
  table.header.push_back("weighted_norm");
  if (three) table.header.insert(table.header.end(), {"a0_closed", "a1_closed"});
  if (five) table.header.insert(table.header.end(), {"a0_closed", "a1_closed", "a2_closed"});

  double worst_drift = 0.0;
  double worst_closed = 0.0;
  for (const ShellState& state : trajectory) {
    std::vector<Cell> row{state.tau};
    const auto a = state.amplitudes();
    for (double v : a) row.emplace_back(v);
    const double norm = state.weighted_norm();
    worst_drift = std::max(worst_drift, std::abs(norm - 1.0));
    row.emplace_back(norm);
    if (three) {
      const auto c = three_shell_amplitudes(closed_coupling, state.tau);
      row.insert(row.end(), {c.a0, c.a1});
      worst_closed = std::max({worst_closed, std::abs(c.a0 - a[0]), std::abs(c.a1 - a[1])});
    }
    if (five) {
      const auto c = five_shell_amplitudes(closed_coupling, state.tau);
      row.insert(row.end(), {c.a0, c.a1, c.a2});
      worst_closed = std::max({worst_closed, std::abs(c.a0 - a[0]), std::abs(c.a1 - a[1]), std::abs(c.a2 - a[2])});
    }
    table.rows.push_back(std::move(row));
  }
  const fs::path csv = dir / "shells.csv";
  emit_csv(table, csv);

  Metadata meta = config_metadata(config);
  add(meta, "resolved_shells", static_cast<long>(halfwidth));
  add(meta, "closed_form_r_squared", closed_coupling);
  add(meta, "max_weighted_norm_drift", worst_drift);
  if (three || five) add(meta, "max_closed_form_deviation", worst_closed);
  const fs::path sidecar = dir / "shells.meta";
  emit_metadata(meta, sidecar);

  RunOutcome outcome{{csv, sidecar}, worst_drift <= config.norm_tolerance, {}};
  std::ostringstream os;
  os << "shells: N = " << halfwidth << ", " << trajectory.size() << " samples, max weighted-norm drift = "
     << worst_drift;
  if (three || five) os << ", max deviation from closed form = " << worst_closed;
  outcome.messages.push_back(os.str());
  return outcome;
}

RunOutcome run_propagate(const RunConfig& config) { return write_density(config, "propagate"); }

RunOutcome run_sweep(const RunConfig& config) {
  const fs::path dir = prepare_output(config);
  auto axis = [](const std::vector<double>& values, double fallback) {
    return values.empty() ? std::vector<double>{fallback} : values;
  };
  const SweepGrid grid{axis(config.sweep_epsilon, config.epsilon), axis(config.sweep_nu, config.nu),
                       axis(config.sweep_r0_squared, config.r0_squared), axis(config.sweep_tau_end, config.tau_end)};
  const std::vector<SweepPoint> points = grid.points();

  SweepSettings settings;
  settings.sublattice_count = config.sublattices;
  settings.shell_halfwidth = config.shells ? *config.shells : 0;
  settings.dt = config.dt ? *config.dt : 0.0;
  settings.delta_p = config.delta_p;
  settings.phi0 = config.phi0;
  settings.truncation_tol = config.truncation_tol;
  settings.norm_tolerance = config.norm_tolerance;
  settings.boundary_threshold = config.boundary_threshold;
  settings.jobs = config.jobs;
  const SplittingObjective objective{config.p_star, config.halfwidth, config.min_height_fraction};

  const std::vector<std::string> header{"index",       "epsilon",   "nu",       "r0_squared",
                                        "tau_end",     "status",    "metric",   "peak_low",
                                        "peak_high",   "norm_drift", "boundary_mass", "shells",
                                        "truncation_warning", "error"};
  const fs::path csv = dir / "sweep.csv";
  const fs::path marker = dir / "sweep.csv.done";

  std::size_t first = 0;
  if (config.resume && fs::exists(marker) && fs::exists(csv)) {
    std::ifstream in(marker);
    in >> first;
    if (!in || first > points.size()) throw IoError("unreadable sweep marker " + marker.string());
    // Keep the header and the completed rows; drop anything written after the marker.
    std::ifstream old(csv, std::ios::binary);
    std::string kept;
    std::string line;
    for (std::size_t i = 0; i <= first && std::getline(old, line); ++i) kept += line + '\n';
    old.close();
    std::ofstream rewrite(csv, std::ios::binary | std::ios::trunc);
    rewrite << kept;
    if (!rewrite) throw IoError("cannot rewrite " + csv.string());
  } else {
    CsvWriter fresh(csv, header);
  }

  CsvWriter writer(csv);
  bool all_ok = true;
  auto write_marker = [&](std::size_t done) {
    std::ofstream out(marker, std::ios::binary | std::ios::trunc);
    out << done << '\n';
    if (!out) throw IoError("cannot write " + marker.string());
  };
  write_marker(first);
  sweep(points, settings, objective, first, [&](std::size_t index, const SweepRow& row) {
    writer.write({static_cast<std::int64_t>(index), row.point.epsilon, row.point.nu, row.point.r0_squared,
                  row.point.tau_end, std::string(row.ok ? "ok" : "failed"), row.metric, row.peak_low,
                  row.peak_high, row.norm_drift, row.boundary_mass, static_cast<std::int64_t>(row.shell_halfwidth),
                  std::string(row.truncation_warning ? "true" : "false"), row.error});
    write_marker(index + 1);
    if (!row.ok || row.truncation_warning) all_ok = false;
  });

  // Rows restored from a previous run count too.
  std::ifstream check(csv, std::ios::binary);
  std::string line;
  std::getline(check, line);
  while (std::getline(check, line))
    if (line.find(",ok,") == std::string::npos || line.find(",true,") != std::string::npos) all_ok = false;

  Metadata meta = config_metadata(config);
  add(meta, "points", static_cast<long>(points.size()));
  const fs::path sidecar = dir / "sweep.meta";
  emit_metadata(meta, sidecar);

  RunOutcome outcome{{csv, sidecar}, all_ok, {}};
  outcome.messages.push_back("sweep: " + std::to_string(points.size()) + " points written to " + csv.string());
  return outcome;
}

RunOutcome run_figure(const RunConfig& config, FigurePreset preset) {
  const RunConfig fig = preset_config(config, preset);
  if (preset != FigurePreset::Fig1) return write_density(fig, to_string(preset));

  const fs::path dir = prepare_output(fig);
  const double period = fig.tau_end;
  Table table{{"tau", "a0", "a1", "a2"}, {}};
  for (double tau : uniform_samples(period, fig.samples)) {
    const auto a = five_shell_amplitudes(kFig1Coupling, tau);
    table.rows.push_back({tau, a.a0, a.a1, a.a2});
  }
  const fs::path csv = dir / "fig1.csv";
  emit_csv(table, csv);
  Metadata meta = config_metadata(fig);
  add(meta, "r_squared", kFig1Coupling);
  add(meta, "period", period);
  add(meta, "splitting_time", five_shell_splitting_time(kFig1Coupling));
  const fs::path sidecar = dir / "fig1.meta";
  emit_metadata(meta, sidecar);
  return {{csv, sidecar}, true, {"fig1: five-shell populations over one period " + format_number(period)}};
}

RunOutcome run(const RunConfig& config) {
  switch (config.mode) {
    case Mode::Shells: return run_shells(config);
    case Mode::Propagate: return run_propagate(config);
    case Mode::Sweep: return run_sweep(config);
    case Mode::Figure: return run_figure(config, config.preset);
  }
  return run_propagate(config);
}

}  // namespace atomsplit
