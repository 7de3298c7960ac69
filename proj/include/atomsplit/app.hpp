#pragma once

// Run orchestration behind the command-line tool. Every run writes CSV
// files plus a `.meta` sidecar (key = value) into config.output.

#include <filesystem>
#include <string>
#include <vector>

#include "atomsplit/analysis.hpp"
#include "atomsplit/config.hpp"
#include "atomsplit/core.hpp"
#include "atomsplit/propagator.hpp"

namespace atomsplit {

inline constexpr const char* kToolVersion = "atomsplit 1.0.0";

/// Coupling used by the fig1 preset.
inline constexpr double kFig1Coupling = 300.0;

struct RunOutcome {
  std::vector<std::filesystem::path> files;
  // False when a run exceeded its norm-drift or truncation threshold, or a
  // sweep point failed.
  bool thresholds_met = true;
  std::vector<std::string> messages;
};

/// Constant profile when epsilon is zero, harmonic otherwise.
ModulationProfile profile_from(const RunConfig& config);

/// The config used by a figure preset: physics keys replaced by the preset,
/// numerics and analysis keys kept from `config`.
RunConfig preset_config(const RunConfig& config, FigurePreset preset);

struct DensityRun {
  PropagationResult result;
  int shell_halfwidth = 0;
  MomentumDistribution distribution;
  SplittingReport report;
};

/// Gaussian start, automatic or fixed truncation, full propagation and analysis.
DensityRun run_density(const RunConfig& config);

RunOutcome run_shells(const RunConfig& config);
RunOutcome run_propagate(const RunConfig& config);
RunOutcome run_sweep(const RunConfig& config);
RunOutcome run_figure(const RunConfig& config, FigurePreset preset);

/// Dispatches on config.mode (and config.preset for figures).
RunOutcome run(const RunConfig& config);

}  // namespace atomsplit
