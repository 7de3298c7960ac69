#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "atomsplit/core.hpp"

namespace atomsplit {

/// |psi(p)|^2 on the assembled grid, p ascending.
struct MomentumDistribution {
  std::vector<double> p;
  std::vector<double> density;
  double dp = 0.0;

  double mass() const;
  /// Mass with |p - centre| <= halfwidth.
  double window_mass(double centre, double halfwidth) const;
};

MomentumDistribution distribution(const WaveFunction& psi);

struct Peak {
  double location;
  double height;
};

/// Strict 3-point local maxima at least `min_height_fraction` of the global
/// maximum, tallest first; equal heights are ordered by |p|, then p.
std::vector<Peak> detect_peaks(const MomentumDistribution& dist, double min_height_fraction);

/// Fraction of the total mass in [p* - w, p* + w] and [-p* - w, -p* + w].
double splitting_metric(const MomentumDistribution& dist, double p_star, double halfwidth);

struct ReportPeak {
  double location;
  double height;
  double window_mass;
};

struct SplittingReport {
  std::vector<ReportPeak> peaks;
  double metric = 0.0;
  double p_star = 0.0;
  double halfwidth = 0.0;
};

struct SplittingObjective {
  double p_star = 40.0;
  double halfwidth = 6.0;
  double min_height_fraction = 0.02;
};

/// Peaks carry the mass within the objective's half-width around them.
SplittingReport splitting_report(const MomentumDistribution& dist, const SplittingObjective& objective);

struct SweepPoint {
  double epsilon;
  double nu;
  double r0_squared;
  double tau_end;
};

/// Cartesian product of parameter lists; epsilon varies slowest, tau_end fastest.
struct SweepGrid {
  std::vector<double> epsilon;
  std::vector<double> nu;
  std::vector<double> r0_squared;
  std::vector<double> tau_end;

  std::vector<SweepPoint> points() const;
};

struct SweepSettings {
  int sublattice_count = 16;
  // 0 selects auto_truncation per point.
  int shell_halfwidth = 0;
  // 0 selects default_time_step per point.
  double dt = 0.0;
  double delta_p = 0.5;
  double phi0 = 0.0;
  double truncation_tol = 1e-6;
  double norm_tolerance = 1e-10;
  double boundary_threshold = 1e-8;
  int jobs = 1;
};

struct SweepRow {
  SweepPoint point{};
  bool ok = false;
  double metric = 0.0;
  double peak_low = 0.0;   // smaller of the two tallest peak locations
  double peak_high = 0.0;  // larger of the two
  double norm_drift = 0.0;
  double boundary_mass = 0.0;
  int shell_halfwidth = 0;
  bool truncation_warning = false;
  std::string error;
};

/// Profile used for one sweep point: constant when epsilon is zero.
ModulationProfile sweep_profile(const SweepPoint& point, double phi0);

/// Runs one point; failures are captured in the row rather than thrown.
SweepRow run_sweep_point(const SweepPoint& point, const SweepSettings& settings,
                         const SplittingObjective& objective);

/// Evaluates points[first..] and hands each row to `on_row` in grid order,
/// even when points run concurrently.
std::vector<SweepRow> sweep(const std::vector<SweepPoint>& points, const SweepSettings& settings,
                            const SplittingObjective& objective, std::size_t first = 0,
                            const std::function<void(std::size_t, const SweepRow&)>& on_row = {});

}  // namespace atomsplit
