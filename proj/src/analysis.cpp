#include "atomsplit/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "atomsplit/parallel.hpp"
#include "atomsplit/propagator.hpp"

namespace atomsplit {

namespace {

// Window edges fall on grid points; keep them inside the window.
constexpr double kEdgeSlack = 1e-9;

}  // namespace

double MomentumDistribution::mass() const {
  return std::accumulate(density.begin(), density.end(), 0.0) * dp;
}

double MomentumDistribution::window_mass(double centre, double halfwidth) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (std::abs(p[i] - centre) <= halfwidth + kEdgeSlack) sum += density[i];
  return sum * dp;
}

MomentumDistribution distribution(const WaveFunction& psi) {
  const MomentumGrid& grid = psi.grid();
  const int half = grid.shell_halfwidth();
  MomentumDistribution dist;
  dist.dp = grid.spacing();
  dist.p.reserve(grid.size());
  dist.density.reserve(grid.size());
  for (int n = -half; n <= half; ++n)
    for (int m = 0; m < grid.sublattice_count(); ++m) {
      dist.p.push_back(grid.momentum(m, n));
      dist.density.push_back(std::norm(psi.at(m, n)));
    }
  return dist;
}

std::vector<Peak> detect_peaks(const MomentumDistribution& dist, double min_height_fraction) {
  if (!(min_height_fraction > 0.0 && min_height_fraction < 1.0))
    throw DomainError("min_height_fraction must lie in (0, 1)");
  std::vector<Peak> peaks;
  const auto& d = dist.density;
  if (d.size() < 3) return peaks;
  const double global = *std::max_element(d.begin(), d.end());
  if (!(global > 0.0)) return peaks;
  const double floor = min_height_fraction * global;
  for (std::size_t i = 1; i + 1 < d.size(); ++i)
    if (d[i] > d[i - 1] && d[i] > d[i + 1] && d[i] >= floor) peaks.push_back({dist.p[i], d[i]});
  std::stable_sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
    if (a.height != b.height) return a.height > b.height;
    if (std::abs(a.location) != std::abs(b.location)) return std::abs(a.location) < std::abs(b.location);
    return a.location < b.location;
  });
  return peaks;
}

double splitting_metric(const MomentumDistribution& dist, double p_star, double halfwidth) {
  if (!(halfwidth > 0.0)) throw DomainError("window half-width must be > 0");
  if (!(p_star > halfwidth)) throw DomainError("target windows overlap: p_star must exceed the half-width");
  const double total = dist.mass();
  if (!(total > 0.0)) return 0.0;
  const double inside = dist.window_mass(p_star, halfwidth) + dist.window_mass(-p_star, halfwidth);
  return std::clamp(inside / total, 0.0, 1.0);
}

SplittingReport splitting_report(const MomentumDistribution& dist, const SplittingObjective& objective) {
  SplittingReport report;
  report.p_star = objective.p_star;
  report.halfwidth = objective.halfwidth;
  report.metric = splitting_metric(dist, objective.p_star, objective.halfwidth);
  for (const Peak& peak : detect_peaks(dist, objective.min_height_fraction))
    report.peaks.push_back({peak.location, peak.height, dist.window_mass(peak.location, objective.halfwidth)});
  return report;
}

std::vector<SweepPoint> SweepGrid::points() const {
  std::vector<SweepPoint> out;
  for (double e : epsilon)
    for (double n : nu)
      for (double r : r0_squared)
        for (double t : tau_end) out.push_back({e, n, r, t});
  return out;
}

ModulationProfile sweep_profile(const SweepPoint& point, double phi0) {
  if (point.epsilon == 0.0) return ModulationProfile::constant(point.r0_squared);
  return ModulationProfile::harmonic(point.r0_squared, point.epsilon, point.nu, phi0);
}

SweepRow run_sweep_point(const SweepPoint& point, const SweepSettings& settings,
                         const SplittingObjective& objective) {
  SweepRow row;
  row.point = point;
  try {
    const ModulationProfile profile = sweep_profile(point, settings.phi0);
    SimParams params{point.tau_end, settings.dt > 0.0 ? settings.dt : default_time_step(profile),
                     settings.delta_p};
    params.validate();
    row.shell_halfwidth = settings.shell_halfwidth > 0
                              ? settings.shell_halfwidth
                              : auto_truncation(profile, params, settings.truncation_tol,
                                                {settings.sublattice_count, 256, 1});
    const MomentumGrid grid(settings.sublattice_count, row.shell_halfwidth);
    PropagationOptions options;
    options.norm_tolerance = settings.norm_tolerance;
    options.boundary_threshold = settings.boundary_threshold;
    const PropagationResult result = propagate(gaussian_initial(grid, params.delta_p), profile, params, options);
    const SplittingReport report = splitting_report(distribution(result.final_state), objective);

    row.metric = report.metric;
    row.norm_drift = result.norm_drift;
    row.boundary_mass = result.boundary_mass;
    row.truncation_warning = result.truncation_warning;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double first = !report.peaks.empty() ? report.peaks[0].location : nan;
    const double second = report.peaks.size() > 1 ? report.peaks[1].location : first;
    row.peak_low = std::min(first, second);
    row.peak_high = std::max(first, second);
    row.ok = true;
  } catch (const std::exception& e) {
    row.ok = false;
    row.error = e.what();
  }
  return row;
}

std::vector<SweepRow> sweep(const std::vector<SweepPoint>& points, const SweepSettings& settings,
                            const SplittingObjective& objective, std::size_t first,
                            const std::function<void(std::size_t, const SweepRow&)>& on_row) {
  if (points.empty()) throw DomainError("sweep needs a nonempty parameter grid");
  std::vector<SweepRow> rows;
  const std::size_t batch = static_cast<std::size_t>(std::max(settings.jobs, 1));
  for (std::size_t start = first; start < points.size(); start += batch) {
    const std::size_t count = std::min(batch, points.size() - start);
    std::vector<SweepRow> results(count);
    detail::parallel_for(count, settings.jobs, [&](std::size_t i) {
      results[i] = run_sweep_point(points[start + i], settings, objective);
    });
    for (std::size_t i = 0; i < count; ++i) {
      if (on_row) on_row(start + i, results[i]);
      rows.push_back(std::move(results[i]));
    }
  }
  return rows;
}

}  // namespace atomsplit
