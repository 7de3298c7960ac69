#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "atomsplit/core.hpp"

namespace atomsplit {

class PropagationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Largest accepted R^2 * dt when the step is chosen automatically.
inline constexpr double kPhasePerStep = 0.05;

/// Step size with max R^2(tau) * dt <= kPhasePerStep (0.01 for a zero coupling).
double default_time_step(const ModulationProfile& profile);

struct PropagationOptions {
  // Abort when |norm(final) - norm(initial)| / norm(initial) exceeds this.
  double norm_tolerance = 1e-10;
  // Warn when the outermost two shells hold more mass than this.
  double boundary_threshold = 1e-8;
  // Times in (0, tau_end] at which to record the state; sorted.
  std::vector<double> snapshot_times;
  // Worker threads across sublattices; results do not depend on it.
  int jobs = 1;
};

struct Snapshot {
  double tau;
  WaveFunction state;
};

struct PropagationResult {
  WaveFunction final_state;
  std::vector<Snapshot> snapshots;
  double norm_drift = 0.0;
  double boundary_mass = 0.0;
  bool truncation_warning = false;
  long steps = 0;
  double dt = 0.0;
};

/// Mass on shells |n| >= N - 1 of every sublattice.
double boundary_mass(const WaveFunction& psi);

/// Solves i d(psi)/d(tau) = H(tau) psi from 0 to params.tau_end with the
/// Cayley form (1 + i dt H/2) psi' = (1 - i dt H/2) psi, H frozen at the step
/// midpoint. Each sublattice is an independent tridiagonal system.
PropagationResult propagate(const WaveFunction& psi0, const ModulationProfile& profile,
                            const SimParams& params, const PropagationOptions& options = {});

/// Total-variation distance between the densities of two states on grids
/// with the same sublattice count; shells missing from the narrower grid
/// count as zero.
double density_distance(const WaveFunction& a, const WaveFunction& b);

struct TruncationOptions {
  int sublattice_count = 16;
  int cap = 256;
  int jobs = 1;
};

/// Smallest halfwidth N, searched by doubling from the minimum that holds the
/// initial Gaussian, whose final density moves by less than `tol` in total
/// variation when N is doubled. Throws ConfigurationError past the cap.
int auto_truncation(const ModulationProfile& profile, const SimParams& params, double tol,
                    const TruncationOptions& options = {});

}  // namespace atomsplit
