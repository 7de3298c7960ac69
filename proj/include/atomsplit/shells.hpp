#pragma once

// Symmetric shell hierarchy y_n(tau) = psi(p + 2n, tau), with y_{-n} = y_n,
// started from y_0 = 1. Only n >= 0 is stored.

#include <span>
#include <stdexcept>
#include <vector>

#include "atomsplit/core.hpp"

namespace atomsplit {

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ShellState {
  std::vector<cplx> y;  // y[n] for n in [0, N]
  double tau = 0.0;

  /// y_0 = 1, all other shells empty.
  static ShellState ground(int halfwidth);

  int halfwidth() const { return static_cast<int>(y.size()) - 1; }
  /// |y_0|^2 + 2 sum_{n>=1} |y_n|^2.
  double weighted_norm() const;
  /// a_n = |y_n|^2.
  std::vector<double> amplitudes() const;
};

/// dy/dtau for the truncated hierarchy; y_{N+1} = 0. With `drop_kinetic`
/// the 4 n^2 terms are omitted.
std::vector<cplx> shell_rhs(const ShellState& state, double r_squared, bool drop_kinetic);

struct ThreeShellState {
  cplx y0;
  cplx y1;
};

struct ThreeShellAmplitudes {
  double a0;
  double a1;
};

/// Exact solution of the three-shell system (shells 0 and +-1).
ThreeShellState three_shell_solution(double r_squared, double tau);
ThreeShellAmplitudes three_shell_amplitudes(double r_squared, double tau);
/// (2k + 1) pi / sqrt(2 R^4 + 16): times of maximal transfer into shells +-1.
double three_shell_splitting_time(double r_squared, int k);
/// Period of the three-shell populations, 2 pi / sqrt(2 R^4 + 16).
double three_shell_period(double r_squared);

struct FiveShellState {
  cplx y0;
  cplx y1;
  cplx y2;
};

struct FiveShellAmplitudes {
  double a0;
  double a1;
  double a2;
};

/// Exact solution of the five-shell system with the kinetic terms dropped
/// (valid when R^2 >> 16).
FiveShellState five_shell_solution(double r_squared, double tau);
FiveShellAmplitudes five_shell_amplitudes(double r_squared, double tau);
/// 2 pi / (sqrt(3) R^2): first time shells +-2 hold 8/9 of the population.
double five_shell_splitting_time(double r_squared);
/// 4 pi / (sqrt(3) R^2).
double five_shell_period(double r_squared);

/// Free phase rotation of a shell decoupled from its neighbours,
/// exp(-4 i n^2 tau) y_n(0).
cplx elder_shell_phase(int n, double tau, cplx y_n0);

inline constexpr int kDefaultSampleCount = 1000;

/// `count` uniform sample times covering [0, tau_end] including both ends.
std::vector<double> uniform_samples(double tau_end, int count = kDefaultSampleCount);

/// Integrates the hierarchy from `initial` (at tau = initial.tau) and returns
/// the state at each requested sample time. Sample times must be sorted and
/// lie in [initial.tau, tau_end]; an empty list means uniform_samples(tau_end).
///
/// The step is a fourth-order Magnus step with an exact Hermitian exponential,
/// so the weighted norm is conserved to round-off. Steps are refined by step
/// doubling until the local error per unit time is below `tol`. Static
/// profiles are propagated by exact diagonalization.
std::vector<ShellState> integrate_shells(const ShellState& initial, const ModulationProfile& profile,
                                         double tau_end, double tol, bool drop_kinetic,
                                         std::span<const double> sample_times = {});

/// Same, starting from ShellState::ground(halfwidth) at tau = 0.
std::vector<ShellState> integrate_shells(int halfwidth, const ModulationProfile& profile,
                                         double tau_end, double tol, bool drop_kinetic,
                                         std::span<const double> sample_times = {});

}  // namespace atomsplit
