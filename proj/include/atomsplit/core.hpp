#pragma once

// Dimensionless model of an atom in a far-detuned, amplitude-modulated
// standing wave. Momenta are in units of hbar*k, times in units of the
// recoil frequency (tau = omega_R * t), couplings in recoil units.

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace atomsplit {

using cplx = std::complex<double>;

/// Raised when an argument violates an operation's precondition.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a grid or parameter set cannot support the requested run.
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ModulationKind { Constant, Harmonic };

/// Open-loop control law for the squared coupling,
/// R^2(tau) = r0_squared * [1 + epsilon * cos(nu * tau + phi0)]^2.
struct ModulationProfile {
  ModulationKind kind = ModulationKind::Constant;
  double r0_squared = 0.0;
  double epsilon = 0.0;
  double nu = 0.0;
  double phi0 = 0.0;

  static ModulationProfile constant(double r0_squared);
  static ModulationProfile harmonic(double r0_squared, double epsilon, double nu,
                                    double phi0 = 0.0);

  /// Throws DomainError if any field is negative or non-finite.
  void validate() const;
  /// True when coupling_at does not depend on tau.
  bool is_static() const;
};

double coupling_at(const ModulationProfile& profile, double tau);

/// Upper bound of coupling_at over all tau.
double max_coupling(const ModulationProfile& profile);

/// Cycle average of R^2(tau): r0^2 (1 + epsilon^2 / 2) for a harmonic law.
double cycle_average_coupling(const ModulationProfile& profile);

/// Converts a physical squared Rabi frequency into the dimensionless
/// coupling R^2 = R0^2 / (2 * detuning * recoil).
double effective_coupling_scale(double rabi_squared, double detuning, double recoil);

enum class Validity { Pass, Warn };

struct ValidityDiagnostic {
  Validity status = Validity::Pass;
  // detuning / max(rabi, linewidth); infinite when both vanish.
  double ratio = 0.0;
  std::string message;
};

/// Detuning must exceed both the Rabi frequency and the linewidth by this factor
/// for the excited state to be eliminated adiabatically.
inline constexpr double kAdiabaticFactor = 10.0;

ValidityDiagnostic validity_check(double rabi, double detuning, double linewidth);

/// Momentum lattice split into `sublattice_count` families p = q + 2n with
/// q = -1 + 2m/M (m in [0, M)) and n in [-N, N].
class MomentumGrid {
 public:
  MomentumGrid(int sublattice_count, int shell_halfwidth);

  int sublattice_count() const { return sublattices_; }
  int shell_halfwidth() const { return halfwidth_; }
  int shells_per_sublattice() const { return 2 * halfwidth_ + 1; }
  std::size_t size() const {
    return static_cast<std::size_t>(sublattices_) * static_cast<std::size_t>(shells_per_sublattice());
  }
  double spacing() const { return 2.0 / sublattices_; }
  double offset(int m) const { return -1.0 + 2.0 * m / sublattices_; }
  double momentum(int m, int n) const { return offset(m) + 2.0 * n; }
  /// Largest |p| representable: 2N + 1.
  double momentum_extent() const { return 2.0 * halfwidth_ + 1.0; }

  bool operator==(const MomentumGrid&) const = default;

 private:
  int sublattices_;
  int halfwidth_;
};

/// Complex amplitudes psi(q, n). Each sublattice is stored contiguously,
/// ordered by n from -N to N.
class WaveFunction {
 public:
  explicit WaveFunction(MomentumGrid grid);

  const MomentumGrid& grid() const { return grid_; }

  cplx& at(int m, int n) { return amps_[index(m, n)]; }
  const cplx& at(int m, int n) const { return amps_[index(m, n)]; }

  std::span<cplx> sublattice(int m);
  std::span<const cplx> sublattice(int m) const;

  std::span<cplx> amplitudes() { return amps_; }
  std::span<const cplx> amplitudes() const { return amps_; }

 private:
  std::size_t index(int m, int n) const {
    return static_cast<std::size_t>(m) * static_cast<std::size_t>(grid_.shells_per_sublattice()) +
           static_cast<std::size_t>(n + grid_.shell_halfwidth());
  }

  MomentumGrid grid_;
  std::vector<cplx> amps_;
};

struct SimParams {
  double tau_end = 0.0;
  double dt = 0.0;
  double delta_p = 0.5;

  void validate() const;
};

/// Unnormalized initial profile exp(-p^2 / delta_p^2) / sqrt(2 pi).
double gaussian_profile(double p, double delta_p);

/// Smallest shell halfwidth whose grid holds the Gaussian: the profile must
/// have dropped below 1e-12 of its peak at the grid edge.
int minimal_halfwidth(double delta_p);

/// Gaussian initial state, rescaled to unit discrete norm.
WaveFunction gaussian_initial(const MomentumGrid& grid, double delta_p);

/// Applies the momentum-space Hamiltonian
///   (H psi)(p) = (p^2 + R^2) psi(p) + R^2/2 [psi(p+2) + psi(p-2)]
/// with zero amplitude outside the truncated lattice.
WaveFunction hamiltonian_apply(const WaveFunction& psi, double r_squared);

/// Discrete L2 mass sum |psi|^2 * dp.
double total_norm(const WaveFunction& psi);

/// Inner product <a, b> = sum conj(a) b * dp.
cplx inner_product(const WaveFunction& a, const WaveFunction& b);

}  // namespace atomsplit
