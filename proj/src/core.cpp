#include "atomsplit/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace atomsplit {

namespace {

void require_nonnegative(double value, const char* name) {
  if (!std::isfinite(value) || value < 0.0) {
    std::ostringstream os;
    os << name << " must be >= 0 (got " << value << ")";
    throw DomainError(os.str());
  }
}

// Gaussian tail cut at the grid edge, relative to its peak.
constexpr double kEdgeTolerance = 1e-12;

}  // namespace

ModulationProfile ModulationProfile::constant(double r0_squared) {
  ModulationProfile profile;
  profile.kind = ModulationKind::Constant;
  profile.r0_squared = r0_squared;
  profile.validate();
  return profile;
}

ModulationProfile ModulationProfile::harmonic(double r0_squared, double epsilon, double nu,
                                              double phi0) {
  ModulationProfile profile;
  profile.kind = ModulationKind::Harmonic;
  profile.r0_squared = r0_squared;
  profile.epsilon = epsilon;
  profile.nu = nu;
  profile.phi0 = phi0;
  profile.validate();
  return profile;
}

void ModulationProfile::validate() const {
  require_nonnegative(r0_squared, "r0_squared");
  require_nonnegative(epsilon, "epsilon");
  require_nonnegative(nu, "nu");
  if (!std::isfinite(phi0)) throw DomainError("phi0 must be finite");
}

bool ModulationProfile::is_static() const {
  return kind == ModulationKind::Constant || epsilon == 0.0 || nu == 0.0 || r0_squared == 0.0;
}

double coupling_at(const ModulationProfile& profile, double tau) {
  if (profile.kind == ModulationKind::Constant) return profile.r0_squared;
  const double f = 1.0 + profile.epsilon * std::cos(profile.nu * tau + profile.phi0);
  return profile.r0_squared * f * f;
}

double max_coupling(const ModulationProfile& profile) {
  if (profile.kind == ModulationKind::Constant) return profile.r0_squared;
  if (profile.nu == 0.0) return coupling_at(profile, 0.0);
  const double f = std::max(1.0 + profile.epsilon, std::abs(1.0 - profile.epsilon));
  return profile.r0_squared * f * f;
}

double cycle_average_coupling(const ModulationProfile& profile) {
  if (profile.kind == ModulationKind::Constant) return profile.r0_squared;
  if (profile.nu == 0.0) return coupling_at(profile, 0.0);
  return profile.r0_squared * (1.0 + 0.5 * profile.epsilon * profile.epsilon);
}

double effective_coupling_scale(double rabi_squared, double detuning, double recoil) {
  if (!(detuning > 0.0)) throw DomainError("detuning must be > 0");
  if (!(recoil > 0.0)) throw DomainError("recoil frequency must be > 0");
  require_nonnegative(rabi_squared, "rabi_squared");
  return rabi_squared / (2.0 * detuning * recoil);
}

ValidityDiagnostic validity_check(double rabi, double detuning, double linewidth) {
  ValidityDiagnostic diag;
  const double scale = std::max(rabi, linewidth);
  diag.ratio = scale > 0.0 ? detuning / scale : std::numeric_limits<double>::infinity();
  if (detuning < kAdiabaticFactor * scale) {
    diag.status = Validity::Warn;
    std::ostringstream os;
    os << "detuning is only " << diag.ratio
       << "x max(rabi, linewidth); adiabatic elimination needs >= " << kAdiabaticFactor << "x";
    diag.message = os.str();
  } else {
    diag.status = Validity::Pass;
    diag.message = "ok";
  }
  return diag;
}

MomentumGrid::MomentumGrid(int sublattice_count, int shell_halfwidth)
    : sublattices_(sublattice_count), halfwidth_(shell_halfwidth) {
  if (sublattice_count < 1) throw DomainError("sublattice count must be >= 1");
  if (shell_halfwidth < 1) throw DomainError("shell halfwidth must be >= 1");
}

WaveFunction::WaveFunction(MomentumGrid grid) : grid_(grid), amps_(grid.size()) {}

std::span<cplx> WaveFunction::sublattice(int m) {
  return std::span<cplx>(amps_).subspan(index(m, -grid_.shell_halfwidth()),
                                        static_cast<std::size_t>(grid_.shells_per_sublattice()));
}

std::span<const cplx> WaveFunction::sublattice(int m) const {
  return std::span<const cplx>(amps_).subspan(index(m, -grid_.shell_halfwidth()),
                                              static_cast<std::size_t>(grid_.shells_per_sublattice()));
}

void SimParams::validate() const {
  require_nonnegative(tau_end, "tau_end");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("dt must be > 0");
  if (!(delta_p > 0.0) || !std::isfinite(delta_p)) throw DomainError("delta_p must be > 0");
}

double gaussian_profile(double p, double delta_p) {
  const double x = p / delta_p;
  return std::exp(-x * x) / std::sqrt(2.0 * std::numbers::pi);
}

int minimal_halfwidth(double delta_p) {
  if (!(delta_p > 0.0)) throw DomainError("delta_p must be > 0");
  const double edge = delta_p * std::sqrt(-std::log(kEdgeTolerance));
  int n = 1;
  while (2.0 * n + 1.0 <= edge) ++n;
  return n;
}

WaveFunction gaussian_initial(const MomentumGrid& grid, double delta_p) {
  if (!(delta_p > 0.0)) throw DomainError("delta_p must be > 0");
  const double edge = grid.momentum_extent() / delta_p;
  if (!(std::exp(-edge * edge) < kEdgeTolerance)) {
    std::ostringstream os;
    os << "grid with shell halfwidth " << grid.shell_halfwidth() << " is too narrow for delta_p = "
       << delta_p << "; need at least " << minimal_halfwidth(delta_p);
    throw ConfigurationError(os.str());
  }
  WaveFunction psi(grid);
  const int half = grid.shell_halfwidth();
  for (int m = 0; m < grid.sublattice_count(); ++m)
    for (int n = -half; n <= half; ++n) psi.at(m, n) = gaussian_profile(grid.momentum(m, n), delta_p);

  const double scale = 1.0 / std::sqrt(total_norm(psi));
  for (auto& a : psi.amplitudes()) a *= scale;
  return psi;
}

WaveFunction hamiltonian_apply(const WaveFunction& psi, double r_squared) {
  if (!(r_squared >= 0.0)) throw DomainError("r_squared must be >= 0");
  const MomentumGrid& grid = psi.grid();
  WaveFunction out(grid);
  const int half = grid.shell_halfwidth();
  const double hop = 0.5 * r_squared;
  for (int m = 0; m < grid.sublattice_count(); ++m) {
    const auto in = psi.sublattice(m);
    auto res = out.sublattice(m);
    const auto len = in.size();
    for (std::size_t i = 0; i < len; ++i) {
      const double p = grid.momentum(m, static_cast<int>(i) - half);
      cplx v = (p * p + r_squared) * in[i];
      if (i > 0) v += hop * in[i - 1];
      if (i + 1 < len) v += hop * in[i + 1];
      res[i] = v;
    }
  }
  return out;
}

double total_norm(const WaveFunction& psi) {
  double sum = 0.0;
  for (const auto& a : psi.amplitudes()) sum += std::norm(a);
  return sum * psi.grid().spacing();
}

cplx inner_product(const WaveFunction& a, const WaveFunction& b) {
  if (!(a.grid() == b.grid())) throw DomainError("inner product of states on different grids");
  cplx sum = 0.0;
  const auto x = a.amplitudes();
  const auto y = b.amplitudes();
  for (std::size_t i = 0; i < x.size(); ++i) sum += std::conj(x[i]) * y[i];
  return sum * a.grid().spacing();
}

}  // namespace atomsplit
