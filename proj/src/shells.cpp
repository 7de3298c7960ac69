#include "atomsplit/shells.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace atomsplit {

namespace {

constexpr cplx kI{0.0, 1.0};
const double kSqrt2 = std::numbers::sqrt2;
const double kSqrt3 = std::numbers::sqrt3;

void require_nonnegative(double value, const char* name) {
  if (!(value >= 0.0)) throw DomainError(std::string(name) + " must be >= 0");
}

// The hierarchy is symmetrized by z_0 = y_0, z_n = sqrt(2) y_n, which turns
// the weighted norm into the Euclidean one and the generator into the real
// symmetric matrix H = K + R^2 B.
struct ShellOperators {
  Eigen::MatrixXd kinetic;   // K
  Eigen::MatrixXd coupling;  // B
  Eigen::MatrixXd commutator;  // [B, K]
};

ShellOperators make_operators(int halfwidth, bool drop_kinetic) {
  const int dim = halfwidth + 1;
  ShellOperators ops;
  ops.kinetic = Eigen::MatrixXd::Zero(dim, dim);
  ops.coupling = Eigen::MatrixXd::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) {
    if (!drop_kinetic) ops.kinetic(n, n) = 4.0 * n * n;
    ops.coupling(n, n) = 1.0;
    if (n + 1 < dim) {
      const double hop = n == 0 ? 1.0 / kSqrt2 : 0.5;
      ops.coupling(n, n + 1) = hop;
      ops.coupling(n + 1, n) = hop;
    }
  }
  ops.commutator = ops.coupling * ops.kinetic - ops.kinetic * ops.coupling;
  return ops;
}

Eigen::VectorXcd to_symmetric(const std::vector<cplx>& y) {
  Eigen::VectorXcd z(static_cast<Eigen::Index>(y.size()));
  for (std::size_t n = 0; n < y.size(); ++n) z(static_cast<Eigen::Index>(n)) = n == 0 ? y[n] : kSqrt2 * y[n];
  return z;
}

std::vector<cplx> from_symmetric(const Eigen::VectorXcd& z) {
  std::vector<cplx> y(static_cast<std::size_t>(z.size()));
  for (Eigen::Index n = 0; n < z.size(); ++n) y[static_cast<std::size_t>(n)] = n == 0 ? z(n) : z(n) / kSqrt2;
  return y;
}

// exp(-i X) z for Hermitian X.
Eigen::VectorXcd apply_unitary(const Eigen::MatrixXcd& generator, const Eigen::VectorXcd& z) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(generator);
  const Eigen::MatrixXcd& v = eig.eigenvectors();
  Eigen::VectorXcd c = v.adjoint() * z;
  for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::exp(-kI * eig.eigenvalues()(k));
  return v * c;
}

// Fourth-order Magnus step over [tau, tau + h] using the two Gauss points.
Eigen::VectorXcd magnus_step(const ShellOperators& ops, const ModulationProfile& profile,
                             const Eigen::VectorXcd& z, double tau, double h) {
  const double c1 = 0.5 - kSqrt3 / 6.0;
  const double c2 = 0.5 + kSqrt3 / 6.0;
  const double r1 = coupling_at(profile, tau + c1 * h);
  const double r2 = coupling_at(profile, tau + c2 * h);
  const Eigen::MatrixXd mean = h * ops.kinetic + (0.5 * h * (r1 + r2)) * ops.coupling;
  const double twist = kSqrt3 / 12.0 * h * h * (r2 - r1);
  const Eigen::MatrixXcd generator = mean.cast<cplx>() - kI * twist * ops.commutator.cast<cplx>();
  return apply_unitary(generator, z);
}

std::vector<double> checked_samples(std::span<const double> sample_times, double tau0, double tau_end) {
  std::vector<double> samples(sample_times.begin(), sample_times.end());
  if (samples.empty()) {
    samples = uniform_samples(tau_end - tau0);
    for (auto& s : samples) s += tau0;
    samples.back() = tau_end;
  }
  const double slack = 1e-12 * std::max(1.0, std::abs(tau_end));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i] < tau0 - slack || samples[i] > tau_end + slack)
      throw DomainError("sample time outside the integration interval");
    if (i > 0 && samples[i] < samples[i - 1]) throw DomainError("sample times must be sorted");
  }
  return samples;
}

}  // namespace

ShellState ShellState::ground(int halfwidth) {
  if (halfwidth < 1) throw DomainError("shell halfwidth must be >= 1");
  ShellState s;
  s.y.assign(static_cast<std::size_t>(halfwidth) + 1, cplx{0.0, 0.0});
  s.y[0] = 1.0;
  return s;
}

double ShellState::weighted_norm() const {
  double sum = 0.0;
  for (std::size_t n = 0; n < y.size(); ++n) sum += (n == 0 ? 1.0 : 2.0) * std::norm(y[n]);
  return sum;
}

std::vector<double> ShellState::amplitudes() const {
  std::vector<double> a(y.size());
  std::transform(y.begin(), y.end(), a.begin(), [](cplx v) { return std::norm(v); });
  return a;
}

std::vector<cplx> shell_rhs(const ShellState& state, double r_squared, bool drop_kinetic) {
  require_nonnegative(r_squared, "r_squared");
  const auto& y = state.y;
  const std::size_t size = y.size();
  std::vector<cplx> dy(size);
  for (std::size_t n = 0; n < size; ++n) {
    const double kinetic = drop_kinetic ? 0.0 : 4.0 * static_cast<double>(n * n);
    const cplx upper = n + 1 < size ? y[n + 1] : cplx{};
    cplx h = (kinetic + r_squared) * y[n];
    if (n == 0) {
      h += r_squared * upper;
    } else {
      h += 0.5 * r_squared * (y[n - 1] + upper);
    }
    dy[n] = -kI * h;
  }
  return dy;
}

ThreeShellState three_shell_solution(double r_squared, double tau) {
  require_nonnegative(r_squared, "r_squared");
  const double r4 = r_squared * r_squared;
  const double omega = std::sqrt(2.0 * r4 + 16.0) / 2.0;
  const double c1 = (omega + 2.0) / (2.0 * omega);
  const double c2 = (omega - 2.0) / (2.0 * omega);
  const cplx carrier = std::exp(-kI * ((r_squared + 2.0) * tau));
  const cplx up = std::exp(kI * (omega * tau));
  const cplx down = std::exp(-kI * (omega * tau));
  // (omega - 2) C1 = (omega + 2) C2 = R^4 / (4 omega); written out to avoid
  // the cancellation in omega - 2 and the 1/R^2 singularity.
  const double weight = r_squared / (4.0 * omega);
  return {carrier * (c1 * up + c2 * down), carrier * weight * (down - up)};
}

ThreeShellAmplitudes three_shell_amplitudes(double r_squared, double tau) {
  require_nonnegative(r_squared, "r_squared");
  const double r4 = r_squared * r_squared;
  const double root = std::sqrt(2.0 * r4 + 16.0);
  const double s = std::sin(root * tau / 2.0);
  const double a1 = r4 / (2.0 * r4 + 16.0) * s * s;
  return {1.0 - 2.0 * a1, a1};
}

double three_shell_splitting_time(double r_squared, int k) {
  require_nonnegative(r_squared, "r_squared");
  if (k < 0) throw DomainError("splitting index k must be >= 0");
  return (2.0 * k + 1.0) * std::numbers::pi / std::sqrt(2.0 * r_squared * r_squared + 16.0);
}

double three_shell_period(double r_squared) {
  return 2.0 * three_shell_splitting_time(r_squared, 0);
}

FiveShellState five_shell_solution(double r_squared, double tau) {
  require_nonnegative(r_squared, "r_squared");
  const double phase = r_squared * tau;
  const cplx centre = std::exp(-kI * phase);
  const cplx slow = std::exp(-kI * (phase / (2.0 * (2.0 + kSqrt3))));
  const cplx fast = std::exp(-kI * (phase / (2.0 * (2.0 - kSqrt3))));
  return {(centre + slow + fast) / 3.0, kSqrt3 / 6.0 * (fast - slow),
          -centre / 3.0 + (slow + fast) / 6.0};
}

FiveShellAmplitudes five_shell_amplitudes(double r_squared, double tau) {
  require_nonnegative(r_squared, "r_squared");
  const double angle = kSqrt3 / 2.0 * r_squared * tau;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {(1.0 + 2.0 * c) * (1.0 + 2.0 * c) / 9.0, s * s / 3.0, (1.0 - c) * (1.0 - c) / 9.0};
}

double five_shell_splitting_time(double r_squared) {
  if (!(r_squared > 0.0)) throw DomainError("no splitting time for r_squared <= 0");
  return 2.0 * std::numbers::pi / (kSqrt3 * r_squared);
}

double five_shell_period(double r_squared) {
  return 2.0 * five_shell_splitting_time(r_squared);
}

cplx elder_shell_phase(int n, double tau, cplx y_n0) {
  if (n < 1) throw DomainError("elder shell index must be >= 1");
  const double nn = static_cast<double>(n) * n;
  return std::exp(-kI * (4.0 * nn * tau)) * y_n0;
}

std::vector<double> uniform_samples(double tau_end, int count) {
  if (count < 2) throw DomainError("need at least two samples");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) out[static_cast<std::size_t>(k)] = tau_end * k / (count - 1);
  out.back() = tau_end;
  return out;
}

std::vector<ShellState> integrate_shells(const ShellState& initial, const ModulationProfile& profile,
                                         double tau_end, double tol, bool drop_kinetic,
                                         std::span<const double> sample_times) {
  profile.validate();
  if (initial.halfwidth() < 1) throw DomainError("shell halfwidth must be >= 1");
  if (!(tol > 0.0)) throw DomainError("tol must be > 0");
  if (!(tau_end >= initial.tau)) throw DomainError("tau_end must not precede the initial time");

  const std::vector<double> samples = checked_samples(sample_times, initial.tau, tau_end);
  const ShellOperators ops = make_operators(initial.halfwidth(), drop_kinetic);
  std::vector<ShellState> trajectory;
  trajectory.reserve(samples.size());

  if (profile.is_static()) {
    const Eigen::MatrixXd h = ops.kinetic + coupling_at(profile, initial.tau) * ops.coupling;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
    const Eigen::MatrixXcd v = eig.eigenvectors().cast<cplx>();
    const Eigen::VectorXcd c0 = v.adjoint() * to_symmetric(initial.y);
    for (double t : samples) {
      Eigen::VectorXcd c = c0;
      for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::exp(-kI * (eig.eigenvalues()(k) * (t - initial.tau)));
      trajectory.push_back({from_symmetric(v * c), t});
    }
    return trajectory;
  }

  const double span = tau_end - initial.tau;
  const double min_step = 1e-15 * std::max(1.0, std::abs(tau_end));
  Eigen::VectorXcd z = to_symmetric(initial.y);
  double t = initial.tau;
  double h = std::min(span, 1.0 / (max_coupling(profile) + 4.0 * initial.halfwidth() * initial.halfwidth() + 1.0));

  for (double target : samples) {
    while (target - t > min_step) {
      const double step = std::min(h, target - t);
      const Eigen::VectorXcd whole = magnus_step(ops, profile, z, t, step);
      const Eigen::VectorXcd halves =
          magnus_step(ops, profile, magnus_step(ops, profile, z, t, 0.5 * step), t + 0.5 * step, 0.5 * step);
      const double err = (whole - halves).norm();
      const double allowed = tol * step / span;
      if (err <= allowed) {
        z = halves;
        t += step;
      }
      const double factor = err > 0.0 ? 0.9 * std::pow(allowed / err, 0.2) : 4.0;
      h = step * std::clamp(factor, 0.2, 4.0);
      if (h < min_step) {
        std::ostringstream os;
        os << "shell integration stalled at tau = " << t << ": step " << h << " below minimum, local error "
           << err << " vs allowed " << allowed;
        throw IntegrationError(os.str());
      }
    }
    trajectory.push_back({from_symmetric(z), target});
  }
  return trajectory;
}

std::vector<ShellState> integrate_shells(int halfwidth, const ModulationProfile& profile, double tau_end,
                                         double tol, bool drop_kinetic, std::span<const double> sample_times) {
  return integrate_shells(ShellState::ground(halfwidth), profile, tau_end, tol, drop_kinetic, sample_times);
}

}  // namespace atomsplit
