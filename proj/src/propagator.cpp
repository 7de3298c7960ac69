#include "atomsplit/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "atomsplit/parallel.hpp"

#if defined(__SSE2__)
#include <xmmintrin.h>
#endif

namespace atomsplit {

namespace {

constexpr cplx kI{0.0, 1.0};

// Far tails of the lattice decay into subnormal numbers, which are orders of
// magnitude slower on x86. Flush them to zero for the lifetime of the guard.
class FlushDenormals {
 public:
#if defined(__SSE2__)
  FlushDenormals() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040); }
  ~FlushDenormals() { _mm_setcsr(saved_); }

 private:
  unsigned int saved_;
#endif
};

struct Segment {
  double start;
  double length;
  long steps;
};

std::vector<Segment> make_schedule(const std::vector<double>& stops, double dt) {
  std::vector<Segment> schedule;
  double start = 0.0;
  for (double stop : stops) {
    const double length = stop - start;
    const long steps = length > 0.0 ? std::max(1L, static_cast<long>(std::ceil(length / dt - 1e-9))) : 0L;
    schedule.push_back({start, length, steps});
    start = stop;
  }
  return schedule;
}

// 1/z without the inf/nan handling of the library complex division; the
// pivots here are bounded away from zero.
cplx reciprocal(cplx z) {
  const double scale = 1.0 / (z.real() * z.real() + z.imag() * z.imag());
  return {z.real() * scale, -z.imag() * scale};
}

// Cayley step workspace for one sublattice.
class SublatticeStepper {
 public:
  SublatticeStepper(const MomentumGrid& grid, int m) : kinetic_(static_cast<std::size_t>(grid.shells_per_sublattice())) {
    const int half = grid.shell_halfwidth();
    for (std::size_t i = 0; i < kinetic_.size(); ++i) {
      const double p = grid.momentum(m, static_cast<int>(i) - half);
      kinetic_[i] = p * p;
    }
    rhs_.resize(kinetic_.size());
    sweep_.resize(kinetic_.size());
  }

  // psi <- (1 + i h H)^{-1} (1 - i h H) psi, h = dt / 2.
  void step(std::span<cplx> psi, double r_squared, double dt) {
    const std::size_t len = psi.size();
    const double h = 0.5 * dt;
    const cplx off = kI * (h * 0.5 * r_squared);

    for (std::size_t i = 0; i < len; ++i) {
      cplx v = (1.0 - kI * (h * (kinetic_[i] + r_squared))) * psi[i];
      if (i > 0) v -= off * psi[i - 1];
      if (i + 1 < len) v -= off * psi[i + 1];
      rhs_[i] = v;
    }

    // Thomas elimination; the matrix is strictly diagonally dominant.
    cplx pivot = 1.0 + kI * (h * (kinetic_[0] + r_squared));
    cplx inv = reciprocal(pivot);
    sweep_[0] = off * inv;
    rhs_[0] *= inv;
    for (std::size_t i = 1; i < len; ++i) {
      pivot = 1.0 + kI * (h * (kinetic_[i] + r_squared)) - off * sweep_[i - 1];
      inv = reciprocal(pivot);
      sweep_[i] = off * inv;
      rhs_[i] = (rhs_[i] - off * rhs_[i - 1]) * inv;
    }
    psi[len - 1] = rhs_[len - 1];
    for (std::size_t i = len - 1; i-- > 0;) psi[i] = rhs_[i] - sweep_[i] * psi[i + 1];
  }

 private:
  std::vector<double> kinetic_;
  std::vector<cplx> rhs_;
  std::vector<cplx> sweep_;
};

}  // namespace

double default_time_step(const ModulationProfile& profile) {
  const double peak = max_coupling(profile);
  return peak > 0.0 ? kPhasePerStep / peak : 0.01;
}

double boundary_mass(const WaveFunction& psi) {
  const MomentumGrid& grid = psi.grid();
  const int half = grid.shell_halfwidth();
  double sum = 0.0;
  for (int m = 0; m < grid.sublattice_count(); ++m)
    for (int n = -half; n <= half; ++n)
      if (std::abs(n) >= half - 1) sum += std::norm(psi.at(m, n));
  return sum * grid.spacing();
}

PropagationResult propagate(const WaveFunction& psi0, const ModulationProfile& profile, const SimParams& params,
                            const PropagationOptions& options) {
  profile.validate();
  params.validate();

  std::vector<double> stops = options.snapshot_times;
  for (std::size_t i = 0; i < stops.size(); ++i) {
    if (!(stops[i] > 0.0) || stops[i] > params.tau_end)
      throw DomainError("snapshot times must lie in (0, tau_end]");
    if (i > 0 && stops[i] < stops[i - 1]) throw DomainError("snapshot times must be sorted");
  }
  const std::size_t snapshot_count = stops.size();
  stops.push_back(params.tau_end);
  const std::vector<Segment> schedule = make_schedule(stops, params.dt);

  const MomentumGrid& grid = psi0.grid();
  PropagationResult result{psi0, {}, 0.0, 0.0, false, 0, params.dt};
  std::vector<WaveFunction> snapshot_states(snapshot_count, WaveFunction(grid));

  detail::parallel_for(static_cast<std::size_t>(grid.sublattice_count()), options.jobs, [&](std::size_t index) {
    const int m = static_cast<int>(index);
    const FlushDenormals ftz;
    SublatticeStepper stepper(grid, m);
    auto psi = result.final_state.sublattice(m);
    for (std::size_t s = 0; s < schedule.size(); ++s) {
      const Segment& seg = schedule[s];
      if (seg.steps > 0) {
        const double h = seg.length / static_cast<double>(seg.steps);
        for (long k = 0; k < seg.steps; ++k) {
          const double mid = seg.start + (static_cast<double>(k) + 0.5) * h;
          stepper.step(psi, coupling_at(profile, mid), h);
        }
      }
      if (s < snapshot_count) {
        auto dst = snapshot_states[s].sublattice(m);
        std::copy(psi.begin(), psi.end(), dst.begin());
      }
    }
  });

  for (const Segment& seg : schedule) result.steps += seg.steps;
  for (std::size_t s = 0; s < snapshot_count; ++s)
    result.snapshots.push_back({stops[s], std::move(snapshot_states[s])});

  const double initial = total_norm(psi0);
  const double final = total_norm(result.final_state);
  result.norm_drift = initial > 0.0 ? std::abs(final - initial) / initial : std::abs(final - initial);
  result.boundary_mass = boundary_mass(result.final_state);
  result.truncation_warning = result.boundary_mass > options.boundary_threshold;

  if (result.norm_drift > options.norm_tolerance) {
    std::ostringstream os;
    os << "norm drift " << result.norm_drift << " exceeds tolerance " << options.norm_tolerance << " after "
       << result.steps << " steps (dt = " << params.dt << ", N = " << grid.shell_halfwidth() << ")";
    throw PropagationError(os.str());
  }
  return result;
}

double density_distance(const WaveFunction& a, const WaveFunction& b) {
  const MomentumGrid& ga = a.grid();
  const MomentumGrid& gb = b.grid();
  if (ga.sublattice_count() != gb.sublattice_count())
    throw DomainError("density distance needs equal sublattice counts");
  const int wide = std::max(ga.shell_halfwidth(), gb.shell_halfwidth());
  auto density = [](const WaveFunction& psi, int m, int n) {
    const int half = psi.grid().shell_halfwidth();
    return std::abs(n) <= half ? std::norm(psi.at(m, n)) : 0.0;
  };
  double sum = 0.0;
  for (int m = 0; m < ga.sublattice_count(); ++m)
    for (int n = -wide; n <= wide; ++n) sum += std::abs(density(a, m, n) - density(b, m, n));
  return 0.5 * sum * ga.spacing();
}

int auto_truncation(const ModulationProfile& profile, const SimParams& params, double tol,
                    const TruncationOptions& options) {
  if (!(tol > 0.0)) throw DomainError("truncation tolerance must be > 0");
  params.validate();
  PropagationOptions prop;
  prop.jobs = options.jobs;
  auto final_state = [&](int halfwidth) {
    const MomentumGrid grid(options.sublattice_count, halfwidth);
    return propagate(gaussian_initial(grid, params.delta_p), profile, params, prop).final_state;
  };

  int halfwidth = minimal_halfwidth(params.delta_p);
  WaveFunction current = final_state(halfwidth);
  while (halfwidth <= options.cap) {
    WaveFunction doubled = final_state(2 * halfwidth);
    if (density_distance(current, doubled) < tol) return halfwidth;
    halfwidth *= 2;
    current = std::move(doubled);
  }
  std::ostringstream os;
  os << "truncation search exceeded the cap of " << options.cap
     << " shells; reduce the interaction time or the coupling";
  throw ConfigurationError(os.str());
}

}  // namespace atomsplit
