#include <doctest.h>

#include <cmath>
#include <cstring>

#include "atomsplit/propagator.hpp"
#include "atomsplit/shells.hpp"
#include "oracles.hpp"

using namespace atomsplit;

namespace {

bool bitwise_equal(const WaveFunction& a, const WaveFunction& b) {
  const auto x = a.amplitudes();
  const auto y = b.amplitudes();
  return x.size() == y.size() && std::memcmp(x.data(), y.data(), x.size_bytes()) == 0;
}

// Unit amplitude at p = 0 on a two-sublattice grid (q = 0 is m = 1, dp = 1).
WaveFunction centre_state(int halfwidth) {
  WaveFunction psi(MomentumGrid(2, halfwidth));
  psi.at(1, 0) = 1.0;
  return psi;
}

}  // namespace

TEST_CASE("default time step bounds the phase per step") {
  CHECK(default_time_step(ModulationProfile::harmonic(280.0, 0.8, 29.0)) == doctest::Approx(0.05 / 907.2));
  CHECK(default_time_step(ModulationProfile::constant(300.0)) == doctest::Approx(0.05 / 300.0));
  CHECK(default_time_step(ModulationProfile::constant(0.0)) == 0.01);
}

TEST_CASE("free evolution leaves the density unchanged") {
  const MomentumGrid grid(16, 4);
  const WaveFunction psi0 = gaussian_initial(grid, 0.5);
  const auto result = propagate(psi0, ModulationProfile::constant(0.0), {0.5, 1e-3, 0.5});
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(std::abs(std::norm(result.final_state.amplitudes()[i]) - std::norm(psi0.amplitudes()[i])) < 1e-12);
  CHECK(result.norm_drift < 1e-13);
  CHECK(result.steps == 500);
}

TEST_CASE("three-site lattice follows the three-shell populations") {
  const double tau = three_shell_splitting_time(300.0, 0) * 1.7;
  const auto profile = ModulationProfile::constant(300.0);
  const auto ref = three_shell_amplitudes(300.0, tau);
  const auto fine = propagate(centre_state(1), profile, {tau, 2e-6, 0.5});
  CHECK(std::abs(std::norm(fine.final_state.at(1, 0)) - ref.a0) < 1e-6);
  CHECK(std::abs(std::norm(fine.final_state.at(1, 1)) - ref.a1) < 1e-6);
  CHECK(std::abs(std::norm(fine.final_state.at(1, -1)) - ref.a1) < 1e-6);
}

TEST_CASE("truncated lattice matches the shell integrator") {
  const auto profile = ModulationProfile::constant(300.0);
  for (int halfwidth : {1, 2}) {
    const double tau = 0.02;
    const std::vector<double> at{tau};
    const auto shells = integrate_shells(halfwidth, profile, tau, 1e-12, false, at).back();
    const auto lattice = propagate(centre_state(halfwidth), profile, {tau, 1e-7, 0.5});
    for (int n = -halfwidth; n <= halfwidth; ++n)
      CHECK(std::abs(lattice.final_state.at(1, n) - shells.y[std::abs(n)]) < 1e-8);
  }
}

TEST_CASE("Cayley propagation converges to a dense reference") {
  const auto profile = ModulationProfile::harmonic(150.0, 0.8, 29.0, 0.4);
  const MomentumGrid grid(4, 3);
  const WaveFunction psi0 = gaussian_initial(grid, 0.5);
  const double tau = 0.05;
  const auto result = propagate(psi0, profile, {tau, 5e-7, 0.5});
  for (int m = 0; m < 4; ++m) {
    const auto gen = [&](double t) { return oracle::lattice_generator(grid.offset(m), 3, coupling_at(profile, t)); };
    const auto in = psi0.sublattice(m);
    const auto ref = oracle::rk4(gen, std::vector<cplx>(in.begin(), in.end()), 0.0, tau, 200000);
    const auto out = result.final_state.sublattice(m);
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(out[i] - ref[i]) < 1e-6);
  }
}

TEST_CASE("propagation is unitary and parity symmetric") {
  const auto profile = ModulationProfile::harmonic(280.0, 0.8, 29.0);
  const MomentumGrid grid(16, 40);
  const auto result = propagate(gaussian_initial(grid, 0.5), profile, {0.2, default_time_step(profile), 0.5});
  CHECK(result.norm_drift < 1e-10);
  CHECK(std::abs(total_norm(result.final_state) - 1.0) < 1e-10);
  const int half = grid.shell_halfwidth();
  for (int m = 0; m < 16; ++m)
    for (int n = -half; n <= half; ++n) {
      const double d = std::norm(result.final_state.at(m, n));
      // -(q + 2n) = q' + 2n' with q' = -q (m' = 16 - m) or q' = -1 for q = -1.
      const int mm = m == 0 ? 0 : 16 - m;
      const int nn = m == 0 ? 1 - n : -n;
      if (std::abs(nn) <= half) {
        CHECK(std::abs(d - std::norm(result.final_state.at(mm, nn))) < 1e-10);
      } else {
        CHECK(d < 1e-10);
      }
    }
}

TEST_CASE("sublattices evolve independently and deterministically") {
  const auto profile = ModulationProfile::harmonic(280.0, 0.8, 29.0);
  const MomentumGrid grid(8, 10);
  const WaveFunction psi0 = gaussian_initial(grid, 0.5);
  const SimParams params{0.05, default_time_step(profile), 0.5};

  const auto joint = propagate(psi0, profile, params);
  PropagationOptions threaded;
  threaded.jobs = 4;
  CHECK(bitwise_equal(joint.final_state, propagate(psi0, profile, params, threaded).final_state));

  WaveFunction assembled(grid);
  for (int m = 0; m < 8; ++m) {
    WaveFunction isolated(grid);
    const auto src = psi0.sublattice(m);
    std::copy(src.begin(), src.end(), isolated.sublattice(m).begin());
    PropagationOptions loose;
    loose.norm_tolerance = 1.0;  // isolated pieces are not normalized
    const auto part = propagate(isolated, profile, params, loose);
    for (int k = 0; k < 8; ++k)
      if (k != m)
        for (const auto& a : part.final_state.sublattice(k)) CHECK(a == cplx{});
    const auto piece = part.final_state.sublattice(m);
    std::copy(piece.begin(), piece.end(), assembled.sublattice(m).begin());
  }
  CHECK(bitwise_equal(joint.final_state, assembled));
}

TEST_CASE("snapshots land on the requested times") {
  const auto profile = ModulationProfile::constant(300.0);
  const WaveFunction psi0 = gaussian_initial(MomentumGrid(4, 6), 0.5);
  PropagationOptions options;
  options.snapshot_times = {0.01, 0.02};
  const auto result = propagate(psi0, profile, {0.03, 1e-3, 0.5}, options);
  REQUIRE(result.snapshots.size() == 2);
  CHECK(result.snapshots[0].tau == 0.01);
  CHECK(result.snapshots[1].tau == 0.02);
  CHECK(result.steps == 30);
  const auto direct = propagate(psi0, profile, {0.01, 1e-3, 0.5});
  CHECK(bitwise_equal(direct.final_state, result.snapshots[0].state));

  options.snapshot_times = {0.05};
  CHECK_THROWS_AS(propagate(psi0, profile, {0.03, 1e-3, 0.5}, options), DomainError);
}

TEST_CASE("norm drift and truncation diagnostics") {
  const auto profile = ModulationProfile::constant(300.0);
  const WaveFunction psi0 = gaussian_initial(MomentumGrid(4, 2), 0.5);
  const auto narrow = propagate(psi0, profile, {0.05, 1e-4, 0.5});
  CHECK(narrow.truncation_warning);
  CHECK(narrow.boundary_mass > 1e-8);

  PropagationOptions strict;
  strict.norm_tolerance = 1e-300;
  CHECK_THROWS_AS(propagate(psi0, ModulationProfile::harmonic(300.0, 0.8, 29.0), {0.05, 1e-4, 0.5}, strict),
                  PropagationError);
  CHECK_THROWS_AS(propagate(psi0, profile, {0.05, 0.0, 0.5}), DomainError);
}

TEST_CASE("density distance pads the narrower grid") {
  const WaveFunction a = gaussian_initial(MomentumGrid(4, 3), 0.5);
  CHECK(density_distance(a, a) == 0.0);
  WaveFunction b(MomentumGrid(4, 5));
  for (int m = 0; m < 4; ++m)
    for (int n = -3; n <= 3; ++n) b.at(m, n) = a.at(m, n);
  CHECK(density_distance(a, b) == 0.0);
  b.at(0, 5) = 1.0;
  CHECK(density_distance(a, b) == doctest::Approx(0.25));
  CHECK_THROWS_AS(density_distance(a, WaveFunction(MomentumGrid(8, 3))), DomainError);
}

TEST_CASE("auto truncation") {
  const SimParams params{0.3, 1e-3, 0.5};
  CHECK(auto_truncation(ModulationProfile::constant(0.0), params, 1e-6) == minimal_halfwidth(0.5));

  const auto profile = ModulationProfile::constant(300.0);
  const SimParams run{0.05, default_time_step(profile), 0.5};
  const int n = auto_truncation(profile, run, 1e-6, {8, 256, 1});
  CHECK(n >= 4);
  const auto at = [&](int halfwidth) {
    return propagate(gaussian_initial(MomentumGrid(8, halfwidth), 0.5), profile, run).final_state;
  };
  CHECK(density_distance(at(n), at(2 * n)) < 1e-6);
  CHECK(density_distance(at(n / 2), at(n)) >= 1e-6);

  CHECK_THROWS_AS(auto_truncation(profile, run, 1e-6, {8, 2, 1}), ConfigurationError);
  CHECK_THROWS_AS(auto_truncation(profile, run, 0.0), DomainError);
}
