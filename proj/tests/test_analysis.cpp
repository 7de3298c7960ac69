#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "atomsplit/analysis.hpp"

using namespace atomsplit;

namespace {

MomentumDistribution sampled(double lo, double hi, double dp, const auto& f) {
  MomentumDistribution d;
  d.dp = dp;
  for (double p = lo; p <= hi + 1e-9; p += dp) {
    d.p.push_back(p);
    d.density.push_back(f(p));
  }
  return d;
}

SweepSettings small_settings() {
  SweepSettings s;
  s.sublattice_count = 4;
  s.shell_halfwidth = 8;
  return s;
}

const SplittingObjective kObjective{10.0, 3.0, 0.02};

}  // namespace

TEST_CASE("distribution is ordered and carries the norm") {
  const MomentumGrid grid(16, 5);
  const auto dist = distribution(gaussian_initial(grid, 0.5));
  REQUIRE(dist.p.size() == grid.size());
  CHECK(std::is_sorted(dist.p.begin(), dist.p.end()));
  CHECK(std::adjacent_find(dist.p.begin(), dist.p.end()) == dist.p.end());
  CHECK(dist.dp == doctest::Approx(0.125));
  CHECK(dist.mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dist.window_mass(0.0, 100.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dist.window_mass(0.0, 0.5) == doctest::Approx(std::erf(std::sqrt(2.0))).epsilon(0.03));
}

TEST_CASE("window mass includes both edges") {
  const auto d = sampled(-2.0, 2.0, 1.0, [](double) { return 1.0; });
  CHECK(d.window_mass(0.0, 1.0) == 3.0);
  CHECK(d.window_mass(0.5, 0.5) == 2.0);
}

TEST_CASE("single Gaussian yields one central peak") {
  const auto d = sampled(-10.0, 10.0, 0.125, [](double p) { return std::exp(-p * p / 0.25); });
  const auto peaks = detect_peaks(d, 0.02);
  REQUIRE(peaks.size() == 1);
  CHECK(peaks[0].location == 0.0);
  CHECK(peaks[0].height == 1.0);
}

TEST_CASE("symmetric bumps are ordered by height, then position") {
  const auto d = sampled(-60.0, 60.0, 0.5, [](double p) {
    return std::exp(-(p - 40) * (p - 40)) + std::exp(-(p + 40) * (p + 40)) + 0.5 * std::exp(-p * p);
  });
  const auto peaks = detect_peaks(d, 0.02);
  REQUIRE(peaks.size() == 3);
  CHECK(peaks[0].location == -40.0);
  CHECK(peaks[1].location == 40.0);
  CHECK(peaks[2].location == 0.0);
  CHECK(detect_peaks(d, 0.6).size() == 2);
  CHECK(splitting_metric(d, 40.0, 6.0) > 0.79);
  CHECK(splitting_metric(d, 40.0, 6.0) < 0.81);
}

TEST_CASE("plateaus and flat densities have no strict maxima") {
  const auto flat = sampled(-5.0, 5.0, 1.0, [](double) { return 1.0; });
  CHECK(detect_peaks(flat, 0.5).empty());
  const auto zero = sampled(-5.0, 5.0, 1.0, [](double) { return 0.0; });
  CHECK(detect_peaks(zero, 0.5).empty());
  CHECK(splitting_metric(zero, 2.0, 1.0) == 0.0);
  CHECK(detect_peaks(MomentumDistribution{}, 0.5).empty());
}

TEST_CASE("peak fraction must lie strictly inside the unit interval") {
  const auto d = sampled(-5.0, 5.0, 1.0, [](double p) { return std::exp(-p * p); });
  CHECK_THROWS_AS(detect_peaks(d, 0.0), DomainError);
  CHECK_THROWS_AS(detect_peaks(d, 1.0), DomainError);
  CHECK_THROWS_AS(detect_peaks(d, std::numeric_limits<double>::quiet_NaN()), DomainError);
}

TEST_CASE("splitting metric") {
  const auto twin = sampled(-50.0, 50.0, 1.0, [](double p) { return std::abs(std::abs(p) - 40.0) <= 2.0 ? 1.0 : 0.0; });
  CHECK(splitting_metric(twin, 40.0, 6.0) == 1.0);
  const auto centred = sampled(-50.0, 50.0, 1.0, [](double p) { return p == 0.0 ? 1.0 : 0.0; });
  CHECK(splitting_metric(centred, 40.0, 6.0) == 0.0);

  const auto broad = sampled(-80.0, 80.0, 0.25, [](double p) { return std::exp(-p * p / 900.0); });
  double last = 0.0;
  for (double w = 1.0; w < 40.0; w += 3.0) {
    const double m = splitting_metric(broad, 40.0, w);
    CHECK(m >= last);
    CHECK(m <= 1.0);
    last = m;
  }
  CHECK_THROWS_AS(splitting_metric(broad, 6.0, 6.0), DomainError);
  CHECK_THROWS_AS(splitting_metric(broad, 40.0, 0.0), DomainError);
}

TEST_CASE("splitting report attaches window masses") {
  const auto d = sampled(-60.0, 60.0, 0.5, [](double p) {
    return std::exp(-(p - 40) * (p - 40)) + std::exp(-(p + 40) * (p + 40));
  });
  const auto report = splitting_report(d, {40.0, 6.0, 0.02});
  REQUIRE(report.peaks.size() == 2);
  CHECK(report.peaks[0].window_mass == doctest::Approx(d.mass() / 2).epsilon(1e-9));
  CHECK(report.metric == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(report.p_star == 40.0);
}

TEST_CASE("sweep grid enumerates tau fastest") {
  const SweepGrid grid{{0.0, 0.5}, {10.0, 20.0}, {100.0}, {0.01, 0.02, 0.03}};
  const auto pts = grid.points();
  REQUIRE(pts.size() == 12);
  CHECK(pts[0].tau_end == 0.01);
  CHECK(pts[1].tau_end == 0.02);
  CHECK(pts[3].nu == 20.0);
  CHECK(pts[6].epsilon == 0.5);
  CHECK(pts[11].epsilon == 0.5);
  CHECK(pts[11].nu == 20.0);
  CHECK(pts[11].tau_end == 0.03);
}

TEST_CASE("unmodulated sweep points ignore the frequency") {
  const auto a = run_sweep_point({0.0, 10.0, 100.0, 0.05}, small_settings(), kObjective);
  const auto b = run_sweep_point({0.0, 77.0, 100.0, 0.05}, small_settings(), kObjective);
  REQUIRE(a.ok);
  REQUIRE(b.ok);
  CHECK(a.metric == b.metric);
  CHECK(a.norm_drift == b.norm_drift);
  CHECK(sweep_profile({0.0, 10.0, 100.0, 0.05}, 0.0).kind == ModulationKind::Constant);
  CHECK(sweep_profile({0.3, 10.0, 100.0, 0.05}, 0.0).kind == ModulationKind::Harmonic);
}

TEST_CASE("sweep is deterministic and independent of order and threads") {
  const auto points = SweepGrid{{0.0, 0.8}, {29.0}, {60.0, 120.0}, {0.03}}.points();
  const auto serial = sweep(points, small_settings(), kObjective);
  auto threaded_settings = small_settings();
  threaded_settings.jobs = 3;
  const auto threaded = sweep(points, threaded_settings, kObjective);
  auto reversed = points;
  std::reverse(reversed.begin(), reversed.end());
  const auto backwards = sweep(reversed, small_settings(), kObjective);
  REQUIRE(serial.size() == points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    CHECK(serial[i].ok);
    CHECK(serial[i].metric == threaded[i].metric);
    CHECK(serial[i].peak_low == threaded[i].peak_low);
    CHECK(serial[i].metric == backwards[points.size() - 1 - i].metric);
    CHECK(serial[i].norm_drift == backwards[points.size() - 1 - i].norm_drift);
  }
}

TEST_CASE("failed points are recorded and the sweep carries on") {
  const std::vector<SweepPoint> points{{0.5, 10.0, 100.0, 0.02}, {0.5, 10.0, 100.0, -1.0}, {0.5, 10.0, -3.0, 0.02}};
  std::vector<std::size_t> seen;
  const auto rows = sweep(points, small_settings(), kObjective, 0,
                          [&](std::size_t i, const SweepRow&) { seen.push_back(i); });
  CHECK(rows[0].ok);
  CHECK_FALSE(rows[1].ok);
  CHECK_FALSE(rows[1].error.empty());
  CHECK_FALSE(rows[2].ok);
  CHECK(seen == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("sweep resumes from a given index") {
  const auto points = SweepGrid{{0.5}, {10.0}, {50.0, 100.0, 150.0}, {0.02}}.points();
  const auto full = sweep(points, small_settings(), kObjective);
  std::vector<std::size_t> seen;
  const auto tail = sweep(points, small_settings(), kObjective, 1,
                          [&](std::size_t i, const SweepRow&) { seen.push_back(i); });
  REQUIRE(tail.size() == 2);
  CHECK(seen == std::vector<std::size_t>{1, 2});
  CHECK(tail[0].metric == full[1].metric);
  CHECK(tail[1].norm_drift == full[2].norm_drift);
  CHECK_THROWS_AS(sweep({}, small_settings(), kObjective), DomainError);
}
