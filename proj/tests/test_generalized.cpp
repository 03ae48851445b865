#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "primesig/classical_sampling.hpp"
#include "primesig/generalized_sampling.hpp"
#include "primesig/grid.hpp"
#include "primesig/rng.hpp"
#include "primesig/sequences.hpp"

using namespace primesig;

namespace {

SampleLattice prime_lattice(std::uint64_t n) {
  return make_lattice(primes_first(n), SpeedScheme::Centered);
}

// Strictly increasing points with gaps drawn from [0.3, 5], plus matching
// random amplitudes in [-1, 1].
struct RandomLattice {
  SampleLattice lattice;
  std::vector<double> amplitudes;
};

RandomLattice random_lattice(std::size_t n, std::uint64_t seed) {
  CounterRng rng{seed};
  std::vector<double> pts(n);
  double t = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    t += 0.3 + 4.7 * rng.uniform(2 * i);
    pts[i] = t;
  }
  RandomLattice out{make_lattice(std::move(pts), SpeedScheme::Centered), {}};
  out.amplitudes.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.amplitudes[i] = 2.0 * rng.uniform(2 * i + 1) - 1.0;
  return out;
}

// 2001-point equidistant lattice t_n = n*pi with constant speeds pi, so the
// kernel's sinc limit appears with A = 1.
SampleLattice pi_lattice() {
  SampleLattice lat;
  for (int n = -1000; n <= 1000; ++n) lat.points.push_back(std::numbers::pi * n);
  lat.speeds.assign(lat.points.size(), std::numbers::pi);
  lat.scheme = SpeedScheme::Custom;
  return lat;
}

}  // namespace

TEST_CASE("centered speeds from prime gaps") {
  const SampleLattice lat = make_lattice(std::vector<double>{2, 3, 5, 7, 11}, SpeedScheme::Centered);
  REQUIRE(lat.speeds == std::vector<double>{0.5, 1.5, 2.0, 3.0, 2.0});
  REQUIRE(lat.scheme == SpeedScheme::Centered);
}

TEST_CASE("centered speeds for a two-point lattice") {
  const SampleLattice lat = make_lattice(std::vector<double>{0, 1}, SpeedScheme::Centered);
  REQUIRE(lat.speeds == std::vector<double>{0.5, 0.5});
}

TEST_CASE("forward speeds copy the last gap") {
  const SampleLattice lat = make_lattice(std::vector<double>{0, 1, 2, 3}, SpeedScheme::Forward);
  REQUIRE(lat.speeds == std::vector<double>{1, 1, 1, 1});
}

TEST_CASE("lattice construction rejects bad input") {
  REQUIRE_THROWS_AS(make_lattice(std::vector<double>{1}, SpeedScheme::Centered), ValidationError);
  REQUIRE_THROWS_AS(make_lattice(std::vector<double>{1, 1}, SpeedScheme::Centered), ValidationError);
  REQUIRE_THROWS_AS(make_lattice(std::vector<double>{2, 1}, SpeedScheme::Forward), ValidationError);
  REQUIRE_THROWS_AS(make_lattice(std::vector<double>{0, 1}, SpeedScheme::Custom), ValidationError);

  SampleLattice bad;
  bad.points = {0, 1};
  bad.speeds = {1, -1};
  REQUIRE_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("speed scheme names round-trip") {
  REQUIRE(speed_scheme_from_string(to_string(SpeedScheme::Centered)) == SpeedScheme::Centered);
  REQUIRE(speed_scheme_from_string(to_string(SpeedScheme::Forward)) == SpeedScheme::Forward);
  REQUIRE_THROWS_AS(speed_scheme_from_string("sideways"), ValidationError);
}

TEST_CASE("g function point values") {
  SampleLattice one;
  one.points = {0};
  one.speeds = {1};
  REQUIRE(g_function(2.0, one, {}) == 0.25);

  SampleLattice two;
  two.points = {-1, 1};
  two.speeds = {1, 1};
  REQUIRE(g_function(0.0, two, {}) == 2.0);

  REQUIRE_THROWS_AS(g_function(1.0, two, {}), PoleError);
  REQUIRE_THROWS_AS(g_function(1.0 + 1e-12, two, {}), PoleError);
}

TEST_CASE("g on the equidistant pi lattice matches the cosecant closed form") {
  const SampleLattice lat = pi_lattice();
  KernelEvalConfig cfg;
  cfg.truncation_count = 2000;
  const double t = std::numbers::pi / 2.0;
  // sum of pi / (t - n pi)^2 = pi / sin^2(t) for the infinite lattice
  REQUIRE(g_function(t, lat, cfg) == Catch::Approx(std::numbers::pi).margin(1e-3));
}

TEST_CASE("z counts lattice points strictly between the arguments") {
  const SampleLattice lat = make_lattice(std::vector<double>{2, 3, 5, 7, 11}, SpeedScheme::Centered);
  REQUIRE(z_count(6.0, 2.0, lat) == 2);
  REQUIRE(z_count(2.0, 6.0, lat) == 2);
  REQUIRE(z_count(7.0, 7.0, lat) == 0);
  REQUIRE(z_count(12.0, 11.0, lat) == 0);
  REQUIRE(z_count(1.0, 12.0, lat) == 5);
}

TEST_CASE("one-argument kernel hits its limit values") {
  const SampleLattice lat = prime_lattice(20);
  const KernelEvalConfig cfg;
  for (std::size_t n : {std::size_t{0}, std::size_t{4}, std::size_t{19}}) {
    const double t_n = lat.points[n];
    REQUIRE(kernel_g1(t_n, t_n, lat, cfg) == 1.0);
    REQUIRE(kernel_g1(t_n + 1e-6, t_n, lat, cfg) == Catch::Approx(1.0).margin(1e-6));
    REQUIRE(kernel_g1(t_n - 1e-6, t_n, lat, cfg) == Catch::Approx(1.0).margin(1e-6));
  }
  const double t5 = lat.points[5];
  REQUIRE(kernel_g1(t5, lat.points[2], lat, cfg) == 0.0);
  REQUIRE(std::abs(kernel_g1(t5 + 1e-6, lat.points[2], lat, cfg)) < 1e-5);
  REQUIRE_THROWS_AS(kernel_g1(4.0, 6.0, lat, cfg), ValidationError);
}

TEST_CASE("one-argument kernel reduces to sinc on the equidistant lattice") {
  const SampleLattice lat = pi_lattice();
  const KernelEvalConfig cfg;
  // central 10% of the span, avoiding lattice points themselves
  const double lo = -100.0 * std::numbers::pi;
  double worst = 0.0;
  for (int k = 0; k < 400; ++k) {
    const double t = lo + (k + 0.37) * std::numbers::pi / 2.0;
    const double want = t == 0.0 ? 1.0 : std::sin(t) / t;
    worst = std::max(worst, std::abs(kernel_g1(t, 0.0, lat, cfg) - want));
  }
  REQUIRE(worst < 1e-3);
}

TEST_CASE("one-argument kernel crosses sample points without jumps") {
  const SampleLattice lat = prime_lattice(50);
  const KernelEvalConfig cfg;
  const double t_n = 13.0;
  const double dt = 1e-3;
  double prev = kernel_g1(5.0, t_n, lat, cfg);
  double max_jump = 0.0;
  for (double t = 5.0 + dt; t <= 40.0; t += dt) {
    const double cur = kernel_g1(t, t_n, lat, cfg);
    max_jump = std::max(max_jump, std::abs(cur - prev));
    prev = cur;
  }
  // a sign-handling bug shows up as an O(1) jump at some prime
  REQUIRE(max_jump < 10.0 * dt);
}

TEST_CASE("two-argument kernel is 1 on the diagonal") {
  const SampleLattice lat = prime_lattice(30);
  const KernelEvalConfig cfg;
  for (double t : {2.5, 6.283, 17.12, 100.7}) {
    REQUIRE(kernel_g2(t, t, lat, cfg) == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("two-argument kernel is symmetric") {
  const SampleLattice lat = prime_lattice(30);
  const KernelEvalConfig cfg;
  CounterRng rng{99};
  for (std::uint64_t k = 0; k < 50; ++k) {
    const double s = 2.0 + 100.0 * rng.uniform(2 * k);
    const double t = 2.0 + 100.0 * rng.uniform(2 * k + 1);
    const double a = kernel_g2(s, t, lat, cfg);
    const double b = kernel_g2(t, s, lat, cfg);
    REQUIRE(a == Catch::Approx(b).margin(1e-14));
  }
}

TEST_CASE("two-argument kernel delegates to the one-argument form on the lattice") {
  const SampleLattice lat = prime_lattice(30);
  const KernelEvalConfig cfg;
  const double t = 18.4;
  REQUIRE(kernel_g2(13.0, t, lat, cfg) == kernel_g1(t, 13.0, lat, cfg));
  REQUIRE(kernel_g2(t, 13.0, lat, cfg) == kernel_g1(t, 13.0, lat, cfg));
  REQUIRE(kernel_g2(13.0, 17.0, lat, cfg) == 0.0);
  REQUIRE(kernel_g2(13.0, 13.0, lat, cfg) == 1.0);
}

TEST_CASE("kernels ignore a global speed rescaling") {
  const SampleLattice base = prime_lattice(40);
  const KernelEvalConfig cfg;
  for (double c : {0.1, 7.0}) {
    SampleLattice scaled = base;
    scaled.scheme = SpeedScheme::Custom;
    for (double& s : scaled.speeds) s *= c;
    CounterRng rng{123};
    for (std::uint64_t k = 0; k < 100; ++k) {
      const double s = 2.0 + 170.0 * rng.uniform(2 * k);
      const double t = 2.0 + 170.0 * rng.uniform(2 * k + 1);
      REQUIRE(kernel_g2(s, t, base, cfg) ==
              Catch::Approx(kernel_g2(s, t, scaled, cfg)).margin(1e-12));
      REQUIRE(kernel_g1(t, 13.0, base, cfg) ==
              Catch::Approx(kernel_g1(t, 13.0, scaled, cfg)).margin(1e-12));
    }
  }
}

TEST_CASE("truncation below eight points is rejected") {
  KernelEvalConfig cfg;
  cfg.truncation_count = 4;
  REQUIRE_THROWS_AS(cfg.validate(), ValidationError);
  cfg.truncation_count = 8;
  REQUIRE_NOTHROW(cfg.validate());
  cfg.truncation_count = 0;
  cfg.singularity_epsilon = 0.0;
  REQUIRE_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("all-zero amplitudes reconstruct to the zero signal") {
  const SampleLattice lat = prime_lattice(50);
  const std::vector<double> zeros(lat.size(), 0.0);
  const UniformGrid grid = UniformGrid::covering(2.0, 229.0, 0.5);
  const GeneralizedReconstruction rec = reconstruct_generalized(lat, zeros, grid, {});
  for (double v : rec.signal.amplitudes) REQUIRE(v == 0.0);
}

TEST_CASE("all-ones amplitudes come back exactly at the primes") {
  const IntegerSequence primes = primes_first(100);
  const SampleLattice lat = make_lattice(primes, SpeedScheme::Centered);
  const std::vector<double> ones(lat.size(), 1.0);
  const UniformGrid grid = UniformGrid::covering(2.0, 541.0, 1.0);
  const GeneralizedReconstruction rec = reconstruct_generalized(lat, ones, grid, {});
  for (std::uint64_t p : primes.values) {
    const std::size_t gi = static_cast<std::size_t>(p - 2);
    REQUIRE(grid.point(gi) == static_cast<double>(p));
    REQUIRE(rec.signal.amplitudes[gi] == Catch::Approx(1.0).margin(1e-9));
  }
  REQUIRE(rec.signal.provenance.at("method") == "generalized");
  REQUIRE(rec.signal.provenance.at("truncation_count") == "unlimited");
}

TEST_CASE("random lattices interpolate their amplitudes") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const RandomLattice rl = random_lattice(300, seed);
    // beyond the snap radius but inside the smallest gap, the raw formula
    // must still be close to the sample value
    for (std::size_t n = 0; n < rl.lattice.size(); n += 37) {
      const double t = rl.lattice.points[n] + 1e-7;
      UniformGrid probe{t, 1.0, 1};
      const GeneralizedReconstruction rec =
          reconstruct_generalized(rl.lattice, rl.amplitudes, probe, {});
      REQUIRE(rec.signal.amplitudes[0] == Catch::Approx(rl.amplitudes[n]).margin(1e-4));
    }
    // at the points themselves the sample comes back exactly
    for (std::size_t n = 0; n < rl.lattice.size(); n += 23) {
      UniformGrid probe{rl.lattice.points[n], 1.0, 1};
      const GeneralizedReconstruction rec =
          reconstruct_generalized(rl.lattice, rl.amplitudes, probe, {});
      REQUIRE(rec.signal.amplitudes[0] == rl.amplitudes[n]);
    }
  }
}

TEST_CASE("equidistant reconstruction matches the bandlimited closed form") {
  // Finite-lattice g renormalization leaves a mid-lattice error floor that
  // scales like 1/N: the missing tail of g is about 2/(N/2), and the kernel
  // carries half of that relative deficit. Measured floors: 9.3e-3 at N=41,
  // 3.8e-4 at N=1001. Margins below keep roughly 2x headroom over those.
  auto run = [](int n_points, double margin) {
    SampleLattice lat;
    for (int n = 0; n < n_points; ++n) lat.points.push_back(n);
    lat.speeds.assign(lat.points.size(), 1.0);
    lat.scheme = SpeedScheme::Custom;
    const double shift = (n_points - 1) / 2 + 0.3;
    std::vector<double> amps(lat.points.size());
    for (std::size_t n = 0; n < amps.size(); ++n)
      amps[n] = normalized_sinc(static_cast<double>(n) - shift);
    const UniformGrid grid = UniformGrid::covering(shift - 2.3, shift + 1.7, 0.1);
    const GeneralizedReconstruction rec = reconstruct_generalized(lat, amps, grid, {});
    for (std::size_t i = 0; i < grid.count; ++i) {
      const double t = grid.point(i);
      REQUIRE(rec.signal.amplitudes[i] ==
              Catch::Approx(normalized_sinc(t - shift)).margin(margin));
    }
  };
  run(41, 2e-2);
  run(1001, 1e-3);
}

TEST_CASE("truncation error estimate shrinks as the window doubles") {
  const SampleLattice lat = prime_lattice(1000);
  CounterRng rng{7};
  std::vector<double> amps(lat.size());
  for (std::size_t i = 0; i < amps.size(); ++i) amps[i] = rng.uniform(i);
  const UniformGrid grid = UniformGrid::covering(100.0, 7000.0, 25.0);

  double prev = -1.0;
  for (std::size_t w : {64, 128, 256, 512}) {
    KernelEvalConfig cfg;
    cfg.truncation_count = w;
    const GeneralizedReconstruction rec = reconstruct_generalized(lat, amps, grid, cfg);
    REQUIRE(rec.truncation_error_estimate > 0.0);
    if (prev >= 0.0) REQUIRE(rec.truncation_error_estimate < prev);
    prev = rec.truncation_error_estimate;
  }

  const GeneralizedReconstruction full = reconstruct_generalized(lat, amps, grid, {});
  REQUIRE(full.truncation_error_estimate == 0.0);
}

TEST_CASE("thread count does not change generalized output") {
  const SampleLattice lat = prime_lattice(500);
  CounterRng rng{11};
  std::vector<double> amps(lat.size());
  for (std::size_t i = 0; i < amps.size(); ++i) amps[i] = 2.0 * rng.uniform(i) - 1.0;
  const UniformGrid grid = UniformGrid::covering(2.0, 3571.0, 0.7);
  KernelEvalConfig cfg;
  cfg.truncation_count = 64;
  const auto one = reconstruct_generalized(lat, amps, grid, cfg, 1);
  const auto four = reconstruct_generalized(lat, amps, grid, cfg, 4);
  REQUIRE(one.signal.amplitudes == four.signal.amplitudes);
}

TEST_CASE("generalized input validation") {
  const SampleLattice lat = prime_lattice(10);
  const UniformGrid grid = UniformGrid::covering(2.0, 29.0, 0.5);
  std::vector<double> amps(lat.size(), 1.0);
  amps.pop_back();
  REQUIRE_THROWS_AS(reconstruct_generalized(lat, amps, grid, {}), ValidationError);
  amps.push_back(1.0);
  REQUIRE_THROWS_AS(reconstruct_generalized(lat, amps, UniformGrid{0.0, 1.0, 0}, {}),
                    ValidationError);
}
