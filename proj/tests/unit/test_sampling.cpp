#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "rootstate/inference.hpp"
#include "rootstate/sampling.hpp"

using namespace rootstate;

namespace {

StateVector ground(int s) {
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(s);
  c[0] = 1.0;
  return StateVector(c);
}

}  // namespace

TEST_CASE("coordinate sampling: moments of the ground state") {
  // h_0^2 is normal with variance 1/2
  ContinuousBasis basis(1);
  const long n = 100000;
  CoordinateSample sample = sample_coordinate(ground(1), basis, n, 42);
  double mean = sample.points.mean();
  CHECK(std::abs(mean) < 4.0 * std::sqrt(0.5 / n));
  double var = (sample.points.array() - mean).square().sum() / (n - 1);
  CHECK(var == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("momentum sampling mirrors the Gaussian") {
  ContinuousBasis basis(1);
  const long m = 100000;
  MomentumSample sample = sample_momentum(ground(1), basis, m, 7);
  CHECK(std::abs(sample.points.mean()) < 4.0 * std::sqrt(0.5 / m));
}

TEST_CASE("determinism and domain errors") {
  ContinuousBasis basis(2);
  Eigen::VectorXcd c(2);
  c << 0.6, 0.8;
  StateVector state{c};
  CoordinateSample one = sample_coordinate(state, basis, 500, 99);
  CoordinateSample two = sample_coordinate(state, basis, 500, 99);
  CHECK((one.points - two.points).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(sample_coordinate(state, basis, 0, 1), std::domain_error);
  CHECK_THROWS_AS(sample_momentum(state, basis, 0, 1), std::domain_error);
}

TEST_CASE("grid CDF construction invariants") {
  ContinuousBasis basis(4, 0.9);
  Eigen::VectorXcd c(4);
  c << 0.5, 0.5, 0.5, 0.5;
  StateVector state{c};
  GridCdf grid = build_grid_cdf(state, basis, false);
  CHECK(grid.total() >= 1.0 - 1e-10);
  for (long i = 1; i < grid.cdf.size(); ++i) CHECK(grid.cdf[i] >= grid.cdf[i - 1]);
  // sampled points stay inside the grid support
  CoordinateSample sample = sample_coordinate(state, basis, 2000, 5);
  CHECK(sample.points.minCoeff() >= grid.x[0]);
  CHECK(sample.points.maxCoeff() <= grid.x[grid.x.size() - 1]);
}

TEST_CASE("Kolmogorov-Smirnov distance to the true CDF") {
  ContinuousBasis basis(1);
  const long n = 100000;
  CoordinateSample sample = sample_coordinate(ground(1), basis, n, 1234);
  // ground-state density is N(0, 1/2)
  double d = oracles::ks_statistic(
      {sample.points.data(), sample.points.data() + n},
      [](double x) { return oracles::normal_cdf(x * std::sqrt(2.0)); });
  CHECK(d < 1.95 / std::sqrt(double(n)));  // 99.9% asymptotic level
}

TEST_CASE("register sampling") {
  DiscreteBasis dft2 = DiscreteBasis::dft(2);
  StateVector e0 = ground(2);

  RegisterCounts degenerate = sample_register(e0, dft2, 50, 0, 3);
  CHECK(degenerate.direct[0] == 50);
  CHECK(degenerate.direct[1] == 0);
  CHECK(degenerate.m() == 0);

  // |c~|^2 = (1/2, 1/2): binomial std is 50 at m = 10^4
  RegisterCounts counts = sample_register(e0, dft2, 0, 10000, 8);
  CHECK(counts.m() == 10000);
  CHECK(std::abs(counts.conjugate[0] - 5000) < 4 * 50);

  CHECK_THROWS_AS(sample_register(e0, dft2, 0, 0, 1), std::domain_error);
  CHECK_THROWS_AS(sample_register(e0, dft2, -1, 5, 1), std::domain_error);
}

TEST_CASE("register counts always sum to n") {
  DiscreteBasis basis = DiscreteBasis::dft(5);
  Eigen::VectorXcd c(5);
  c << 0.5, std::complex<double>(0.0, 0.5), -0.3, 0.4, std::sqrt(0.25);
  StateVector state{c};
  for (std::uint64_t seed : {1, 2, 3, 4}) {
    RegisterCounts counts = sample_register(state, basis, 777, 333, seed);
    CHECK(counts.n() == 777);
    CHECK(counts.m() == 333);
  }
}

TEST_CASE("chi-square goodness of fit calibration") {
  // counts tested against |c_i|^2 at alpha = 0.001 should fail at about
  // the nominal rate: ~1 of 1000 seeded trials, bounded at 5 here
  DiscreteBasis basis = DiscreteBasis::dft(4);
  Eigen::VectorXcd c(4);
  c << 0.7, 0.5, std::complex<double>(0.0, 0.3), std::sqrt(1.0 - 0.83);
  StateVector state{c};
  Eigen::VectorXd probs = state.coefficients().cwiseAbs2();
  const long n = 2000;
  double crit = chi2_quantile(3, 0.001);
  int failures = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    RegisterCounts counts = sample_register(state, basis, n, 0, seed);
    double t = 0.0;
    for (int i = 0; i < 4; ++i) {
      double expected = n * probs[i];
      double diff = counts.direct[i] - expected;
      t += diff * diff / expected;
    }
    if (t > crit) ++failures;
  }
  CHECK(failures <= 5);
}
