#include "doctest.h"

#include <cmath>
#include <complex>

#include "rootstate/estimator.hpp"
#include "rootstate/sampling.hpp"

using namespace rootstate;
using namespace std::complex_literals;

namespace {

StateVector make_state(std::initializer_list<std::complex<double>> coeffs) {
  Eigen::VectorXcd c(long(coeffs.size()));
  long i = 0;
  for (auto v : coeffs) c[i++] = v;
  return StateVector(c);
}

RegisterCounts make_counts(std::initializer_list<int> direct,
                           std::initializer_list<int> conjugate) {
  RegisterCounts counts;
  counts.direct.resize(long(direct.size()));
  counts.conjugate.resize(long(conjugate.size()));
  long i = 0;
  for (int v : direct) counts.direct[i++] = v;
  i = 0;
  for (int v : conjugate) counts.conjugate[i++] = v;
  return counts;
}

}  // namespace

TEST_CASE("register log likelihood values") {
  DiscreteBasis basis = DiscreteBasis::dft(2);
  CHECK(log_likelihood(make_state({1.0, 0.0}), basis, make_counts({5, 0}, {0, 0})) ==
        doctest::Approx(0.0));
  double r = 1.0 / std::sqrt(2.0);
  CHECK(log_likelihood(make_state({r, r}), basis, make_counts({1, 1}, {0, 0})) ==
        doctest::Approx(-1.3862943611198906).epsilon(1e-12));
}

TEST_CASE("continuous log likelihood: single point, single term") {
  ContinuousBasis basis(1);
  ContinuousData data;
  data.coordinate.resize(1);
  data.coordinate << 0.37;
  double h0 = basis.phi(0, 0.37);
  CHECK(log_likelihood(make_state({1.0}), basis, data) ==
        doctest::Approx(std::log(h0 * h0)).epsilon(1e-12));
}

TEST_CASE("zero density without floor is an evaluation error") {
  DiscreteBasis basis = DiscreteBasis::dft(2);
  // c = (1,0) puts zero mass on state 1, but a count sits there
  CHECK_THROWS_AS(
      log_likelihood(make_state({1.0, 0.0}), basis, make_counts({1, 1}, {0, 0}), 0.0),
      std::runtime_error);
}

TEST_CASE("R matrix identities") {
  ContinuousBasis basis(1);
  ContinuousData data;
  data.coordinate.resize(1);
  data.coordinate << 1.234;
  Eigen::MatrixXcd r = r_matrix(make_state({1.0}), basis, data);
  CHECK(std::abs(r(0, 0) - 1.0) < 1e-12);  // phi^2 / phi^2

  // c^dagger R c = n + m for any state and sample
  ContinuousBasis basis5(5);
  StateVector state = make_state({0.5, 0.5i, -0.5, 0.1, std::sqrt(0.24)});
  ContinuousData mixed;
  mixed.coordinate = sample_coordinate(state, basis5, 300, 11).points;
  mixed.momentum = sample_momentum(state, basis5, 200, 12).points;
  Eigen::MatrixXcd big = r_matrix(state, basis5, mixed, 1e-12);
  double quad = std::real(state.coefficients().dot(big * state.coefficients()));
  CHECK(std::abs(quad - 500.0) < 1e-8 * 500.0);
  CHECK((big - big.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("register closed form at m = 0") {
  DiscreteBasis basis = DiscreteBasis::dft(2);
  EstimationResult result = solve_register(basis, make_counts({3, 1}, {0, 0}));
  CHECK(result.converged);
  CHECK(result.phases_unidentified);
  CHECK(std::abs(result.estimate[0] - std::sqrt(0.75)) < 1e-12);
  CHECK(std::abs(result.estimate[1] - std::sqrt(0.25)) < 1e-12);
  CHECK(result.lambda == doctest::Approx(4.0));

  // larger dimensions, exactness to 1e-12
  for (int s : {16, 257}) {
    DiscreteBasis big = DiscreteBasis::dft(s);
    RegisterCounts counts;
    counts.direct = Eigen::VectorXi::Zero(s);
    counts.conjugate = Eigen::VectorXi::Zero(s);
    long total = 0;
    for (int i = 0; i < s; ++i) {
      counts.direct[i] = (i * 7 + 1) % 23;
      total += counts.direct[i];
    }
    EstimationResult r = solve_register(big, counts);
    for (int i = 0; i < s; ++i)
      CHECK(std::abs(r.estimate[i] - std::sqrt(double(counts.direct[i]) / total)) < 1e-12);
  }
}

TEST_CASE("register closed form at n = 0") {
  DiscreteBasis basis = DiscreteBasis::dft(2);
  EstimationResult result = solve_register(basis, make_counts({0, 0}, {9, 16}));
  CHECK(result.converged);
  CHECK(result.phases_unidentified);
  Eigen::VectorXcd expect_ct(2);
  expect_ct << std::sqrt(9.0 / 25.0), std::sqrt(16.0 / 25.0);
  Eigen::VectorXcd expect = basis.unitary().adjoint() * expect_ct;
  CHECK(fidelity(result.estimate, StateVector(expect)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("register stationary point with both spaces") {
  // direct (n, 0) plus exactly split conjugate counts pin c = (1, 0)
  DiscreteBasis basis = DiscreteBasis::dft(2);
  EstimationResult result = solve_register(basis, make_counts({100, 0}, {50, 50}));
  CHECK(result.converged);
  CHECK_FALSE(result.phases_unidentified);
  CHECK(std::abs(result.estimate[0] - 1.0) < 1e-6);
  CHECK(std::abs(result.estimate[1]) < 1e-6);
  CHECK(std::abs(result.lambda / 200.0 - 1.0) < 1e-7);
}

TEST_CASE("register solve of a random 4-dim state") {
  // several far-apart states fit both count vectors equally well (the
  // phase-retrieval ambiguity), so the cold solve is judged by fit
  // quality, not by distance to the generating state
  DiscreteBasis basis = DiscreteBasis::dft(4);
  StateVector truth = make_state(
      {0.55, 0.35 * std::exp(0.9i), 0.45 * std::exp(-1.7i), std::sqrt(0.3725) * std::exp(2.1i)});
  RegisterCounts counts = sample_register(truth, basis, 20000, 20000, 17);
  EstimationResult result = solve_register(basis, counts);
  CHECK(result.converged);
  CHECK(result.log_likelihood >= log_likelihood(truth, basis, counts) - 1e-6);
  // lambda = n + m at the fixed point
  CHECK(std::abs(result.lambda / 40000.0 - 1.0) < 1e-7);
  CHECK(result.residual < 1e-8);

  // the warm-started local refinement stays in the reference basin
  EstimationConfig local;
  local.damping = 0.5;
  local.max_iterations = 2;
  EstimationResult refined = solve_register(basis, counts, local, truth);
  CHECK(fidelity(refined.estimate, truth) > 0.99);
}

TEST_CASE("continuous solve: coordinate-only real chart") {
  ContinuousBasis basis(3);
  StateVector truth = make_state({0.8, 0.36, std::sqrt(1.0 - 0.7696)});
  ContinuousData data;
  data.coordinate = sample_coordinate(truth, basis, 4000, 23).points;
  EstimationResult result = solve(basis, data);
  CHECK(result.converged);
  CHECK(result.phases_unidentified);  // no conjugate data
  CHECK(result.estimate.is_real(1e-10));
  CHECK(fidelity(result.estimate, truth) > 0.995);
  CHECK(std::abs(result.lambda / 4000.0 - 1.0) < 1e-7);
}

TEST_CASE("continuous solve: both spaces recover a complex state") {
  ContinuousBasis basis(4);
  StateVector truth =
      make_state({0.6, 0.5 * std::exp(0.8i), 0.4 * std::exp(-0.5i), std::sqrt(0.23)});
  ContinuousData data;
  data.coordinate = sample_coordinate(truth, basis, 4000, 31).points;
  data.momentum = sample_momentum(truth, basis, 4000, 32).points;
  EstimationResult result = solve(basis, data);
  CHECK(result.converged);
  CHECK_FALSE(result.phases_unidentified);
  CHECK(fidelity(result.estimate, truth) > 0.99);
}

TEST_CASE("continuous solve: momentum-only data") {
  // phases are unidentifiable from one space, so the solver fits the
  // canonical chart c_j = i^j d_j with d real; pick a truth inside it
  ContinuousBasis basis(2);
  StateVector truth = make_state({0.6, 0.8i});
  ContinuousData data;
  data.momentum = sample_momentum(truth, basis, 3000, 77).points;
  EstimationResult result = solve(basis, data);
  CHECK(result.converged);
  CHECK(result.phases_unidentified);
  // moduli of the momentum density are recovered
  CHECK(std::abs(std::abs(result.estimate[0]) - 0.6) < 0.05);
}

TEST_CASE("gauge invariance of the solve") {
  ContinuousBasis basis(3);
  StateVector truth = make_state({0.7, 0.5 * std::exp(0.4i), std::sqrt(0.26) * std::exp(-1.0i)});
  ContinuousData data;
  data.coordinate = sample_coordinate(truth, basis, 2000, 41).points;
  data.momentum = sample_momentum(truth, basis, 2000, 42).points;
  EstimationConfig config;
  EstimationResult a = solve(basis, data, config);
  config.seed = 1;  // different phase jitter at the start
  EstimationResult b = solve(basis, data, config);
  CHECK(a.converged);
  CHECK(b.converged);
  CHECK((a.estimate.coefficients() - b.estimate.coefficients()).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("solver contracts and errors") {
  ContinuousBasis basis(5);
  ContinuousData tiny;
  tiny.coordinate.resize(3);
  tiny.coordinate << 0.0, 0.1, 0.2;
  CHECK_THROWS_AS(solve(basis, tiny), std::domain_error);  // n + m < s

  EstimationConfig bad;
  bad.damping = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  DiscreteBasis d2 = DiscreteBasis::dft(2);
  CHECK_THROWS_AS(solve_register(d2, make_counts({0, 0}, {0, 0})), std::domain_error);
}

TEST_CASE("order selection") {
  // data truly from s = 1 should pick a small order
  ContinuousBasis basis(1);
  Eigen::VectorXcd c(1);
  c << 1.0;
  StateVector truth{c};
  int small = 0;
  const int trials = 20;
  for (int t = 0; t < trials; ++t) {
    ContinuousData data;
    data.coordinate = sample_coordinate(truth, basis, 2000, 100 + t).points;
    OrderSelection sel = select_order(data, 1.0, {1, 2, 3, 4, 5, 6, 7, 8});
    if (sel.chosen <= 3) ++small;
  }
  CHECK(small >= trials * 9 / 10);

  ContinuousData data;
  data.coordinate = sample_coordinate(truth, basis, 500, 7).points;
  OrderSelection single = select_order(data, 1.0, {4});
  CHECK(single.chosen == 4);
  CHECK_THROWS_AS(select_order(data, 1.0, {}), std::invalid_argument);
}
