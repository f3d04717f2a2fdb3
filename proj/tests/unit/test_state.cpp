#include "doctest.h"

#include <cmath>
#include <complex>

#include "oracles.hpp"
#include "rootstate/state.hpp"

using namespace rootstate;
using namespace std::complex_literals;

namespace {

StateVector make_state(std::initializer_list<std::complex<double>> coeffs) {
  Eigen::VectorXcd c(long(coeffs.size()));
  long i = 0;
  for (auto v : coeffs) c[i++] = v;
  return StateVector(c);
}

}  // namespace

TEST_CASE("construction: norm policy") {
  Eigen::VectorXcd c(2);
  c << 1.0, 0.0;
  CHECK_FALSE(StateVector(c).renormalized());

  c << 1.0 + 1e-8, 0.0;  // drift within 1e-6: renormalize with warning
  StateVector drifted(c);
  CHECK(drifted.renormalized());
  CHECK(drifted.coefficients().squaredNorm() == doctest::Approx(1.0).epsilon(1e-14));

  c << 1.1, 0.0;
  CHECK_THROWS_AS(StateVector{c}, std::invalid_argument);
  Eigen::VectorXcd empty;
  CHECK_THROWS_AS(StateVector{empty}, std::invalid_argument);
}

TEST_CASE("gauge: largest coefficient made real nonnegative") {
  StateVector s = make_state({0.6 * std::exp(0.7i), 0.8 * std::exp(0.7i) * std::exp(0.2i)});
  CHECK(std::abs(s[1].imag()) < 1e-15);
  CHECK(s[1].real() > 0.0);
  // relative phase survives the rotation
  CHECK(std::arg(s[0]) == doctest::Approx(-0.2).epsilon(1e-12));
}

TEST_CASE("density values") {
  ContinuousBasis basis(2);
  StateVector ground = make_state({1.0, 0.0});
  CHECK(density_at(ground, basis, 0.0) ==
        doctest::Approx(0.5641895835477563).epsilon(1e-12));
  // cross term vanishes at the origin since h_1(0) = 0
  StateVector mixed = make_state({1.0 / std::sqrt(2.0), 1.0i / std::sqrt(2.0)});
  CHECK(density_at(mixed, basis, 0.0) ==
        doctest::Approx(0.5 * 0.5641895835477563).epsilon(1e-12));
}

TEST_CASE("momentum density and Fourier symmetry") {
  ContinuousBasis basis(3);
  StateVector ground = make_state({1.0, 0.0, 0.0});
  CHECK(momentum_density_at(ground, basis, 0.0) ==
        doctest::Approx(0.5641895835477563).epsilon(1e-12));
  // real even psi has a symmetric momentum density
  StateVector even = make_state({0.8, 0.0, 0.6});
  for (double p : {0.3, 1.1, 2.4})
    CHECK(momentum_density_at(even, basis, p) ==
          doctest::Approx(momentum_density_at(even, basis, -p)).epsilon(1e-12));
}

TEST_CASE("Parseval: densities integrate to one") {
  ContinuousBasis basis(5, 1.3);
  StateVector state = make_state({0.5, 0.5i, -0.5, 0.1, std::sqrt(0.24)});
  double mass_x = oracles::trapezoid(
      [&](double x) { return density_at(state, basis, x); }, 20.0, 4001);
  double mass_p = oracles::trapezoid(
      [&](double p) { return momentum_density_at(state, basis, p); }, 20.0, 4001);
  CHECK(mass_x == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(mass_p == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("conjugate amplitudes") {
  DiscreteBasis dft2 = DiscreteBasis::dft(2);
  StateVector e0 = make_state({1.0, 0.0});
  Eigen::VectorXcd ct = conjugate_amplitudes(e0, dft2);
  CHECK(ct[0].real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(ct[1].real() == doctest::Approx(1.0 / std::sqrt(2.0)));

  DiscreteBasis ident{Eigen::MatrixXcd::Identity(2, 2)};
  Eigen::VectorXcd same = conjugate_amplitudes(e0, ident);
  CHECK(std::abs(same[0] - 1.0) < 1e-15);

  StateVector any = make_state({0.3, std::sqrt(0.91) * 1.0i});
  CHECK(conjugate_amplitudes(any, dft2).norm() == doctest::Approx(1.0).epsilon(1e-12));
  StateVector three = make_state({1.0, 0.0, 0.0});
  CHECK_THROWS_AS(conjugate_amplitudes(three, dft2), std::invalid_argument);
}

TEST_CASE("fidelity") {
  StateVector a = make_state({0.6, 0.8});
  StateVector b = make_state({0.8, -0.6});
  CHECK(fidelity(a, a) == doctest::Approx(1.0));
  CHECK(fidelity(a, b) == doctest::Approx(0.0));
  CHECK(fidelity(a, b) == fidelity(b, a));

  // global phase of either argument is irrelevant
  Eigen::VectorXcd rotated = a.coefficients() * std::exp(1.234i);
  // bypass the gauge by comparing against a fresh (gauge-fixed) copy
  StateVector c{rotated};
  CHECK(fidelity(a, c) == doctest::Approx(1.0).epsilon(1e-12));

  StateVector longer = make_state({1.0, 0.0, 0.0});
  CHECK_THROWS_AS(fidelity(a, longer), std::invalid_argument);
}

TEST_CASE("density matrix of a pure state") {
  StateVector e0 = make_state({1.0, 0.0});
  Eigen::MatrixXcd rho = density_matrix(e0);
  CHECK(std::abs(rho(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(rho(1, 1)) < 1e-15);

  StateVector plus = make_state({1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)});
  Eigen::MatrixXcd rho_plus = density_matrix(plus);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(std::abs(rho_plus(i, j) - 0.5) < 1e-12);

  StateVector s = make_state({0.5, 0.5i, -0.5, 0.5});
  Eigen::MatrixXcd r = density_matrix(s);
  CHECK(std::abs(r.trace() - 1.0) < 1e-12);
  CHECK((r - r.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((r * r - r).cwiseAbs().maxCoeff() < 1e-10);  // idempotent
}
