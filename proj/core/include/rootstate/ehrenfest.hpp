#pragma once

#include <functional>

#include <Eigen/Dense>

#include "rootstate/basis.hpp"

namespace rootstate {

/// Root expansion with harmonic time dependence c_j(t) = c_j0 e^{-i w_j t}
/// in a given potential; hbar = 1 throughout. Verifying the matrix
/// equation m (w_j - w_k)^2 <k|x|j> = <k|dU/dx|j> for all (k, j) verifies
/// the averaged Newton law for every root state in the span, at any time.
struct EhrenfestProblem {
  double mass = 1.0;
  std::function<double(double)> potential;  // U(x)
  std::function<double(double)> gradient;   // dU/dx
  Eigen::VectorXd frequencies;              // w_0 .. w_{s-1}
  ContinuousBasis basis;
};

/// <k|x|j> = int phi_k(x) x phi_j(x) dx
double position_matrix_element(const ContinuousBasis& basis, int k, int j);

/// <k|dU/dx|j>
double gradient_matrix_element(const EhrenfestProblem& problem, int k, int j);

/// residual(k, j) = m (w_j - w_k)^2 <k|x|j> - <k|dU/dx|j>
Eigen::MatrixXd heisenberg_residual(const EhrenfestProblem& problem);

/// H_kj = int phi_k (-(1/2m) phi_j'' + U phi_j) dx, with the second
/// derivative from the Hermite-function identity h_j'' = (x^2 - 2j - 1) h_j.
Eigen::MatrixXd hamiltonian_matrix(const EhrenfestProblem& problem);

struct EhrenfestReport {
  Eigen::MatrixXd residual;
  double max_residual = 0.0;
  double hamiltonian_deviation = 0.0;  // leading (s - buffer) block, buffer = 2
  double tolerance = 0.0;
  bool pass = false;  // max_residual < tolerance
};

EhrenfestReport check(const EhrenfestProblem& problem, double tolerance = 1e-10);

/// Fixed potential catalog used by the CLI.
EhrenfestProblem harmonic_oscillator_problem(int s, double mass = 1.0);
EhrenfestProblem free_particle_problem(int s, double mass = 1.0);
EhrenfestProblem quartic_problem(int s, double mass = 1.0);

}  // namespace rootstate
