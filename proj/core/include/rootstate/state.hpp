#pragma once

#include <complex>

#include <Eigen/Dense>

#include "rootstate/basis.hpp"

namespace rootstate {

/// Unit-norm complex coefficient vector of the psi-function expansion,
/// with the global phase fixed canonically: the largest-magnitude
/// coefficient is real and nonnegative (ties broken by lowest index).
class StateVector {
 public:
  /// Inputs within 1e-12 of unit norm are accepted as-is; between 1e-12
  /// and 1e-6 they are renormalized and flagged; farther off they are
  /// rejected.
  explicit StateVector(Eigen::VectorXcd coefficients);

  int size() const { return static_cast<int>(c_.size()); }
  const Eigen::VectorXcd& coefficients() const { return c_; }
  std::complex<double> operator[](int i) const { return c_[i]; }

  /// true when the constructor had to renormalize a drifted input
  bool renormalized() const { return renormalized_; }

  bool is_real(double tol = 1e-12) const;

 private:
  Eigen::VectorXcd c_;
  bool renormalized_ = false;
};

/// |(a, b)|^2, invariant under global phase of either argument.
double fidelity(const StateVector& a, const StateVector& b);

/// P(x) = |sum_j c_j phi_j(x)|^2
double density_at(const StateVector& state, const ContinuousBasis& basis, double x);

/// P~(p) = |sum_j c_j phi~_j(p)|^2
double momentum_density_at(const StateVector& state, const ContinuousBasis& basis, double p);

std::complex<double> psi_at(const StateVector& state, const ContinuousBasis& basis, double x);
std::complex<double> psi_tilde_at(const StateVector& state, const ContinuousBasis& basis, double p);

/// c~ = U c
Eigen::VectorXcd conjugate_amplitudes(const StateVector& state, const DiscreteBasis& basis);

/// rho = c c^dagger (pure-state projector)
Eigen::MatrixXcd density_matrix(const StateVector& state);

}  // namespace rootstate
