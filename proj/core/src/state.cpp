#include "rootstate/state.hpp"

#include <cmath>
#include <stdexcept>

namespace rootstate {

namespace {

// rotate so the largest-magnitude component is real >= 0, ties to lowest index
void gauge_fix(Eigen::VectorXcd& c) {
  int best = 0;
  double best_mag = std::abs(c[0]);
  for (int i = 1; i < c.size(); ++i) {
    double mag = std::abs(c[i]);
    if (mag > best_mag) {
      best = i;
      best_mag = mag;
    }
  }
  if (best_mag > 0.0) {
    std::complex<double> phase = c[best] / best_mag;
    c *= std::conj(phase);
    c[best] = std::complex<double>(std::abs(c[best]), 0.0);
  }
}

}  // namespace

StateVector::StateVector(Eigen::VectorXcd coefficients) : c_(std::move(coefficients)) {
  if (c_.size() == 0) throw std::invalid_argument("StateVector: empty coefficient vector");
  if (!c_.allFinite()) throw std::invalid_argument("StateVector: non-finite coefficient");
  double norm2 = c_.squaredNorm();
  double drift = std::abs(norm2 - 1.0);
  if (drift > 2e-6) {
    throw std::invalid_argument("StateVector: squared norm deviates from 1 by more than 1e-6");
  }
  if (drift > 1e-12) {
    c_ /= std::sqrt(norm2);
    renormalized_ = true;
  }
  gauge_fix(c_);
}

bool StateVector::is_real(double tol) const {
  return c_.imag().cwiseAbs().maxCoeff() <= tol;
}

double fidelity(const StateVector& a, const StateVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("fidelity: length mismatch");
  return std::norm(a.coefficients().dot(b.coefficients()));
}

std::complex<double> psi_at(const StateVector& state, const ContinuousBasis& basis, double x) {
  if (state.size() != basis.size())
    throw std::invalid_argument("psi_at: state/basis dimension mismatch");
  return basis.phi_all(x).cast<std::complex<double>>().dot(state.coefficients());
}

std::complex<double> psi_tilde_at(const StateVector& state, const ContinuousBasis& basis,
                                  double p) {
  if (state.size() != basis.size())
    throw std::invalid_argument("psi_tilde_at: state/basis dimension mismatch");
  return basis.phi_tilde_all(p).cwiseProduct(state.coefficients()).sum();
}

double density_at(const StateVector& state, const ContinuousBasis& basis, double x) {
  return std::norm(psi_at(state, basis, x));
}

double momentum_density_at(const StateVector& state, const ContinuousBasis& basis, double p) {
  return std::norm(psi_tilde_at(state, basis, p));
}

Eigen::VectorXcd conjugate_amplitudes(const StateVector& state, const DiscreteBasis& basis) {
  if (state.size() != basis.dimension())
    throw std::invalid_argument("conjugate_amplitudes: dimension mismatch");
  return basis.unitary() * state.coefficients();
}

Eigen::MatrixXcd density_matrix(const StateVector& state) {
  const auto& c = state.coefficients();
  return c * c.adjoint();
}

}  // namespace rootstate
