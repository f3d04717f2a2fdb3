#pragma once

#include <complex>
#include <functional>
#include <memory>

#include <Eigen/Dense>

namespace rootstate {

/// Orthonormal Hermite function h_j with unit weight,
/// \int h_i(x) h_j(x) dx = delta_ij, h_0(x) = pi^{-1/4} exp(-x^2/2).
/// Stable for j <= 1024, |x| <= 40 (scaled three-term recurrence,
/// never touches raw Hermite polynomials).
double hermite_function(int j, double x);

/// Gauss-Hermite rule for the weight exp(-x^2).
struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;       // w_k, \sum w_k q(x_k) = \int q(x) e^{-x^2} dx
  Eigen::VectorXd flat_weights;  // w_k e^{x_k^2}, for plain dx integrals of decaying f
};

/// Nodes/weights via the symmetric tridiagonal (Golub-Welsch) eigenproblem.
/// Exact for polynomial integrands up to degree 2*order-1.
QuadratureRule gauss_hermite(int order);

/// Chebyshev-Hermite function system phi_j(x) = a^{-1/2} h_j(x/a),
/// together with its momentum-space counterpart and a quadrature rule
/// covering every inner product the library forms.
class ContinuousBasis {
 public:
  /// quadrature_order == 0 picks the default max(64, 2*size+1).
  explicit ContinuousBasis(int size, double scale = 1.0, int quadrature_order = 0);

  int size() const { return size_; }
  double scale() const { return scale_; }
  int quadrature_order() const { return static_cast<int>(rule_->nodes.size()); }

  /// phi_j(x); throws std::domain_error for j outside [0, size).
  double phi(int j, double x) const;

  /// All of phi_0(x) .. phi_{size-1}(x) in one recurrence pass.
  Eigen::VectorXd phi_all(double x) const;

  /// Momentum-space function phi~_j(p) = (-i)^j a^{1/2} h_j(p a)
  /// (Fourier eigenrelation of the Hermite functions).
  std::complex<double> phi_tilde(int j, double p) const;
  Eigen::VectorXcd phi_tilde_all(double p) const;

  const QuadratureRule& quadrature() const { return *rule_; }

  /// \int f(x) dx for f decaying at least like exp(-(x/a)^2) near the
  /// outermost nodes; evaluated on the scaled rule.
  double integrate(const std::function<double(double)>& f) const;

 private:
  int size_;
  double scale_;
  std::shared_ptr<const QuadratureRule> rule_;
};

/// Discrete basis of dimension s with a unitary conjugate-measurement
/// transform U (amplitudes in the conjugate space are c~ = U c).
class DiscreteBasis {
 public:
  explicit DiscreteBasis(Eigen::MatrixXcd unitary);

  /// U_{jk} = exp(2*pi*i*j*k/s)/sqrt(s), 0-based.
  static DiscreteBasis dft(int dimension);

  int dimension() const { return static_cast<int>(unitary_.rows()); }
  const Eigen::MatrixXcd& unitary() const { return unitary_; }
  bool is_dft() const { return is_dft_; }

 private:
  Eigen::MatrixXcd unitary_;
  bool is_dft_ = false;
};

}  // namespace rootstate
