#pragma once

#include <map>
#include <string>

#include <Eigen/Dense>

#include "rootstate/basis.hpp"
#include "rootstate/state.hpp"

namespace rootstate {

/// Real chart of the unit sphere: free parameters c_1..c_{s-1} with
/// c_0 = sqrt(1 - sum c_i^2) eliminated by normalization.
struct RealStateChart {
  Eigen::VectorXd free_params;

  double c0_squared() const { return 1.0 - free_params.squaredNorm(); }
  double c0() const;
  Eigen::VectorXd full() const;  // (c_0, c_1, .., c_{s-1})

  /// Chart of a (numerically real) state vector; the gauge makes c_0 >= 0
  /// only when the largest component sits at index 0, so the chart is
  /// taken from the raw real parts after sign normalization.
  static RealStateChart from_state(const StateVector& state);
};

/// I_ij = 4n (delta_ij + c_i c_j / c_0^2), (s-1) x (s-1).
Eigen::MatrixXd fisher_matrix_closed_form(const RealStateChart& chart, long n);

/// Same matrix by direct quadrature of 4n int (d psi/d c_i)(d psi/d c_j) dx;
/// cross-checks the basis independence of the closed form.
Eigen::MatrixXd fisher_matrix_quadrature(const StateVector& state,
                                         const ContinuousBasis& basis, long n);

/// Sigma = (E - rho)/(4n), s x s, for real-gauge states.
Eigen::MatrixXd covariance(const StateVector& state, long n);

/// Complex states via the 2s-real embedding (Re c, Im c); the zero modes
/// are the state direction and its phase rotation.
Eigen::MatrixXd covariance_embedded(const StateVector& state, long n);

/// Regularized incomplete gamma P(a, x) (series / continued-fraction split).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

/// Survival function of chi-square with dof degrees of freedom.
double chi2_survival(double x, int dof);

/// Quantile q with chi2_survival(q, dof) = alpha, to 1e-10.
double chi2_quantile(int dof, double alpha);

struct ConfidenceCone {
  StateVector axis;
  double half_angle = 0.0;  // radians, in [0, pi/2]
  double alpha = 0.0;
  int dof = 0;
  long n_total = 0;
  bool degenerate = false;  // quantile/(4n) >= 1: full sphere
};

/// half_angle = arcsin(sqrt(chi2_quantile(dof, alpha) / (4 n_total)))
ConfidenceCone confidence_cone(const StateVector& estimate, long n_total, double alpha,
                               int dof);

struct TestReport {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 0.0;
  std::map<double, bool> reject_at;  // conventional alpha levels
  std::string kind;
};

/// T = 4 n (1 - fidelity(estimate, reference)) ~ chi2_dof under the null.
TestReport state_equality_test(const StateVector& estimate, const StateVector& reference,
                               long n_total, int dof);

/// Two-sample homogeneity: T = 4 (n1 n2/(n1+n2)) (1 - fidelity).
/// Constructed statistic, Monte Carlo calibrated.
TestReport homogeneity_test(const StateVector& estimate_1, long n_1,
                            const StateVector& estimate_2, long n_2, int dof);

}  // namespace rootstate
