#include "rootstate/inference.hpp"

#include <cmath>
#include <stdexcept>

namespace rootstate {

namespace {

constexpr double kGammaTol = 1e-15;
constexpr int kGammaMaxIter = 1000;

// lower regularized incomplete gamma by power series, for x < a + 1
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kGammaMaxIter; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kGammaTol) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// upper regularized incomplete gamma by Lentz continued fraction, x >= a + 1
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kGammaMaxIter; ++i) {
    double an = -double(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kGammaTol) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

std::map<double, bool> rejections(double p_value) {
  std::map<double, bool> out;
  for (double alpha : {0.1, 0.05, 0.01, 0.001}) out[alpha] = p_value < alpha;
  return out;
}

}  // namespace

double RealStateChart::c0() const {
  double c0sq = c0_squared();
  if (c0sq <= 0.0) throw std::domain_error("RealStateChart: free parameters exceed the sphere");
  return std::sqrt(c0sq);
}

Eigen::VectorXd RealStateChart::full() const {
  Eigen::VectorXd out(free_params.size() + 1);
  out[0] = c0();
  out.tail(free_params.size()) = free_params;
  return out;
}

RealStateChart RealStateChart::from_state(const StateVector& state) {
  if (!state.is_real(1e-10))
    throw std::invalid_argument("RealStateChart: state is not in the real gauge");
  Eigen::VectorXd c = state.coefficients().real();
  if (c[0] < 0.0) c = -c;  // the chart fixes the sign of c_0
  RealStateChart chart;
  chart.free_params = c.tail(c.size() - 1);
  return chart;
}

Eigen::MatrixXd fisher_matrix_closed_form(const RealStateChart& chart, long n) {
  double c0sq = chart.c0_squared();
  if (c0sq < 1e-12)
    throw std::domain_error("fisher_matrix_closed_form: chart singular (c_0^2 < 1e-12)");
  const auto& c = chart.free_params;
  long d = c.size();
  Eigen::MatrixXd fisher = Eigen::MatrixXd::Identity(d, d);
  fisher += c * c.transpose() / c0sq;
  fisher *= 4.0 * double(n);
  return fisher;
}

Eigen::MatrixXd fisher_matrix_quadrature(const StateVector& state,
                                         const ContinuousBasis& basis, long n) {
  RealStateChart chart = RealStateChart::from_state(state);
  double c0 = chart.c0();
  const auto& c = chart.free_params;
  const int d = static_cast<int>(c.size());
  const auto& rule = basis.quadrature();

  Eigen::MatrixXd fisher = Eigen::MatrixXd::Zero(d, d);
  for (long k = 0; k < rule.nodes.size(); ++k) {
    double x = basis.scale() * rule.nodes[k];
    double w = basis.scale() * rule.flat_weights[k];
    Eigen::VectorXd phi = basis.phi_all(x);
    // d psi / d c_i = phi_i - (c_i/c_0) phi_0
    Eigen::VectorXd dpsi = phi.tail(d) - (phi[0] / c0) * c;
    fisher += w * dpsi * dpsi.transpose();
  }
  return 4.0 * double(n) * fisher;
}

Eigen::MatrixXd covariance(const StateVector& state, long n) {
  if (!state.is_real(1e-10))
    throw std::invalid_argument("covariance: state is not in the real gauge");
  Eigen::VectorXd c = state.coefficients().real();
  long s = c.size();
  return (Eigen::MatrixXd::Identity(s, s) - c * c.transpose()) / (4.0 * double(n));
}

Eigen::MatrixXd covariance_embedded(const StateVector& state, long n) {
  long s = state.size();
  Eigen::VectorXd v(2 * s), w(2 * s);
  v << state.coefficients().real(), state.coefficients().imag();
  w << -state.coefficients().imag(), state.coefficients().real();  // phase direction
  return (Eigen::MatrixXd::Identity(2 * s, 2 * s) - v * v.transpose() - w * w.transpose()) /
         (4.0 * double(n));
}

double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::domain_error("gamma_p: need x >= 0, a > 0");
  if (x == 0.0) return 0.0;
  return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::domain_error("gamma_q: need x >= 0, a > 0");
  if (x == 0.0) return 1.0;
  return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double chi2_survival(double x, int dof) {
  if (dof < 1) throw std::domain_error("chi2_survival: dof must be >= 1");
  if (x <= 0.0) return 1.0;
  return gamma_q(0.5 * dof, 0.5 * x);
}

double chi2_quantile(int dof, double alpha) {
  if (dof < 1) throw std::domain_error("chi2_quantile: dof must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("chi2_quantile: alpha must be in (0, 1)");

  double hi = dof + 10.0;
  while (chi2_survival(hi, dof) > alpha) hi *= 2.0;
  double lo = 0.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (chi2_survival(mid, dof) > alpha)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-13 * (1.0 + hi)) break;
  }
  return 0.5 * (lo + hi);
}

ConfidenceCone confidence_cone(const StateVector& estimate, long n_total, double alpha,
                               int dof) {
  double q = chi2_quantile(dof, alpha);
  double ratio = q / (4.0 * double(n_total));
  ConfidenceCone cone{estimate, 0.0, alpha, dof, n_total, false};
  if (ratio >= 1.0) {
    cone.half_angle = M_PI / 2.0;
    cone.degenerate = true;
  } else {
    cone.half_angle = std::asin(std::sqrt(ratio));
  }
  return cone;
}

TestReport state_equality_test(const StateVector& estimate, const StateVector& reference,
                               long n_total, int dof) {
  double t = 4.0 * double(n_total) * (1.0 - fidelity(estimate, reference));
  t = std::max(t, 0.0);  // fidelity rounding can push slightly past 1
  TestReport report;
  report.statistic = t;
  report.dof = dof;
  report.p_value = chi2_survival(t, dof);
  report.reject_at = rejections(report.p_value);
  report.kind = "state_equality";
  return report;
}

TestReport homogeneity_test(const StateVector& estimate_1, long n_1,
                            const StateVector& estimate_2, long n_2, int dof) {
  if (n_1 <= 0 || n_2 <= 0)
    throw std::domain_error("homogeneity_test: both sample sizes must be positive");
  double weight = double(n_1) * double(n_2) / double(n_1 + n_2);
  double t = std::max(4.0 * weight * (1.0 - fidelity(estimate_1, estimate_2)), 0.0);
  TestReport report;
  report.statistic = t;
  report.dof = dof;
  report.p_value = chi2_survival(t, dof);
  report.reject_at = rejections(report.p_value);
  report.kind = "homogeneity";
  return report;
}

}  // namespace rootstate
