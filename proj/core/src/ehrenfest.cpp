#include "rootstate/ehrenfest.hpp"

#include <cmath>
#include <stdexcept>

namespace rootstate {

namespace {

void check_indices(const ContinuousBasis& basis, int k, int j) {
  if (k < 0 || j < 0 || k >= basis.size() || j >= basis.size())
    throw std::domain_error("matrix element index out of range");
  if (basis.quadrature_order() < 2 * basis.size() + 2)
    throw std::domain_error("matrix elements need quadrature order >= 2s+2");
}

double integral(const ContinuousBasis& basis,
                const std::function<double(double)>& weight, int k, int j) {
  const auto& rule = basis.quadrature();
  double sum = 0.0;
  for (long q = 0; q < rule.nodes.size(); ++q) {
    double x = basis.scale() * rule.nodes[q];
    double w = basis.scale() * rule.flat_weights[q];
    sum += w * basis.phi(k, x) * weight(x) * basis.phi(j, x);
  }
  return sum;
}

}  // namespace

double position_matrix_element(const ContinuousBasis& basis, int k, int j) {
  check_indices(basis, k, j);
  return integral(basis, [](double x) { return x; }, k, j);
}

double gradient_matrix_element(const EhrenfestProblem& problem, int k, int j) {
  check_indices(problem.basis, k, j);
  return integral(problem.basis, problem.gradient, k, j);
}

Eigen::MatrixXd heisenberg_residual(const EhrenfestProblem& problem) {
  const int s = problem.basis.size();
  if (problem.frequencies.size() != s)
    throw std::invalid_argument("heisenberg_residual: frequency count must equal basis size");
  const auto& rule = problem.basis.quadrature();
  const double a = problem.basis.scale();

  // build <k|x|j> and <k|dU/dx|j> in one sweep over the nodes
  Eigen::MatrixXd x_elem = Eigen::MatrixXd::Zero(s, s);
  Eigen::MatrixXd g_elem = Eigen::MatrixXd::Zero(s, s);
  for (long q = 0; q < rule.nodes.size(); ++q) {
    double x = a * rule.nodes[q];
    double w = a * rule.flat_weights[q];
    Eigen::VectorXd phi = problem.basis.phi_all(x);
    x_elem += (w * x) * phi * phi.transpose();
    g_elem += (w * problem.gradient(x)) * phi * phi.transpose();
  }

  Eigen::MatrixXd residual(s, s);
  for (int k = 0; k < s; ++k)
    for (int j = 0; j < s; ++j) {
      double dw = problem.frequencies[j] - problem.frequencies[k];
      residual(k, j) = problem.mass * dw * dw * x_elem(k, j) - g_elem(k, j);
    }
  return residual;
}

Eigen::MatrixXd hamiltonian_matrix(const EhrenfestProblem& problem) {
  const int s = problem.basis.size();
  const auto& rule = problem.basis.quadrature();
  const double a = problem.basis.scale();

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(s, s);
  for (long q = 0; q < rule.nodes.size(); ++q) {
    double x = a * rule.nodes[q];
    double w = a * rule.flat_weights[q];
    Eigen::VectorXd phi = problem.basis.phi_all(x);
    double u = x / a;
    // phi_j'' = ((x/a)^2 - (2j+1))/a^2 * phi_j
    Eigen::VectorXd kinetic(s);
    for (int j = 0; j < s; ++j)
      kinetic[j] = -(u * u - (2.0 * j + 1.0)) / (2.0 * problem.mass * a * a) * phi[j];
    Eigen::VectorXd acted = kinetic + problem.potential(x) * phi;
    h += w * phi * acted.transpose();
  }
  return h;
}

EhrenfestReport check(const EhrenfestProblem& problem, double tolerance) {
  EhrenfestReport report;
  report.residual = heisenberg_residual(problem);
  report.max_residual = report.residual.cwiseAbs().maxCoeff();
  report.tolerance = tolerance;

  const int s = problem.basis.size();
  const int buffer = 2;  // truncation guard: last rows are unreliable
  Eigen::MatrixXd h = hamiltonian_matrix(problem);
  Eigen::MatrixXd dev = h;
  dev.diagonal() -= problem.frequencies;
  int lead = std::max(1, s - buffer);
  report.hamiltonian_deviation = dev.topLeftCorner(lead, lead).cwiseAbs().maxCoeff();

  report.pass = report.max_residual < tolerance;
  return report;
}

EhrenfestProblem harmonic_oscillator_problem(int s, double mass) {
  ContinuousBasis basis(s, 1.0 / std::sqrt(std::sqrt(mass)), std::max(64, 2 * s + 2));
  Eigen::VectorXd freq(s);
  double omega = 1.0 / std::sqrt(mass);  // U = x^2/2 means m w^2 = 1
  for (int j = 0; j < s; ++j) freq[j] = omega * (j + 0.5);
  return EhrenfestProblem{mass,
                          [](double x) { return 0.5 * x * x; },
                          [](double x) { return x; },
                          freq, std::move(basis)};
}

EhrenfestProblem free_particle_problem(int s, double mass) {
  ContinuousBasis basis(s, 1.0, std::max(64, 2 * s + 2));
  return EhrenfestProblem{mass,
                          [](double) { return 0.0; },
                          [](double) { return 0.0; },
                          Eigen::VectorXd::Zero(s), std::move(basis)};
}

EhrenfestProblem quartic_problem(int s, double mass) {
  ContinuousBasis basis(s, 1.0, std::max(64, 2 * s + 2));
  EhrenfestProblem problem{mass,
                           [](double x) { return x * x * x * x; },
                           [](double x) { return 4.0 * x * x * x; },
                           Eigen::VectorXd::Zero(s), std::move(basis)};
  // frequencies from the Hamiltonian diagonal: the best harmonic ansatz
  // this basis offers; the Heisenberg residual then measures the misfit
  problem.frequencies = hamiltonian_matrix(problem).diagonal();
  return problem;
}

}  // namespace rootstate
