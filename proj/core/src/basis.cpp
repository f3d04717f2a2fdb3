#include "rootstate/basis.hpp"

#include <cmath>
#include <stdexcept>

namespace rootstate {

namespace {

constexpr double kQuarterLogPi = 0.28618247146235004;  // log(pi)/4
constexpr double kRescaleLimit = 1e130;

// h_0(u) .. h_{count-1}(u) in one pass.
Eigen::VectorXd hermite_all(int count, double u) {
  Eigen::VectorXd out(count);
  double lg = -0.5 * u * u - kQuarterLogPi;
  double elg = std::exp(lg);
  double prev = 0.0;
  double cur = 1.0;
  out[0] = cur * elg;
  for (int k = 0; k + 1 < count; ++k) {
    double next = u * std::sqrt(2.0 / (k + 1)) * cur - std::sqrt(double(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > kRescaleLimit) {
      cur /= kRescaleLimit;
      prev /= kRescaleLimit;
      lg += std::log(kRescaleLimit);
      elg = std::exp(lg);
    }
    out[k + 1] = cur * elg;
  }
  return out;
}

}  // namespace

double hermite_function(int j, double x) {
  if (j < 0) throw std::domain_error("hermite_function: negative order");
  // h_j = p * exp(lg); rescale p when it grows, folding the factor into lg.
  double lg = -0.5 * x * x - kQuarterLogPi;
  double prev = 0.0;
  double cur = 1.0;
  for (int k = 0; k < j; ++k) {
    double next = x * std::sqrt(2.0 / (k + 1)) * cur - std::sqrt(double(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > kRescaleLimit) {
      cur /= kRescaleLimit;
      prev /= kRescaleLimit;
      lg += std::log(kRescaleLimit);
    }
  }
  return cur * std::exp(lg);
}

QuadratureRule gauss_hermite(int order) {
  if (order < 2) throw std::domain_error("gauss_hermite: order must be >= 2");
  // Jacobi matrix of the Hermite weight: zero diagonal, off-diagonal sqrt(k/2).
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd sub(order - 1);
  for (int k = 1; k < order; ++k) sub[k - 1] = std::sqrt(k / 2.0);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("gauss_hermite: eigensolver failed");

  QuadratureRule rule;
  rule.nodes = solver.eigenvalues();
  rule.weights.resize(order);
  rule.flat_weights.resize(order);
  for (int k = 0; k < order; ++k) {
    // The eigenvector formula w = sqrt(pi) v0^2 loses all accuracy at the
    // outer nodes (v0 underflows past the eigensolver's absolute error).
    // Use the stable closed form instead: the weight relative to a flat
    // measure is 1/(order * h_{order-1}(x_k)^2) with the orthonormal
    // Hermite function h, well conditioned at every node.
    double h = hermite_function(order - 1, rule.nodes[k]);
    double flat = 1.0 / (double(order) * h * h);
    rule.flat_weights[k] = flat;
    // w = flat * exp(-x^2); underflow to 0 at far nodes is fine
    rule.weights[k] = flat * std::exp(-rule.nodes[k] * rule.nodes[k]);
  }
  return rule;
}

ContinuousBasis::ContinuousBasis(int size, double scale, int quadrature_order)
    : size_(size), scale_(scale) {
  if (size < 1) throw std::domain_error("ContinuousBasis: size must be >= 1");
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw std::domain_error("ContinuousBasis: scale must be positive and finite");
  int order = quadrature_order == 0 ? std::max(64, 2 * size + 1) : quadrature_order;
  rule_ = std::make_shared<const QuadratureRule>(gauss_hermite(order));
}

double ContinuousBasis::phi(int j, double x) const {
  if (j < 0 || j >= size_) throw std::domain_error("ContinuousBasis::phi: index out of range");
  return hermite_function(j, x / scale_) / std::sqrt(scale_);
}

Eigen::VectorXd ContinuousBasis::phi_all(double x) const {
  return hermite_all(size_, x / scale_) / std::sqrt(scale_);
}

std::complex<double> ContinuousBasis::phi_tilde(int j, double p) const {
  if (j < 0 || j >= size_)
    throw std::domain_error("ContinuousBasis::phi_tilde: index out of range");
  static const std::complex<double> phase[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
  return phase[j % 4] * (hermite_function(j, p * scale_) * std::sqrt(scale_));
}

Eigen::VectorXcd ContinuousBasis::phi_tilde_all(double p) const {
  static const std::complex<double> phase[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
  Eigen::VectorXd h = hermite_all(size_, p * scale_) * std::sqrt(scale_);
  Eigen::VectorXcd out(size_);
  for (int j = 0; j < size_; ++j) out[j] = phase[j % 4] * h[j];
  return out;
}

double ContinuousBasis::integrate(const std::function<double(double)>& f) const {
  double sum = 0.0;
  for (int k = 0; k < rule_->nodes.size(); ++k)
    sum += rule_->flat_weights[k] * f(scale_ * rule_->nodes[k]);
  return scale_ * sum;
}

DiscreteBasis::DiscreteBasis(Eigen::MatrixXcd unitary) : unitary_(std::move(unitary)) {
  if (unitary_.rows() == 0 || unitary_.rows() != unitary_.cols())
    throw std::domain_error("DiscreteBasis: unitary must be square and nonempty");
  Eigen::MatrixXcd gram = unitary_ * unitary_.adjoint();
  gram -= Eigen::MatrixXcd::Identity(unitary_.rows(), unitary_.cols());
  if (gram.cwiseAbs().maxCoeff() > 1e-12)
    throw std::domain_error("DiscreteBasis: matrix is not unitary to 1e-12");
}

DiscreteBasis DiscreteBasis::dft(int dimension) {
  if (dimension < 1) throw std::domain_error("DiscreteBasis::dft: dimension must be >= 1");
  Eigen::MatrixXcd u(dimension, dimension);
  const double norm = 1.0 / std::sqrt(double(dimension));
  for (int j = 0; j < dimension; ++j)
    for (int k = 0; k < dimension; ++k) {
      // reduce j*k mod s before forming the angle, keeps phases exact-ish for large s
      long jk = (long(j) * k) % dimension;
      double angle = 2.0 * M_PI * double(jk) / dimension;
      u(j, k) = std::polar(norm, angle);
    }
  DiscreteBasis basis(std::move(u));
  basis.is_dft_ = true;
  return basis;
}

}  // namespace rootstate
