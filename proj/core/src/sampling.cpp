#include "rootstate/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace rootstate {

namespace {

constexpr int kGridPoints = 1 << 14;

}  // namespace

double GridCdf::inverse(double u) const {
  const auto begin = cdf.data();
  const auto end = cdf.data() + cdf.size();
  auto it = std::upper_bound(begin, end, u);
  long hi = std::clamp<long>(it - begin, 1, cdf.size() - 1);
  long lo = hi - 1;
  double span = cdf[hi] - cdf[lo];
  double frac = span > 0.0 ? (u - cdf[lo]) / span : 0.5;
  return x[lo] + frac * (x[hi] - x[lo]);
}

GridCdf build_grid_cdf(const StateVector& state, const ContinuousBasis& basis,
                       bool momentum_space) {
  const double a = basis.scale();
  const int s = basis.size();
  double half_width = a * (std::sqrt(2.0 * (2 * s + 1)) + 6.0);
  if (momentum_space) half_width /= a * a;  // momentum support scales as 1/a

  GridCdf grid;
  grid.x = Eigen::VectorXd::LinSpaced(kGridPoints, -half_width, half_width);
  Eigen::VectorXd pdf(kGridPoints);
  for (int i = 0; i < kGridPoints; ++i)
    pdf[i] = momentum_space ? momentum_density_at(state, basis, grid.x[i])
                            : density_at(state, basis, grid.x[i]);

  grid.cdf.resize(kGridPoints);
  grid.cdf[0] = 0.0;
  const double h = grid.x[1] - grid.x[0];
  for (int i = 1; i < kGridPoints; ++i)
    grid.cdf[i] = grid.cdf[i - 1] + 0.5 * h * (pdf[i - 1] + pdf[i]);

  if (grid.total() < 1.0 - 1e-10)
    throw std::runtime_error("build_grid_cdf: grid captures less than 1 - 1e-10 of the mass");
  return grid;
}

namespace {

Eigen::VectorXd draw_from_grid(const GridCdf& grid, long count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, grid.total());
  Eigen::VectorXd out(count);
  for (long k = 0; k < count; ++k) out[k] = grid.inverse(unif(rng));
  return out;
}

Eigen::VectorXi draw_multinomial(const Eigen::VectorXd& probs, long count, std::mt19937_64& rng) {
  const int s = static_cast<int>(probs.size());
  Eigen::VectorXd cum(s);
  double acc = 0.0;
  for (int i = 0; i < s; ++i) {
    acc += probs[i];
    cum[i] = acc;
  }
  std::uniform_real_distribution<double> unif(0.0, acc);
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(s);
  for (long k = 0; k < count; ++k) {
    double u = unif(rng);
    auto it = std::lower_bound(cum.data(), cum.data() + s, u);
    int idx = std::min<int>(static_cast<int>(it - cum.data()), s - 1);
    counts[idx] += 1;
  }
  return counts;
}

}  // namespace

CoordinateSample sample_coordinate(const StateVector& state, const ContinuousBasis& basis,
                                   long n, std::uint64_t seed) {
  if (n < 1) throw std::domain_error("sample_coordinate: n must be >= 1");
  GridCdf grid = build_grid_cdf(state, basis, /*momentum_space=*/false);
  return CoordinateSample{draw_from_grid(grid, n, seed)};
}

MomentumSample sample_momentum(const StateVector& state, const ContinuousBasis& basis,
                               long m, std::uint64_t seed) {
  if (m < 1) throw std::domain_error("sample_momentum: m must be >= 1");
  GridCdf grid = build_grid_cdf(state, basis, /*momentum_space=*/true);
  return MomentumSample{draw_from_grid(grid, m, seed)};
}

RegisterCounts sample_register(const StateVector& state, const DiscreteBasis& basis,
                               long n, long m, std::uint64_t seed) {
  if (n < 0 || m < 0) throw std::domain_error("sample_register: negative count");
  if (n + m < 1) throw std::domain_error("sample_register: n + m must be >= 1");
  if (state.size() != basis.dimension())
    throw std::invalid_argument("sample_register: dimension mismatch");

  std::mt19937_64 rng(seed);
  const int s = basis.dimension();
  Eigen::VectorXd p_direct = state.coefficients().cwiseAbs2();
  Eigen::VectorXd p_conj = conjugate_amplitudes(state, basis).cwiseAbs2();

  RegisterCounts counts;
  counts.direct = n > 0 ? draw_multinomial(p_direct, n, rng) : Eigen::VectorXi::Zero(s).eval();
  counts.conjugate = m > 0 ? draw_multinomial(p_conj, m, rng) : Eigen::VectorXi::Zero(s).eval();
  return counts;
}

}  // namespace rootstate
