#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "rootstate/basis.hpp"
#include "rootstate/state.hpp"

namespace rootstate {

struct CoordinateSample {
  Eigen::VectorXd points;
  long n() const { return points.size(); }
};

struct MomentumSample {
  Eigen::VectorXd points;
  long m() const { return points.size(); }
};

/// Multinomial counts per basis state in the direct and conjugate bases.
struct RegisterCounts {
  Eigen::VectorXi direct;
  Eigen::VectorXi conjugate;
  long n() const { return direct.size() ? direct.cast<long>().sum() : 0; }
  long m() const { return conjugate.size() ? conjugate.cast<long>().sum() : 0; }
};

/// Dense-grid CDF used by the continuous samplers (exposed for tests).
/// 2^14 uniform points on [-L, L], L = a*(sqrt(2*(2s+1)) + 6); CDF by
/// cumulative trapezoid, inverse by linear interpolation within cells.
struct GridCdf {
  Eigen::VectorXd x;
  Eigen::VectorXd cdf;  // cdf[0] = 0, cdf.tail(1) = total mass
  double total() const { return cdf[cdf.size() - 1]; }
  double inverse(double u) const;  // u in [0, total]
};

GridCdf build_grid_cdf(const StateVector& state, const ContinuousBasis& basis,
                       bool momentum_space);

CoordinateSample sample_coordinate(const StateVector& state, const ContinuousBasis& basis,
                                   long n, std::uint64_t seed);

MomentumSample sample_momentum(const StateVector& state, const ContinuousBasis& basis,
                               long m, std::uint64_t seed);

/// direct ~ multinomial(n, |c_i|^2), conjugate ~ multinomial(m, |(Uc)_j|^2)
RegisterCounts sample_register(const StateVector& state, const DiscreteBasis& basis,
                               long n, long m, std::uint64_t seed);

}  // namespace rootstate
