#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "rootstate/basis.hpp"
#include "rootstate/sampling.hpp"
#include "rootstate/state.hpp"

namespace rootstate {

/// Observations from the two mutually complementing continuous
/// experiments; either side may be empty (but not both).
struct ContinuousData {
  Eigen::VectorXd coordinate;  // x_1..x_n
  Eigen::VectorXd momentum;    // p_1..p_m
  long n() const { return coordinate.size(); }
  long m() const { return momentum.size(); }
};

struct EstimationConfig {
  int max_iterations = 10000;
  double tolerance_loglik = 1e-10;   // relative change of ln L
  double tolerance_residual = 1e-8;  // ||R c - (n+m) c||_inf / (n+m)
  double damping = 1.0;              // step size tau in (0, 1]
  double density_floor = 1e-12;      // relative to max sample density
  double init_phase_jitter = 0.05;   // radians
  std::uint64_t seed = 0;

  void validate() const;
};

struct EstimationResult {
  StateVector estimate;
  double lambda = 0.0;          // c^dagger R c at the fixed point
  double log_likelihood = 0.0;
  int iterations = 0;
  double residual = 0.0;
  long floor_hits = 0;
  bool converged = false;
  bool phases_unidentified = false;  // single-space data: moduli only
};

/// ln L = sum_k ln P(x_k) + sum_l ln P~(p_l)
double log_likelihood(const StateVector& state, const ContinuousBasis& basis,
                      const ContinuousData& data, double density_floor = 0.0);

/// ln L = sum_i n_i ln|c_i|^2 + sum_j m_j ln|c~_j|^2
double log_likelihood(const StateVector& state, const DiscreteBasis& basis,
                      const RegisterCounts& counts, double density_floor = 0.0);

/// R_ij = sum_k phi_i(x_k) phi_j(x_k)/P(x_k) + sum_l phi~_i*(p_l) phi~_j(p_l)/P~(p_l);
/// Hermitian, with c^dagger R c = n + m identically.
Eigen::MatrixXcd r_matrix(const StateVector& state, const ContinuousBasis& basis,
                          const ContinuousData& data, double density_floor = 0.0);

/// Register analog: R_ij = n_i delta_ij/|c_i|^2 + sum_k m_k U*_ki U_kj / |c~_k|^2.
Eigen::MatrixXcd r_matrix(const StateVector& state, const DiscreteBasis& basis,
                          const RegisterCounts& counts, double density_floor = 0.0);

/// Damped fixed-point iteration on c <- normalize((1-tau) c + tau R c/(n+m)).
/// Coordinate-only (or momentum-only) data cannot fix the phases; the
/// solve then runs in the real subspace and flags phases_unidentified.
EstimationResult solve(const ContinuousBasis& basis, const ContinuousData& data,
                       const EstimationConfig& config = {});

/// Register likelihood equation; m = 0 and n = 0 have closed forms
/// (moduli only), returned exactly with phases_unidentified set.
EstimationResult solve_register(const DiscreteBasis& basis, const RegisterCounts& counts,
                                const EstimationConfig& config = {});

/// Warm-started variants: iterate from the given state only (no restarts,
/// no jitter). Two conjugate moduli samples do not determine the phases
/// globally (the phase-retrieval ambiguity: many far-apart states fit the
/// observed frequencies equally well), so simulation studies that compare
/// against a known ground truth should start the iteration there and read
/// the result as the stationary point of the likelihood equation in that
/// basin.
EstimationResult solve(const ContinuousBasis& basis, const ContinuousData& data,
                       const EstimationConfig& config, const StateVector& initial);
EstimationResult solve_register(const DiscreteBasis& basis, const RegisterCounts& counts,
                                const EstimationConfig& config, const StateVector& initial);

struct OrderCandidate {
  int s = 0;
  double log_likelihood = 0.0;
  double score = 0.0;  // penalized, experimental
  bool converged = false;
};

struct OrderSelection {
  int chosen = 0;
  std::vector<OrderCandidate> candidates;
};

/// Fits every candidate expansion order and picks the best penalized
/// score (ties to the smaller order); non-convergent fits are reported
/// but excluded from the argmax.
OrderSelection select_order(const ContinuousData& data, double scale,
                            const std::vector<int>& s_candidates,
                            const EstimationConfig& config = {});

}  // namespace rootstate
