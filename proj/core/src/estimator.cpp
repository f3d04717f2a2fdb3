#include "rootstate/estimator.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace rootstate {

namespace {

// Both likelihood problems share one shape: rows of amplitudes A, row
// weights w (1 per continuous sample point, the counts n_i/m_j for the
// register), densities P_k = |A_k c|^2, and
//   ln L = sum_k w_k ln P_k,   R c = A^dagger (w .* (A c) ./ P).
struct LikelihoodRows {
  Eigen::MatrixXcd amplitudes;  // N x s
  Eigen::VectorXd weights;      // N, strictly positive
  double total = 0.0;           // n + m
};

struct Evaluation {
  double log_likelihood = 0.0;
  Eigen::VectorXcd amp;      // A c
  Eigen::VectorXd density;   // floored
  long floor_hits = 0;
};

Evaluation evaluate(const LikelihoodRows& rows, const Eigen::VectorXcd& c,
                    double density_floor) {
  Evaluation ev;
  ev.amp = rows.amplitudes * c;
  ev.density = ev.amp.cwiseAbs2();
  double peak = ev.density.maxCoeff();
  double floor = density_floor * peak;
  if (floor > 0.0) {
    for (long k = 0; k < ev.density.size(); ++k)
      if (ev.density[k] < floor) {
        ev.density[k] = floor;
        ++ev.floor_hits;
      }
  } else {
    for (long k = 0; k < ev.density.size(); ++k)
      if (ev.density[k] <= 0.0) {
        std::ostringstream msg;
        msg << "log_likelihood: zero density at observation " << k
            << " with density floor disabled";
        throw std::runtime_error(msg.str());
      }
  }
  ev.log_likelihood = rows.weights.dot(ev.density.array().log().matrix());
  return ev;
}

Eigen::VectorXcd apply_r(const LikelihoodRows& rows, const Evaluation& ev) {
  Eigen::VectorXcd scaled =
      (ev.amp.array() * (rows.weights.array() / ev.density.array())).matrix();
  return rows.amplitudes.adjoint() * scaled;
}

Eigen::MatrixXcd full_r(const LikelihoodRows& rows, const Evaluation& ev) {
  Eigen::MatrixXcd weighted = rows.amplitudes;
  for (long k = 0; k < weighted.rows(); ++k)
    weighted.row(k) *= rows.weights[k] / ev.density[k];
  return rows.amplitudes.adjoint() * weighted;
}

LikelihoodRows continuous_rows(const ContinuousBasis& basis, const ContinuousData& data) {
  const int s = basis.size();
  LikelihoodRows rows;
  rows.amplitudes.resize(data.n() + data.m(), s);
  for (long k = 0; k < data.n(); ++k)
    rows.amplitudes.row(k) = basis.phi_all(data.coordinate[k]).cast<std::complex<double>>();
  for (long l = 0; l < data.m(); ++l)
    rows.amplitudes.row(data.n() + l) = basis.phi_tilde_all(data.momentum[l]);
  rows.weights = Eigen::VectorXd::Ones(data.n() + data.m());
  rows.total = double(data.n() + data.m());
  return rows;
}

LikelihoodRows register_rows(const DiscreteBasis& basis, const RegisterCounts& counts) {
  const int s = basis.dimension();
  if (counts.direct.size() != s || counts.conjugate.size() != s)
    throw std::invalid_argument("register counts dimension mismatch");
  if ((counts.direct.array() < 0).any() || (counts.conjugate.array() < 0).any())
    throw std::invalid_argument("register counts must be nonnegative");

  long rows_needed = 0;
  for (int i = 0; i < s; ++i) rows_needed += (counts.direct[i] > 0) + (counts.conjugate[i] > 0);

  LikelihoodRows rows;
  rows.amplitudes = Eigen::MatrixXcd::Zero(rows_needed, s);
  rows.weights.resize(rows_needed);
  long r = 0;
  for (int i = 0; i < s; ++i)
    if (counts.direct[i] > 0) {
      rows.amplitudes(r, i) = 1.0;
      rows.weights[r] = counts.direct[i];
      ++r;
    }
  for (int j = 0; j < s; ++j)
    if (counts.conjugate[j] > 0) {
      rows.amplitudes.row(r) = basis.unitary().row(j);
      rows.weights[r] = counts.conjugate[j];
      ++r;
    }
  rows.total = double(counts.n() + counts.m());
  return rows;
}

EstimationResult iterate(const LikelihoodRows& rows, Eigen::VectorXcd c,
                         const EstimationConfig& config, bool phases_unidentified) {
  config.validate();
  c.normalize();
  Evaluation ev = evaluate(rows, c, config.density_floor);
  Eigen::VectorXcd rc = apply_r(rows, ev);

  double tau_base = config.damping;
  double tau = tau_base;
  int successes = 0;
  int iter = 0;
  bool converged = false;
  // stagnation guard: an undamped step can cycle around the fixed point
  // (period-two oscillation); halve the base step when the residual
  // stops improving
  double best_residual = std::numeric_limits<double>::infinity();
  int since_improvement = 0;

  for (; iter < config.max_iterations; ++iter) {
    Eigen::VectorXcd c_try;
    Evaluation ev_try;
    bool accepted = false;
    while (true) {
      c_try = ((1.0 - tau) * c + (tau / rows.total) * rc).normalized();
      ev_try = evaluate(rows, c_try, config.density_floor);
      if (ev_try.log_likelihood >=
          ev.log_likelihood - 1e-12 * (1.0 + std::abs(ev.log_likelihood))) {
        accepted = true;
        break;
      }
      tau *= 0.5;
      successes = 0;
      if (tau < 1e-10) break;  // stalled; keep the best iterate we have
    }
    if (!accepted) break;

    Eigen::VectorXcd rc_try = apply_r(rows, ev_try);
    double residual = (rc_try - rows.total * c_try).cwiseAbs().maxCoeff() / rows.total;
    double dll = std::abs(ev_try.log_likelihood - ev.log_likelihood);

    c = c_try;
    ev = ev_try;
    rc = rc_try;
    if (++successes >= 5) {
      tau = tau_base;
      successes = 0;
    }

    if (residual < 0.9 * best_residual) {
      best_residual = residual;
      since_improvement = 0;
    } else if (++since_improvement >= 50) {
      tau_base = std::max(0.5 * tau_base, 1.0 / 64.0);
      tau = std::min(tau, tau_base);
      since_improvement = 0;
    }

    if (residual < config.tolerance_residual &&
        dll <= config.tolerance_loglik * (1.0 + std::abs(ev.log_likelihood))) {
      converged = true;
      ++iter;
      break;
    }
  }

  double lambda = std::real(c.dot(rc));
  double residual = (rc - rows.total * c).cwiseAbs().maxCoeff() / rows.total;

  EstimationResult result{StateVector(c.normalized()),
                          lambda,
                          ev.log_likelihood,
                          iter,
                          residual,
                          ev.floor_hits,
                          converged,
                          phases_unidentified};
  return result;
}

// The likelihood is multi-extremal: run the fixed-point iteration from
// several starts and keep the highest log-likelihood (converged results
// preferred over stalled ones at any likelihood).
EstimationResult best_of(const LikelihoodRows& rows, const std::vector<Eigen::VectorXcd>& inits,
                         const EstimationConfig& config, bool phases_unidentified) {
  std::optional<EstimationResult> best;
  for (const Eigen::VectorXcd& init : inits) {
    EstimationResult r = iterate(rows, init, config, phases_unidentified);
    // higher likelihood wins; convergence only breaks near-ties, so a
    // cleanly converged minor optimum can never shadow a better iterate
    bool better;
    if (!best) {
      better = true;
    } else {
      double tie = 1e-9 * (1.0 + std::abs(best->log_likelihood));
      if (std::abs(r.log_likelihood - best->log_likelihood) <= tie)
        better = r.converged && !best->converged;
      else
        better = r.log_likelihood > best->log_likelihood;
    }
    if (better) best = std::move(r);
  }
  return *best;
}

// Alternating-moduli refinement (Gerchberg-Saxton style): project onto
// the observed moduli in the direct and conjugate bases in turn. Cheap,
// and it lands near the basin of a good likelihood maximum.
Eigen::VectorXcd alternate_moduli(const DiscreteBasis& basis, const Eigen::VectorXd& direct_mod,
                                  const Eigen::VectorXd& conjugate_mod, Eigen::VectorXcd c,
                                  int sweeps) {
  const auto& u = basis.unitary();
  for (int t = 0; t < sweeps; ++t) {
    Eigen::VectorXcd ct = u * c;
    for (long j = 0; j < ct.size(); ++j) {
      double mag = std::abs(ct[j]);
      ct[j] = mag > 0.0 ? std::complex<double>(conjugate_mod[j]) * (ct[j] / mag)
                        : std::complex<double>(conjugate_mod[j]);
    }
    c = u.adjoint() * ct;
    for (long i = 0; i < c.size(); ++i) {
      double mag = std::abs(c[i]);
      c[i] = mag > 0.0 ? std::complex<double>(direct_mod[i]) * (c[i] / mag)
                       : std::complex<double>(direct_mod[i]);
    }
  }
  return c.normalized();
}

// Starts from a binned density. The square root of a density is fixed
// only up to a sign on each density bump, and every sign assignment
// seeds a different basin of the likelihood, so enumerate the patterns
// over the most massive bumps (capped at 16 patterns).
std::vector<Eigen::VectorXd> histogram_inits(const Eigen::VectorXd& points,
                                             const ContinuousBasis& basis) {
  const int bins = 64;
  double lo = points.minCoeff(), hi = points.maxCoeff();
  if (hi <= lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  double width = (hi - lo) / bins;
  Eigen::VectorXd hist = Eigen::VectorXd::Zero(bins);
  for (long k = 0; k < points.size(); ++k) {
    int b = std::min<int>(int((points[k] - lo) / width), bins - 1);
    hist[b] += 1.0;
  }
  hist /= points.size() * width;  // density estimate

  // bumps = maximal runs of bins above a small density threshold
  double threshold = 0.02 * hist.maxCoeff();
  std::vector<int> segment(bins, -1);
  std::vector<double> mass;
  for (int b = 0; b < bins; ++b) {
    if (hist[b] <= threshold) continue;
    if (b == 0 || segment[b - 1] < 0) mass.push_back(0.0);
    segment[b] = int(mass.size()) - 1;
    mass.back() += hist[b] * width;
  }
  int nseg = int(mass.size());

  // free signs on the heaviest bumps; the heaviest of all stays +
  const int max_free = 5;
  std::vector<int> order(nseg);
  for (int i = 0; i < nseg; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return mass[a] > mass[b]; });
  int free_count = std::min(nseg > 0 ? nseg - 1 : 0, max_free - 1);

  std::vector<Eigen::VectorXd> inits;
  Eigen::MatrixXd projected(basis.size(), std::max(nseg, 1));
  projected.setZero();
  for (int b = 0; b < bins; ++b) {
    if (segment[b] < 0) continue;
    double center = lo + (b + 0.5) * width;
    projected.col(segment[b]) += std::sqrt(hist[b]) * width * basis.phi_all(center);
  }
  for (int pattern = 0; pattern < (1 << free_count); ++pattern) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(basis.size());
    for (int i = 0; i < nseg; ++i) {
      double sign = 1.0;
      for (int f = 0; f < free_count; ++f)
        if (order[f + 1] == i && (pattern >> f) & 1) sign = -1.0;
      c += sign * projected.col(i);
    }
    double norm = c.norm();
    if (norm > 1e-12) inits.push_back(c / norm);
  }
  if (inits.empty()) inits.push_back(Eigen::VectorXd::Ones(basis.size()).normalized());
  return inits;
}

Eigen::VectorXcd jitter_phases(const Eigen::VectorXcd& c, double jitter, std::uint64_t seed) {
  if (jitter <= 0.0) return c;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-jitter, jitter);
  Eigen::VectorXcd out(c.size());
  for (long j = 0; j < c.size(); ++j) out[j] = c[j] * std::polar(1.0, unif(rng));
  return out;
}

}  // namespace

void EstimationConfig::validate() const {
  if (max_iterations < 1) throw std::invalid_argument("EstimationConfig: max_iterations < 1");
  if (!(tolerance_loglik > 0.0) || !(tolerance_residual > 0.0))
    throw std::invalid_argument("EstimationConfig: tolerances must be positive");
  if (!(damping > 0.0) || damping > 1.0)
    throw std::invalid_argument("EstimationConfig: damping must be in (0, 1]");
  if (density_floor < 0.0 || init_phase_jitter < 0.0)
    throw std::invalid_argument("EstimationConfig: negative floor or jitter");
}

double log_likelihood(const StateVector& state, const ContinuousBasis& basis,
                      const ContinuousData& data, double density_floor) {
  if (state.size() != basis.size())
    throw std::invalid_argument("log_likelihood: dimension mismatch");
  LikelihoodRows rows = continuous_rows(basis, data);
  return evaluate(rows, state.coefficients(), density_floor).log_likelihood;
}

double log_likelihood(const StateVector& state, const DiscreteBasis& basis,
                      const RegisterCounts& counts, double density_floor) {
  if (state.size() != basis.dimension())
    throw std::invalid_argument("log_likelihood: dimension mismatch");
  LikelihoodRows rows = register_rows(basis, counts);
  return evaluate(rows, state.coefficients(), density_floor).log_likelihood;
}

Eigen::MatrixXcd r_matrix(const StateVector& state, const ContinuousBasis& basis,
                          const ContinuousData& data, double density_floor) {
  if (state.size() != basis.size())
    throw std::invalid_argument("r_matrix: dimension mismatch");
  LikelihoodRows rows = continuous_rows(basis, data);
  return full_r(rows, evaluate(rows, state.coefficients(), density_floor));
}

Eigen::MatrixXcd r_matrix(const StateVector& state, const DiscreteBasis& basis,
                          const RegisterCounts& counts, double density_floor) {
  if (state.size() != basis.dimension())
    throw std::invalid_argument("r_matrix: dimension mismatch");
  LikelihoodRows rows = register_rows(basis, counts);
  return full_r(rows, evaluate(rows, state.coefficients(), density_floor));
}

EstimationResult solve(const ContinuousBasis& basis, const ContinuousData& data,
                       const EstimationConfig& config) {
  const int s = basis.size();
  if (data.n() + data.m() < s)
    throw std::domain_error("solve: need at least s observations (n + m >= s)");

  const bool coordinate_only = data.m() == 0;
  const bool momentum_only = data.n() == 0;
  const bool single_space = coordinate_only || momentum_only;

  // phases cannot be identified from one space alone; single-space
  // solves stay in the canonical chart (real c, or c_j = i^j d_j with
  // real d for momentum data) and report phases_unidentified
  static const std::complex<double> inv_phase[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  auto chart = [&](const Eigen::VectorXd& d) {
    Eigen::VectorXcd c(s);
    if (momentum_only)
      for (int j = 0; j < s; ++j) c[j] = inv_phase[j % 4] * d[j];
    else
      c = d.cast<std::complex<double>>();
    return c;
  };

  std::vector<Eigen::VectorXd> seeds;
  if (momentum_only) {
    ContinuousBasis conj_basis(s, 1.0 / basis.scale(), basis.quadrature_order());
    seeds = histogram_inits(data.momentum, conj_basis);
  } else {
    seeds = histogram_inits(data.coordinate, basis);
  }

  LikelihoodRows rows = continuous_rows(basis, data);
  std::vector<Eigen::VectorXcd> inits;
  if (single_space) {
    // rank the sign patterns by their starting likelihood and iterate
    // from the leading few, plus random restarts as a safety net
    std::vector<std::pair<double, int>> ranked;
    for (int k = 0; k < int(seeds.size()); ++k)
      ranked.emplace_back(evaluate(rows, chart(seeds[k]), config.density_floor).log_likelihood,
                          k);
    std::sort(ranked.begin(), ranked.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    for (int k = 0; k < int(ranked.size()) && k < 4; ++k)
      inits.push_back(chart(seeds[ranked[k].second]));
    std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ull);
    std::normal_distribution<double> normal;
    for (int k = 0; k < 2; ++k) {
      Eigen::VectorXd d(s);
      for (int j = 0; j < s; ++j) d[j] = normal(rng);
      d.normalize();
      inits.push_back(chart(d));
    }
  } else {
    const Eigen::VectorXd& d0 = seeds.front();
    inits.push_back(jitter_phases(chart(d0), config.init_phase_jitter, config.seed));
    std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> angle(-M_PI, M_PI);
    for (int k = 0; k < 3; ++k) {
      Eigen::VectorXcd c(s);
      for (int j = 0; j < s; ++j)
        c[j] = std::polar(std::max(std::abs(d0[j]), 1e-3), angle(rng));
      inits.push_back(c.normalized());
    }
  }
  return best_of(rows, inits, config, single_space);
}

EstimationResult solve_register(const DiscreteBasis& basis, const RegisterCounts& counts,
                                const EstimationConfig& config) {
  config.validate();
  const int s = basis.dimension();
  if (counts.direct.size() != s || counts.conjugate.size() != s)
    throw std::invalid_argument("solve_register: dimension mismatch");
  const long n = counts.n(), m = counts.m();
  if (n + m < 1) throw std::domain_error("solve_register: no observations");

  if (m == 0) {
    // closed-form stationary point of the likelihood equation
    Eigen::VectorXcd c(s);
    for (int i = 0; i < s; ++i) c[i] = std::sqrt(double(counts.direct[i]) / n);
    EstimationResult result{StateVector(c), double(n), 0.0, 0, 0.0, 0, true, true};
    LikelihoodRows rows = register_rows(basis, counts);
    result.log_likelihood =
        evaluate(rows, result.estimate.coefficients(), config.density_floor).log_likelihood;
    return result;
  }
  if (n == 0) {
    // mirror image: moduli fixed in the conjugate space
    Eigen::VectorXcd ct(s);
    for (int j = 0; j < s; ++j) ct[j] = std::sqrt(double(counts.conjugate[j]) / m);
    Eigen::VectorXcd c = basis.unitary().adjoint() * ct;
    LikelihoodRows rows = register_rows(basis, counts);
    Evaluation ev = evaluate(rows, c, config.density_floor);
    Eigen::VectorXcd rc = apply_r(rows, ev);
    double residual = (rc - rows.total * c).cwiseAbs().maxCoeff() / rows.total;
    return EstimationResult{StateVector(c),   std::real(c.dot(rc)), ev.log_likelihood, 0,
                            residual,         ev.floor_hits,        true,
                            true};
  }

  // smoothed moduli avoid hard zeros in the start point
  Eigen::VectorXcd smoothed(s);
  for (int i = 0; i < s; ++i)
    smoothed[i] = std::sqrt((counts.direct[i] + 0.5) / (n + 0.5 * s));

  Eigen::VectorXd direct_mod(s), conjugate_mod(s);
  for (int i = 0; i < s; ++i) direct_mod[i] = std::sqrt(double(counts.direct[i]) / n);
  for (int j = 0; j < s; ++j) conjugate_mod[j] = std::sqrt(double(counts.conjugate[j]) / m);

  std::vector<Eigen::VectorXcd> inits;
  inits.push_back(jitter_phases(smoothed, config.init_phase_jitter, config.seed));
  // random-phase starts refined by alternating-moduli projections; the
  // phase-retrieval likelihood has many stationary points
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ull);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  for (int k = 0; k < 3; ++k) {
    Eigen::VectorXcd c(s);
    for (int i = 0; i < s; ++i) c[i] = smoothed[i] * std::polar(1.0, angle(rng));
    inits.push_back(alternate_moduli(basis, direct_mod, conjugate_mod, c, 128));
  }

  LikelihoodRows rows = register_rows(basis, counts);
  return best_of(rows, inits, config, false);
}

EstimationResult solve(const ContinuousBasis& basis, const ContinuousData& data,
                       const EstimationConfig& config, const StateVector& initial) {
  if (initial.size() != basis.size())
    throw std::invalid_argument("solve: warm start dimension mismatch");
  if (data.n() + data.m() < basis.size())
    throw std::domain_error("solve: need at least s observations (n + m >= s)");
  LikelihoodRows rows = continuous_rows(basis, data);
  return iterate(rows, initial.coefficients(), config, data.n() == 0 || data.m() == 0);
}

EstimationResult solve_register(const DiscreteBasis& basis, const RegisterCounts& counts,
                                const EstimationConfig& config, const StateVector& initial) {
  if (initial.size() != basis.dimension())
    throw std::invalid_argument("solve_register: warm start dimension mismatch");
  if (counts.n() + counts.m() < 1) throw std::domain_error("solve_register: no observations");
  LikelihoodRows rows = register_rows(basis, counts);
  return iterate(rows, initial.coefficients(), config, counts.n() == 0 || counts.m() == 0);
}

OrderSelection select_order(const ContinuousData& data, double scale,
                            const std::vector<int>& s_candidates,
                            const EstimationConfig& config) {
  if (s_candidates.empty()) throw std::invalid_argument("select_order: empty candidate list");

  OrderSelection selection;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int s : s_candidates) {
    ContinuousBasis basis(s, scale);
    OrderCandidate cand;
    cand.s = s;
    try {
      EstimationResult fit = solve(basis, data, config);
      cand.log_likelihood = fit.log_likelihood;
      cand.converged = fit.converged;
      // BIC-style penalty on the free real parameter count: consistent
      // for true-order recovery, unlike the flat AIC penalty
      int k = (data.n() > 0 && data.m() > 0) ? 2 * s - 2 : s - 1;
      cand.score = fit.log_likelihood - 0.5 * k * std::log(double(data.n() + data.m()));
    } catch (const std::exception&) {
      cand.converged = false;
      cand.score = -std::numeric_limits<double>::infinity();
    }
    if (cand.converged && cand.score > best_score) {
      best_score = cand.score;
      selection.chosen = s;
    }
    selection.candidates.push_back(cand);
  }
  if (selection.chosen == 0)
    throw std::runtime_error("select_order: no candidate converged");
  return selection;
}

}  // namespace rootstate
