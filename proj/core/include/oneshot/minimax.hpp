#pragma once

#include "oneshot/ensemble.hpp"
#include "oneshot/sdp.hpp"

namespace oneshot {

/// Saddle point of the convex-concave game
///   min_p max_sigma beta^lambda(rho_AB(p) || rho_A(p) (x) sigma).
/// gap is the certified best-response improvement available to either
/// player at (p_star, sigma_star).
struct SaddleResult {
  double value = 0.0;
  std::vector<double> p_star;
  Matrix sigma_star;
  double gap = kInf;
};

/// Solves the game. The inner hypothesis-testing minimization is dualized,
/// giving max_sigma min_p as a single SDP; p_star comes from the dual
/// multipliers, polished by subgradient steps on the convex upper envelope
/// until the best-response gap drops below tol.
SaddleResult solve_saddle(const Ensemble& ensemble, double lambda_eps,
                          double tol = 1e-4, int max_rounds = 50);

/// Evaluates beta^lambda(rho_AB(p) || rho_A(p) (x) sigma) for a fixed
/// marginal and reference state; used by the certificates and tests.
double beta_cq(const Ensemble& ensemble, const std::vector<double>& p,
               const Matrix& sigma, double lambda_eps);

/// Worst-case lower bound of the communication cost:
///   min_sigma max_x D_max^gamma(Q(x)||sigma)
///     - log2((1-eps^2)(eps^2+delta)/delta^3) - 3 log2 3,
/// with gamma = sqrt(2(eps^2 + delta)).
double worst_case_lower_bound(const Ensemble& ensemble, double eps,
                              double delta);

}  // namespace oneshot
