#pragma once

#include "oneshot/ensemble.hpp"
#include "oneshot/operators.hpp"

namespace oneshot {

/// von Neumann entropy in bits, 0 log 0 = 0.
double von_neumann(const DensityOperator& rho);

/// S(rho || sigma) in bits; +inf when supp(rho) is not inside supp(sigma)
/// (eigenvalue threshold 1e-9).
double relative_entropy(const DensityOperator& rho,
                        const DensityOperator& sigma);

/// I(A:B) = S(A) + S(B) - S(AB), clamped at 0 from below.
double mutual_information(const DensityOperator& rho_AB,
                          const BipartiteShape& shape);

/// Holevo information of a weighted ensemble, sum_j p_j S(rho_j || rho_bar).
double holevo(const Ensemble& ensemble);

/// Observational divergence sup_M Tr(M rho) log2(Tr M rho / Tr M sigma),
/// evaluated on a t-grid through the Neyman-Pearson testing region with one
/// golden-section refinement. Returns a certified lower bound on the sup,
/// accurate to 1e-4 at the default grid size; +inf on support violation.
double d_obs(const DensityOperator& rho, const DensityOperator& sigma,
             int grid_size = 512);

/// D_max(rho || sigma) = log2 lambda_max(sigma^{-1/2} rho sigma^{-1/2});
/// +inf on support violation.
double d_max(const DensityOperator& rho, const DensityOperator& sigma);

/// I_max(A:B) = min_sigma D_max(rho_AB || rho_A x sigma), as the SDP
/// log2 min { Tr sigma' : rho_A x sigma' >= rho_AB, sigma' >= 0 }.
double i_max(const DensityOperator& rho_AB, const BipartiteShape& shape);

/// Same quantity through the classical-quantum block structure:
/// log2 min { Tr tau : tau >= Q(x) for all x with q_x > 1e-12 }.
double i_max_cq(const CqState& cq);

struct TofqResult {
  double value = 0.0;
  std::vector<double> p;
  int iterations = 0;
};

/// T(Q) = max_p I(A:B)_{rho(p)} by the Blahut-Arimoto style fixed point,
/// to first-order stationarity tol; throws NonConvergence past max_iter.
TofqResult t_of_q(const Ensemble& ensemble, double tol = 1e-6,
                  int max_iter = 10000);

/// Substate-theorem bound d_obs(rho||sigma)/eps^2 + log2(1/(1-eps^2));
/// +inf for eps above 1 - 1e-9.
double substate_bound(const DensityOperator& rho, const DensityOperator& sigma,
                      double eps);

}  // namespace oneshot
