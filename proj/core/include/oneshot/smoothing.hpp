#pragma once

#include <vector>

#include "oneshot/ensemble.hpp"
#include "oneshot/operators.hpp"
#include "oneshot/sdp.hpp"

namespace oneshot {

/// Fidelity via the block-matrix SDP max Re Tr X s.t. [[rho, X],[X*, sigma]]
/// >= 0; the cross-check route for operators::fidelity and the gadget other
/// smoothing programs embed.
double fidelity_sdp(const DensityOperator& rho, const DensityOperator& sigma);

/// Smooth max-relative entropy min over the eps-ball around rho of D_max,
/// in bits. Radii at or above 1 admit the zero operator and return -inf;
/// support obstructions that survive smoothing return +inf.
double smooth_d_max(const DensityOperator& rho, const DensityOperator& sigma,
                    double eps);

enum class SmoothMode { FixedMarginal, VariableMarginal };

const char* to_string(SmoothMode mode);

/// Value plus the smoothing witnesses needed by the protocol constructions.
struct SmoothImaxResult {
  double value = 0.0;          // log2 Tr tau*
  SmoothMode mode = SmoothMode::FixedMarginal;
  std::vector<double> q;       // marginal weights used
  std::vector<Matrix> chis;    // per-symbol smoothed blocks, Tr <= 1
  Matrix tau;                  // dominating operator, sigma = tau / Tr tau
};

/// Smooth max-information of the CQ state of a weighted ensemble.
/// FixedMarginal solves one SDP at q = p; VariableMarginal wraps it in a
/// Nelder-Mead search over the sub-simplex of marginals. FixedMarginal >=
/// VariableMarginal; both are reported as upper estimates of the smoothed
/// quantity together with the mode that produced them.
SmoothImaxResult smooth_i_max_cq(const Ensemble& ensemble, double eps,
                                 SmoothMode mode = SmoothMode::FixedMarginal);

struct MinMaxRadiusResult {
  double value = 0.0;          // log2 Tr sigma'*
  std::vector<Matrix> omegas;  // per-x smoothed states, Tr <= 1
  Matrix sigma_prime;
};

/// min_sigma max_x D_max^delta(Q(x) || sigma) as the single SDP
/// min Tr sigma' s.t. sigma' >= omega_x, Tr omega_x <= 1,
/// F(Q(x), omega_x) >= sqrt(1 - delta^2). Radius >= 1 returns -inf.
MinMaxRadiusResult min_max_radius(const Ensemble& ensemble, double delta);

struct QaepResult {
  double lhs_lb = -kInf;   // lower line of the equipartition sandwich
  double value = 0.0;      // (1/n) I_max^eps of the n-fold power
  double rhs_ub = kInf;    // upper line
  bool lower_applicable = false;  // n >= 2(1 - eps^2)
  int n = 1;
};

/// Finite-n asymptotic-equipartition sandwich for the smooth
/// max-information of CQ tensor powers (n in {1, 2}; desk-scale dims).
QaepResult qaep_check(const Ensemble& ensemble, int n, double eps);

}  // namespace oneshot
