#pragma once

#include <utility>

#include "oneshot/operators.hpp"
#include "oneshot/sdp.hpp"

namespace oneshot {

/// Feasible test 0 <= Q <= 1 together with its achieved error pair
/// alpha = <Q, rho>, beta = <Q, sigma>.
struct TestOperator {
  Matrix q;
  double alpha = 0.0;
  double beta = 0.0;

  void validate(const Tolerances& tols = default_tols()) const;
};

struct BetaResult {
  double value = 0.0;
  TestOperator test;
};

/// beta^eps(rho||sigma) = inf { <Q, sigma> : 0 <= Q <= 1, <Q, rho> >= 1-eps },
/// solved through the Neyman-Pearson structure: Q = P_{>}(rho - t sigma) +
/// mu P_{=}(rho - t sigma) with t found by bisection and mu picking the exact
/// alpha target on the kernel eigenspace. Values below 1e-14 report as 0.
BetaResult beta_eps(const DensityOperator& rho, const DensityOperator& sigma,
                    double eps);

/// Same quantity as a dense SDP solve; the independent route used by the
/// Neyman-Pearson optimality checks.
double beta_eps_sdp(const DensityOperator& rho, const DensityOperator& sigma,
                    double eps);

/// D_h^eps = -log2(beta^eps / (1 - eps)); +inf when beta^eps = 0.
double d_h(const DensityOperator& rho, const DensityOperator& sigma,
           double eps);

/// The interval [D_h^{eps-delta} - log2(eps(1-eps+delta)/delta^3) - 3 log2 3,
/// D_h^eps] that brackets the indicated smooth max-relative entropies.
std::pair<double, double> dmax_dh_bridge(const DensityOperator& rho,
                                         const DensityOperator& sigma,
                                         double eps, double delta);

}  // namespace oneshot
