#pragma once

#include <string>
#include <vector>

#include "oneshot/operators.hpp"

namespace oneshot {

/// Finite input set S with encoding Q : S -> states and an optional prior p.
/// Carrier of rho_AB(p) = sum_x p_x |x><x| (x) Q(x).
struct Ensemble {
  std::vector<std::string> labels;
  std::vector<DensityOperator> states;
  std::vector<double> weights;  // empty when no prior is attached

  int size() const { return static_cast<int>(states.size()); }
  int dim() const { return states.empty() ? 0 : states.front().dim(); }
  bool has_weights() const { return !weights.empty(); }

  /// Checks label/state/weight consistency, equal dims, normalized states,
  /// and that weights (when present) form a distribution.
  void validate(const Tolerances& tols = default_tols()) const;

  /// rho_AB(p) as a dense operator on C^{|S|} (x) C^dim.
  DensityOperator joint_state() const;
  BipartiteShape joint_shape() const;

  DensityOperator average_state() const;

  static Ensemble make(std::vector<DensityOperator> states,
                       std::vector<double> weights = {},
                       std::vector<std::string> labels = {});
};

/// Block form of a classical-quantum state: sum_x q_x |x><x| (x) block_x.
struct CqState {
  std::vector<double> weights;               // q_x >= 0, sum <= 1
  std::vector<DensityOperator> conditionals; // normalized blocks

  int symbols() const { return static_cast<int>(weights.size()); }
  int dim() const { return conditionals.empty() ? 0 : conditionals.front().dim(); }
  DensityOperator joint_state() const;
  BipartiteShape joint_shape() const;

  static CqState from_ensemble(const Ensemble& ens);
  /// n-fold tensor power; symbols are tuples, conditionals tensor products.
  CqState tensor_power(int n) const;
};

}  // namespace oneshot
