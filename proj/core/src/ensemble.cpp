#include "oneshot/ensemble.hpp"

#include <cmath>
#include <numeric>

namespace oneshot {

void Ensemble::validate(const Tolerances& tols) const {
  if (states.empty()) throw InvalidState("ensemble: states: expected >= 1");
  const int d = states.front().dim();
  for (const auto& s : states) {
    if (s.dim() != d) throw DimensionMismatch("ensemble states have mixed dims");
    s.require_normalized("ensemble state");
  }
  if (!labels.empty() && labels.size() != states.size()) {
    throw InvalidState("ensemble: |labels| != |states|");
  }
  if (!weights.empty()) {
    if (weights.size() != states.size()) {
      throw InvalidState("ensemble: |weights| != |states|");
    }
    double total = 0.0;
    for (double w : weights) {
      if (w < -tols.trace) throw InvalidState("ensemble: negative weight");
      total += w;
    }
    if (std::abs(total - 1.0) > tols.trace) {
      throw InvalidState("ensemble: weights sum to " + std::to_string(total));
    }
  }
}

DensityOperator Ensemble::joint_state() const {
  if (!has_weights()) throw InvalidState("joint_state requires weights");
  const int n = size();
  const int d = dim();
  Matrix joint = Matrix::Zero(n * d, n * d);
  for (int x = 0; x < n; ++x) {
    joint.block(x * d, x * d, d, d) = weights[x] * states[x].matrix();
  }
  return DensityOperator::trusted(joint);
}

BipartiteShape Ensemble::joint_shape() const { return {size(), dim()}; }

DensityOperator Ensemble::average_state() const {
  if (!has_weights()) throw InvalidState("average_state requires weights");
  Matrix avg = Matrix::Zero(dim(), dim());
  for (int x = 0; x < size(); ++x) avg += weights[x] * states[x].matrix();
  return DensityOperator::trusted(avg);
}

Ensemble Ensemble::make(std::vector<DensityOperator> states,
                        std::vector<double> weights,
                        std::vector<std::string> labels) {
  Ensemble ens;
  ens.states = std::move(states);
  ens.weights = std::move(weights);
  if (labels.empty()) {
    for (int i = 0; i < ens.size(); ++i) labels.push_back("x" + std::to_string(i));
  }
  ens.labels = std::move(labels);
  ens.validate();
  return ens;
}

DensityOperator CqState::joint_state() const {
  const int n = symbols();
  const int d = dim();
  Matrix joint = Matrix::Zero(n * d, n * d);
  for (int x = 0; x < n; ++x) {
    joint.block(x * d, x * d, d, d) = weights[x] * conditionals[x].matrix();
  }
  return DensityOperator::trusted(joint);
}

BipartiteShape CqState::joint_shape() const { return {symbols(), dim()}; }

CqState CqState::from_ensemble(const Ensemble& ens) {
  if (!ens.has_weights()) throw InvalidState("CQ state requires weights");
  return CqState{ens.weights, ens.states};
}

CqState CqState::tensor_power(int n) const {
  if (n < 1) throw InvalidConfig("tensor_power: n must be >= 1");
  CqState out = *this;
  for (int k = 1; k < n; ++k) {
    CqState next;
    for (int i = 0; i < out.symbols(); ++i) {
      for (int j = 0; j < symbols(); ++j) {
        next.weights.push_back(out.weights[i] * weights[j]);
        next.conditionals.push_back(DensityOperator::trusted(
            kron(out.conditionals[i].matrix(), conditionals[j].matrix())));
      }
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace oneshot
