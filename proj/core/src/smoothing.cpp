#include "oneshot/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "oneshot/divergences.hpp"

namespace oneshot {

namespace {

constexpr double kWeightCut = 1e-12;

double binary_entropy(double x) {
  double h = 0.0;
  if (x > 1e-15) h -= x * std::log2(x);
  if (1.0 - x > 1e-15) h -= (1.0 - x) * std::log2(1.0 - x);
  return h;
}

// Fidelity gadget: PSD block [[rho_s, Y], [Y*, (variable)]] with the fixed
// side compressed to its support so the program keeps a strict interior.
// Returns the block id and the Hermitian functional C with
// <C, G> = Re Tr(V Y) = achievable fidelity F(rho, variable).
struct FidGadget {
  int block = -1;
  Matrix functional;
};

FidGadget add_fidelity_gadget(SdpProblem& p, const Matrix& rho_fixed,
                              int var_block, int var_dim) {
  const EigResult eig = eig_hermitian(rho_fixed);
  int rank = 0;
  for (int i = 0; i < eig.values.size(); ++i) {
    if (eig.values(i) > 1e-12) ++rank;
  }
  const int d = static_cast<int>(rho_fixed.rows());
  Matrix iso(d, rank);
  int c = 0;
  for (int i = 0; i < eig.values.size(); ++i) {
    if (eig.values(i) > 1e-12) iso.col(c++) = eig.vectors.col(i);
  }
  const Matrix rho_s = hermitize(iso.adjoint() * rho_fixed * iso);

  FidGadget g;
  g.block = p.add_block(rank + var_dim);
  // Pin the (1,1) corner to rho_s and tie the (2,2) corner to the variable.
  add_entrywise_equality(p, rank, {{g.block, 1.0, 0}}, -1, Matrix(), rho_s);
  // (2,2) corner minus variable = 0; offsets differ per block, so assemble
  // the d^2 equations directly.
  for (int i = 0; i < var_dim; ++i) {
    for (int j = i; j < var_dim; ++j) {
      p.add_constraint({{g.block, herm_basis_re(rank + var_dim, rank + i, rank + j)},
                        {var_block, -herm_basis_re(var_dim, i, j)}},
                       0.0);
      if (i != j) {
        p.add_constraint({{g.block, herm_basis_im(rank + var_dim, rank + i, rank + j)},
                          {var_block, -herm_basis_im(var_dim, i, j)}},
                         0.0);
      }
    }
  }
  g.functional = Matrix::Zero(rank + var_dim, rank + var_dim);
  g.functional.block(0, rank, rank, var_dim) = 0.5 * iso.adjoint();
  g.functional.block(rank, 0, var_dim, rank) = 0.5 * iso;
  return g;
}

}  // namespace

const char* to_string(SmoothMode mode) {
  return mode == SmoothMode::FixedMarginal ? "FixedMarginal" : "VariableMarginal";
}

double fidelity_sdp(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.dim() != sigma.dim()) throw DimensionMismatch("fidelity_sdp");
  const int d = rho.dim();
  SdpProblem p;
  const int bs = p.add_block(d);  // pinned copy of sigma
  add_entrywise_equality(p, d, {{bs, 1.0, 0}}, -1, Matrix(), sigma.matrix());
  const FidGadget g = add_fidelity_gadget(p, rho.matrix(), bs, d);
  p.add_objective(g.block, -g.functional);
  const SdpSolution sol = solve_sdp(p);
  require_usable(sol, "fidelity_sdp");
  return -sol.primal_value;
}

double smooth_d_max(const DensityOperator& rho, const DensityOperator& sigma,
                    double eps) {
  if (rho.dim() != sigma.dim()) throw DimensionMismatch("smooth_d_max");
  rho.require_normalized("smooth_d_max");
  if (eps < 0.0) throw InvalidEps("smooth_d_max: eps must be >= 0");
  if (eps >= 1.0 - 1e-12) return -kInf;  // the ball contains the zero operator
  if (eps <= 1e-12) return d_max(rho, sigma);

  // Everything lives on supp(sigma): mass of rho outside it caps the
  // achievable fidelity at sqrt(Tr(P rho)).
  const Matrix proj = support_projector(sigma.matrix(), sigma.tols().support);
  const double reachable = (proj * rho.matrix()).trace().real();
  const double needed = 1.0 - eps * eps;
  if (reachable < needed - 1e-9) return kInf;

  const EigResult eig = eig_hermitian(sigma.matrix());
  int rank = 0;
  for (int i = 0; i < eig.values.size(); ++i) {
    if (eig.values(i) > sigma.tols().support) ++rank;
  }
  Matrix iso(sigma.dim(), rank);
  int c = 0;
  for (int i = 0; i < eig.values.size(); ++i) {
    if (eig.values(i) > sigma.tols().support) iso.col(c++) = eig.vectors.col(i);
  }
  const Matrix sig_c = hermitize(iso.adjoint() * sigma.matrix() * iso);
  const Matrix rho_c = hermitize(iso.adjoint() * rho.matrix() * iso);
  const int d = rank;

  SdpProblem p;
  const int brt = p.add_block(d);   // smoothed state rho~
  const int bmu = p.add_block(1);   // scalar mu with rho~ <= mu sigma
  const int bt = p.add_block(d);    // slack mu sigma - rho~
  const int bu = p.add_block(1);    // slack of Tr rho~ <= 1
  const int bf = p.add_block(1);    // slack of the fidelity constraint
  p.add_objective(bmu, Matrix::Identity(1, 1));

  add_entrywise_equality(p, d, {{brt, -1.0, 0}, {bt, -1.0, 0}}, bmu, sig_c,
                         Matrix::Zero(d, d));
  p.add_constraint({{brt, Matrix::Identity(d, d)}, {bu, Matrix::Identity(1, 1)}},
                   1.0);
  const FidGadget g = add_fidelity_gadget(p, rho_c, brt, d);
  p.add_constraint({{g.block, g.functional}, {bf, -Matrix::Identity(1, 1)}},
                   std::sqrt(needed));

  const SdpSolution sol = solve_sdp(p);
  if (sol.status == SdpStatus::Infeasible) return kInf;
  require_usable(sol, "smooth_d_max");
  return std::log2(std::max(sol.primal_value, 1e-300));
}

namespace {

// Shared encoder for the CQ smoothing programs. Weights w_x multiply the
// per-symbol fidelities in one averaged constraint when `averaged` is set;
// otherwise each symbol gets its own constraint at the target.
struct CqSmoothingOutcome {
  double value = 0.0;
  std::vector<Matrix> blocks;  // per active symbol
  Matrix tau;
};

CqSmoothingOutcome solve_cq_smoothing(const std::vector<Matrix>& states,
                                      const std::vector<double>& fid_weights,
                                      const std::vector<bool>& active,
                                      double fid_target, bool averaged,
                                      const char* what) {
  const int n = static_cast<int>(states.size());
  const int d = static_cast<int>(states.front().rows());

  SdpProblem p;
  const int btau = p.add_block(d);
  p.add_objective(btau, Matrix::Identity(d, d));

  std::vector<int> chi_blocks(n, -1);
  std::vector<SdpTerm> avg_terms;
  for (int x = 0; x < n; ++x) {
    if (!active[x]) continue;
    const int bchi = p.add_block(d);
    chi_blocks[x] = bchi;
    const int bslack = p.add_block(d);  // tau - chi_x
    add_entrywise_equality(p, d,
                           {{btau, 1.0, 0}, {bchi, -1.0, 0}, {bslack, -1.0, 0}},
                           -1, Matrix(), Matrix::Zero(d, d));
    const int btr = p.add_block(1);  // Tr chi_x <= 1
    p.add_constraint({{bchi, Matrix::Identity(d, d)}, {btr, Matrix::Identity(1, 1)}},
                     1.0);
    const FidGadget g = add_fidelity_gadget(p, states[x], bchi, d);
    if (averaged) {
      avg_terms.push_back({g.block, fid_weights[x] * g.functional});
    } else {
      const int bf = p.add_block(1);
      p.add_constraint({{g.block, g.functional}, {bf, -Matrix::Identity(1, 1)}},
                       fid_target);
    }
  }
  if (averaged) {
    const int bf = p.add_block(1);
    avg_terms.push_back({bf, -Matrix::Identity(1, 1)});
    p.add_constraint(std::move(avg_terms), fid_target);
  }

  const SdpSolution sol = solve_sdp(p);
  require_usable(sol, what);

  CqSmoothingOutcome out;
  out.value = std::log2(std::max(sol.primal_value, 1e-300));
  out.tau = sol.blocks[btau];
  out.blocks.resize(n);
  for (int x = 0; x < n; ++x) {
    if (chi_blocks[x] >= 0) out.blocks[x] = sol.blocks[chi_blocks[x]];
  }
  return out;
}

int d_of(const std::vector<Matrix>& states) {
  return static_cast<int>(states.front().rows());
}

SmoothImaxResult smooth_i_max_fixed_q(const Ensemble& ens,
                                      const std::vector<double>& q, double eps) {
  const int n = ens.size();
  SmoothImaxResult res;
  res.q = q;

  std::vector<bool> active(n);
  std::vector<double> weights(n, 0.0);
  std::vector<Matrix> states(n);
  for (int x = 0; x < n; ++x) {
    active[x] = q[x] > kWeightCut;
    states[x] = ens.states[x].matrix();
    weights[x] = std::sqrt(ens.weights[x] * q[x]);
  }

  if (eps <= 1e-12) {
    // The ball collapses: chi_x = Q(x), leaving min Tr tau s.t. tau >= Q(x).
    SdpProblem p;
    const int btau = p.add_block(d_of(states));
    p.add_objective(btau, Matrix::Identity(d_of(states), d_of(states)));
    for (int x = 0; x < n; ++x) {
      if (!active[x]) continue;
      const int bslack = p.add_block(d_of(states));
      add_entrywise_equality(p, d_of(states),
                             {{btau, 1.0, 0}, {bslack, -1.0, 0}}, -1, Matrix(),
                             states[x]);
    }
    const SdpSolution sol = solve_sdp(p);
    require_usable(sol, "smooth_i_max_cq(eps=0)");
    res.value = std::log2(std::max(sol.primal_value, 1e-300));
    res.tau = sol.blocks[btau];
    res.chis = states;
    return res;
  }

  CqSmoothingOutcome out =
      solve_cq_smoothing(states, weights, active,
                         std::sqrt(1.0 - eps * eps), true, "smooth_i_max_cq");
  res.value = out.value;
  res.tau = out.tau;
  res.chis.resize(n);
  for (int x = 0; x < n; ++x) {
    res.chis[x] = active[x] ? out.blocks[x] : out.tau;
  }
  return res;
}

}  // namespace

SmoothImaxResult smooth_i_max_cq(const Ensemble& ensemble, double eps,
                                 SmoothMode mode) {
  ensemble.validate();
  if (!ensemble.has_weights()) {
    throw InvalidState("smooth_i_max_cq requires ensemble weights");
  }
  if (eps < 0.0 || eps >= 1.0) throw InvalidEps("smooth_i_max_cq: eps in [0, 1)");

  if (mode == SmoothMode::FixedMarginal) {
    SmoothImaxResult res = smooth_i_max_fixed_q(ensemble, ensemble.weights, eps);
    res.mode = SmoothMode::FixedMarginal;
    return res;
  }

  // VariableMarginal: Nelder-Mead over the sub-simplex of marginals around
  // the inner fixed-q program. Coordinates are squared then scaled so any
  // z in R^n maps into {q >= 0, sum q <= 1}.
  const int n = ensemble.size();
  auto to_q = [&](const std::vector<double>& z) {
    std::vector<double> q(n);
    double total = 0.0;
    for (int x = 0; x < n; ++x) {
      q[x] = z[x] * z[x];
      total += q[x];
    }
    if (total > 1.0) {
      for (auto& v : q) v /= total;
    }
    return q;
  };

  SmoothImaxResult best;
  best.value = kInf;
  auto evaluate = [&](const std::vector<double>& z) {
    const std::vector<double> q = to_q(z);
    try {
      SmoothImaxResult res = smooth_i_max_fixed_q(ensemble, q, eps);
      if (res.value < best.value) {
        best = res;
      }
      return res.value;
    } catch (const SolverFailure&) {
      return kInf;
    }
  };

  std::vector<std::vector<double>> simplex;
  std::vector<double> z0(n);
  for (int x = 0; x < n; ++x) z0[x] = std::sqrt(ensemble.weights[x]);
  simplex.push_back(z0);
  for (int k = 0; k < n; ++k) {
    auto z = z0;
    z[k] += (z[k] > 0.2) ? -0.15 : 0.15;
    simplex.push_back(z);
  }
  std::vector<double> fvals;
  for (const auto& z : simplex) fvals.push_back(evaluate(z));

  const int max_nm_iters = 40 * n;
  for (int it = 0; it < max_nm_iters; ++it) {
    // Order simplex.
    std::vector<int> idx(simplex.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return fvals[a] < fvals[b]; });
    std::vector<std::vector<double>> s2;
    std::vector<double> f2;
    for (int i : idx) {
      s2.push_back(simplex[i]);
      f2.push_back(fvals[i]);
    }
    simplex = s2;
    fvals = f2;
    if (std::abs(fvals.back() - fvals.front()) < 1e-7) break;

    std::vector<double> centroid(n, 0.0);
    for (size_t i = 0; i + 1 < simplex.size(); ++i) {
      for (int k = 0; k < n; ++k) centroid[k] += simplex[i][k];
    }
    for (int k = 0; k < n; ++k) centroid[k] /= static_cast<double>(n);

    auto blend = [&](double coef) {
      std::vector<double> z(n);
      for (int k = 0; k < n; ++k) {
        z[k] = centroid[k] + coef * (simplex.back()[k] - centroid[k]);
      }
      return z;
    };

    const auto zr = blend(-1.0);
    const double fr = evaluate(zr);
    if (fr < fvals.front()) {
      const auto ze = blend(-2.0);
      const double fe = evaluate(ze);
      if (fe < fr) {
        simplex.back() = ze;
        fvals.back() = fe;
      } else {
        simplex.back() = zr;
        fvals.back() = fr;
      }
    } else if (fr < fvals[fvals.size() - 2]) {
      simplex.back() = zr;
      fvals.back() = fr;
    } else {
      const auto zc = blend(0.5);
      const double fc = evaluate(zc);
      if (fc < fvals.back()) {
        simplex.back() = zc;
        fvals.back() = fc;
      } else {
        for (size_t i = 1; i < simplex.size(); ++i) {
          for (int k = 0; k < n; ++k) {
            simplex[i][k] = 0.5 * (simplex[i][k] + simplex[0][k]);
          }
          fvals[i] = evaluate(simplex[i]);
        }
      }
    }
  }

  if (!std::isfinite(best.value)) {
    throw NonConvergence("smooth_i_max_cq: VariableMarginal search failed");
  }
  best.mode = SmoothMode::VariableMarginal;
  return best;
}

MinMaxRadiusResult min_max_radius(const Ensemble& ensemble, double delta) {
  ensemble.validate();
  if (delta < 0.0) throw InvalidEps("min_max_radius: delta must be >= 0");
  MinMaxRadiusResult res;
  if (delta >= 1.0 - 1e-12) {
    res.value = -kInf;  // every state smooths to the zero operator
    return res;
  }

  const int n = ensemble.size();
  const int d = ensemble.dim();
  std::vector<Matrix> states(n);
  for (int x = 0; x < n; ++x) states[x] = ensemble.states[x].matrix();

  if (delta <= 1e-12) {
    SdpProblem p;
    const int bs = p.add_block(d);
    p.add_objective(bs, Matrix::Identity(d, d));
    for (int x = 0; x < n; ++x) {
      const int bk = p.add_block(d);
      add_entrywise_equality(p, d, {{bs, 1.0, 0}, {bk, -1.0, 0}}, -1, Matrix(),
                             states[x]);
    }
    const SdpSolution sol = solve_sdp(p);
    require_usable(sol, "min_max_radius(delta=0)");
    res.value = std::log2(std::max(sol.primal_value, 1e-300));
    res.omegas = states;
    res.sigma_prime = sol.blocks[0];
    return res;
  }

  std::vector<bool> active(n, true);
  std::vector<double> unit(n, 1.0);
  CqSmoothingOutcome out = solve_cq_smoothing(
      states, unit, active, std::sqrt(1.0 - delta * delta), false,
      "min_max_radius");
  res.value = out.value;
  res.omegas = out.blocks;
  res.sigma_prime = out.tau;
  return res;
}

QaepResult qaep_check(const Ensemble& ensemble, int n, double eps) {
  ensemble.validate();
  if (!ensemble.has_weights()) throw InvalidState("qaep_check requires weights");
  if (n < 1) throw InvalidConfig("qaep_check: n >= 1");
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidEps("qaep_check: eps in (0, 1)");

  const int base_symbols = ensemble.size();
  const int base_dim = ensemble.dim();
  double power_dim = 1.0;
  for (int k = 0; k < n; ++k) power_dim *= base_symbols * base_dim;
  if (power_dim > 128.0 * 128.0) {
    throw InvalidConfig("qaep_check: tensor power exceeds desk scale");
  }

  CqState power = CqState::from_ensemble(ensemble).tensor_power(n);
  Ensemble power_ens;
  power_ens.weights = power.weights;
  power_ens.states = power.conditionals;
  for (int i = 0; i < power.symbols(); ++i) {
    power_ens.labels.push_back("t" + std::to_string(i));
  }

  QaepResult res;
  res.n = n;
  res.value = smooth_i_max_cq(power_ens, eps).value / n;

  const double info = mutual_information(ensemble.joint_state(),
                                         ensemble.joint_shape());
  const double log_ab = std::log2(static_cast<double>(base_symbols) *
                                  static_cast<double>(base_dim));
  res.lower_applicable = n >= 2.0 * (1.0 - eps * eps);
  res.lhs_lb = info - (3.0 / n) * binary_entropy(eps) - 2.0 * eps * log_ab;
  const double xi = 8.0 * std::sqrt(13.0 - 4.0 * std::log2(eps)) *
                    (2.0 + 0.5 * std::log2(static_cast<double>(base_symbols)));
  res.rhs_ub = info + xi / std::sqrt(static_cast<double>(n)) -
               (2.0 / n) * std::log2(eps * eps / 24.0);
  return res;
}

}  // namespace oneshot
