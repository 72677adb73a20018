#include "oneshot/minimax.hpp"

#include <algorithm>
#include <cmath>

#include "oneshot/hypothesis.hpp"
#include "oneshot/smoothing.hpp"

namespace oneshot {

namespace {

// Tr[mu Q_x - sigma]_+ for every symbol.
std::vector<double> clipped_traces(const Ensemble& ens, double mu,
                                   const Matrix& sigma) {
  std::vector<double> t(ens.size());
  for (int x = 0; x < ens.size(); ++x) {
    t[x] = trace_positive_part(mu * ens.states[x].matrix() - sigma);
  }
  return t;
}

// l(sigma) = min_p beta = max_{mu >= 0} (1-lambda) mu - max_x Tr[mu Q_x - sigma]_+,
// a 1-D concave maximization solved by golden section.
double p_best_response_value(const Ensemble& ens, const Matrix& sigma,
                             double lambda_eps) {
  auto phi = [&](double mu) {
    const auto t = clipped_traces(ens, mu, sigma);
    return (1.0 - lambda_eps) * mu - *std::max_element(t.begin(), t.end());
  };
  double a = 0.0;
  double b = 1.0 / std::max(lambda_eps, 1e-6) + 1.0;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = phi(x1), f2 = phi(x2);
  for (int i = 0; i < 120; ++i) {
    if (f1 > f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = phi(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = phi(x2);
    }
  }
  return std::max({phi(0.0), f1, f2});
}

struct SigmaBr {
  double value = 0.0;
  Matrix sigma;
  double mu = 0.0;
};

// u(p) = max_sigma beta(p, sigma), solved as the SDP
//   max (1-lambda) mu - sum_x Tr Y_x
//   s.t. p_x sigma - p_x mu Q_x + Y_x >= 0, Tr sigma = 1.
SigmaBr sigma_best_response(const Ensemble& ens, const std::vector<double>& p,
                            double lambda_eps) {
  const int d = ens.dim();
  SdpProblem prob;
  const int bsig = prob.add_block(d);
  const int bmu = prob.add_block(1);
  prob.add_objective(bmu, -(1.0 - lambda_eps) * Matrix::Identity(1, 1));
  prob.add_constraint({{bsig, Matrix::Identity(d, d)}}, 1.0);
  for (int x = 0; x < ens.size(); ++x) {
    if (p[x] <= 1e-14) continue;
    const int by = prob.add_block(d);
    prob.add_objective(by, Matrix::Identity(d, d));
    const int bw = prob.add_block(d);
    add_entrywise_equality(prob, d,
                           {{bsig, p[x], 0}, {by, 1.0, 0}, {bw, -1.0, 0}},
                           bmu, -p[x] * ens.states[x].matrix(),
                           Matrix::Zero(d, d));
  }
  const SdpSolution sol = solve_sdp(prob);
  require_usable(sol, "sigma best response");
  SigmaBr out;
  out.value = -sol.primal_value;
  out.sigma = hermitize(sol.blocks[bsig]);
  out.mu = sol.blocks[bmu](0, 0).real();
  return out;
}

std::vector<double> project_simplex(std::vector<double> v) {
  // Sort-and-threshold Euclidean projection.
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cum = 0.0, theta = 0.0;
  int rho = 0;
  for (size_t i = 0; i < u.size(); ++i) {
    cum += u[i];
    const double t = (cum - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) {
      rho = static_cast<int>(i + 1);
      theta = t;
    }
  }
  (void)rho;
  for (auto& x : v) x = std::max(0.0, x - theta);
  return v;
}

}  // namespace

double beta_cq(const Ensemble& ensemble, const std::vector<double>& p,
               const Matrix& sigma, double lambda_eps) {
  const int n = ensemble.size();
  const int d = ensemble.dim();
  Matrix rho = Matrix::Zero(n * d, n * d);
  Matrix ref = Matrix::Zero(n * d, n * d);
  for (int x = 0; x < n; ++x) {
    rho.block(x * d, x * d, d, d) = p[x] * ensemble.states[x].matrix();
    ref.block(x * d, x * d, d, d) = p[x] * sigma;
  }
  return beta_eps(DensityOperator::trusted(rho), DensityOperator::trusted(ref),
                  lambda_eps)
      .value;
}

SaddleResult solve_saddle(const Ensemble& ensemble, double lambda_eps,
                          double tol, int max_rounds) {
  ensemble.validate();
  if (!(lambda_eps >= 0.0 && lambda_eps < 1.0)) {
    throw InvalidEps("solve_saddle: lambda in [0, 1)");
  }
  const int n = ensemble.size();
  const int d = ensemble.dim();

  // max_sigma min_p beta as one SDP:
  //   max (1-lambda) mu - s
  //   s.t. T_x >= mu Q_x - sigma, T_x >= 0, s >= Tr T_x, Tr sigma = 1.
  SdpProblem prob;
  const int bsig = prob.add_block(d);
  const int bmu = prob.add_block(1);
  const int bs = prob.add_block(1);
  prob.add_objective(bmu, -(1.0 - lambda_eps) * Matrix::Identity(1, 1));
  prob.add_objective(bs, Matrix::Identity(1, 1));
  prob.add_constraint({{bsig, Matrix::Identity(d, d)}}, 1.0);
  std::vector<int> u_rows(n);
  for (int x = 0; x < n; ++x) {
    const int bt = prob.add_block(d);
    const int bw = prob.add_block(d);
    add_entrywise_equality(prob, d,
                           {{bt, 1.0, 0}, {bsig, 1.0, 0}, {bw, -1.0, 0}},
                           bmu, -ensemble.states[x].matrix(),
                           Matrix::Zero(d, d));
    const int bu = prob.add_block(1);
    prob.add_constraint({{bs, Matrix::Identity(1, 1)},
                         {bt, -Matrix::Identity(d, d)},
                         {bu, -Matrix::Identity(1, 1)}},
                        0.0);
    u_rows[x] = prob.num_constraints() - 1;
  }

  const SdpSolution sol = solve_sdp(prob);
  require_usable(sol, "solve_saddle");

  SaddleResult res;
  res.value = -sol.primal_value;
  res.sigma_star = hermitize(sol.blocks[bsig]);
  // Make sigma_star an exact state for downstream evaluation.
  res.sigma_star = positive_part(res.sigma_star);
  res.sigma_star /= res.sigma_star.trace().real();

  std::vector<double> p(n);
  double total = 0.0;
  for (int x = 0; x < n; ++x) {
    p[x] = std::max(0.0, sol.dual(u_rows[x]));
    total += p[x];
  }
  if (total < 1e-12) {
    std::fill(p.begin(), p.end(), 1.0 / n);
  } else {
    for (auto& v : p) v /= total;
  }

  const double lower = p_best_response_value(ensemble, res.sigma_star, lambda_eps);
  SigmaBr br = sigma_best_response(ensemble, p, lambda_eps);
  res.p_star = p;
  res.gap = br.value - lower;

  // Polish p by projected subgradient steps on the convex upper envelope
  // g(p) = max_sigma beta(p, sigma); Danskin gives the subgradient from the
  // best response.
  for (int round = 0; round < max_rounds && res.gap > tol; ++round) {
    const auto t = clipped_traces(ensemble, br.mu, br.sigma);
    double norm2 = 0.0;
    for (double v : t) norm2 += v * v;
    if (norm2 < 1e-18) break;
    const double step = std::max(res.gap, tol) / norm2;
    std::vector<double> next(n);
    for (int x = 0; x < n; ++x) next[x] = p[x] + step * t[x];
    p = project_simplex(next);
    br = sigma_best_response(ensemble, p, lambda_eps);
    if (br.value - lower < res.gap) {
      res.gap = br.value - lower;
      res.p_star = p;
    }
  }

  if (res.gap > tol) {
    throw NonConvergence("solve_saddle: best gap " + std::to_string(res.gap) +
                         " above tol " + std::to_string(tol));
  }
  return res;
}

double worst_case_lower_bound(const Ensemble& ensemble, double eps,
                              double delta) {
  if (!(eps > 0.0 && eps <= 1.0)) {
    throw InvalidEps("worst_case_lower_bound: eps in (0, 1]");
  }
  if (!(delta > 0.0 && delta < 1.0 - eps * eps)) {
    throw InvalidEps("worst_case_lower_bound: delta in (0, 1 - eps^2)");
  }
  const double gamma = std::sqrt(2.0 * (eps * eps + delta));
  const double radius = min_max_radius(ensemble, gamma).value;
  const double correction =
      std::log2((1.0 - eps * eps) * (eps * eps + delta) / std::pow(delta, 3)) +
      3.0 * std::log2(3.0);
  return radius - correction;
}

}  // namespace oneshot
