#include "oneshot/hypothesis.hpp"

#include <cmath>

#include "oneshot/divergences.hpp"

namespace oneshot {

namespace {

struct ThresholdSplit {
  double alpha_plus = 0.0;   // mass of rho on eigenvalues > band
  double alpha_band = 0.0;   // mass of rho on |eigenvalue| <= band
  double beta_plus = 0.0;
  double beta_band = 0.0;
  Matrix proj_plus;
  Matrix proj_band;
};

ThresholdSplit split_at(const Matrix& rho, const Matrix& sigma, double t,
                        double band) {
  const EigResult eig = eig_hermitian(rho - t * sigma);
  const int d = static_cast<int>(rho.rows());
  ThresholdSplit out;
  out.proj_plus = Matrix::Zero(d, d);
  out.proj_band = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    const Vector v = eig.vectors.col(i);
    const double qr = (v.adjoint() * rho * v)(0).real();
    const double qs = (v.adjoint() * sigma * v)(0).real();
    if (eig.values(i) > band) {
      out.alpha_plus += qr;
      out.beta_plus += qs;
      out.proj_plus += v * v.adjoint();
    } else if (eig.values(i) >= -band) {
      out.alpha_band += qr;
      out.beta_band += qs;
      out.proj_band += v * v.adjoint();
    }
  }
  return out;
}

BetaResult resolve(const Matrix& rho, const Matrix& sigma, double target,
                   const ThresholdSplit& s) {
  double mu = 0.0;
  if (s.alpha_band > 1e-15) {
    mu = (target - s.alpha_plus) / s.alpha_band;
  }
  mu = std::clamp(mu, 0.0, 1.0);
  BetaResult out;
  out.test.q = s.proj_plus + mu * s.proj_band;
  out.test.alpha = s.alpha_plus + mu * s.alpha_band;
  out.test.beta = s.beta_plus + mu * s.beta_band;
  out.value = std::max(0.0, out.test.beta);
  if (out.value < 1e-14) out.value = 0.0;  // log of numerical noise is meaningless
  (void)rho;
  (void)sigma;
  return out;
}

}  // namespace

void TestOperator::validate(const Tolerances& tols) const {
  const EigResult eig = eig_hermitian(q);
  if (eig.values(0) < -tols.psd || eig.values(eig.values.size() - 1) > 1.0 + tols.psd) {
    throw InvalidState("test operator eigenvalues outside [0, 1]");
  }
}

BetaResult beta_eps(const DensityOperator& rho, const DensityOperator& sigma,
                    double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) throw InvalidEps("beta_eps: eps must be in [0, 1)");
  if (rho.dim() != sigma.dim()) throw DimensionMismatch("beta_eps: dim mismatch");
  rho.require_normalized("beta_eps");
  sigma.require_normalized("beta_eps");

  const Matrix& r = rho.matrix();
  const Matrix& s = sigma.matrix();
  const double target = 1.0 - eps;
  const double sig_norm = eig_hermitian(s).values.cwiseAbs().maxCoeff();

  // Tests supported on ker(sigma) are free: if they can reach the alpha
  // target, beta is exactly 0.
  const Matrix ker = Matrix::Identity(rho.dim(), rho.dim()) -
                     support_projector(s, rho.tols().support);
  const double free_alpha = (ker * r).trace().real();
  if (free_alpha >= target - 1e-12) {
    BetaResult out;
    const double c = (free_alpha > 1e-15) ? std::min(1.0, target / free_alpha) : 0.0;
    out.test.q = c * ker;
    out.test.alpha = c * free_alpha;
    out.test.beta = std::max(0.0, (out.test.q * s).trace().real());
    out.value = 0.0;
    return out;
  }

  // Upper end of the threshold range: at t = 2^{Dmax} the positive part on
  // supp(sigma) vanishes; with support violation, double until alpha drops.
  double hi;
  const double dm = d_max(rho, sigma);
  if (std::isfinite(dm)) {
    hi = std::pow(2.0, dm) + 1.0;
  } else {
    hi = 1.0;
    for (int i = 0; i < 200; ++i) {
      const ThresholdSplit sp = split_at(r, s, hi, 1e-13);
      if (sp.alpha_plus + sp.alpha_band < target) break;
      hi *= 2.0;
    }
  }
  double lo = 0.0;

  // Bisection with an essentially exact kernel band: a resolve during the
  // loop only fires when the target sits on a genuine zero eigenspace.
  const double tiny_band = 1e-13 * (sig_norm + 1.0);
  for (int iter = 0; iter < 200; ++iter) {
    const double t = 0.5 * (lo + hi);
    const ThresholdSplit sp = split_at(r, s, t, tiny_band);
    if (sp.alpha_plus > target) {
      lo = t;
    } else if (sp.alpha_plus + sp.alpha_band < target) {
      hi = t;
    } else {
      return resolve(r, s, target, sp);
    }
    if (hi - lo <= 1e-15 * std::max(1.0, hi)) break;
  }

  // The crossing eigenvalue now lies inside the final bracket; Weyl bounds
  // its distance from 0 at the midpoint by the bracket width times |sigma|.
  const double t = 0.5 * (lo + hi);
  const double band = 2.0 * ((hi - lo) * (sig_norm + 1.0) + tiny_band);
  const ThresholdSplit sp = split_at(r, s, t, band);
  if (sp.alpha_plus <= target + 1e-10 &&
      sp.alpha_plus + sp.alpha_band >= target - 1e-10) {
    return resolve(r, s, target, sp);
  }
  BetaResult out;
  out.value = beta_eps_sdp(rho, sigma, eps);
  out.test.q = sp.proj_plus;
  out.test.alpha = sp.alpha_plus;
  out.test.beta = out.value;
  return out;
}

double beta_eps_sdp(const DensityOperator& rho, const DensityOperator& sigma,
                    double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) throw InvalidEps("beta_eps_sdp: eps in [0, 1)");
  if (rho.dim() != sigma.dim()) throw DimensionMismatch("beta_eps_sdp: dim mismatch");
  const int d = rho.dim();

  if (eps <= 1e-12) {
    // alpha = 1 pins Q to the identity on supp(rho); the remaining freedom
    // cannot lower beta below <P_rho, sigma>.
    const Matrix proj = support_projector(rho.matrix(), rho.tols().support);
    return std::max(0.0, (proj * sigma.matrix()).trace().real());
  }

  SdpProblem p;
  const int bq = p.add_block(d);
  const int br = p.add_block(d);   // 1 - Q
  const int bs = p.add_block(1);   // slack of <rho, Q> >= 1 - eps
  p.add_objective(bq, sigma.matrix());
  add_entrywise_equality(p, d, {{bq, 1.0, 0}, {br, 1.0, 0}}, -1, Matrix(),
                         Matrix::Identity(d, d));
  p.add_constraint({{bq, rho.matrix()}, {bs, -Matrix::Identity(1, 1)}},
                   1.0 - eps);
  const SdpSolution sol = solve_sdp(p);
  if (sol.status != SdpStatus::Optimal) {
    throw SolverFailure(std::string("beta_eps_sdp: ") + to_string(sol.status));
  }
  return std::max(0.0, sol.primal_value);
}

double d_h(const DensityOperator& rho, const DensityOperator& sigma,
           double eps) {
  const BetaResult b = beta_eps(rho, sigma, eps);
  if (b.value <= 1e-14) return kInf;
  return -std::log2(b.value) + std::log2(1.0 - eps);
}

std::pair<double, double> dmax_dh_bridge(const DensityOperator& rho,
                                         const DensityOperator& sigma,
                                         double eps, double delta) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidEps("dmax_dh_bridge: eps in (0,1)");
  if (!(delta > 0.0 && delta < eps)) {
    throw InvalidEps("dmax_dh_bridge: delta in (0, eps)");
  }
  const double upper = d_h(rho, sigma, eps);
  const double correction =
      std::log2(eps * (1.0 - eps + delta) / std::pow(delta, 3)) +
      3.0 * std::log2(3.0);
  const double lower = d_h(rho, sigma, eps - delta) - correction;
  return {lower, upper};
}

}  // namespace oneshot
