#include "oneshot/divergences.hpp"

#include <cmath>

#include "oneshot/hypothesis.hpp"
#include "oneshot/sdp.hpp"

namespace oneshot {

namespace {

double entropy_of_spectrum(const RealVector& vals) {
  double s = 0.0;
  for (int i = 0; i < vals.size(); ++i) {
    const double lam = vals(i);
    if (lam > 1e-15) s -= lam * std::log2(lam);
  }
  return s;
}

bool support_violated(const DensityOperator& rho, const DensityOperator& sigma) {
  const Matrix proj = support_projector(sigma.matrix(), sigma.tols().support);
  const Matrix ker = Matrix::Identity(rho.dim(), rho.dim()) - proj;
  return (ker * rho.matrix() * ker).trace().real() > rho.tols().support;
}

// Isometry onto supp(m): columns are eigenvectors above threshold.
Matrix support_isometry(const Matrix& m, double threshold) {
  const EigResult eig = eig_hermitian(m);
  int rank = 0;
  for (int i = 0; i < eig.values.size(); ++i) {
    if (eig.values(i) > threshold) ++rank;
  }
  Matrix iso(m.rows(), rank);
  int c = 0;
  for (int i = 0; i < eig.values.size(); ++i) {
    if (eig.values(i) > threshold) iso.col(c++) = eig.vectors.col(i);
  }
  return iso;
}

}  // namespace

double von_neumann(const DensityOperator& rho) {
  rho.require_normalized("von_neumann");
  return entropy_of_spectrum(eig_hermitian(rho.matrix()).values);
}

double relative_entropy(const DensityOperator& rho,
                        const DensityOperator& sigma) {
  if (rho.dim() != sigma.dim()) throw DimensionMismatch("relative_entropy");
  rho.require_normalized("relative_entropy");
  sigma.require_normalized("relative_entropy");
  if (support_violated(rho, sigma)) return kInf;

  const EigResult er = eig_hermitian(rho.matrix());
  double value = 0.0;
  for (int i = 0; i < er.values.size(); ++i) {
    const double lam = er.values(i);
    if (lam > 1e-15) value += lam * std::log2(lam);
  }
  const EigResult es = eig_hermitian(sigma.matrix());
  for (int i = 0; i < es.values.size(); ++i) {
    const double s = es.values(i);
    if (s > sigma.tols().support) {
      const double weight =
          (es.vectors.col(i).adjoint() * rho.matrix() * es.vectors.col(i))(0).real();
      value -= weight * std::log2(s);
    }
  }
  return value;
}

double mutual_information(const DensityOperator& rho_AB,
                          const BipartiteShape& shape) {
  rho_AB.require_normalized("mutual_information");
  if (rho_AB.dim() != shape.total()) throw ShapeMismatch("mutual_information");
  const double sa = von_neumann(partial_trace(rho_AB, shape, Side::A));
  const double sb = von_neumann(partial_trace(rho_AB, shape, Side::B));
  const double sab = von_neumann(rho_AB);
  double value = sa + sb - sab;
  if (value < 0.0) value = 0.0;
  return value;
}

double holevo(const Ensemble& ensemble) {
  ensemble.validate();
  if (!ensemble.has_weights()) throw InvalidState("holevo requires weights");
  const DensityOperator avg = ensemble.average_state();
  double chi = 0.0;
  for (int x = 0; x < ensemble.size(); ++x) {
    const double p = ensemble.weights[x];
    if (p <= 1e-15) continue;
    chi += p * relative_entropy(ensemble.states[x], avg);
  }
  return chi;
}

double d_obs(const DensityOperator& rho, const DensityOperator& sigma,
             int grid_size) {
  if (rho.dim() != sigma.dim()) throw DimensionMismatch("d_obs");
  rho.require_normalized("d_obs");
  sigma.require_normalized("d_obs");
  if (support_violated(rho, sigma)) return kInf;
  if (grid_size < 2) throw InvalidConfig("d_obs: grid_size must be >= 2");

  // For fixed t = Tr(M rho) the objective decreases in Tr(M sigma), so the
  // optimum sits on the lower boundary of the testing region: the
  // Neyman-Pearson value beta_min(t) = beta^{1-t}.
  auto objective = [&](double t) {
    if (t <= 0.0) return 0.0;
    const double beta = beta_eps(rho, sigma, 1.0 - t).value;
    if (beta <= 0.0) return kInf;  // excluded by the support check above
    return t * std::log2(t / beta);
  };

  double best_t = 1.0 / grid_size;
  double best = -kInf;
  for (int k = 1; k <= grid_size; ++k) {
    const double t = static_cast<double>(k) / grid_size;
    const double g = objective(t);
    if (g > best) {
      best = g;
      best_t = t;
    }
  }

  // One golden-section refinement around the best grid cell pair.
  double a = std::max(0.0, best_t - 1.0 / grid_size);
  double b = std::min(1.0, best_t + 1.0 / grid_size);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = objective(x1), f2 = objective(x2);
  for (int i = 0; i < 80; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = objective(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = objective(x1);
    }
  }
  best = std::max({best, f1, f2});
  return std::max(0.0, best);
}

double d_max(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.dim() != sigma.dim()) throw DimensionMismatch("d_max");
  if (support_violated(rho, sigma)) return kInf;
  const Matrix iso = support_isometry(sigma.matrix(), sigma.tols().support);
  const Matrix sig_s = iso.adjoint() * sigma.matrix() * iso;
  const Matrix rho_s = iso.adjoint() * rho.matrix() * iso;
  const EigResult eig = eig_hermitian(sig_s);
  const Matrix inv_sqrt = eig.vectors *
                          eig.values.cwiseMax(1e-300).cwiseSqrt().cwiseInverse().asDiagonal() *
                          eig.vectors.adjoint();
  const Matrix m = hermitize(inv_sqrt * rho_s * inv_sqrt);
  const double lam = eig_hermitian(m).values.maxCoeff();
  if (lam <= 0.0) return -kInf;
  return std::log2(lam);
}

double i_max(const DensityOperator& rho_AB, const BipartiteShape& shape) {
  rho_AB.require_normalized("i_max");
  if (rho_AB.dim() != shape.total()) throw ShapeMismatch("i_max");
  const Matrix rho_A = partial_trace(rho_AB.matrix(), shape.dimA, shape.dimB, Side::A);

  // Compress A to supp(rho_A); rho_AB carries no mass outside it.
  const Matrix iso = support_isometry(rho_A, rho_AB.tols().support);
  const int ra = static_cast<int>(iso.cols());
  const Matrix big = kron(iso, Matrix::Identity(shape.dimB, shape.dimB));
  const Matrix rho_c = big.adjoint() * rho_AB.matrix() * big;
  const Matrix rho_Ac = iso.adjoint() * rho_A * iso;

  const int db = shape.dimB;
  const int dc = ra * db;
  SdpProblem p;
  const int bs = p.add_block(db);  // sigma'
  const int bk = p.add_block(dc);  // slack rho_A x sigma' - rho_AB
  p.add_objective(bs, Matrix::Identity(db, db));

  // Hermitian coefficient with Tr(A X) = Re(c * X_{r,s}).
  auto pairing = [](int dim, Complex c, int r, int s) {
    Matrix a = Matrix::Zero(dim, dim);
    a(r, s) += 0.5 * std::conj(c);
    a(s, r) += 0.5 * c;
    return a;
  };

  // Entrywise over the slack equation (rho_A x sigma')_{ij} - S_{ij} = rho_{ij}.
  for (int i = 0; i < dc; ++i) {
    for (int j = i; j < dc; ++j) {
      const int ai = i / db, bi = i % db;
      const int aj = j / db, bj = j % db;
      const Complex c = rho_Ac(ai, aj);
      const Complex r = rho_c(i, j);
      const double scale = (i == j) ? 1.0 : 2.0;
      p.add_constraint({{bs, scale * pairing(db, c, bi, bj)},
                        {bk, -herm_basis_re(dc, i, j)}},
                       scale * r.real());
      if (i != j) {
        p.add_constraint({{bs, 2.0 * pairing(db, Complex(0, -1) * c, bi, bj)},
                          {bk, -herm_basis_im(dc, i, j)}},
                         2.0 * r.imag());
      }
    }
  }

  const SdpSolution sol = solve_sdp(p);
  if (sol.status != SdpStatus::Optimal) {
    throw SolverFailure(std::string("i_max SDP: ") + to_string(sol.status));
  }
  return std::log2(std::max(sol.primal_value, 1e-300));
}

double i_max_cq(const CqState& cq) {
  const int d = cq.dim();
  SdpProblem p;
  const int bt = p.add_block(d);
  p.add_objective(bt, Matrix::Identity(d, d));
  bool any = false;
  for (int x = 0; x < cq.symbols(); ++x) {
    if (cq.weights[x] <= 1e-12) continue;
    any = true;
    const int bs = p.add_block(d);  // slack tau - Q(x)
    add_entrywise_equality(p, d, {{bt, 1.0, 0}, {bs, -1.0, 0}}, -1, Matrix(),
                           cq.conditionals[x].matrix());
  }
  if (!any) throw InvalidState("i_max_cq: no symbol carries weight");
  const SdpSolution sol = solve_sdp(p);
  if (sol.status != SdpStatus::Optimal) {
    throw SolverFailure(std::string("i_max_cq SDP: ") + to_string(sol.status));
  }
  return std::log2(std::max(sol.primal_value, 1e-300));
}

TofqResult t_of_q(const Ensemble& ensemble, double tol, int max_iter) {
  ensemble.validate();
  const int n = ensemble.size();
  TofqResult out;
  out.p.assign(n, 1.0 / n);
  if (n == 1) {
    out.value = 0.0;
    return out;
  }

  for (int iter = 1; iter <= max_iter; ++iter) {
    Matrix avg = Matrix::Zero(ensemble.dim(), ensemble.dim());
    for (int x = 0; x < n; ++x) avg += out.p[x] * ensemble.states[x].matrix();
    const DensityOperator avg_op = DensityOperator::trusted(avg);

    // Per-symbol divergence D(Q(x) || rho_bar); its p-average is I(p) and its
    // maximum upper-bounds T(Q).
    std::vector<double> div(n);
    double value = 0.0, upper = -kInf;
    for (int x = 0; x < n; ++x) {
      div[x] = relative_entropy(ensemble.states[x], avg_op);
      value += out.p[x] * div[x];
      upper = std::max(upper, div[x]);
    }
    out.value = value;
    out.iterations = iter;
    if (upper - value <= tol) return out;

    // Blahut-Arimoto multiplicative update.
    double z = 0.0;
    for (int x = 0; x < n; ++x) {
      out.p[x] *= std::exp2(div[x] - upper);  // shift for stability
      z += out.p[x];
    }
    for (int x = 0; x < n; ++x) out.p[x] /= z;
  }
  throw NonConvergence("t_of_q: no convergence after " +
                       std::to_string(max_iter) + " iterations");
}

double substate_bound(const DensityOperator& rho, const DensityOperator& sigma,
                      double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidEps("substate_bound: eps in (0,1)");
  if (eps > 1.0 - 1e-9) return kInf;
  const double dobs = d_obs(rho, sigma);
  if (!std::isfinite(dobs)) return kInf;
  return dobs / (eps * eps) + std::log2(1.0 / (1.0 - eps * eps));
}

}  // namespace oneshot
