#include "oneshot/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "oneshot/operators.hpp"

namespace oneshot {

namespace {

// Tr(A B) for Hermitian A, B without forming the product.
double real_inner(const Matrix& a, const Matrix& b) {
  return a.cwiseProduct(b.transpose()).sum().real();
}

struct BlockState {
  std::vector<Matrix> m;
  BlockState() = default;
  explicit BlockState(const std::vector<int>& dims) {
    for (int d : dims) m.push_back(Matrix::Zero(d, d));
  }
};

double min_eig(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// Largest alpha with X + alpha*dX >= 0, given X > 0.
double max_step(const Matrix& x, const Matrix& dx) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(x);
  RealVector vals = es.eigenvalues().cwiseMax(1e-300);
  Matrix g = es.eigenvectors() * vals.cwiseSqrt().cwiseInverse().asDiagonal() *
             es.eigenvectors().adjoint();
  const double lam = min_eig(hermitize(g * dx * g));
  if (lam >= -1e-14) return kInf;
  return -1.0 / lam;
}

}  // namespace

int SdpProblem::add_block(int dim) {
  block_dims.push_back(dim);
  objective.push_back(Matrix::Zero(dim, dim));
  return static_cast<int>(block_dims.size()) - 1;
}

void SdpProblem::add_objective(int block, const Matrix& coeff) {
  objective[block] += hermitize(coeff);
}

void SdpProblem::add_constraint(std::vector<SdpTerm> terms, double rhs) {
  constraints.push_back({std::move(terms), rhs});
}

int SdpProblem::total_dim() const {
  int n = 0;
  for (int d : block_dims) n += d;
  return n;
}

void require_usable(const SdpSolution& sol, const char* what) {
  if (sol.status == SdpStatus::Optimal) return;
  if (sol.status == SdpStatus::MaxIter &&
      sol.diagnostics.primal_residual < 1e-6 &&
      sol.diagnostics.dual_residual < 1e-6 &&
      sol.diagnostics.gap < 1e-5 * std::max(1.0, std::abs(sol.primal_value))) {
    log_info(std::string(what) + ": accepting near-converged MaxIter solution");
    return;
  }
  throw SolverFailure(std::string(what) + ": " + to_string(sol.status));
}

const char* to_string(SdpStatus status) {
  switch (status) {
    case SdpStatus::Optimal: return "Optimal";
    case SdpStatus::Infeasible: return "Infeasible";
    case SdpStatus::MaxIter: return "MaxIter";
    case SdpStatus::IllConditioned: return "IllConditioned";
  }
  return "?";
}

Matrix herm_basis_re(int dim, int i, int j) {
  Matrix m = Matrix::Zero(dim, dim);
  if (i == j) {
    m(i, i) = 1.0;
  } else {
    m(i, j) = 1.0;
    m(j, i) = 1.0;
  }
  return m;
}

Matrix herm_basis_im(int dim, int i, int j) {
  Matrix m = Matrix::Zero(dim, dim);
  m(i, j) = Complex(0.0, 1.0);
  m(j, i) = Complex(0.0, -1.0);
  return m;
}

void add_entrywise_equality(SdpProblem& p, int d,
                            const std::vector<BlockRef>& vars,
                            int mu_block, const Matrix& mu_data,
                            const Matrix& rhs) {
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      {
        std::vector<SdpTerm> terms;
        for (const auto& v : vars) {
          const int dim = p.block_dims[v.block];
          terms.push_back({v.block, v.sign * herm_basis_re(dim, v.offset + i,
                                                           v.offset + j)});
        }
        if (mu_block >= 0) {
          const double c = (i == j) ? mu_data(i, i).real()
                                    : 2.0 * mu_data(i, j).real();
          if (c != 0.0) {
            terms.push_back({mu_block, c * Matrix::Identity(1, 1)});
          }
        }
        const double r = (i == j) ? rhs(i, i).real() : 2.0 * rhs(i, j).real();
        p.add_constraint(std::move(terms), r);
      }
      if (i != j) {
        std::vector<SdpTerm> terms;
        for (const auto& v : vars) {
          const int dim = p.block_dims[v.block];
          terms.push_back({v.block, v.sign * herm_basis_im(dim, v.offset + i,
                                                           v.offset + j)});
        }
        if (mu_block >= 0) {
          const double c = 2.0 * mu_data(i, j).imag();
          if (c != 0.0) {
            terms.push_back({mu_block, c * Matrix::Identity(1, 1)});
          }
        }
        p.add_constraint(std::move(terms), 2.0 * rhs(i, j).imag());
      }
    }
  }
}

SdpSolution solve_sdp(const SdpProblem& problem) {
  const int nblocks = static_cast<int>(problem.block_dims.size());
  const int m = problem.num_constraints();
  if (nblocks == 0 || m == 0) throw SolverFailure("solve_sdp: empty problem");

  int ntotal = problem.total_dim();

  // Per-block constraint incidence for Schur assembly.
  std::vector<std::vector<std::pair<int, const Matrix*>>> by_block(nblocks);
  for (int i = 0; i < m; ++i) {
    for (const auto& t : problem.constraints[i].terms) {
      by_block[t.block].push_back({i, &t.coeff});
    }
  }

  RealVector b(m);
  for (int i = 0; i < m; ++i) b(i) = problem.constraints[i].rhs;

  double data_scale = 1.0 + b.cwiseAbs().maxCoeff();
  for (const auto& c : problem.objective) {
    if (c.size() > 0) data_scale = std::max(data_scale, c.cwiseAbs().maxCoeff());
  }

  BlockState X, Z;
  for (int d : problem.block_dims) {
    X.m.push_back(data_scale * Matrix::Identity(d, d));
    Z.m.push_back(data_scale * Matrix::Identity(d, d));
  }
  RealVector y = RealVector::Zero(m);

  SdpSolution sol;
  sol.dual = y;
  sol.blocks = X.m;

  auto operator_A = [&](const BlockState& v) {
    RealVector out = RealVector::Zero(m);
    for (int i = 0; i < m; ++i) {
      for (const auto& t : problem.constraints[i].terms) {
        out(i) += real_inner(t.coeff, v.m[t.block]);
      }
    }
    return out;
  };

  auto operator_At = [&](const RealVector& v) {
    BlockState out(problem.block_dims);
    for (int i = 0; i < m; ++i) {
      for (const auto& t : problem.constraints[i].terms) {
        out.m[t.block] += v(i) * t.coeff;
      }
    }
    return out;
  };

  int stall = 0;
  for (int iter = 1; iter <= problem.max_iter; ++iter) {
    // Residuals and complementarity.
    RealVector rp = b - operator_A(X);
    BlockState aty = operator_At(y);
    BlockState rd(problem.block_dims);
    double dual_res = 0.0;
    for (int k = 0; k < nblocks; ++k) {
      rd.m[k] = problem.objective[k] - Z.m[k] - aty.m[k];
      if (rd.m[k].size() > 0) {
        dual_res = std::max(dual_res, rd.m[k].cwiseAbs().maxCoeff());
      }
    }
    double primal_res = rp.cwiseAbs().maxCoeff();

    double gap = 0.0, pobj = 0.0;
    for (int k = 0; k < nblocks; ++k) {
      gap += real_inner(X.m[k], Z.m[k]);
      pobj += real_inner(problem.objective[k], X.m[k]);
    }
    const double dobj = b.dot(y);
    const double mu = gap / ntotal;

    sol.primal_value = pobj;
    sol.dual_value = dobj;
    sol.blocks = X.m;
    sol.dual = y;
    sol.diagnostics = {iter - 1, gap, primal_res, dual_res};

    const double obj_scale = std::max({1.0, std::abs(pobj), std::abs(dobj)});
    if (primal_res <= problem.feas_tol * data_scale &&
        dual_res <= problem.feas_tol * data_scale &&
        gap <= problem.gap_tol * obj_scale) {
      sol.status = SdpStatus::Optimal;
      return sol;
    }

    // Crude infeasibility signal: diverging iterates with stuck residuals.
    if (y.cwiseAbs().maxCoeff() > 1e9 * data_scale && mu < 1e-10 * data_scale) {
      sol.status = SdpStatus::Infeasible;
      return sol;
    }

    // Factorizations of the current iterate.
    std::vector<Matrix> zinv(nblocks);
    for (int k = 0; k < nblocks; ++k) {
      Eigen::LLT<Matrix> llt(Z.m[k]);
      if (llt.info() != Eigen::Success) {
        sol.status = SdpStatus::IllConditioned;
        return sol;
      }
      zinv[k] = llt.solve(Matrix::Identity(Z.m[k].rows(), Z.m[k].cols()));
    }

    // Schur complement M_ij = <A_i, herm(X A_j Z^{-1})>, assembled per block.
    Eigen::MatrixXd schur = Eigen::MatrixXd::Zero(m, m);
    for (int k = 0; k < nblocks; ++k) {
      const auto& inc = by_block[k];
      for (const auto& [j, aj] : inc) {
        const Matrix t = hermitize(X.m[k] * (*aj) * zinv[k]);
        for (const auto& [i, ai] : inc) {
          schur(i, j) += real_inner(*ai, t);
        }
      }
    }
    schur = 0.5 * (schur + schur.transpose());

    Eigen::LDLT<Eigen::MatrixXd> ldlt;
    double ridge = 0.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
      ldlt.compute(schur + ridge * Eigen::MatrixXd::Identity(m, m));
      if (ldlt.info() == Eigen::Success) break;
      ridge = (ridge == 0.0) ? 1e-12 * (1.0 + schur.trace() / m) : ridge * 100;
    }
    if (ldlt.info() != Eigen::Success) {
      sol.status = SdpStatus::IllConditioned;
      return sol;
    }

    auto solve_direction = [&](double sigma_mu, const BlockState* corr)
        -> std::tuple<BlockState, RealVector, BlockState> {
      // rhs_i = rp_i - <A_i, herm(sigma_mu Z^{-1} - X - X Rd Z^{-1} - corr)>
      BlockState base(problem.block_dims);
      for (int k = 0; k < nblocks; ++k) {
        base.m[k] = hermitize(sigma_mu * zinv[k] - X.m[k] -
                              X.m[k] * rd.m[k] * zinv[k] -
                              (corr ? corr->m[k] * zinv[k] : Matrix::Zero(X.m[k].rows(), X.m[k].cols())));
      }
      RealVector rhs = rp - operator_A(base);
      RealVector dy = ldlt.solve(rhs);
      BlockState atdy = operator_At(dy);
      BlockState dz(problem.block_dims), dx(problem.block_dims);
      for (int k = 0; k < nblocks; ++k) {
        dz.m[k] = rd.m[k] - atdy.m[k];
        dx.m[k] = hermitize(base.m[k] - X.m[k] * dz.m[k] * zinv[k]);
      }
      return {dx, dy, dz};
    };

    // Predictor (affine scaling).
    auto [dxa, dya, dza] = solve_direction(0.0, nullptr);
    double apa = 1.0, ada = 1.0;
    for (int k = 0; k < nblocks; ++k) {
      apa = std::min(apa, 0.99 * max_step(X.m[k], dxa.m[k]));
      ada = std::min(ada, 0.99 * max_step(Z.m[k], dza.m[k]));
    }
    double mu_aff = 0.0;
    for (int k = 0; k < nblocks; ++k) {
      mu_aff += real_inner(X.m[k] + apa * dxa.m[k], Z.m[k] + ada * dza.m[k]);
    }
    mu_aff = std::max(mu_aff / ntotal, 0.0);
    double sigma = std::pow(mu_aff / std::max(mu, 1e-300), 3.0);
    sigma = std::clamp(sigma, 1e-8, 0.99);

    // Corrector with Mehrotra second-order term dXa dZa.
    BlockState corr(problem.block_dims);
    for (int k = 0; k < nblocks; ++k) corr.m[k] = dxa.m[k] * dza.m[k];
    auto [dx, dy, dz] = solve_direction(sigma * mu, &corr);

    double ap = 1.0, ad = 1.0;
    for (int k = 0; k < nblocks; ++k) {
      ap = std::min(ap, 0.95 * max_step(X.m[k], dx.m[k]));
      ad = std::min(ad, 0.95 * max_step(Z.m[k], dz.m[k]));
    }
    ap = std::min(ap, 1.0);
    ad = std::min(ad, 1.0);

    bool bad = !std::isfinite(ap) || !std::isfinite(ad);
    for (int k = 0; k < nblocks && !bad; ++k) {
      bad = !dx.m[k].allFinite() || !dz.m[k].allFinite();
    }
    if (bad) {
      sol.status = SdpStatus::IllConditioned;
      return sol;
    }

    for (int k = 0; k < nblocks; ++k) {
      X.m[k] = hermitize(X.m[k] + ap * dx.m[k]);
      Z.m[k] = hermitize(Z.m[k] + ad * dz.m[k]);
    }
    y += ad * dy;

    if (ap < 1e-8 && ad < 1e-8) {
      if (++stall >= 3) {
        sol.status = SdpStatus::IllConditioned;
        return sol;
      }
    } else {
      stall = 0;
    }

    if (log_level() == LogLevel::Debug) {
      std::ostringstream os;
      os << "sdp iter " << iter << " mu " << mu << " rp " << primal_res
         << " rd " << dual_res << " gap " << gap;
      log_debug(os.str());
    }
  }

  sol.status = SdpStatus::MaxIter;
  return sol;
}

}  // namespace oneshot
