#pragma once

#include <vector>

#include "oneshot/common.hpp"

namespace oneshot {

// Block-structured dense semidefinite program in standard primal form
//
//   minimize    sum_k <C_k, X_k>
//   subject to  sum_k <A_{i,k}, X_k> = b_i       (i = 1..m)
//               X_k >= 0 (Hermitian PSD)
//
// with <A, B> = Tr(A B) for Hermitian A, B. Inequalities are expressed by
// the callers with 1x1 slack blocks, matrix inequalities with slack blocks
// tied entrywise.

struct SdpTerm {
  int block = 0;
  Matrix coeff;  // Hermitian
};

struct SdpConstraint {
  std::vector<SdpTerm> terms;
  double rhs = 0.0;
};

struct SdpProblem {
  std::vector<int> block_dims;
  std::vector<Matrix> objective;       // per block; zero when unset
  std::vector<SdpConstraint> constraints;
  double gap_tol = 1e-7;
  double feas_tol = 1e-8;
  int max_iter = 200;

  int add_block(int dim);
  void add_objective(int block, const Matrix& coeff);
  void add_constraint(std::vector<SdpTerm> terms, double rhs);
  int num_constraints() const { return static_cast<int>(constraints.size()); }
  int total_dim() const;
};

enum class SdpStatus { Optimal, Infeasible, MaxIter, IllConditioned };

struct SdpDiagnostics {
  int iterations = 0;
  double gap = kInf;            // complementarity <X, Z>
  double primal_residual = kInf;
  double dual_residual = kInf;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::MaxIter;
  double primal_value = kInf;
  double dual_value = -kInf;
  std::vector<Matrix> blocks;   // primal X_k
  RealVector dual;              // y
  SdpDiagnostics diagnostics;
};

const char* to_string(SdpStatus status);

/// Primal-dual interior-point solve (HKM direction, Mehrotra
/// predictor-corrector, infeasible start). Desk scale: total dim <= 128.
SdpSolution solve_sdp(const SdpProblem& problem);

/// Throws SolverFailure unless the solve is Optimal or stopped at MaxIter
/// already within loose working accuracy.
void require_usable(const SdpSolution& sol, const char* what);

// --- Hermitian entry basis helpers for constraint assembly ----------------

/// <basis, X> = X_ii (i == j) or 2 Re X_ij (i < j).
Matrix herm_basis_re(int dim, int i, int j);
/// <basis, X> = 2 Im X_ij (requires i < j).
Matrix herm_basis_im(int dim, int i, int j);

/// Appends the d^2 real equations tying Hermitian expressions together:
///   sum_v sign_v X_v[off_v + (i,j)]  +  mu * D_ij  =  B_ij
/// where each X_v is a block variable read at a square sub-block offset,
/// mu is an optional 1x1 block variable with data matrix D (pass block -1 to
/// omit), and B is the constant right-hand side.
struct BlockRef {
  int block = 0;
  double sign = 1.0;
  int offset = 0;  // top-left corner of the d x d window within the block
};
void add_entrywise_equality(SdpProblem& p, int d,
                            const std::vector<BlockRef>& vars,
                            int mu_block, const Matrix& mu_data,
                            const Matrix& rhs);

}  // namespace oneshot
