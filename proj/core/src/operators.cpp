#include "oneshot/operators.hpp"

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <mutex>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace oneshot {

// ---------------------------------------------------------------------------
// Logging backend
// ---------------------------------------------------------------------------

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("ONESHOT_RSP_LOG");
    if (!env) return LogLevel::Error;
    std::string v(env);
    if (v == "debug") return LogLevel::Debug;
    if (v == "info") return LogLevel::Info;
    return LogLevel::Error;
  }();
  return level;
}

void log_message(LogLevel level, const std::string& msg) {
  if (static_cast<int>(level) > static_cast<int>(log_level())) return;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  const char* tag = level == LogLevel::Error ? "error"
                    : level == LogLevel::Info ? "info"
                                              : "debug";
  std::cerr << "[oneshot-rsp " << tag << "] " << msg << "\n";
}

// ---------------------------------------------------------------------------
// DensityOperator / PureState
// ---------------------------------------------------------------------------

DensityOperator DensityOperator::make(const Matrix& entries,
                                      const Tolerances& tols) {
  if (entries.rows() != entries.cols() || entries.rows() == 0) {
    throw InvalidState("state matrix must be square and non-empty");
  }
  const double herm_err = (entries - entries.adjoint()).cwiseAbs().maxCoeff();
  if (herm_err > tols.hermitian) {
    throw InvalidState("state is not Hermitian (max deviation " +
                       std::to_string(herm_err) + ")");
  }
  DensityOperator out;
  out.entries_ = hermitize(entries);
  out.tols_ = tols;
  const EigResult eig = eig_hermitian(out.entries_);
  if (eig.values(0) < -tols.psd) {
    throw InvalidState("state is not PSD (min eigenvalue " +
                       std::to_string(eig.values(0)) + ")");
  }
  const double tr = out.trace();
  if (tr < -tols.trace || tr > 1.0 + tols.trace) {
    throw InvalidState("trace " + std::to_string(tr) + " outside [0, 1]");
  }
  out.normalized_ = std::abs(tr - 1.0) <= tols.trace;
  return out;
}

DensityOperator DensityOperator::trusted(const Matrix& entries,
                                         const Tolerances& tols) {
  DensityOperator out;
  out.entries_ = hermitize(entries);
  out.tols_ = tols;
  out.normalized_ = std::abs(out.trace() - 1.0) <= tols.trace;
  return out;
}

void DensityOperator::require_normalized(const char* where) const {
  if (!normalized_) {
    throw InvalidState(std::string(where) + ": state must be normalized, trace is " +
                       std::to_string(trace()));
  }
}

PureState PureState::make(const Vector& amplitudes, const Tolerances& tols) {
  if (amplitudes.size() == 0) throw InvalidState("empty amplitude vector");
  const double norm = amplitudes.norm();
  if (std::abs(norm - 1.0) > 1e-10) {
    throw InvalidState("pure state norm " + std::to_string(norm) +
                       " deviates from 1");
  }
  (void)tols;
  PureState out;
  out.amplitudes_ = amplitudes;
  return out;
}

DensityOperator PureState::projector() const {
  return DensityOperator::trusted(amplitudes_ * amplitudes_.adjoint());
}

// ---------------------------------------------------------------------------
// Hermitian kernels
// ---------------------------------------------------------------------------

Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

EigResult eig_hermitian(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) {
    throw NumericalFailure("Hermitian eigendecomposition failed");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Matrix sqrt_psd(const Matrix& m) {
  const EigResult eig = eig_hermitian(m);
  RealVector vals = eig.values.cwiseMax(0.0).cwiseSqrt();
  return eig.vectors * vals.asDiagonal() * eig.vectors.adjoint();
}

Matrix positive_part(const Matrix& m) {
  const EigResult eig = eig_hermitian(m);
  RealVector vals = eig.values.cwiseMax(0.0);
  return eig.vectors * vals.asDiagonal() * eig.vectors.adjoint();
}

double trace_positive_part(const Matrix& m) {
  const EigResult eig = eig_hermitian(m);
  return eig.values.cwiseMax(0.0).sum();
}

Matrix support_projector(const Matrix& m, double threshold) {
  const EigResult eig = eig_hermitian(m);
  Matrix proj = Matrix::Zero(m.rows(), m.cols());
  for (int i = 0; i < eig.values.size(); ++i) {
    if (eig.values(i) > threshold) {
      proj += eig.vectors.col(i) * eig.vectors.col(i).adjoint();
    }
  }
  return proj;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fidelity and purified distance
// ---------------------------------------------------------------------------

double fidelity_root(const Matrix& rho, const Matrix& sigma) {
  const Matrix sq = sqrt_psd(rho);
  const Matrix inner = hermitize(sq * sigma * sq);
  const EigResult eig = eig_hermitian(inner);
  return eig.values.cwiseMax(0.0).cwiseSqrt().sum();
}

double fidelity(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw DimensionMismatch("fidelity: dims " + std::to_string(rho.dim()) +
                            " vs " + std::to_string(sigma.dim()));
  }
  double f = fidelity_root(rho.matrix(), sigma.matrix());
  // Trace-deficit term contributes only when both states are genuinely
  // sub-normalized; for normalized inputs it is exactly zero.
  if (!rho.normalized() && !sigma.normalized()) {
    const double a = std::max(0.0, 1.0 - rho.trace());
    const double b = std::max(0.0, 1.0 - sigma.trace());
    f += std::sqrt(a * b);
  }
  return f;
}

double purified_distance(const DensityOperator& rho,
                         const DensityOperator& sigma) {
  const double f = fidelity(rho, sigma);
  double rad = 1.0 - f * f;
  if (rad < 0.0) rad = 0.0;  // F may exceed 1 by eigensolver noise
  return std::sqrt(rad);
}

// ---------------------------------------------------------------------------
// Partial trace / purification / Uhlmann extension
// ---------------------------------------------------------------------------

Matrix partial_trace(const Matrix& rho, int dimA, int dimB, Side keep) {
  if (rho.rows() != dimA * dimB) {
    throw ShapeMismatch("partial_trace: dim " + std::to_string(rho.rows()) +
                        " != " + std::to_string(dimA) + "*" + std::to_string(dimB));
  }
  if (keep == Side::A) {
    Matrix out = Matrix::Zero(dimA, dimA);
    for (int i = 0; i < dimA; ++i)
      for (int j = 0; j < dimA; ++j)
        for (int k = 0; k < dimB; ++k)
          out(i, j) += rho(i * dimB + k, j * dimB + k);
    return out;
  }
  Matrix out = Matrix::Zero(dimB, dimB);
  for (int i = 0; i < dimB; ++i)
    for (int j = 0; j < dimB; ++j)
      for (int k = 0; k < dimA; ++k)
        out(i, j) += rho(k * dimB + i, k * dimB + j);
  return out;
}

DensityOperator partial_trace(const DensityOperator& rho,
                              const BipartiteShape& shape, Side keep) {
  if (rho.dim() != shape.total()) {
    throw ShapeMismatch("partial_trace: operator dim does not match shape");
  }
  return DensityOperator::trusted(
      partial_trace(rho.matrix(), shape.dimA, shape.dimB, keep), rho.tols());
}

PureState purify(const DensityOperator& rho) {
  rho.require_normalized("purify");
  const int d = rho.dim();
  const EigResult eig = eig_hermitian(rho.matrix());
  Vector psi = Vector::Zero(d * d);
  for (int i = 0; i < d; ++i) {
    const double lam = std::max(0.0, eig.values(i));
    if (lam <= 0.0) continue;
    const double c = std::sqrt(lam);
    for (int s = 0; s < d; ++s) {
      psi(i * d + s) += c * eig.vectors(s, i);  // |i>_anc |v_i>_sys
    }
  }
  psi /= psi.norm();
  return PureState::make(psi);
}

namespace detail {

Matrix maximizing_unitary(const Matrix& x) {
  Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) {
    throw NumericalFailure("SVD did not converge");
  }
  return svd.matrixV() * svd.matrixU().adjoint();
}

}  // namespace detail

DensityOperator uhlmann_extension(const DensityOperator& rho_AB,
                                  const BipartiteShape& shape,
                                  const DensityOperator& rho_prime_A) {
  rho_AB.require_normalized("uhlmann_extension");
  if (rho_AB.dim() != shape.total()) {
    throw ShapeMismatch("uhlmann_extension: shape does not match rho_AB");
  }
  if (rho_prime_A.dim() != shape.dimA) {
    throw DimensionMismatch("uhlmann_extension: rho'_A dim " +
                            std::to_string(rho_prime_A.dim()) + " != dimA");
  }
  const int dA = shape.dimA;
  const int dB = shape.dimB;
  const int dAB = dA * dB;

  // |v> in R (x) A (x) B purifies rho_AB, with ancilla R of dimension dA*dB.
  const Vector v = purify(rho_AB).vector();  // index (r, a, b) = r*dAB + a*dB + b

  // Purification of rho'_A on the same space, grouping (R, B) as its ancilla:
  // |w'> = sum_i sqrt(mu_i) |c_i>_{RB} |u_i>_A with |c_i> = |i mod dAB*dB>.
  const EigResult eigA = eig_hermitian(rho_prime_A.matrix());
  const int dRB = dAB * dB;
  Vector w = Vector::Zero(dRB * dA);  // index (rb, a) ordering chosen below
  // Keep the physical index order (r, a, b); component (r, a, b) of |w'>:
  // ancilla basis |c_i> sits on the joint (r, b) index: c_i = i (i < dRB).
  for (int i = 0; i < dA; ++i) {
    const double mu = std::max(0.0, eigA.values(i));
    if (mu <= 0.0) continue;
    const double c = std::sqrt(mu);
    const int r = i / dB;       // embed ancilla index i as (r, b) = (i / dB, i % dB)
    const int b = i % dB;
    for (int a = 0; a < dA; ++a) {
      w(r * dAB + a * dB + b) += c * eigA.vectors(a, i);
    }
  }
  // w is left unnormalized so sub-normal rho'_A extends to an equally
  // sub-normal rho'_AB.

  // Overlap matrix on the (R, B) ancilla: X[(r',b'), (r,b)] = sum_a w'_{r'ab'} v*_{rab}.
  Matrix x = Matrix::Zero(dRB, dRB);
  for (int rp = 0; rp < dAB; ++rp)
    for (int bp = 0; bp < dB; ++bp)
      for (int r = 0; r < dAB; ++r)
        for (int b = 0; b < dB; ++b) {
          Complex acc = 0.0;
          for (int a = 0; a < dA; ++a) {
            acc += w(rp * dAB + a * dB + bp) * std::conj(v(r * dAB + a * dB + b));
          }
          x(rp * dB + bp, r * dB + b) = acc;
        }

  const Matrix u = detail::maximizing_unitary(x);  // W on (R,B) with Tr(WX) = sum of singular values

  // |v'> = (W_{RB} (x) 1_A) |w'>
  Vector vp = Vector::Zero(dRB * dA);
  for (int r = 0; r < dAB; ++r)
    for (int b = 0; b < dB; ++b)
      for (int a = 0; a < dA; ++a) {
        Complex acc = 0.0;
        for (int rp = 0; rp < dAB; ++rp)
          for (int bp = 0; bp < dB; ++bp) {
            acc += u(r * dB + b, rp * dB + bp) * w(rp * dAB + a * dB + bp);
          }
        vp(r * dAB + a * dB + b) = acc;
      }

  // rho'_AB = Tr_R |v'><v'|
  Matrix rho_prime_AB = Matrix::Zero(dAB, dAB);
  for (int r = 0; r < dAB; ++r) {
    for (int m = 0; m < dAB; ++m)
      for (int n = 0; n < dAB; ++n)
        rho_prime_AB(m, n) += vp(r * dAB + m) * std::conj(vp(r * dAB + n));
  }
  return DensityOperator::trusted(rho_prime_AB, rho_AB.tols());
}

}  // namespace oneshot
