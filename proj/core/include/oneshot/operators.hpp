#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "oneshot/common.hpp"

namespace oneshot {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Sub-normal quantum state: Hermitian, PSD, trace <= 1. The universal state
/// carrier for every quantity in the library. Validation happens at
/// construction; the tolerances used are stored on the value.
class DensityOperator {
 public:
  DensityOperator() = default;

  /// Validates Hermiticity, positivity and trace and returns the state.
  /// Throws InvalidState when validation fails.
  static DensityOperator make(const Matrix& entries,
                              const Tolerances& tols = default_tols());

  /// Skips validation; for internal constructions known to be exact.
  static DensityOperator trusted(const Matrix& entries,
                                 const Tolerances& tols = default_tols());

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Matrix& matrix() const { return entries_; }
  double trace() const { return entries_.trace().real(); }
  bool normalized() const { return normalized_; }
  const Tolerances& tols() const { return tols_; }

  /// Throws InvalidState unless trace is 1 within tolerance.
  void require_normalized(const char* where) const;

 private:
  Matrix entries_;
  Tolerances tols_{};
  bool normalized_ = false;
};

/// Unit vector; purifications and protocol states.
class PureState {
 public:
  PureState() = default;
  static PureState make(const Vector& amplitudes,
                        const Tolerances& tols = default_tols());

  int dim() const { return static_cast<int>(amplitudes_.size()); }
  const Vector& vector() const { return amplitudes_; }
  DensityOperator projector() const;

 private:
  Vector amplitudes_;
};

/// Registers A and B of a bipartite operator, A-major indexing
/// (index = a * dimB + b).
struct BipartiteShape {
  int dimA = 1;
  int dimB = 1;
  int total() const { return dimA * dimB; }
};

enum class Side { A, B };

// ---------------------------------------------------------------------------
// Hermitian linear algebra kernels
// ---------------------------------------------------------------------------

struct EigResult {
  RealVector values;  // ascending
  Matrix vectors;     // columns
};

Matrix hermitize(const Matrix& m);
EigResult eig_hermitian(const Matrix& m);

/// f(M) for Hermitian M with eigenvalues clamped at 0 from below before
/// applying f; used for sqrt/log so that -1e-16 eigenvalues do not yield NaN.
Matrix sqrt_psd(const Matrix& m);

/// Positive part [M]_+ (eigenvalues below 0 dropped).
Matrix positive_part(const Matrix& m);
double trace_positive_part(const Matrix& m);

/// Projector onto the span of eigenvectors with eigenvalue > threshold.
Matrix support_projector(const Matrix& m, double threshold);

Matrix kron(const Matrix& a, const Matrix& b);

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// F(rho, sigma) = Tr sqrt(sqrt(rho) sigma sqrt(rho)), plus the
/// sqrt((1-Tr rho)(1-Tr sigma)) term when both inputs are genuinely
/// sub-normalized. Result in [0, 1 + 1e-8].
double fidelity(const DensityOperator& rho, const DensityOperator& sigma);

/// Root fidelity without the trace-deficit term; valid for any PSD inputs.
double fidelity_root(const Matrix& rho, const Matrix& sigma);

/// P(rho, sigma) = sqrt(1 - F^2); tiny negative radicands clamp to 0.
double purified_distance(const DensityOperator& rho,
                         const DensityOperator& sigma);

DensityOperator partial_trace(const DensityOperator& rho,
                              const BipartiteShape& shape, Side keep);
Matrix partial_trace(const Matrix& rho, int dimA, int dimB, Side keep);

/// Spectral purification on C^d (ancilla) x C^d (system): tracing out the
/// first factor recovers rho.
PureState purify(const DensityOperator& rho);

/// Extension of rho'_A matching rho_AB as well as fidelity allows:
/// Tr_B(rho'_AB) = rho'_A and F(rho'_AB, rho_AB) = F(rho'_A, rho_A).
/// The maximizing unitary comes from an SVD of the purification overlap.
DensityOperator uhlmann_extension(const DensityOperator& rho_AB,
                                  const BipartiteShape& shape,
                                  const DensityOperator& rho_prime_A);

namespace detail {
/// Unitary W maximizing Re Tr(W X); from the SVD X = U S V^*.
Matrix maximizing_unitary(const Matrix& x);
}  // namespace detail

}  // namespace oneshot
