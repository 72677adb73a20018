#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace oneshot {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// All entropic quantities in this library are reported in bits (base-2 logs).
inline double log2_safe(double x) { return std::log2(x); }

// ---------------------------------------------------------------------------
// Error types
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct InvalidState : Error { using Error::Error; };
struct InvalidEps : Error { using Error::Error; };
struct InvalidConfig : Error { using Error::Error; };
struct NumericalFailure : Error { using Error::Error; };
struct SolverFailure : Error { using Error::Error; };
struct NonConvergence : Error { using Error::Error; };
struct DominationViolated : Error { using Error::Error; };
struct DimensionBlowup : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// Validation tolerances (defaults per the library contract, overridable)
// ---------------------------------------------------------------------------

struct Tolerances {
  double hermitian = 1e-10;
  double psd = 1e-9;
  double trace = 1e-9;
  double support = 1e-9;   // eigenvalue threshold deciding support inclusion
};

inline const Tolerances& default_tols() {
  static const Tolerances t{};
  return t;
}

// ---------------------------------------------------------------------------
// Deterministic RNG helpers
// ---------------------------------------------------------------------------

// splitmix64: cheap, well-mixed derivation of sub-seeds from (seed, index).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t index = 0) {
  return std::mt19937_64(mix_seed(seed, index));
}

// ---------------------------------------------------------------------------
// Logging (ONESHOT_RSP_LOG in {error, info, debug})
// ---------------------------------------------------------------------------

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

LogLevel log_level();
void log_message(LogLevel level, const std::string& msg);

inline void log_info(const std::string& msg) { log_message(LogLevel::Info, msg); }
inline void log_debug(const std::string& msg) { log_message(LogLevel::Debug, msg); }
inline void log_error(const std::string& msg) { log_message(LogLevel::Error, msg); }

}  // namespace oneshot
