#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tnqst/network.hpp"
#include "tnqst/povm.hpp"

namespace tnqst {

/// Outcome of one numerical identity or bound check.
struct IdentityReport {
  std::string name;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  /// Set for checks whose pass means "deviation exceeds the tolerance"
  /// (negative controls).
  bool expect_violation = false;
  std::map<std::string, std::string> metadata;

  void finish();
};

/// Binomial(n, k) as a double.
double binomial(int n, int k);

/// P_sym on (C^D)^{(x)s}: (1/s!) times the sum of the s! permutation operators.
CMatrix symmetric_projector(std::size_t dim, int s);

/// (1/K) sum_k (w_k w_k^dagger)^{(x)s} as a dense D^s x D^s matrix.
CMatrix moment_operator(const DesignEnsemble& design, int s);

/// || (1/K) sum_k (w_k w_k^dagger)^{(x)s} - P_sym / C(D+s-1, s) ||_F.
/// `dense_moment_deviation` builds both operators explicitly; the
/// default evaluates the same norm inside the symmetric subspace, where both
/// operators live, at a fraction of the cost.
double dense_moment_deviation(const DesignEnsemble& design, int s);
double symmetric_moment_deviation(const DesignEnsemble& design, int s);

/// s-th moment identity. Requires D^s <= 4096 and s <= 3.
IdentityReport check_design_moments(const DesignEnsemble& design, int s, double tolerance = 1e-9);

/// ||A(rho)||^2 against D (||rho||_F^2 + tr(rho)^2) / (K (D + 1)) on random
/// Hermitian rho (neither PSD nor unit trace).
IdentityReport check_embedding_identity(const DesignEnsemble& design, int trials,
                                        std::uint64_t seed, double tolerance = 1e-10);

/// Right-hand side of the 2-design identity.
double embedding_identity_rhs(const CMatrix& rho, std::size_t dim, std::size_t k);

/// sum_k <A_k, X>^2 <A_k, rho> with A_k = (D/K) w_k w_k^dagger.
double third_moment_lhs(const DesignEnsemble& design, const CMatrix& x, const CMatrix& rho);
/// (D^3/K^2) 6/((D+2)(D+1)D) (1/6) [ (tr X)^2 tr rho + tr(X^2) tr rho
///     + 2 tr(X rho) tr X + 2 tr(X^2 rho) ].
double third_moment_rhs(const CMatrix& x, const CMatrix& rho, std::size_t k);
/// Same with tr X = 0 and tr rho = 1: (D^3/K^2) 6/((D+2)(D+1)D)
///     [ ||X||_F^2 / 6 + tr(X^2 rho) / 3 ].
double third_moment_rhs_traceless(const CMatrix& x, const CMatrix& rho, std::size_t k);

/// Third-moment identity on random Hermitian X and random density rho; also
/// checks the traceless specialization. Deviation is the larger of the two.
IdentityReport check_third_moment_identity(const DesignEnsemble& design, int trials,
                                           std::uint64_t seed, double tolerance = 1e-9);

/// d^n ||A(rho)||^2 / (Q ||rho||_F^2) for one map and state.
double normalized_embedding_ratio(const MeasurementMap& map, const CMatrix& rho);

struct EmbeddingStats {
  double min = 0.0;
  double mean = 0.0;
  int trials = 0;
  int bases = 0;
  /// Artifact constant, not a value from theory.
  double threshold = 0.05;
  bool pass = false;
};

inline constexpr double kHaarEmbeddingThreshold = 0.05;

/// Draws `trials` random states of the given structure and Q fresh Haar bases
/// per trial. Trial t uses stream derive_seed(seed, {t}).
EmbeddingStats estimate_haar_embedding(const LatticeShape& shape, const BondDims& bonds, int bases,
                                       int trials, std::uint64_t seed);

struct ScalingFit {
  std::vector<std::uint64_t> shots;
  std::vector<double> mean_error;
  double slope = 0.0;
};

/// Least-squares slope of log y against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

/// Mean ||p_hat - p||_2 over `reps` repetitions per M, and the fitted log-log
/// slope (theory: -1/2).
ScalingFit check_povm_error_bound_scaling(const MeasurementMap& map, const DenseState& state,
                                          std::span<const std::uint64_t> shots_grid, int reps,
                                          std::uint64_t seed);

}  // namespace tnqst
