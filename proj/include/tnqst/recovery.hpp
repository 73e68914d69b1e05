#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "tnqst/errors.hpp"
#include "tnqst/network.hpp"
#include "tnqst/povm.hpp"

namespace tnqst {

/// How the least-squares residual is evaluated.
///   direct: apply the map and its adjoint outcome by outcome.
///   gram:   precomputed quadratic form in a real basis of Hermitian
///           matrices, O(D^4) per evaluation independent of the outcome count.
///   automatic: gram when D^2 <= 1024 and D^2 < total outcomes.
enum class LossRoute { automatic, direct, gram };

/// G = sum_k alpha_k alpha_k^T where alpha_k are the coordinates of A_k in an
/// orthonormal real basis of Hermitian matrices. Depends on the map only, so
/// one instance can be shared by every fit against the same measurements.
class GramOperator {
 public:
  explicit GramOperator(const MeasurementMap& map);

  std::size_t dim() const { return dim_; }
  const RMatrix& matrix() const { return gram_; }
  /// sum_k p_k alpha_k for the map this operator was built from.
  RVector linear_term(const MeasurementMap& map, std::span<const double> p_hat) const;

 private:
  std::size_t dim_;
  RMatrix gram_;
};

/// Coordinates of a Hermitian matrix: diagonal entries, then sqrt(2) Re and
/// sqrt(2) Im of each strictly upper entry (row-major).
RVector hermitian_coords(const CMatrix& x);
CMatrix hermitian_from_coords(const RVector& coords, std::size_t dim);

/// Least-squares objective over the factor tensors.
///   PEPS: || A(u u^dagger / ||u||^2) - p_hat ||^2
///   PEPO: || A(sym C) - p_hat ||^2 + lambda (tr sym C - 1)^2,
///         C = contract(state), sym C = (C + C^dagger)/2.
class Objective {
 public:
  Objective(const MeasurementMap& map, std::vector<double> p_hat, double trace_weight = 0.0,
            LossRoute route = LossRoute::automatic,
            std::shared_ptr<const GramOperator> gram = nullptr);

  double loss(const TensorNetworkState& state) const;

  /// Loss and one Wirtinger gradient per site: G satisfies
  /// loss(X + eta D) = loss(X) + 2 eta Re<G, D> + O(eta^2) for real eta.
  double loss_and_gradient(const TensorNetworkState& state,
                           std::vector<std::vector<cplx>>& gradient) const;

  double trace_weight() const { return trace_weight_; }
  bool uses_gram() const { return gram_ != nullptr; }
  const MeasurementMap& map() const { return *map_; }

 private:
  /// Data term and the Hermitian matrix W = sum_k r_k A_k for a Hermitian rho.
  double data_term(const CMatrix& rho, CMatrix* residual_op) const;
  double data_term_pure(const CVector& u, double norm2, CMatrix* residual_op) const;

  const MeasurementMap* map_;
  std::vector<double> p_hat_;
  double p_hat_norm2_;
  double trace_weight_;
  std::shared_ptr<const GramOperator> gram_;
  RVector gram_linear_;
};

/// Free-function forms using the direct route.
double loss(const TensorNetworkState& state, const MeasurementMap& map,
            std::span<const double> p_hat, double trace_weight = 0.0);
std::vector<std::vector<cplx>> gradient(const TensorNetworkState& state, const MeasurementMap& map,
                                        std::span<const double> p_hat, double trace_weight = 0.0);

/// conj(d contract(state)[y] / d site_s[x]) contracted against `cotangent`:
/// sum_y conj(dC_y / dX_s[x]) cotangent_y for every site s. For PEPS the
/// cotangent is a length-D vector, for PEPO a D x D matrix.
std::vector<std::vector<cplx>> environment_adjoint(const TensorNetworkState& state,
                                                   const CMatrix& cotangent);

struct RecoveryConfig {
  LatticeShape shape{1, 1, 2};
  BondDims bonds = BondDims::uniform(LatticeShape{1, 1, 2}, NetworkKind::Peps, 1);
  int max_iters = 3000;
  int restarts = 8;
  std::uint64_t init_seed = 0;
  double initial_step = 1.0;
  /// Backtracking shrink factor.
  double shrink = 0.5;
  /// Sufficient decrease: accept when loss drops by >= c * step * ||G||^2.
  double sufficient_decrease = 1e-4;
  /// Stop once the relative decrease stays below this for `patience` steps.
  double tolerance = 1e-12;
  int patience = 5;
  /// Trace penalty for PEPO; negative means the default 10 K / d^n.
  double trace_weight = -1.0;
  LossRoute route = LossRoute::automatic;
  /// Apply project_physical to the final PEPO (and PEPS) operator.
  bool project_output = true;
  /// Run restarts in parallel.
  bool parallel_restarts = true;

  NetworkKind kind() const { return bonds.kind(); }
  void validate() const;
};

struct IterationRecord {
  double loss;
  double step;
};

struct RestartTrace {
  std::uint64_t seed = 0;
  std::vector<IterationRecord> trajectory;
  double final_loss = 0.0;
  int iterations = 0;
  bool diverged = false;
};

struct RecoveryReport {
  double best_loss = 0.0;
  int best_restart = 0;
  std::vector<RestartTrace> restarts;
  std::optional<TensorNetworkState> final_state;
  /// Estimated density matrix after (optional) physical projection.
  DenseState estimate;
  std::optional<double> frob_error;
  std::optional<double> trace_error;
  double trace_weight = 0.0;
};

/// Thrown when every restart produced a non-finite loss.
class OptimizationFailure : public Error {
 public:
  OptimizationFailure(const std::string& what, std::vector<RestartTrace> traces)
      : Error(what), traces_(std::move(traces)) {}
  const std::vector<RestartTrace>& traces() const { return traces_; }

 private:
  std::vector<RestartTrace> traces_;
};

/// Factorized gradient descent with backtracking line search, restarted from
/// independent random initializations; the restart with the lowest loss wins.
RecoveryReport fit(const RecoveryConfig& config, const MeasurementMap& map,
                   std::span<const double> p_hat,
                   const std::optional<DenseState>& ground_truth = std::nullopt,
                   std::shared_ptr<const GramOperator> gram = nullptr);

/// Euclidean projection onto {rho >= 0, tr rho = 1}: eigen-decompose the
/// Hermitian part and project the spectrum onto the probability simplex.
DenseState project_physical(const DenseState& rho);
CMatrix project_physical(const CMatrix& rho);

/// Euclidean projection of a real vector onto the probability simplex
/// (sort-and-threshold).
std::vector<double> project_simplex(std::span<const double> v);

struct ErrorMetrics {
  double frob = 0.0;
  double trace_dist = 0.0;
  /// Present when a rank was supplied: trace_dist <= 2 sqrt(rank) frob.
  std::optional<bool> rank_bound_holds;
};

/// Frobenius and (unnormalized) trace-norm distances between two states.
ErrorMetrics error_metrics(const DenseState& rho_hat, const DenseState& rho_star,
                           std::optional<int> rank_star = std::nullopt);

}  // namespace tnqst
