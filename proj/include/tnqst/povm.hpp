#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "tnqst/dense.hpp"

namespace tnqst {

/// K unit vectors with uniform weight 1/K. When they form a 1-design the
/// induced POVM is A_k = (D/K) w_k w_k^dagger.
struct DesignEnsemble {
  /// D x K, one vector per column.
  CMatrix vectors;
  int declared_t = 1;

  std::size_t dim() const { return static_cast<std::size_t>(vectors.rows()); }
  std::size_t size() const { return static_cast<std::size_t>(vectors.cols()); }
};

/// Rank-one projective measurement in the columns of a unitary.
struct ProjectiveBasis {
  CMatrix unitary;
};

/// A rank-one POVM: A_k = weight * v_k v_k^dagger for each column v_k.
struct PovmBlock {
  CMatrix vectors;
  double weight = 1.0;

  std::size_t outcomes() const { return static_cast<std::size_t>(vectors.cols()); }
};

/// Stack of Q rank-one POVMs over the same Hilbert space. Outcomes are
/// ordered block by block, in vector order within a block.
class MeasurementMap {
 public:
  static MeasurementMap from_design(const DesignEnsemble& design);
  static MeasurementMap from_bases(const std::vector<ProjectiveBasis>& bases);
  explicit MeasurementMap(std::vector<PovmBlock> blocks);

  std::size_t dim() const { return dim_; }
  std::size_t num_blocks() const { return blocks_.size(); }
  std::size_t total_outcomes() const { return total_; }
  /// Offset of block q in the stacked outcome vector.
  std::size_t block_offset(std::size_t q) const { return offsets_[q]; }
  const std::vector<PovmBlock>& blocks() const { return blocks_; }

 private:
  std::vector<PovmBlock> blocks_;
  std::vector<std::size_t> offsets_;
  std::size_t dim_ = 0;
  std::size_t total_ = 0;
};

/// Tetrahedral qubit SIC: four states with pairwise overlap 1/3, a 2-design.
DesignEnsemble sic_qubit();

/// Every n-qubit stabilizer state (up to global phase), n <= 4. A 3-design
/// with 2^n prod_{k=1}^n (2^k + 1) elements.
DesignEnsemble stabilizer_design(int n_qubits);

/// 2^n prod_{k=1}^n (2^k + 1).
std::size_t stabilizer_count(int n_qubits);

/// Haar-random unitary: Gram-Schmidt on a complex Ginibre matrix.
/// Gram-Schmidt leaves the triangular factor with a real positive diagonal,
/// which is exactly the phase convention that makes the result Haar.
ProjectiveBasis haar_basis(std::size_t dim, std::mt19937_64& rng);

/// K i.i.d. uniformly random unit vectors. Not a design; used as a negative
/// control.
DesignEnsemble random_frame(std::size_t dim, std::size_t k, std::mt19937_64& rng);

/// Stacked outcome probabilities Re <A_{q,k}, rho>. Vector states are
/// evaluated as |<v_k, u>|^2 directly. For a Hermitian operator the dropped
/// imaginary part is zero to rounding.
std::vector<double> apply_map(const MeasurementMap& map, const DenseState& rho);
std::vector<double> apply_map(const MeasurementMap& map, const CMatrix& rho);

/// sum_{q,k} r_{q,k} A_{q,k}.
CMatrix apply_adjoint(const MeasurementMap& map, std::span<const double> r);

/// max over blocks of the max-abs entry of sum_k A_{q,k} - I.
double effects_sum_check(const MeasurementMap& map);

}  // namespace tnqst
