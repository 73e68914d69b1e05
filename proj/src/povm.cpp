#include "tnqst/povm.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "tnqst/errors.hpp"
#include "tnqst/kernels.hpp"
#include "tnqst/rng.hpp"

namespace tnqst {

MeasurementMap::MeasurementMap(std::vector<PovmBlock> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw DimensionError("measurement map needs at least one POVM");
  dim_ = static_cast<std::size_t>(blocks_.front().vectors.rows());
  for (const auto& b : blocks_) {
    if (static_cast<std::size_t>(b.vectors.rows()) != dim_)
      throw DimensionError("all POVMs of a map must act on the same space");
    offsets_.push_back(total_);
    total_ += b.outcomes();
  }
}

MeasurementMap MeasurementMap::from_design(const DesignEnsemble& design) {
  const double weight = static_cast<double>(design.dim()) / static_cast<double>(design.size());
  return MeasurementMap({PovmBlock{design.vectors, weight}});
}

MeasurementMap MeasurementMap::from_bases(const std::vector<ProjectiveBasis>& bases) {
  std::vector<PovmBlock> blocks;
  blocks.reserve(bases.size());
  for (const auto& b : bases) blocks.push_back(PovmBlock{b.unitary, 1.0});
  return MeasurementMap(std::move(blocks));
}

DesignEnsemble sic_qubit() {
  DesignEnsemble sic;
  sic.vectors.resize(2, 4);
  sic.vectors.col(0) << 1.0, 0.0;
  const double c = std::sqrt(1.0 / 3.0);
  const double s = std::sqrt(2.0 / 3.0);
  for (int k = 0; k < 3; ++k) {
    const double phi = 2.0 * std::numbers::pi * k / 3.0;
    sic.vectors.col(k + 1) << c, std::polar(s, phi);
  }
  sic.declared_t = 2;
  return sic;
}

ProjectiveBasis haar_basis(std::size_t dim, std::mt19937_64& rng) {
  if (dim < 1 || dim > 1024) throw ScaleError("haar_basis supports 1 <= dim <= 1024");
  const auto n = static_cast<Eigen::Index>(dim);
  CMatrix q(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) q(i, j) = complex_normal(rng);
  // Modified Gram-Schmidt, two passes per column.
  for (Eigen::Index k = 0; k < n; ++k) {
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j < k; ++j) {
        const cplx proj = q.col(j).dot(q.col(k));
        q.col(k) -= proj * q.col(j);
      }
    }
    q.col(k) /= q.col(k).norm();
  }
  return ProjectiveBasis{std::move(q)};
}

DesignEnsemble random_frame(std::size_t dim, std::size_t k, std::mt19937_64& rng) {
  DesignEnsemble frame;
  frame.vectors.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(k));
  for (Eigen::Index c = 0; c < frame.vectors.cols(); ++c)
    frame.vectors.col(c) = random_unit_vector(dim, rng);
  frame.declared_t = 0;
  return frame;
}

std::vector<double> apply_map(const MeasurementMap& map, const CMatrix& rho) {
  if (static_cast<std::size_t>(rho.rows()) != map.dim() || rho.rows() != rho.cols())
    throw DimensionError("state is " + std::to_string(rho.rows()) + "x" +
                         std::to_string(rho.cols()) + ", map acts on dimension " +
                         std::to_string(map.dim()));
  std::vector<double> out(map.total_outcomes());
  for (std::size_t q = 0; q < map.num_blocks(); ++q) {
    const PovmBlock& b = map.blocks()[q];
    kernels::omp::probs_mixed(b.vectors, b.weight, rho,
                              std::span<double>(out).subspan(map.block_offset(q), b.outcomes()));
  }
  return out;
}

std::vector<double> apply_map(const MeasurementMap& map, const DenseState& rho) {
  if (!rho.is_vector()) return apply_map(map, rho.values);
  if (static_cast<std::size_t>(rho.values.rows()) != map.dim())
    throw DimensionError("state vector length " + std::to_string(rho.values.rows()) +
                         " does not match the map dimension " + std::to_string(map.dim()));
  const CVector u = rho.values.col(0);
  std::vector<double> out(map.total_outcomes());
  for (std::size_t q = 0; q < map.num_blocks(); ++q) {
    const PovmBlock& b = map.blocks()[q];
    kernels::omp::probs_pure(b.vectors, b.weight, u,
                             std::span<double>(out).subspan(map.block_offset(q), b.outcomes()));
  }
  return out;
}

CMatrix apply_adjoint(const MeasurementMap& map, std::span<const double> r) {
  if (r.size() != map.total_outcomes()) throw DimensionError("coefficient vector has wrong length");
  const auto n = static_cast<Eigen::Index>(map.dim());
  CMatrix out = CMatrix::Zero(n, n);
  for (std::size_t q = 0; q < map.num_blocks(); ++q) {
    const PovmBlock& b = map.blocks()[q];
    kernels::omp::adjoint_accumulate(b.vectors, b.weight, r.subspan(map.block_offset(q), b.outcomes()),
                                     out);
  }
  return out;
}

double effects_sum_check(const MeasurementMap& map) {
  const auto n = static_cast<Eigen::Index>(map.dim());
  double worst = 0.0;
  for (const auto& b : map.blocks()) {
    const CMatrix sum = b.weight * b.vectors * b.vectors.adjoint();
    worst = std::max(worst, (sum - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace tnqst
