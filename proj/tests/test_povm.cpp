#include <gtest/gtest.h>

#include <set>

#include "oracles.hpp"
#include "tnqst/errors.hpp"
#include "tnqst/povm.hpp"
#include "tnqst/rng.hpp"

using namespace tnqst;

TEST(Sic, TetrahedralOverlaps) {
  const auto sic = sic_qubit();
  ASSERT_EQ(sic.size(), 4u);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double overlap = std::norm(sic.vectors.col(i).dot(sic.vectors.col(j)));
      EXPECT_NEAR(overlap, i == j ? 1.0 : 1.0 / 3.0, 1e-15);
    }
  EXPECT_LT(effects_sum_check(MeasurementMap::from_design(sic)), 1e-15);
}

TEST(Stabilizer, CountsAndStructure) {
  EXPECT_EQ(stabilizer_count(1), 6u);
  EXPECT_EQ(stabilizer_count(2), 60u);
  EXPECT_EQ(stabilizer_count(3), 1080u);
  EXPECT_EQ(stabilizer_count(4), 36720u);
  for (int n = 1; n <= 3; ++n) {
    const auto design = stabilizer_design(n);
    ASSERT_EQ(design.size(), stabilizer_count(n));
    EXPECT_EQ(design.dim(), std::size_t{1} << n);
    EXPECT_EQ(design.declared_t, 3);
    // Distinct rays: no pair has unit overlap.
    const CMatrix gram = design.vectors.adjoint() * design.vectors;
    for (Eigen::Index i = 0; i < gram.rows(); ++i) {
      EXPECT_NEAR(std::abs(gram(i, i)), 1.0, 1e-14);
      for (Eigen::Index j = i + 1; j < gram.cols(); ++j) EXPECT_LT(std::abs(gram(i, j)), 1.0 - 1e-6);
    }
    EXPECT_LT(effects_sum_check(MeasurementMap::from_design(design)), 1e-13);
  }
  EXPECT_THROW(stabilizer_design(0), RangeError);
  EXPECT_THROW(stabilizer_design(5), ScaleError);
}

TEST(Haar, UnitaryAndDeterministic) {
  auto a = make_stream(9, {});
  auto b = make_stream(9, {});
  const CMatrix u = haar_basis(16, a).unitary;
  EXPECT_EQ(u, haar_basis(16, b).unitary);
  EXPECT_LT((u.adjoint() * u - CMatrix::Identity(16, 16)).norm(), 1e-13);
  EXPECT_THROW(haar_basis(1025, a), ScaleError);
}

TEST(Haar, FirstMomentStatistics) {
  // For Haar U: E|U_00|^2 = 1/D with variance (D-1)/(D^2 (D+1)), and E U_00 = 0.
  const int d = 4, trials = 4000;
  auto rng = make_stream(10, {});
  double sum = 0.0;
  cplx mean = 0.0;
  for (int t = 0; t < trials; ++t) {
    const CMatrix u = haar_basis(d, rng).unitary;
    sum += std::norm(u(0, 0));
    mean += u(0, 0);
  }
  const double var = (d - 1.0) / (d * d * (d + 1.0));
  EXPECT_NEAR(sum / trials, 1.0 / d, 4.0 * std::sqrt(var / trials));
  EXPECT_LT(std::abs(mean / static_cast<double>(trials)), 4.0 * std::sqrt(1.0 / d / trials));
}

TEST(MeasurementMap, ApplyAndAdjointMatchExplicitEffects) {
  auto rng = make_stream(11, {});
  std::vector<ProjectiveBasis> bases{haar_basis(4, rng), haar_basis(4, rng), haar_basis(4, rng)};
  const auto map = MeasurementMap::from_bases(bases);
  EXPECT_EQ(map.num_blocks(), 3u);
  EXPECT_EQ(map.total_outcomes(), 12u);
  EXPECT_EQ(map.block_offset(2), 8u);
  EXPECT_LT(effects_sum_check(map), 1e-13);

  const CMatrix rho = random_density(4, 2, rng);
  const auto p = apply_map(map, rho);
  const auto oracle_p = oracle::probabilities(map, rho);
  for (std::size_t k = 0; k < p.size(); ++k) EXPECT_NEAR(p[k], oracle_p[k], 1e-14);
  for (int q = 0; q < 3; ++q) {
    double s = 0.0;
    for (int k = 0; k < 4; ++k) s += p[4 * q + k];
    EXPECT_NEAR(s, 1.0, 1e-13);
  }

  const CVector u = random_unit_vector(4, rng);
  const auto pv = apply_map(map, DenseState::vector(u));
  const auto pm = apply_map(map, CMatrix(u * u.adjoint()));
  for (std::size_t k = 0; k < pv.size(); ++k) EXPECT_NEAR(pv[k], pm[k], 1e-14);

  std::vector<double> r(12);
  for (auto& x : r) x = complex_normal(rng).real();
  CMatrix expect = CMatrix::Zero(4, 4);
  const auto eff = oracle::effects(map);
  for (std::size_t k = 0; k < r.size(); ++k) expect += r[k] * eff[k];
  EXPECT_LT((apply_adjoint(map, r) - expect).norm(), 1e-13);

  EXPECT_THROW(apply_map(map, CMatrix::Identity(3, 3)), DimensionError);
}

TEST(MeasurementMap, DesignWeight) {
  const auto map = MeasurementMap::from_design(stabilizer_design(2));
  EXPECT_EQ(map.num_blocks(), 1u);
  EXPECT_DOUBLE_EQ(map.blocks()[0].weight, 4.0 / 60.0);
  const auto p = apply_map(map, CMatrix(CMatrix::Identity(4, 4) / 4.0));
  for (double x : p) EXPECT_NEAR(x, 1.0 / 60.0, 1e-15);
}
