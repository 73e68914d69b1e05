#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tnqst/errors.hpp"
#include "tnqst/kernels.hpp"
#include "tnqst/rng.hpp"
#include "tnqst/verify.hpp"

using namespace tnqst;

TEST(SymmetricProjector, IsProjectorWithBinomialTrace) {
  for (auto [d, s] : std::vector<std::pair<int, int>>{{2, 2}, {2, 3}, {3, 2}, {4, 3}}) {
    const CMatrix p = symmetric_projector(d, s);
    EXPECT_LT((p * p - p).norm(), 1e-12);
    EXPECT_LT((p - p.adjoint()).norm(), 1e-15);
    EXPECT_NEAR(p.trace().real(), binomial(d + s - 1, s), 1e-12);
  }
}

TEST(Moments, DenseAndSymmetricRoutesAgree) {
  auto rng = make_stream(1, {});
  const std::vector<DesignEnsemble> ensembles{sic_qubit(), stabilizer_design(1), stabilizer_design(2),
                                              random_frame(4, 30, rng), random_frame(3, 12, rng)};
  for (const auto& e : ensembles)
    for (int s = 1; s <= 3; ++s) {
      if (std::pow(e.dim(), s) > 4096) continue;
      EXPECT_NEAR(dense_moment_deviation(e, s), symmetric_moment_deviation(e, s), 1e-12);
    }
}

TEST(Moments, FramePotentialIdentity) {
  // ||M_s - P/C||_F^2 = FP_s - 1/C for unit vectors.
  auto rng = make_stream(2, {});
  const auto frame = random_frame(4, 25, rng);
  for (int s = 1; s <= 3; ++s) {
    const double c = binomial(4 + s - 1, s);
    const double dev = symmetric_moment_deviation(frame, s);
    EXPECT_NEAR(dev * dev, kernels::reference::frame_potential(frame.vectors, s) - 1.0 / c, 1e-12);
  }
}

TEST(Moments, DesignsAndNegativeControls) {
  EXPECT_LE(check_design_moments(sic_qubit(), 2).deviation, 1e-12);
  EXPECT_LE(check_design_moments(stabilizer_design(1), 3).deviation, 1e-12);
  EXPECT_GT(check_design_moments(sic_qubit(), 3).deviation, 1e-3);
  auto rng = make_stream(3, {});
  EXPECT_GT(check_design_moments(random_frame(4, 60, rng), 2).deviation, 1e-3);
  for (int s = 1; s <= 3; ++s) EXPECT_TRUE(check_design_moments(stabilizer_design(3), s).pass);
}

TEST(Moments, ScaleGuard) {
  auto rng = make_stream(4, {});
  EXPECT_THROW(check_design_moments(random_frame(32, 10, rng), 3), ScaleError);
  EXPECT_THROW(check_design_moments(sic_qubit(), 4), ScaleError);
  EXPECT_THROW(check_design_moments(sic_qubit(), 0), ScaleError);
}

TEST(EmbeddingIdentity, Examples) {
  const auto sic = sic_qubit();
  const auto map = MeasurementMap::from_design(sic);
  const CMatrix mixed = CMatrix::Identity(2, 2) / 2.0;
  const auto p = apply_map(map, mixed);
  double lhs = 0.0;
  for (double x : p) lhs += x * x;
  EXPECT_NEAR(lhs, 0.25, 1e-15);
  EXPECT_NEAR(embedding_identity_rhs(mixed, 2, 4), 0.25, 1e-15);

  auto rng = make_stream(5, {});
  const CVector v = random_unit_vector(2, rng);
  const CMatrix pure = v * v.adjoint();
  EXPECT_NEAR(embedding_identity_rhs(pure, 2, 4), 1.0 / 3.0, 1e-15);
  lhs = 0.0;
  for (double x : apply_map(map, pure)) lhs += x * x;
  EXPECT_NEAR(lhs, 1.0 / 3.0, 1e-14);

  EXPECT_TRUE(check_embedding_identity(sic, 100, 6).pass);
  EXPECT_TRUE(check_embedding_identity(stabilizer_design(2), 100, 7).pass);
  EXPECT_FALSE(check_embedding_identity(random_frame(4, 60, rng), 20, 8).pass);
}

TEST(ThirdMoment, AgreesWithExplicitOperator) {
  const auto design = stabilizer_design(2);
  auto rng = make_stream(9, {});
  for (int t = 0; t < 5; ++t) {
    const CMatrix x = random_hermitian(4, rng);
    const CMatrix rho = random_density(4, 1 + t % 4, rng);
    EXPECT_NEAR(third_moment_lhs(design, x, rho), oracle::third_moment_via_operator(design, x, rho), 1e-12);
    EXPECT_NEAR(third_moment_lhs(design, x, rho), third_moment_rhs(x, rho, design.size()), 1e-12);
    const CMatrix x0 = x - x.trace() / 4.0 * CMatrix::Identity(4, 4);
    EXPECT_NEAR(third_moment_rhs(x0, rho, 60), third_moment_rhs_traceless(x0, rho, 60), 1e-14);
  }
  EXPECT_EQ(third_moment_lhs(design, CMatrix::Zero(4, 4), random_density(4, 1, rng)), 0.0);
  EXPECT_EQ(third_moment_rhs(CMatrix::Zero(4, 4), random_density(4, 1, rng), 60), 0.0);
}

TEST(ThirdMoment, ChecksPassOnDesignsAndFailOnSic) {
  EXPECT_LE(check_third_moment_identity(stabilizer_design(1), 20, 10).deviation, 1e-12);
  EXPECT_LE(check_third_moment_identity(stabilizer_design(2), 50, 11).deviation, 1e-10);
  EXPECT_GT(check_third_moment_identity(sic_qubit(), 20, 12).deviation, 1e-3);
}

TEST(HaarEmbedding, MaximallyMixedAndHomogeneity) {
  auto rng = make_stream(13, {});
  for (int q : {1, 5}) {
    std::vector<ProjectiveBasis> bases;
    for (int i = 0; i < q; ++i) bases.push_back(haar_basis(8, rng));
    const auto map = MeasurementMap::from_bases(bases);
    // ||A(I/D)||^2 = Q/D for any bases, ||I/D||_F^2 = 1/D.
    EXPECT_NEAR(normalized_embedding_ratio(map, CMatrix::Identity(8, 8) / 8.0), 8.0, 1e-12);
    const CMatrix rho = random_hermitian(8, rng);
    EXPECT_NEAR(normalized_embedding_ratio(map, rho), normalized_embedding_ratio(map, CMatrix(-3.5 * rho)),
                1e-12);
  }
}

TEST(HaarEmbedding, StatsDeterministic) {
  const LatticeShape shape(1, 2, 2);
  const auto bonds = BondDims::uniform(shape, NetworkKind::Peps, 2);
  const auto a = estimate_haar_embedding(shape, bonds, 5, 10, 14);
  const auto b = estimate_haar_embedding(shape, bonds, 5, 10, 14);
  EXPECT_EQ(a.min, b.min);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_LE(a.min, a.mean);
  EXPECT_EQ(a.threshold, kHaarEmbeddingThreshold);
  const auto pepo = estimate_haar_embedding(shape, BondDims::uniform(shape, NetworkKind::Pepo, 2), 5, 10, 15);
  EXPECT_GT(pepo.mean, 0.0);
}

TEST(ErrorScaling, SlopeAndDeterminism) {
  const std::vector<double> x{1, 10, 100}, y{1, 0.1, 0.01};
  EXPECT_NEAR(loglog_slope(x, y), -1.0, 1e-14);
  const auto map = MeasurementMap::from_design(stabilizer_design(2));
  auto rng = make_stream(16, {});
  const DenseState rho = DenseState::matrix(random_density(4, 2, rng));
  const std::vector<std::uint64_t> grid{1000, 10000, 100000, 1000000};
  const auto fit = check_povm_error_bound_scaling(map, rho, grid, 20, 17);
  EXPECT_GE(fit.slope, -0.65);
  EXPECT_LE(fit.slope, -0.35);
  const auto again = check_povm_error_bound_scaling(map, rho, grid, 20, 17);
  EXPECT_EQ(fit.slope, again.slope);
  const auto single = check_povm_error_bound_scaling(map, rho, grid, 1, 18);
  EXPECT_TRUE(std::isfinite(single.slope));
}
