#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tnqst/errors.hpp"
#include "tnqst/recovery.hpp"
#include "tnqst/rng.hpp"

using namespace tnqst;

namespace {

MeasurementMap haar_map(std::size_t dim, int bases, std::uint64_t seed) {
  auto rng = make_stream(seed, {});
  std::vector<ProjectiveBasis> b;
  for (int q = 0; q < bases; ++q) b.push_back(haar_basis(dim, rng));
  return MeasurementMap::from_bases(b);
}

std::vector<double> noisy_target(const MeasurementMap& map, std::uint64_t seed) {
  auto rng = make_stream(seed, {});
  const auto p = apply_map(map, random_density(map.dim(), 2, rng));
  std::vector<double> out(p);
  for (auto& x : out) x += 0.01 * complex_normal(rng).real();
  return out;
}

// Max relative error of analytic vs finite-difference gradient over `coords`
// pseudo-random coordinates.
double gradient_check(const TensorNetworkState& state, const Objective& obj, int coords,
                      std::uint64_t seed) {
  std::vector<std::vector<cplx>> g;
  obj.loss_and_gradient(state, g);
  auto rng = make_stream(seed, {});
  double worst = 0.0;
  for (int c = 0; c < coords; ++c) {
    const std::size_t s = rng() % state.sites().size();
    const std::size_t i = rng() % state.sites()[s].size();
    const cplx fd = oracle::fd_wirtinger([&](const TensorNetworkState& x) { return obj.loss(x); }, state, s,
                                         i, 1e-6);
    worst = std::max(worst, std::abs(fd - g[s][i]) / std::max(std::abs(g[s][i]), 1e-8));
  }
  return worst;
}

}  // namespace

TEST(HermitianCoords, IsometricRoundTrip) {
  auto rng = make_stream(1, {});
  const CMatrix x = random_hermitian(5, rng), y = random_hermitian(5, rng);
  const RVector cx = hermitian_coords(x), cy = hermitian_coords(y);
  EXPECT_EQ(cx.size(), 25);
  EXPECT_NEAR(cx.dot(cy), (x.adjoint() * y).trace().real(), 1e-12);
  EXPECT_LT((hermitian_from_coords(cx, 5) - x).norm(), 1e-14);
}

TEST(GramOperator, QuadraticFormIsEmbeddingNorm) {
  const auto map = haar_map(4, 3, 2);
  const GramOperator gram(map);
  auto rng = make_stream(3, {});
  for (int t = 0; t < 5; ++t) {
    const CMatrix x = random_hermitian(4, rng);
    const RVector c = hermitian_coords(x);
    const auto p = oracle::probabilities(map, x);
    double norm2 = 0.0;
    for (double v : p) norm2 += v * v;
    EXPECT_NEAR(c.dot(gram.matrix() * c), norm2, 1e-12);
  }
}

TEST(Objective, RoutesAgreeWithDenseOracle) {
  const LatticeShape shape(1, 2, 2);
  const auto map = haar_map(4, 20, 4);
  const auto p_hat = noisy_target(map, 5);
  for (auto kind : {NetworkKind::Peps, NetworkKind::Pepo}) {
    const auto state = random_state(shape, BondDims::uniform(shape, kind, 2), std::nullopt, 6);
    const double lambda = kind == NetworkKind::Pepo ? 3.0 : 0.0;
    const Objective direct(map, p_hat, lambda, LossRoute::direct);
    const Objective gram(map, p_hat, lambda, LossRoute::gram);
    EXPECT_FALSE(direct.uses_gram());
    EXPECT_TRUE(gram.uses_gram());
    const double expect = oracle::dense_loss(state, map, p_hat, lambda);
    EXPECT_NEAR(direct.loss(state), expect, 1e-12 * std::max(1.0, expect));
    EXPECT_NEAR(gram.loss(state), expect, 1e-12 * std::max(1.0, expect));
    EXPECT_NEAR(loss(state, map, p_hat, lambda), expect, 1e-12 * std::max(1.0, expect));
  }
}

TEST(Objective, GradientMatchesFiniteDifferences) {
  const auto map = haar_map(8, 6, 7);
  const auto p_hat = noisy_target(map, 8);
  const LatticeShape shape(1, 3, 2);
  for (auto kind : {NetworkKind::Peps, NetworkKind::Pepo}) {
    const BondDims bonds(shape, kind, {2, 3, 0});
    const auto state = random_state(shape, bonds, std::nullopt, 9);
    for (auto route : {LossRoute::direct, LossRoute::gram}) {
      const Objective obj(map, p_hat, kind == NetworkKind::Pepo ? 2.5 : 0.0, route);
      EXPECT_LT(gradient_check(state, obj, 25, 10), 1e-5) << to_string(kind);
    }
  }
}

TEST(Objective, GradientOnTwoByTwo) {
  const auto map = haar_map(16, 4, 11);
  const auto p_hat = noisy_target(map, 12);
  const LatticeShape shape(2, 2, 2);
  for (auto kind : {NetworkKind::Peps, NetworkKind::Pepo}) {
    const auto state = random_state(shape, BondDims::uniform(shape, kind, 2), std::nullopt, 13);
    const Objective obj(map, p_hat, kind == NetworkKind::Pepo ? 1.0 : 0.0, LossRoute::direct);
    EXPECT_LT(gradient_check(state, obj, 20, 14), 1e-5);
  }
}

TEST(EnvironmentAdjoint, LinearFunctional) {
  // f(X) = Re <K, contract(X)> has Wirtinger derivative environment_adjoint(X, K) / 2.
  const LatticeShape shape(2, 2, 2);
  auto rng = make_stream(15, {});
  for (auto kind : {NetworkKind::Peps, NetworkKind::Pepo}) {
    const auto state = random_state(shape, BondDims::uniform(shape, kind, 2), std::nullopt, 16);
    const auto dim = static_cast<Eigen::Index>(shape.hilbert_dim());
    CMatrix k(dim, kind == NetworkKind::Peps ? 1 : dim);
    for (Eigen::Index i = 0; i < k.size(); ++i) k.data()[i] = complex_normal(rng);
    const auto env = environment_adjoint(state, k);
    auto f = [&](const TensorNetworkState& x) { return (k.adjoint() * contract(x).values).trace().real(); };
    for (std::size_t s = 0; s < 4; ++s)
      for (std::size_t i = 0; i < state.sites()[s].size(); i += 3) {
        const cplx fd = oracle::fd_wirtinger(f, state, s, i, 1e-6);
        EXPECT_NEAR(std::abs(fd - 0.5 * env[s][i]), 0.0, 1e-7);
      }
  }
}

TEST(Projection, SimplexMatchesBisection) {
  auto rng = make_stream(17, {});
  for (int t = 0; t < 100; ++t) {
    std::vector<double> v(1 + t % 9);
    for (auto& x : v) x = 2.0 * complex_normal(rng).real();
    const auto a = project_simplex(v);
    const auto b = oracle::simplex_bisection(v);
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      EXPECT_NEAR(a[i], b[i], 1e-12);
      EXPECT_GE(a[i], 0.0);
      sum += a[i];
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(Projection, PhysicalIsIdempotentAndNonExpansive) {
  auto rng = make_stream(18, {});
  const CMatrix rho = random_density(6, 3, rng);
  EXPECT_LT((project_physical(rho) - rho).norm(), 1e-13);
  for (int t = 0; t < 50; ++t) {
    const CMatrix x = random_hermitian(6, rng), y = random_hermitian(6, rng);
    const CMatrix px = project_physical(x), py = project_physical(y);
    EXPECT_LE((px - py).norm(), (x - y).norm() + 1e-10);
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(px);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-12);
    EXPECT_NEAR(px.trace().real(), 1.0, 1e-12);
  }
}

TEST(ErrorMetrics, RankBound) {
  auto rng = make_stream(19, {});
  const CVector v = random_unit_vector(4, rng);
  const DenseState star = DenseState::vector(v);
  const DenseState hat = DenseState::matrix(random_density(4, 4, rng));
  const auto m = error_metrics(hat, star, 1);
  ASSERT_TRUE(m.rank_bound_holds.has_value());
  EXPECT_TRUE(*m.rank_bound_holds);
  const CMatrix delta = hat.values - v * v.adjoint();
  EXPECT_NEAR(m.frob, delta.norm(), 1e-14);
  EXPECT_NEAR(m.trace_dist, oracle::trace_norm(delta), 1e-8);
}

TEST(Fit, NoiselessPepsRecovery) {
  const LatticeShape shape(1, 2, 2);
  const auto truth_state = random_state(shape, BondDims::uniform(shape, NetworkKind::Peps, 2), std::nullopt, 20);
  const CVector u = contract(truth_state).values.col(0);
  const DenseState truth = DenseState::vector(u);
  const auto map = MeasurementMap::from_design(stabilizer_design(2));
  const auto p = apply_map(map, truth);

  RecoveryConfig cfg;
  cfg.shape = shape;
  cfg.bonds = BondDims::uniform(shape, NetworkKind::Peps, 2);
  cfg.restarts = 4;
  cfg.init_seed = 21;
  const auto report = fit(cfg, map, p, truth);
  ASSERT_TRUE(report.trace_error.has_value());
  EXPECT_LT(*report.trace_error, 1e-3);
  EXPECT_EQ(report.restarts.size(), 4u);
  for (const auto& r : report.restarts) {
    ASSERT_FALSE(r.trajectory.empty());
    for (std::size_t i = 1; i < r.trajectory.size(); ++i)
      EXPECT_LE(r.trajectory[i].loss, r.trajectory[i - 1].loss);
  }

  cfg.parallel_restarts = false;
  const auto serial = fit(cfg, map, p, truth);
  EXPECT_EQ(serial.best_loss, report.best_loss);
  EXPECT_EQ(serial.estimate.values, report.estimate.values);
}

TEST(Fit, NoiselessPepoRecovery) {
  const LatticeShape shape(1, 2, 2);
  auto rng = make_stream(22, {});
  // Product of two single-qubit mixed states: an exact bond-1 PEPO.
  const CMatrix a = random_density(2, 2, rng), b = random_density(2, 2, rng);
  const DenseState truth = DenseState::matrix(oracle::kron(b, a));
  const auto map = MeasurementMap::from_design(stabilizer_design(2));
  const auto p = apply_map(map, truth);

  RecoveryConfig cfg;
  cfg.shape = shape;
  cfg.bonds = BondDims::uniform(shape, NetworkKind::Pepo, 1);
  cfg.restarts = 4;
  cfg.init_seed = 23;
  const auto report = fit(cfg, map, p, truth);
  EXPECT_LT(*report.trace_error, 1e-3);
  EXPECT_GT(report.trace_weight, 0.0);
}

TEST(Fit, ValidatesConfiguration) {
  const auto map = MeasurementMap::from_design(sic_qubit());
  const std::vector<double> p(4, 0.25);
  RecoveryConfig cfg;
  cfg.shrink = 1.5;
  EXPECT_THROW(fit(cfg, map, p), RangeError);
  cfg = RecoveryConfig{};
  cfg.restarts = 0;
  EXPECT_THROW(fit(cfg, map, p), RangeError);
  cfg = RecoveryConfig{};
  EXPECT_THROW(fit(cfg, map, std::vector<double>(3, 0.3)), DimensionError);
  cfg.shape = LatticeShape(1, 2, 2);
  cfg.bonds = BondDims::uniform(cfg.shape, NetworkKind::Peps, 1);
  EXPECT_THROW(fit(cfg, map, p), DimensionError);
}
