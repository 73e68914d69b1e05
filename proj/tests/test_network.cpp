#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tnqst/errors.hpp"
#include "tnqst/network.hpp"
#include "tnqst/rng.hpp"

using namespace tnqst;

namespace {

double rel_diff(const CMatrix& a, const CMatrix& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

TensorNetworkState raw_random(const LatticeShape& shape, const BondDims& bonds, std::uint64_t seed) {
  auto s = TensorNetworkState::zeros(shape, bonds);
  auto rng = make_stream(seed, {});
  for (auto& site : s.sites())
    for (auto& x : site.data()) x = complex_normal(rng);
  return s;
}

}  // namespace

TEST(Contract, SingleSite) {
  const LatticeShape shape(1, 1, 2);
  const auto bonds = BondDims::uniform(shape, NetworkKind::Peps, 1);
  SiteTensor site(0, 0, NetworkKind::Peps, 2, {1, 1, 1, 1}, {cplx(0.3, 0.1), cplx(-0.7, 2.0)});
  const TensorNetworkState state(shape, bonds, {site});
  const DenseState c = contract(state);
  ASSERT_TRUE(c.is_vector());
  EXPECT_EQ(c.values(0, 0), cplx(0.3, 0.1));
  EXPECT_EQ(c.values(1, 0), cplx(-0.7, 2.0));
}

TEST(Contract, ProductStateIsKronecker) {
  const LatticeShape shape(1, 2, 2);
  const auto bonds = BondDims::uniform(shape, NetworkKind::Peps, 1);
  const std::vector<cplx> x{cplx(1, 2), cplx(3, -1)}, y{cplx(0.5, 0), cplx(0, 0.25)};
  const TensorNetworkState state(shape, bonds,
                                 {SiteTensor(0, 0, NetworkKind::Peps, 2, {1, 1, 1, 1}, x),
                                  SiteTensor(0, 1, NetworkKind::Peps, 2, {1, 1, 1, 1}, y)});
  const CMatrix u = contract(state).values;
  // Site (1,1) is the least significant digit.
  for (int i1 = 0; i1 < 2; ++i1)
    for (int i2 = 0; i2 < 2; ++i2) EXPECT_EQ(u(i1 + 2 * i2, 0), x[i1] * y[i2]);
}

TEST(Contract, MatchesNaiveSumOnAllSmallLattices) {
  std::uint64_t seed = 1;
  for (int d : {2, 3, 4, 8})
    for (int q = 1; q <= 6; ++q)
      for (int p = 1; p <= 6; ++p) {
        std::size_t dim = 1;
        for (int s = 0; s < q * p && dim <= 64; ++s) dim *= d;
        if (dim > 64) continue;
        for (auto kind : {NetworkKind::Peps, NetworkKind::Pepo}) {
          const LatticeShape shape(q, p, d);
          const int r = q * p <= 4 ? 2 : 1 + static_cast<int>(seed % 2);
          const auto state = raw_random(shape, BondDims::uniform(shape, kind, r), seed++);
          EXPECT_LT(rel_diff(contract(state).values, oracle::naive_contract(state)), 1e-12)
              << q << "x" << p << " d=" << d << " " << to_string(kind);
        }
      }
}

TEST(Contract, NonUniformBonds) {
  const LatticeShape shape(2, 3, 2);
  const BondDims bonds(shape, NetworkKind::Peps, {2, 3, 1, 2, 1, 3, 0, 2, 0});
  const auto state = raw_random(shape, bonds, 99);
  EXPECT_LT(rel_diff(contract(state).values, oracle::naive_contract(state)), 1e-12);
}

TEST(Contract, LinearInEachSite) {
  const LatticeShape shape(2, 2, 2);
  for (auto kind : {NetworkKind::Peps, NetworkKind::Pepo}) {
    const auto bonds = BondDims::uniform(shape, kind, 2);
    auto rng = make_stream(5, {});
    for (int trial = 0; trial < 100; ++trial) {
      const auto x = raw_random(shape, bonds, 1000 + trial);
      const auto y_full = raw_random(shape, bonds, 5000 + trial);
      const int s = trial % 4;
      const cplx alpha = complex_normal(rng), beta = complex_normal(rng);
      auto xy = x, yv = x;
      yv.sites()[s] = y_full.sites()[s];
      for (std::size_t i = 0; i < xy.sites()[s].size(); ++i)
        xy.sites()[s].data()[i] = alpha * x.sites()[s].data()[i] + beta * yv.sites()[s].data()[i];
      const CMatrix expect = alpha * contract(x).values + beta * contract(yv).values;
      EXPECT_LT(rel_diff(contract(xy).values, expect), 1e-12);
    }
  }
}

TEST(DirectSum, AdditiveAndBonds) {
  const LatticeShape shape(1, 2, 2);
  const auto bonds = BondDims::uniform(shape, NetworkKind::Pepo, 2);
  const auto x = raw_random(shape, bonds, 1);
  const auto y = raw_random(shape, bonds, 2);
  const auto z = direct_sum(x, y);
  EXPECT_EQ(z.bonds().entries(), (bonds + bonds).entries());
  EXPECT_EQ(z.site(0, 0).bonds(), (std::array<int, 4>{1, 1, 4, 1}));
  EXPECT_LT(rel_diff(contract(z).values, contract(x).values + contract(y).values), 1e-12);

  const auto zero = direct_sum(x, TensorNetworkState::zeros(shape, bonds));
  EXPECT_LT(rel_diff(contract(zero).values, contract(x).values), 1e-12);
}

TEST(DirectSum, DifferentBondsOnLargerLattice) {
  const LatticeShape shape(2, 3, 2);
  const BondDims bx(shape, NetworkKind::Peps, {2, 1, 2, 1, 2, 2, 0, 1, 0});
  const BondDims by(shape, NetworkKind::Peps, {1, 2, 3, 2, 1, 1, 0, 2, 0});
  const auto x = raw_random(shape, bx, 3);
  const auto y = raw_random(shape, by, 4);
  const auto z = direct_sum(x, y);
  EXPECT_EQ(z.bonds().entries(), (bx + by).entries());
  EXPECT_LT(rel_diff(contract(z).values, contract(x).values + contract(y).values), 1e-12);
}

TEST(DirectSum, RejectsMismatch) {
  const LatticeShape a(1, 2, 2), b(2, 1, 2);
  const auto x = raw_random(a, BondDims::uniform(a, NetworkKind::Peps, 1), 1);
  const auto y = raw_random(b, BondDims::uniform(b, NetworkKind::Peps, 1), 1);
  const auto w = raw_random(a, BondDims::uniform(a, NetworkKind::Pepo, 1), 1);
  EXPECT_THROW(direct_sum(x, y), StructuralError);
  EXPECT_THROW(direct_sum(x, w), StructuralError);
}

TEST(TensorNetworkState, RejectsBondMismatch) {
  const LatticeShape shape(1, 2, 2);
  const auto bonds = BondDims::uniform(shape, NetworkKind::Peps, 2);
  std::vector<SiteTensor> sites{SiteTensor(0, 0, NetworkKind::Peps, 2, {1, 1, 2, 1}),
                                SiteTensor(0, 1, NetworkKind::Peps, 2, {3, 1, 1, 1})};
  EXPECT_THROW(TensorNetworkState(shape, bonds, sites), StructuralError);
  EXPECT_THROW(SiteTensor(0, 0, NetworkKind::Peps, 2, {1, 1, 2, 1}, std::vector<cplx>(3)),
               StructuralError);
}

TEST(RandomState, DeterministicAndNormalized) {
  const LatticeShape shape(2, 2, 2);
  const auto bonds = BondDims::uniform(shape, NetworkKind::Peps, 2);
  const auto a = random_state(shape, bonds, std::nullopt, 42);
  const auto b = random_state(shape, bonds, std::nullopt, 42);
  for (std::size_t s = 0; s < a.sites().size(); ++s) EXPECT_EQ(a.sites()[s].data(), b.sites()[s].data());
  EXPECT_NEAR(contract(a).values.norm(), 1.0, 1e-12);

  const auto pepo = random_state(shape, BondDims::uniform(shape, NetworkKind::Pepo, 2), std::nullopt, 42);
  const auto h = hermitize_trace_one(pepo);
  EXPECT_TRUE(is_hermitian(h.state.values));
  EXPECT_NEAR(h.state.values.trace().real(), 1.0, 1e-12);
  EXPECT_NEAR(contract(pepo).values.trace().real(), 1.0, 1e-12);
}

TEST(RandomState, NormCapsApplied) {
  const LatticeShape shape(1, 2, 2);
  const auto bonds = BondDims::uniform(shape, NetworkKind::Pepo, 3);
  const auto s = random_state(shape, bonds, NormCaps{{0.5, 0.5}}, 1);
  for (const auto& site : s.sites()) EXPECT_EQ(site.norm_cap(), 0.5);
  EXPECT_THROW(random_state(shape, bonds, NormCaps{{0.5}}, 1), RangeError);
  EXPECT_THROW(random_state(shape, bonds, NormCaps{{0.5, -1.0}}, 1), RangeError);
}

TEST(Hermitize, Examples) {
  CMatrix c(2, 2);
  c << 2.0, 0.0, 0.0, 0.0;
  const auto h = hermitize_trace_one(c);
  EXPECT_DOUBLE_EQ(h.trace, 2.0);
  EXPECT_DOUBLE_EQ(h.state.values(0, 0).real(), 1.0);
  EXPECT_DOUBLE_EQ(std::abs(h.state.values(1, 1)), 0.0);

  auto rng = make_stream(3, {});
  const CMatrix rho = random_density(4, 2, rng);
  EXPECT_LT((hermitize_trace_one(rho).state.values - rho).norm(), 1e-14);
  EXPECT_THROW(hermitize_trace_one(CMatrix::Zero(2, 2)), DegenerateTraceError);
}

TEST(Purify, PositiveSemidefinite) {
  const LatticeShape wide(1, 2, 4);
  const auto peps = random_state(wide, BondDims::uniform(wide, NetworkKind::Peps, 2), std::nullopt, 8);
  const auto pepo = purify(peps, 2, 2);
  EXPECT_EQ(pepo.bonds().entries(), (std::vector<int>{4, 0}));
  const CMatrix c = contract(pepo).values;
  EXPECT_TRUE(is_hermitian(c, 1e-12));
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(c);
  EXPECT_GT(eig.eigenvalues().minCoeff(), -1e-12);
  EXPECT_LT(rel_diff(c, oracle::naive_contract(pepo)), 1e-12);
}

TEST(Dof, Examples) {
  EXPECT_NEAR(dof(LatticeShape(1, 1, 2), BondDims::uniform(LatticeShape(1, 1, 2), NetworkKind::Peps, 1)),
              2.0 * std::log(2.0), 1e-12);
  const LatticeShape sq(2, 2, 2);
  EXPECT_NEAR(dof(sq, BondDims::uniform(sq, NetworkKind::Peps, 2)), 32.0 * std::log(5.0), 1e-12);
  EXPECT_NEAR(dof(sq, BondDims::uniform(sq, NetworkKind::Peps, 2)), 51.50, 5e-3);
  EXPECT_NEAR(dof(sq, BondDims::uniform(sq, NetworkKind::Pepo, 2)), 64.0 * std::log(5.0), 1e-12);
  EXPECT_NEAR(dof(sq, BondDims::uniform(sq, NetworkKind::Pepo, 2)), 103.0, 5e-2);
}
