#include "tnqst/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tnqst/errors.hpp"
#include "tnqst/rng.hpp"
#include "tnqst/sampling.hpp"

namespace tnqst {

void IdentityReport::finish() {
  pass = expect_violation ? deviation > tolerance : deviation <= tolerance;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

namespace {

std::size_t ipow(std::size_t base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

void check_moment_scale(std::size_t dim, int s) {
  if (s < 1 || s > 3) throw ScaleError("moment checks support 1 <= s <= 3");
  if (ipow(dim, s) > 4096) throw ScaleError("moment checks need D^s <= 4096");
}

// Digits of a tensor-power index, first factor most significant.
std::vector<std::size_t> digits(std::size_t index, std::size_t dim, int s) {
  std::vector<std::size_t> out(s);
  for (int f = s - 1; f >= 0; --f) {
    out[f] = index % dim;
    index /= dim;
  }
  return out;
}

std::size_t undigits(const std::vector<std::size_t>& d, std::size_t dim) {
  std::size_t index = 0;
  for (std::size_t x : d) index = index * dim + x;
  return index;
}

// w^{(x)s}
CVector tensor_power(const CVector& w, int s) {
  CVector out = CVector::Ones(1);
  for (int f = 0; f < s; ++f) {
    CVector next(out.size() * w.size());
    for (Eigen::Index a = 0; a < out.size(); ++a)
      for (Eigen::Index b = 0; b < w.size(); ++b) next(a * w.size() + b) = out(a) * w(b);
    out = std::move(next);
  }
  return out;
}

// Sorted index tuples i_1 <= ... <= i_s.
void multisets(std::size_t dim, int s, std::size_t start, std::vector<std::size_t>& cur,
               std::vector<std::vector<std::size_t>>& out) {
  if (static_cast<int>(cur.size()) == s) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = start; i < dim; ++i) {
    cur.push_back(i);
    multisets(dim, s, i, cur, out);
    cur.pop_back();
  }
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

}  // namespace

CMatrix symmetric_projector(std::size_t dim, int s) {
  const std::size_t n = ipow(dim, s);
  CMatrix p = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<int> perm(s);
  const double scale = 1.0 / factorial(s);
  for (std::size_t idx = 0; idx < n; ++idx) {
    const auto d = digits(idx, dim, s);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      std::vector<std::size_t> permuted(s);
      for (int f = 0; f < s; ++f) permuted[f] = d[perm[f]];
      p(static_cast<Eigen::Index>(undigits(permuted, dim)), static_cast<Eigen::Index>(idx)) += scale;
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return p;
}

CMatrix moment_operator(const DesignEnsemble& design, int s) {
  const auto n = static_cast<Eigen::Index>(ipow(design.dim(), s));
  CMatrix m = CMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < design.vectors.cols(); ++k) {
    const CVector t = tensor_power(design.vectors.col(k), s);
    m.noalias() += t * t.adjoint();
  }
  return m / static_cast<double>(design.size());
}

double dense_moment_deviation(const DesignEnsemble& design, int s) {
  check_moment_scale(design.dim(), s);
  const double c = binomial(static_cast<int>(design.dim()) + s - 1, s);
  return (moment_operator(design, s) - symmetric_projector(design.dim(), s) / c).norm();
}

// In the orthonormal basis |m> of Sym^s indexed by multisets m, w^{(x)s} has
// coordinates sqrt(N_m) prod_j w_{m_j} with N_m = s! / prod(multiplicities!),
// and P_sym is the identity.
double symmetric_moment_deviation(const DesignEnsemble& design, int s) {
  check_moment_scale(design.dim(), s);
  std::vector<std::vector<std::size_t>> sets;
  std::vector<std::size_t> cur;
  multisets(design.dim(), s, 0, cur, sets);
  const auto c = static_cast<Eigen::Index>(sets.size());
  std::vector<double> sqrt_count(sets.size());
  for (std::size_t m = 0; m < sets.size(); ++m) {
    double denom = 1.0;
    std::size_t run = 1;
    for (std::size_t j = 1; j <= sets[m].size(); ++j) {
      if (j < sets[m].size() && sets[m][j] == sets[m][j - 1]) {
        ++run;
      } else {
        denom *= factorial(static_cast<int>(run));
        run = 1;
      }
    }
    sqrt_count[m] = std::sqrt(factorial(s) / denom);
  }

  CMatrix acc = CMatrix::Zero(c, c);
  constexpr Eigen::Index kChunk = 1024;
  const Eigen::Index k = design.vectors.cols();
  for (Eigen::Index start = 0; start < k; start += kChunk) {
    const Eigen::Index len = std::min(kChunk, k - start);
    CMatrix coords(c, len);
#pragma omp parallel for schedule(static)
    for (Eigen::Index col = 0; col < len; ++col) {
      const auto w = design.vectors.col(start + col);
      for (Eigen::Index m = 0; m < c; ++m) {
        cplx prod = sqrt_count[m];
        for (std::size_t idx : sets[m]) prod *= w(static_cast<Eigen::Index>(idx));
        coords(m, col) = prod;
      }
    }
    acc.selfadjointView<Eigen::Lower>().rankUpdate(coords);
  }
  CMatrix full = acc.selfadjointView<Eigen::Lower>();
  full /= static_cast<double>(k);
  full.diagonal().array() -= 1.0 / static_cast<double>(c);
  return full.norm();
}

IdentityReport check_design_moments(const DesignEnsemble& design, int s, double tolerance) {
  IdentityReport r;
  r.name = "design_moment_s" + std::to_string(s);
  r.tolerance = tolerance;
  r.deviation = symmetric_moment_deviation(design, s);
  r.metadata["dim"] = std::to_string(design.dim());
  r.metadata["K"] = std::to_string(design.size());
  r.metadata["s"] = std::to_string(s);
  r.metadata["declared_t"] = std::to_string(design.declared_t);
  r.finish();
  return r;
}

double embedding_identity_rhs(const CMatrix& rho, std::size_t dim, std::size_t k) {
  const double d = static_cast<double>(dim);
  const double tr = rho.trace().real();
  return d * (rho.squaredNorm() + tr * tr) / (static_cast<double>(k) * (d + 1.0));
}

IdentityReport check_embedding_identity(const DesignEnsemble& design, int trials,
                                        std::uint64_t seed, double tolerance) {
  const MeasurementMap map = MeasurementMap::from_design(design);
  IdentityReport r;
  r.name = "embedding_identity";
  r.tolerance = tolerance;
  for (int t = 0; t < trials; ++t) {
    auto rng = make_stream(seed, {static_cast<std::uint64_t>(t)});
    const CMatrix rho = random_hermitian(design.dim(), rng);
    const auto p = apply_map(map, rho);
    const double lhs = std::inner_product(p.begin(), p.end(), p.begin(), 0.0);
    r.deviation = std::max(r.deviation, std::abs(lhs - embedding_identity_rhs(rho, design.dim(), design.size())));
  }
  r.metadata["dim"] = std::to_string(design.dim());
  r.metadata["K"] = std::to_string(design.size());
  r.metadata["trials"] = std::to_string(trials);
  r.metadata["seed"] = std::to_string(seed);
  r.finish();
  return r;
}

double third_moment_lhs(const DesignEnsemble& design, const CMatrix& x, const CMatrix& rho) {
  const MeasurementMap map = MeasurementMap::from_design(design);
  const auto px = apply_map(map, x);
  const auto pr = apply_map(map, rho);
  double sum = 0.0;
  for (std::size_t k = 0; k < px.size(); ++k) sum += px[k] * px[k] * pr[k];
  return sum;
}

namespace {

double third_moment_prefactor(std::size_t dim, std::size_t k) {
  const double d = static_cast<double>(dim);
  const double kk = static_cast<double>(k);
  return d * d * d / (kk * kk) * 6.0 / ((d + 2.0) * (d + 1.0) * d);
}

}  // namespace

double third_moment_rhs(const CMatrix& x, const CMatrix& rho, std::size_t k) {
  const double tr_x = x.trace().real();
  const double tr_rho = rho.trace().real();
  const CMatrix x2 = x * x;
  const double bracket = tr_x * tr_x * tr_rho + x2.trace().real() * tr_rho +
                         2.0 * (x * rho).trace().real() * tr_x + 2.0 * (x2 * rho).trace().real();
  return third_moment_prefactor(static_cast<std::size_t>(x.rows()), k) * bracket / 6.0;
}

double third_moment_rhs_traceless(const CMatrix& x, const CMatrix& rho, std::size_t k) {
  const double bracket = x.squaredNorm() / 6.0 + (x * x * rho).trace().real() / 3.0;
  return third_moment_prefactor(static_cast<std::size_t>(x.rows()), k) * bracket;
}

IdentityReport check_third_moment_identity(const DesignEnsemble& design, int trials,
                                           std::uint64_t seed, double tolerance) {
  IdentityReport r;
  r.name = "third_moment_identity";
  r.tolerance = tolerance;
  const auto n = static_cast<Eigen::Index>(design.dim());
  for (int t = 0; t < trials; ++t) {
    auto rng = make_stream(seed, {static_cast<std::uint64_t>(t)});
    const CMatrix x = random_hermitian(design.dim(), rng);
    const CMatrix rho = random_density(design.dim(), design.dim(), rng);
    const double general = std::abs(third_moment_lhs(design, x, rho) - third_moment_rhs(x, rho, design.size()));
    const CMatrix x0 = x - (x.trace() / static_cast<double>(n)) * CMatrix::Identity(n, n);
    const double traceless =
        std::abs(third_moment_lhs(design, x0, rho) - third_moment_rhs_traceless(x0, rho, design.size()));
    r.deviation = std::max({r.deviation, general, traceless});
  }
  r.metadata["dim"] = std::to_string(design.dim());
  r.metadata["K"] = std::to_string(design.size());
  r.metadata["trials"] = std::to_string(trials);
  r.metadata["seed"] = std::to_string(seed);
  r.finish();
  return r;
}

double normalized_embedding_ratio(const MeasurementMap& map, const CMatrix& rho) {
  const auto p = apply_map(map, rho);
  const double a2 = std::inner_product(p.begin(), p.end(), p.begin(), 0.0);
  return static_cast<double>(map.dim()) * a2 /
         (static_cast<double>(map.num_blocks()) * rho.squaredNorm());
}

EmbeddingStats estimate_haar_embedding(const LatticeShape& shape, const BondDims& bonds, int bases,
                                       int trials, std::uint64_t seed) {
  if (bases < 1 || trials < 1) throw RangeError("need at least one basis and one trial");
  std::vector<double> ratios(static_cast<std::size_t>(trials));
#pragma omp parallel for schedule(dynamic, 1)
  for (int t = 0; t < trials; ++t) {
    auto rng = make_stream(seed, {static_cast<std::uint64_t>(t)});
    const TensorNetworkState state = random_state(shape, bonds, std::nullopt, rng());
    CMatrix rho;
    if (state.kind() == NetworkKind::Peps) {
      const CVector u = contract(state).values.col(0);
      rho = u * u.adjoint();
    } else {
      rho = hermitize_trace_one(state).state.values;
    }
    std::vector<ProjectiveBasis> qs;
    for (int q = 0; q < bases; ++q) qs.push_back(haar_basis(shape.hilbert_dim(), rng));
    ratios[t] = normalized_embedding_ratio(MeasurementMap::from_bases(qs), rho);
  }
  EmbeddingStats stats;
  stats.trials = trials;
  stats.bases = bases;
  stats.min = *std::min_element(ratios.begin(), ratios.end());
  stats.mean = std::accumulate(ratios.begin(), ratios.end(), 0.0) / trials;
  stats.threshold = kHaarEmbeddingThreshold;
  stats.pass = stats.min >= stats.threshold;
  return stats;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DimensionError("slope fit needs >= 2 points");
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

ScalingFit check_povm_error_bound_scaling(const MeasurementMap& map, const DenseState& state,
                                          std::span<const std::uint64_t> shots_grid, int reps,
                                          std::uint64_t seed) {
  if (reps < 1) throw RangeError("need at least one repetition");
  const auto p = apply_map(map, state);
  const std::size_t per_block = map.total_outcomes() / map.num_blocks();
  ScalingFit fit;
  std::vector<double> xs;
  for (std::uint64_t m : shots_grid) {
    double sum = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
      const auto records = sample_blocks(p, per_block, m, derive_seed(seed, {m}), static_cast<std::uint64_t>(rep));
      sum += measurement_error(stack_empirical(records), p).norm;
    }
    fit.shots.push_back(m);
    fit.mean_error.push_back(sum / reps);
    xs.push_back(static_cast<double>(m));
  }
  fit.slope = loglog_slope(xs, fit.mean_error);
  return fit;
}

}  // namespace tnqst
