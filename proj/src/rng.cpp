#include "tnqst/rng.hpp"

#include <cmath>

namespace tnqst {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = root;
  for (std::uint64_t t : tags) h = splitmix64(h ^ splitmix64(t));
  return h;
}

cplx complex_normal(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  const double re = normal(rng);
  const double im = normal(rng);
  return {re, im};
}

CMatrix random_hermitian(std::size_t dim, std::mt19937_64& rng) {
  const auto n = static_cast<Eigen::Index>(dim);
  CMatrix g(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) g(i, j) = complex_normal(rng);
  return 0.5 * (g + g.adjoint());
}

CMatrix random_density(std::size_t dim, std::size_t rank, std::mt19937_64& rng) {
  const auto n = static_cast<Eigen::Index>(dim);
  CMatrix w(n, static_cast<Eigen::Index>(rank));
  for (Eigen::Index j = 0; j < w.cols(); ++j)
    for (Eigen::Index i = 0; i < n; ++i) w(i, j) = complex_normal(rng);
  CMatrix rho = w * w.adjoint();
  return rho / rho.trace().real();
}

CVector random_unit_vector(std::size_t dim, std::mt19937_64& rng) {
  CVector v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = complex_normal(rng);
  return v / v.norm();
}

}  // namespace tnqst
