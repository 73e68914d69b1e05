#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "tnqst/types.hpp"

namespace tnqst {

/// One step of the SplitMix64 mixer.
std::uint64_t splitmix64(std::uint64_t x);

/// Child seed of `root` for a tuple of stream tags.
///
/// Rule: h = root; for each tag t: h = splitmix64(h ^ splitmix64(t)).
/// Every RNG stream in the library (per basis, per ensemble/repetition, per
/// restart, per sweep cell) is derived this way, so results depend only on
/// the root seed and not on thread scheduling.
std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> tags);

inline std::mt19937_64 make_stream(std::uint64_t root, std::initializer_list<std::uint64_t> tags) {
  return std::mt19937_64(derive_seed(root, tags));
}

/// Standard complex Gaussian: real and imaginary parts N(0, 1/2).
cplx complex_normal(std::mt19937_64& rng);

/// Random Hermitian matrix (GUE-like), entries of unit scale.
CMatrix random_hermitian(std::size_t dim, std::mt19937_64& rng);

/// Random density matrix W W^dagger / tr with W a dim x rank Ginibre matrix.
CMatrix random_density(std::size_t dim, std::size_t rank, std::mt19937_64& rng);

/// Uniformly random unit vector.
CVector random_unit_vector(std::size_t dim, std::mt19937_64& rng);

}  // namespace tnqst
