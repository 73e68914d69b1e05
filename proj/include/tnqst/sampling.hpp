#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace tnqst {

/// Outcome counts of M shots of one POVM.
struct ShotRecord {
  std::size_t ensemble_index = 0;
  std::vector<std::uint64_t> frequencies;
  std::uint64_t shots = 0;
};

/// Clamp threshold for round-off negatives and renormalization tolerance.
inline constexpr double kNegativeClamp = -1e-10;
inline constexpr double kDistributionTolerance = 1e-8;

/// Draws Multinomial(M, p) by sequential binomial conditioning, O(K) per
/// record regardless of M. Entries in [-1e-10, 0) are clamped to zero; the
/// block must then sum to 1 within 1e-8 and is renormalized.
ShotRecord sample_shots(std::span<const double> p_block, std::uint64_t shots, std::mt19937_64& rng,
                        std::size_t ensemble_index = 0);

/// f_k / M. Throws RangeError for M = 0.
std::vector<double> empirical_probs(const ShotRecord& record);

/// Empirical probabilities of every block, concatenated in block order.
std::vector<double> stack_empirical(std::span<const ShotRecord> records);

struct MeasurementError {
  std::vector<double> eta;
  double norm = 0.0;
};

/// eta = p_hat - p and its 2-norm.
MeasurementError measurement_error(std::span<const double> p_hat, std::span<const double> p);

/// Samples every block of a stacked probability vector with M shots each.
/// Block q uses the stream derive_seed(root_seed, {q, repetition}).
std::vector<ShotRecord> sample_blocks(std::span<const double> probs, std::size_t outcomes_per_block,
                                      std::uint64_t shots, std::uint64_t root_seed,
                                      std::uint64_t repetition = 0);

}  // namespace tnqst
