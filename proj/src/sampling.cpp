#include "tnqst/sampling.hpp"

#include <cmath>
#include <string>

#include "tnqst/errors.hpp"
#include "tnqst/rng.hpp"

namespace tnqst {

ShotRecord sample_shots(std::span<const double> p_block, std::uint64_t shots, std::mt19937_64& rng,
                        std::size_t ensemble_index) {
  if (p_block.empty()) throw InvalidDistributionError("empty probability block");
  std::vector<double> p(p_block.begin(), p_block.end());
  double total = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (!std::isfinite(p[k]) || p[k] < kNegativeClamp)
      throw InvalidDistributionError("probability " + std::to_string(p[k]) + " at outcome " +
                                     std::to_string(k) + " is not a valid probability");
    if (p[k] < 0.0) p[k] = 0.0;
    total += p[k];
  }
  if (std::abs(total - 1.0) > kDistributionTolerance)
    throw InvalidDistributionError("probability block sums to " + std::to_string(total));
  for (auto& x : p) x /= total;

  ShotRecord record;
  record.ensemble_index = ensemble_index;
  record.shots = shots;
  record.frequencies.assign(p.size(), 0);
  // Sequential conditioning: f_k ~ Binomial(remaining, p_k / remaining mass).
  std::uint64_t remaining = shots;
  double mass = 1.0;
  for (std::size_t k = 0; k + 1 < p.size() && remaining > 0; ++k) {
    if (p[k] <= 0.0) continue;
    const double cond = mass > 0.0 ? std::min(1.0, p[k] / mass) : 1.0;
    std::binomial_distribution<std::uint64_t> binom(remaining, cond);
    const std::uint64_t draw = binom(rng);
    record.frequencies[k] = draw;
    remaining -= draw;
    mass -= p[k];
  }
  record.frequencies.back() += remaining;
  return record;
}

std::vector<double> empirical_probs(const ShotRecord& record) {
  if (record.shots == 0) throw RangeError("empirical probabilities undefined for M = 0");
  std::vector<double> out(record.frequencies.size());
  const double m = static_cast<double>(record.shots);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = static_cast<double>(record.frequencies[k]) / m;
  return out;
}

std::vector<double> stack_empirical(std::span<const ShotRecord> records) {
  std::vector<double> out;
  for (const auto& r : records) {
    const auto block = empirical_probs(r);
    out.insert(out.end(), block.begin(), block.end());
  }
  return out;
}

MeasurementError measurement_error(std::span<const double> p_hat, std::span<const double> p) {
  if (p_hat.size() != p.size())
    throw DimensionError("p_hat has " + std::to_string(p_hat.size()) + " entries, p has " +
                         std::to_string(p.size()));
  MeasurementError err;
  err.eta.resize(p.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    err.eta[k] = p_hat[k] - p[k];
    sum += err.eta[k] * err.eta[k];
  }
  err.norm = std::sqrt(sum);
  return err;
}

std::vector<ShotRecord> sample_blocks(std::span<const double> probs, std::size_t outcomes_per_block,
                                      std::uint64_t shots, std::uint64_t root_seed,
                                      std::uint64_t repetition) {
  if (outcomes_per_block == 0 || probs.size() % outcomes_per_block != 0)
    throw DimensionError("probability vector is not a whole number of blocks");
  const std::size_t blocks = probs.size() / outcomes_per_block;
  std::vector<ShotRecord> records(blocks);
  for (std::size_t q = 0; q < blocks; ++q) {
    auto rng = make_stream(root_seed, {q, repetition});
    records[q] = sample_shots(probs.subspan(q * outcomes_per_block, outcomes_per_block), shots, rng, q);
  }
  return records;
}

}  // namespace tnqst
