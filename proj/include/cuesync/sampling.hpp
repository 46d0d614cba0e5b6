#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace cuesync {

struct SamplingParams {
  double temperature = 1.0;
  /// 0 keeps every candidate.
  std::size_t top_k = 32;
  std::uint64_t seed = 0;

  /// Loss multiplier for CHORD targets in training configurations. Recorded
  /// for completeness; nothing in this library trains.
  static constexpr double kChordTokenLossWeight = 10.0;

  void validate() const;
};

/// Throws GenerationError unless `probs` has `expected_size` finite,
/// non-negative entries summing to 1 within 1e-6.
void validate_distribution(std::span<const double> probs, std::size_t expected_size);

/// Seeded temperature / top-k sampler over a probability vector.
class TokenSampler {
 public:
  explicit TokenSampler(const SamplingParams& params);

  /// Re-weights p -> p^(1/T), keeps the top_k largest entries (ties go to the
  /// lower index), and draws one index. Returns kNone when every entry is
  /// zero.
  std::size_t sample(std::span<const double> probs);

  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

 private:
  SamplingParams params_;
  std::mt19937_64 rng_;
};

}  // namespace cuesync
