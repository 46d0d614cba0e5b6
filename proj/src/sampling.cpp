#include "cuesync/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "cuesync/error.hpp"

namespace cuesync {

void SamplingParams::validate() const {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) throw ArgumentError("temperature must be positive");
}

void validate_distribution(std::span<const double> probs, std::size_t expected_size) {
  if (probs.size() != expected_size) {
    throw GenerationError("model returned " + std::to_string(probs.size()) + " probabilities, expected " +
                          std::to_string(expected_size));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!std::isfinite(probs[i]) || probs[i] < 0.0) {
      throw GenerationError("model returned an invalid probability at id " + std::to_string(i));
    }
    sum += probs[i];
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw GenerationError("model distribution sums to " + std::to_string(sum));
  }
}

TokenSampler::TokenSampler(const SamplingParams& params) : params_(params), rng_(params.seed) {
  params_.validate();
}

std::size_t TokenSampler::sample(std::span<const double> probs) {
  std::vector<double> w(probs.begin(), probs.end());
  if (params_.temperature != 1.0) {
    const double inv = 1.0 / params_.temperature;
    for (auto& x : w) x = x > 0.0 ? std::pow(x, inv) : 0.0;
  }
  if (params_.top_k > 0 && params_.top_k < w.size()) {
    std::vector<std::size_t> order(w.size());
    std::iota(order.begin(), order.end(), 0);
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(params_.top_k - 1), order.end(),
                     [&](std::size_t a, std::size_t b) { return w[a] > w[b] || (w[a] == w[b] && a < b); });
    const std::size_t kth = order[params_.top_k - 1];
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] < w[kth] || (w[i] == w[kth] && i > kth)) w[i] = 0.0;
    }
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(total > 0.0)) return kNone;

  double u = std::uniform_real_distribution<double>(0.0, total)(rng_);
  std::size_t last_positive = kNone;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] <= 0.0) continue;
    last_positive = i;
    if (u < w[i]) return i;
    u -= w[i];
  }
  return last_positive;
}

}  // namespace cuesync
