#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>

namespace cuesync {

/// Ekman's six basic emotions, in table order. Ties in inverse_map resolve
/// toward the earlier category.
enum class Emotion : std::uint8_t { Anger, Disgust, Fear, Joy, Sadness, Surprise };

inline constexpr std::size_t kEmotionCount = 6;
inline constexpr std::array<Emotion, kEmotionCount> kAllEmotions{
    Emotion::Anger, Emotion::Disgust, Emotion::Fear, Emotion::Joy, Emotion::Sadness, Emotion::Surprise};

inline constexpr double kDefaultTargetMax = 0.8;

std::string_view emotion_name(Emotion e);  // lower case, e.g. "joy"
std::optional<Emotion> emotion_from_name(std::string_view name);

/// Classifier output: one probability per category.
struct EmotionDistribution {
  std::array<double, kEmotionCount> probabilities{};

  static EmotionDistribution one_hot(Emotion e);
  static EmotionDistribution uniform();
  double operator[](Emotion e) const { return probabilities[static_cast<std::size_t>(e)]; }
  /// Throws ArgumentError on negative or non-finite entries or a sum off 1 by
  /// more than 1e-6.
  void validate() const;
};

/// Gaussian valence/arousal statistics of one category.
struct VARow {
  double valence_mean = 0.0;
  double valence_sd = 0.0;
  double arousal_mean = 0.0;
  double arousal_sd = 0.0;

  friend bool operator==(const VARow&, const VARow&) = default;
};

struct VATable {
  std::array<VARow, kEmotionCount> rows{};

  /// Russell & Mehrabian's user-study values for the six categories.
  static VATable standard();

  const VARow& operator[](Emotion e) const { return rows[static_cast<std::size_t>(e)]; }
  /// Largest |mean| over both axes and all rows.
  double max_abs_mean() const;
  /// Throws ArgumentError unless every SD is positive.
  void validate() const;
};

/// A valence/arousal pair; an empty component means "unspecified" and selects
/// the model's learned substitute for that input.
struct VAPoint {
  std::optional<double> valence;
  std::optional<double> arousal;

  friend bool operator==(const VAPoint&, const VAPoint&) = default;
};

struct GaussianMixtureVA {
  EmotionDistribution weights;
  /// Component statistics after scaling.
  std::array<VARow, kEmotionCount> components{};
  double scale = 1.0;
};

/// target_max / max |mean|. Throws ArgumentError unless target_max in (0, 1].
double scaling_coefficient(const VATable& table, double target_max);

/// Multiplies every mean (and SD when scale_sd) by scaling_coefficient. The
/// entries that attain the maximum magnitude are set to exactly ±target_max,
/// so the scaled table's largest |mean| equals the target bit for bit.
VATable scale_table(const VATable& table, double target_max, bool scale_sd = true);

GaussianMixtureVA build_mixture(const EmotionDistribution& dist, const VATable& table,
                                double target_max = kDefaultTargetMax, bool scale_sd = true);

struct VAValue {
  double valence = 0.0;
  double arousal = 0.0;
};

/// Probability-weighted average of the component means, before clamping.
VAValue mixture_mean_unclamped(const GaussianMixtureVA& mix);
/// mixture_mean_unclamped clamped to [-1, 1] per axis.
VAPoint mixture_mean(const GaussianMixtureVA& mix);

/// Draws a category from the weights, then valence and arousal independently
/// from that category's Gaussians. A zero SD yields the mean exactly.
class VASampler {
 public:
  VASampler(const GaussianMixtureVA& mix, std::uint64_t seed);

  struct Draw {
    Emotion category;
    VAValue value;  // not clamped
  };
  Draw draw_unclamped();
  VAPoint draw();

 private:
  GaussianMixtureVA mix_;
  std::mt19937_64 rng_;
  std::discrete_distribution<std::size_t> category_;
};

VAPoint sample_va(const GaussianMixtureVA& mix, std::uint64_t seed);

enum class DistanceMetric { Euclidean, Mahalanobis, Likelihood };

std::optional<DistanceMetric> metric_from_name(std::string_view name);

/// Category nearest to the point (smallest Euclidean or diagonal-Mahalanobis
/// distance, or largest axis-independent Gaussian likelihood). Throws
/// ArgumentError when either component is unspecified.
Emotion inverse_map(const VAPoint& point, const VATable& table, DistanceMetric metric);

/// Reads a JSON object with the six lower-case category names as keys, e.g.
/// {"anger": 0.1, "disgust": 0.0, "fear": 0.0, "joy": 0.7, "sadness": 0.0,
/// "surprise": 0.2}. A top-level "probabilities" object is accepted as well.
EmotionDistribution parse_emotion_json(std::string_view text);

/// A component spelled "unspecified", "none" or "nan" (any case) is empty;
/// numbers must lie in [-1, 1]. Throws ArgumentError otherwise.
std::optional<double> parse_va_component(std::string_view text);

/// "<valence> <arousal>" with six decimals or the word "unspecified".
std::string format_va_point(const VAPoint& point);
VAPoint parse_va_point(std::string_view text);

}  // namespace cuesync
