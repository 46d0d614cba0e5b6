#include "cuesync/emotion.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "cuesync/error.hpp"

namespace cuesync {

namespace {

constexpr std::array<std::string_view, kEmotionCount> kNames{"anger", "disgust", "fear", "joy", "sadness",
                                                             "surprise"};

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

double scaled(double v, double coefficient, double max_abs, double target) {
  if (std::abs(v) == max_abs) return std::copysign(target, v);
  return v * coefficient;
}

}  // namespace

std::string_view emotion_name(Emotion e) { return kNames[static_cast<std::size_t>(e)]; }

std::optional<Emotion> emotion_from_name(std::string_view name) {
  auto l = lower(name);
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == l) return kAllEmotions[i];
  }
  return std::nullopt;
}

EmotionDistribution EmotionDistribution::one_hot(Emotion e) {
  EmotionDistribution d;
  d.probabilities[static_cast<std::size_t>(e)] = 1.0;
  return d;
}

EmotionDistribution EmotionDistribution::uniform() {
  EmotionDistribution d;
  d.probabilities.fill(1.0 / kEmotionCount);
  return d;
}

void EmotionDistribution::validate() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < kEmotionCount; ++i) {
    double p = probabilities[i];
    if (!std::isfinite(p) || p < 0.0) {
      throw ArgumentError("probability of " + std::string(kNames[i]) + " must be a non-negative number");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    std::ostringstream msg;
    msg << "emotion probabilities sum to " << sum << ", expected 1";
    throw ArgumentError(msg.str());
  }
}

VATable VATable::standard() {
  VATable t;
  t.rows = {{
      {-0.51, 0.20, 0.59, 0.29},   // anger
      {-0.60, 0.20, 0.35, 0.41},   // disgust
      {-0.64, 0.20, 0.60, 0.32},   // fear
      {0.76, 0.22, 0.48, 0.26},    // joy
      {-0.63, 0.23, -0.27, 0.34},  // sadness
      {0.40, 0.30, 0.67, 0.27},    // surprise
  }};
  return t;
}

double VATable::max_abs_mean() const {
  double m = 0.0;
  for (const auto& r : rows) m = std::max({m, std::abs(r.valence_mean), std::abs(r.arousal_mean)});
  return m;
}

void VATable::validate() const {
  for (std::size_t i = 0; i < kEmotionCount; ++i) {
    if (!(rows[i].valence_sd > 0.0) || !(rows[i].arousal_sd > 0.0)) {
      throw ArgumentError("standard deviations of " + std::string(kNames[i]) + " must be positive");
    }
  }
}

double scaling_coefficient(const VATable& table, double target_max) {
  if (!(target_max > 0.0 && target_max <= 1.0)) throw ArgumentError("target maximum must lie in (0, 1]");
  double m = table.max_abs_mean();
  if (!(m > 0.0)) throw ArgumentError("table means are all zero");
  return target_max / m;
}

VATable scale_table(const VATable& table, double target_max, bool scale_sd) {
  const double c = scaling_coefficient(table, target_max);
  const double m = table.max_abs_mean();
  VATable out = table;
  for (auto& r : out.rows) {
    r.valence_mean = scaled(r.valence_mean, c, m, target_max);
    r.arousal_mean = scaled(r.arousal_mean, c, m, target_max);
    if (scale_sd) {
      r.valence_sd *= c;
      r.arousal_sd *= c;
    }
  }
  return out;
}

GaussianMixtureVA build_mixture(const EmotionDistribution& dist, const VATable& table, double target_max,
                                bool scale_sd) {
  dist.validate();
  GaussianMixtureVA mix;
  mix.weights = dist;
  mix.scale = scaling_coefficient(table, target_max);
  mix.components = scale_table(table, target_max, scale_sd).rows;
  return mix;
}

VAValue mixture_mean_unclamped(const GaussianMixtureVA& mix) {
  VAValue v;
  for (std::size_t i = 0; i < kEmotionCount; ++i) {
    const double w = mix.weights.probabilities[i];
    if (w == 0.0) continue;
    v.valence += w * mix.components[i].valence_mean;
    v.arousal += w * mix.components[i].arousal_mean;
  }
  return v;
}

VAPoint mixture_mean(const GaussianMixtureVA& mix) {
  auto v = mixture_mean_unclamped(mix);
  return {std::clamp(v.valence, -1.0, 1.0), std::clamp(v.arousal, -1.0, 1.0)};
}

VASampler::VASampler(const GaussianMixtureVA& mix, std::uint64_t seed)
    : mix_(mix), rng_(seed), category_(mix.weights.probabilities.begin(), mix.weights.probabilities.end()) {}

VASampler::Draw VASampler::draw_unclamped() {
  const std::size_t k = category_(rng_);
  const VARow& row = mix_.components[k];
  auto gaussian = [this](double mean, double sd) {
    if (sd <= 0.0) return mean;
    return std::normal_distribution<double>(mean, sd)(rng_);
  };
  Draw d{kAllEmotions[k], {}};
  d.value.valence = gaussian(row.valence_mean, row.valence_sd);
  d.value.arousal = gaussian(row.arousal_mean, row.arousal_sd);
  return d;
}

VAPoint VASampler::draw() {
  auto d = draw_unclamped();
  return {std::clamp(d.value.valence, -1.0, 1.0), std::clamp(d.value.arousal, -1.0, 1.0)};
}

VAPoint sample_va(const GaussianMixtureVA& mix, std::uint64_t seed) { return VASampler(mix, seed).draw(); }

std::optional<DistanceMetric> metric_from_name(std::string_view name) {
  auto l = lower(name);
  if (l == "euclidean") return DistanceMetric::Euclidean;
  if (l == "mahalanobis") return DistanceMetric::Mahalanobis;
  if (l == "likelihood") return DistanceMetric::Likelihood;
  return std::nullopt;
}

Emotion inverse_map(const VAPoint& point, const VATable& table, DistanceMetric metric) {
  if (!point.valence || !point.arousal) throw ArgumentError("inverse mapping needs both valence and arousal");
  if (metric != DistanceMetric::Euclidean) table.validate();
  const double v = *point.valence;
  const double a = *point.arousal;

  // Every metric is expressed as a cost to minimise.
  auto cost = [&](const VARow& r) {
    const double dv = v - r.valence_mean;
    const double da = a - r.arousal_mean;
    switch (metric) {
      case DistanceMetric::Euclidean:
        return dv * dv + da * da;
      case DistanceMetric::Mahalanobis:
        return (dv * dv) / (r.valence_sd * r.valence_sd) + (da * da) / (r.arousal_sd * r.arousal_sd);
      case DistanceMetric::Likelihood:
        // Negative log density of two independent normals.
        return 0.5 * ((dv * dv) / (r.valence_sd * r.valence_sd) + (da * da) / (r.arousal_sd * r.arousal_sd)) +
               std::log(r.valence_sd) + std::log(r.arousal_sd) + std::log(2.0 * std::numbers::pi);
    }
    return 0.0;
  };
  std::size_t best = 0;
  double best_cost = cost(table.rows[0]);
  for (std::size_t i = 1; i < kEmotionCount; ++i) {
    double c = cost(table.rows[i]);
    if (c < best_cost) {
      best = i;
      best_cost = c;
    }
  }
  return kAllEmotions[best];
}

EmotionDistribution parse_emotion_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("emotion file is not valid JSON: ") + e.what());
  }
  if (doc.is_object() && doc.contains("probabilities")) doc = doc["probabilities"];
  if (!doc.is_object()) throw ParseError("emotion file must hold a JSON object");

  EmotionDistribution dist;
  std::array<bool, kEmotionCount> seen{};
  for (const auto& [key, value] : doc.items()) {
    auto e = emotion_from_name(key);
    if (!e) throw ParseError("unknown emotion category '" + key + "'");
    if (!value.is_number()) throw ParseError("probability of '" + key + "' is not a number");
    dist.probabilities[static_cast<std::size_t>(*e)] = value.get<double>();
    seen[static_cast<std::size_t>(*e)] = true;
  }
  for (std::size_t i = 0; i < kEmotionCount; ++i) {
    if (!seen[i]) throw ParseError("emotion file lacks '" + std::string(kNames[i]) + "'");
  }
  dist.validate();
  return dist;
}

std::optional<double> parse_va_component(std::string_view text) {
  auto l = lower(text);
  if (l == "unspecified" || l == "none" || l == "nan") return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ArgumentError("not a valence/arousal value: '" + std::string(text) + "'");
  }
  if (v < -1.0 || v > 1.0) throw ArgumentError("valence/arousal must lie in [-1, 1]");
  return v;
}

std::string format_va_point(const VAPoint& point) {
  auto one = [](const std::optional<double>& c) {
    if (!c) return std::string("unspecified");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", *c);
    return std::string(buf);
  };
  return one(point.valence) + " " + one(point.arousal);
}

VAPoint parse_va_point(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string v, a, extra;
  if (!(in >> v >> a) || (in >> extra)) throw ArgumentError("expected '<valence> <arousal>'");
  return {parse_va_component(v), parse_va_component(a)};
}

}  // namespace cuesync
