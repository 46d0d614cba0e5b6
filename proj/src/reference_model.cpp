#include "cuesync/reference_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cuesync {

namespace {

constexpr std::array<int, 7> kMajor{0, 2, 4, 5, 7, 9, 11};
constexpr std::array<int, 7> kMinor{0, 2, 3, 5, 7, 8, 10};
constexpr std::array<int, 4> kProgression{0, 3, 4, 5};

struct OpenNote {
  Instrument instrument;
  int pitch;
  Millis onset;
  Millis hold;
};

struct HistorySummary {
  Millis cursor = 0;
  std::vector<OpenNote> open;
  bool chord_pending = false;
  bool step_chord = false;
  int step_chord_tones = 0;
  bool step_on = false;
  bool step_bass = false;
  bool step_drums = false;
  int chord_count = 0;
  int last_melody = -1;
  Millis last_bass_onset = std::numeric_limits<Millis>::min() / 2;
};

template <class HoldFn>
HistorySummary summarize(std::span<const Token> tokens, HoldFn hold) {
  HistorySummary s;
  for (const auto& t : tokens) {
    switch (t.kind) {
      case TokenKind::TimeShift:
        s.cursor += t.shift_ms;
        s.step_chord = s.step_on = s.step_bass = s.step_drums = false;
        s.step_chord_tones = 0;
        break;
      case TokenKind::Chord:
        s.chord_pending = true;
        s.step_chord = true;
        s.step_chord_tones = 0;
        ++s.chord_count;
        break;
      case TokenKind::On: {
        const bool chord_tone = s.step_chord && s.step_chord_tones < 3 && t.instrument == Instrument::Piano;
        if (chord_tone) ++s.step_chord_tones;
        s.chord_pending = false;
        s.step_on = true;
        s.open.push_back({t.instrument, t.pitch, s.cursor, hold(t.instrument, chord_tone)});
        if (t.instrument == Instrument::Guitar) s.last_melody = t.pitch;
        if (t.instrument == Instrument::Bass) {
          s.step_bass = true;
          s.last_bass_onset = s.cursor;
        }
        if (t.instrument == Instrument::Drums) s.step_drums = true;
        break;
      }
      case TokenKind::Off: {
        auto it = std::find_if(s.open.begin(), s.open.end(), [&](const OpenNote& n) {
          return n.instrument == t.instrument && n.pitch == t.pitch;
        });
        if (it != s.open.end()) s.open.erase(it);
        break;
      }
      default:
        break;
    }
  }
  return s;
}

const OpenNote* first_due(const HistorySummary& s) {
  for (const auto& n : s.open) {
    if (s.cursor - n.onset >= n.hold) return &n;
  }
  return nullptr;
}

std::vector<double> point_mass(const Token& t) {
  std::vector<double> d(kVocabularySize, 0.0);
  d[token_id(t)] = 1.0;
  return d;
}

Millis round8(double ms) { return static_cast<Millis>(std::llround(ms / kResolutionMs)) * kResolutionMs; }

Millis clamp_shift(Millis ms) { return std::clamp<Millis>(ms, kResolutionMs, kMaxShiftMs); }

void normalize(std::vector<double>& d) {
  const double sum = std::accumulate(d.begin(), d.end(), 0.0);
  for (auto& x : d) x /= sum;
}

}  // namespace

ReferenceModel::ReferenceModel(ReferenceModelConfig config) : config_(config) {}

Millis ReferenceModel::pulse_ms(const VAPoint& va) const {
  const double a = va.arousal.value_or(0.0);
  return clamp_shift(round8(static_cast<double>(config_.base_pulse_ms) - config_.pulse_swing_ms * a));
}

double ReferenceModel::chord_probability(Millis offset_ms, Millis pulse_ms, Millis max_offset_ms) const {
  if (offset_ms < kResolutionMs) return config_.chord_landed;
  if (offset_ms < pulse_ms) return config_.chord_near;
  const double frac = std::clamp(static_cast<double>(offset_ms) / static_cast<double>(max_offset_ms), 0.0, 1.0);
  return config_.chord_floor + config_.chord_ramp * (1.0 - frac);
}

std::array<int, 7> ReferenceModel::scale(const VAPoint& va) const {
  const auto& steps = va.valence.value_or(0.0) > 0.0 ? kMajor : kMinor;
  std::array<int, 7> pcs{};
  for (std::size_t i = 0; i < 7; ++i) pcs[i] = (config_.key_root + steps[i]) % 12;
  return pcs;
}

std::vector<double> ReferenceModel::next_distribution(const GenerationContext& ctx) const {
  if (ctx.tokens.empty()) return point_mass(Token::start());

  const Millis pulse = pulse_ms(ctx.va);
  const auto& steps = ctx.va.valence.value_or(0.0) > 0.0 ? kMajor : kMinor;
  const int root = ((config_.key_root % 12) + 12) % 12;

  auto hold = [pulse](Instrument i, bool chord_tone) -> Millis {
    if (chord_tone) return 4 * pulse;
    switch (i) {
      case Instrument::Bass:
        return 2 * pulse;
      case Instrument::Drums:
        return std::max<Millis>(kResolutionMs, pulse / 2);
      default:
        return pulse;
    }
  };
  const HistorySummary s = summarize(ctx.tokens, hold);

  // Scale degree (may exceed 6) to a pitch above `base`.
  auto degree_pitch = [&](int base, int degree) { return base + root + steps[degree % 7] + 12 * (degree / 7); };
  const int chord_degree = s.chord_count > 0 ? kProgression[static_cast<std::size_t>(s.chord_count - 1) % 4] : 0;

  if (s.step_chord && s.step_chord_tones < 3) {
    return point_mass(Token::on(Instrument::Piano, degree_pitch(48, chord_degree + 2 * s.step_chord_tones)));
  }
  if (const OpenNote* due = first_due(s)) return point_mass(Token::off(due->instrument, due->pitch));

  std::vector<double> d(kVocabularySize, 0.0);
  const Millis offset = ctx.current_offset_ms();
  auto add_shifts = [&](double mass) {
    const Millis half = clamp_shift(round8(pulse / 2.0));
    double regular = mass;
    if (offset >= kResolutionMs && offset <= pulse && offset < ctx.scheduler.max_offset_ms) {
      d[token_id(Token::time_shift(static_cast<int>(clamp_shift(round8(static_cast<double>(offset))))))] +=
          mass * config_.landing;
      regular = mass * (1.0 - config_.landing);
    }
    d[token_id(Token::time_shift(static_cast<int>(pulse)))] += regular * 0.75;
    d[token_id(Token::time_shift(static_cast<int>(half)))] += regular * 0.25;
  };

  if (!s.step_on) {
    const double p_chord =
        s.chord_pending ? 0.0 : chord_probability(offset, pulse, ctx.scheduler.max_offset_ms);
    d[token_id(Token::chord())] = p_chord;

    std::vector<std::pair<int, double>> melody;
    const int last = s.last_melody < 0 ? degree_pitch(60, 4) : s.last_melody;
    for (int p = 60; p < 84; ++p) {
      const int pc = ((p - root) % 12 + 12) % 12;
      if (std::find(steps.begin(), steps.end(), pc) == steps.end()) continue;
      const bool open = std::any_of(s.open.begin(), s.open.end(), [&](const OpenNote& n) {
        return n.instrument == Instrument::Guitar && n.pitch == p;
      });
      if (!open) melody.emplace_back(p, std::exp(-std::abs(p - last) / 4.0));
    }
    double rest = (1.0 - p_chord) * config_.rest_share;
    const double melody_mass = (1.0 - p_chord) - rest;
    if (melody.empty()) {
      rest += melody_mass;
    } else {
      double total = 0.0;
      for (const auto& [p, w] : melody) total += w;
      for (const auto& [p, w] : melody) d[token_id(Token::on(Instrument::Guitar, p))] += melody_mass * w / total;
    }
    add_shifts(rest);
  } else if (!s.step_bass && s.cursor - s.last_bass_onset >= 2 * pulse) {
    return point_mass(Token::on(Instrument::Bass, degree_pitch(36, chord_degree)));
  } else if (!s.step_drums && ctx.va.arousal.value_or(-1.0) >= config_.drum_arousal) {
    return point_mass(Token::on(Instrument::Drums, s.step_bass ? 36 : 42));
  } else {
    add_shifts(1.0);
  }
  normalize(d);
  return d;
}

std::vector<double> ScriptedChordModel::next_distribution(const GenerationContext& ctx) const {
  if (ctx.tokens.empty()) return point_mass(Token::start());
  const HistorySummary s = summarize(ctx.tokens, [](Instrument, bool) { return kHoldMs; });

  if (s.step_chord && s.step_chord_tones < 3) {
    return point_mass(Token::on(Instrument::Piano, kTriad[static_cast<std::size_t>(s.step_chord_tones)]));
  }
  if (const OpenNote* due = first_due(s)) return point_mass(Token::off(due->instrument, due->pitch));

  const Millis offset = ctx.current_offset_ms();
  if (offset < kResolutionMs && !s.step_chord && !s.chord_pending) return point_mass(Token::chord());
  return point_mass(Token::time_shift(static_cast<int>(clamp_shift(offset / kResolutionMs * kResolutionMs))));
}

}  // namespace cuesync
