#pragma once

#include <array>
#include <string>
#include <vector>

#include "cuesync/generator.hpp"

namespace cuesync {

struct ReferenceModelConfig {
  /// Pitch class of the tonic, 0 = C.
  int key_root = 0;
  /// Pulse = round8(base - swing * arousal); unspecified arousal counts as 0.
  Millis base_pulse_ms = 480;
  Millis pulse_swing_ms = 240;
  /// CHORD probability when the offset is below one grid step, when it is
  /// below one pulse, and the linear ramp used farther out.
  double chord_landed = 0.95;
  double chord_near = 0.3;
  double chord_floor = 0.01;
  double chord_ramp = 0.04;
  /// Share of the non-chord mass spent on rests.
  double rest_share = 0.2;
  /// Probability of aiming a time shift exactly at a boundary within one pulse.
  double landing = 0.9;
  /// Drums play when arousal is at least this.
  double drum_arousal = 0.25;
};

/// Deterministic stand-in for a trained model.
///
/// The history is replayed to find the cursor, the open notes and what the
/// current time step (tokens since the last TIMESHIFT) already holds. Then,
/// in order of precedence:
///
///  1. After a CHORD, the three triad tones follow as PIANO ONs. Triads walk
///     the degrees I, IV, V, vi of the key, rooted in octave 48.
///  2. Any open note held long enough is closed (chord tones 4 pulses, bass 2,
///     guitar 1, drums half a pulse).
///  3. A step without ONs draws once from: CHORD with chord_probability(),
///     a GUITAR melody ON over the scale in 60-83 weighted exp(-|p - last|/4),
///     or a rest (time shift).
///  4. A step with ONs adds a BASS root every two pulses and, at high arousal,
///     a kick (with bass) or hi-hat, then shifts time.
///
/// Time shifts are one pulse (0.75) or half a pulse (0.25); when the boundary
/// offset is positive and within one pulse, a shift of round8(offset) takes
/// `landing` of the mass. The scale is major for valence > 0, natural minor
/// otherwise. Every returned distribution respects grammar_mask.
class ReferenceModel final : public NextTokenModel {
 public:
  explicit ReferenceModel(ReferenceModelConfig config = {});

  std::vector<double> next_distribution(const GenerationContext& context) const override;
  std::string name() const override { return "reference"; }

  const ReferenceModelConfig& config() const { return config_; }
  Millis pulse_ms(const VAPoint& va) const;
  /// Non-increasing in offset_ms.
  double chord_probability(Millis offset_ms, Millis pulse_ms, Millis max_offset_ms) const;
  /// Pitch classes of the scale chosen for `va`, ascending from the tonic.
  std::array<int, 7> scale(const VAPoint& va) const;

 private:
  ReferenceModelConfig config_;
};

/// Boundary-seeking test model, a point mass at every step: shift toward the
/// next boundary by min(floor8(offset), 1000) ms, and once the offset is below
/// one grid step emit CHORD followed by PIANO ONs 60, 64, 67. Notes are closed
/// 500 ms after onset; with no boundary ahead it shifts 1000 ms.
class ScriptedChordModel final : public NextTokenModel {
 public:
  std::vector<double> next_distribution(const GenerationContext& context) const override;
  std::string name() const override { return "scripted"; }

  static constexpr std::array<int, 3> kTriad{60, 64, 67};
  static constexpr Millis kHoldMs = 500;
};

}  // namespace cuesync
