#pragma once

#include <cstdint>
#include <vector>

#include "cuesync/instrument.hpp"

namespace cuesync {

using Millis = std::int64_t;

inline constexpr double kDefaultTempoBpm = 120.0;
inline constexpr int kDefaultVelocity = 80;

struct NoteEvent {
  Instrument instrument = Instrument::Piano;
  int pitch = 60;
  Millis onset_ms = 0;
  Millis offset_ms = 0;
  int velocity = kDefaultVelocity;

  Millis duration_ms() const { return offset_ms - onset_ms; }

  friend bool operator==(const NoteEvent&, const NoteEvent&) = default;
};

/// Ordering used everywhere a score is stored: (onset, instrument, pitch),
/// with offset and velocity as final tie-breakers so sorting is total.
bool note_order(const NoteEvent& a, const NoteEvent& b);

/// Absolute-time score. Notes sorted by note_order, bar marks strictly
/// increasing, all times non-negative.
struct ScoreTimeline {
  std::vector<NoteEvent> notes;
  double tempo_bpm = kDefaultTempoBpm;
  std::vector<Millis> bar_marks_ms;

  /// Milliseconds per quarter-note beat at tempo_bpm.
  double beat_ms() const { return 60000.0 / tempo_bpm; }
  /// Latest note offset or bar mark, 0 for an empty score.
  Millis end_ms() const;

  friend bool operator==(const ScoreTimeline&, const ScoreTimeline&) = default;
};

void sort_notes(ScoreTimeline& score);

/// Throws ArgumentError describing the first violated invariant.
void validate(const ScoreTimeline& score);

}  // namespace cuesync
