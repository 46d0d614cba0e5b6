#pragma once

#include <cstdint>
#include <iosfwd>
#include <set>
#include <span>
#include <vector>

#include "cuesync/score.hpp"
#include "cuesync/token.hpp"

namespace cuesync {

inline constexpr Millis kDefaultSimultaneityMs = 8;
inline constexpr int kDefaultBoostGain = 20;
inline constexpr double kDefaultChordDropout = 0.2;
inline constexpr int kMinChordNotes = 3;
inline constexpr int kMinChordBeats = 2;

/// A sustained guitar or piano chord usable as a musical boundary.
struct ChordSpan {
  Instrument instrument = Instrument::Piano;
  Millis onset_ms = 0;
  std::set<int> note_pitches;
  /// Shortest member duration.
  Millis duration_ms = 0;

  friend bool operator==(const ChordSpan&, const ChordSpan&) = default;
};

/// Whole milliseconds per beat at the score tempo, rounded.
Millis beat_ms_for(const ScoreTimeline& score);

/// Finds groups of at least three distinct guitar or piano pitches whose
/// onsets fall within `simultaneity_eps_ms` of the group's first onset and
/// which each last at least two beats. Notes shorter than two beats never join
/// a group. Spans are ordered by (onset, instrument).
std::vector<ChordSpan> detect_chords(const ScoreTimeline& score, Millis beat_ms,
                                     Millis simultaneity_eps_ms = kDefaultSimultaneityMs);

/// Places a CHORD token immediately before the first ON of each span in a
/// stream produced by encode_events from the same score. Throws
/// LabelingError when a span's first note cannot be found.
std::vector<Token> insert_chord_tokens(std::span<const Token> tokens, std::span<const ChordSpan> spans);

/// Removes each CHORD independently with probability `rate`.
std::vector<Token> dropout_chords(std::span<const Token> tokens, double rate, std::uint64_t seed);

/// Raises by `gain` (saturating at 127) the velocity of every note whose onset
/// lies within `simultaneity_eps_ms` of a chord onset.
ScoreTimeline boost_chord_velocity(const ScoreTimeline& score, std::span<const Millis> chord_onsets_ms,
                                   int gain = kDefaultBoostGain,
                                   Millis simultaneity_eps_ms = kDefaultSimultaneityMs);

/// One line per span: "<onset_ms>\t<INSTRUMENT>\t<p1,p2,...>\t<duration_ms>".
void write_chord_report(std::ostream& out, std::span<const ChordSpan> spans);

}  // namespace cuesync
