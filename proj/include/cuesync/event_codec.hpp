#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cuesync/score.hpp"
#include "cuesync/token.hpp"

namespace cuesync {

/// Nearest multiple of kResolutionMs; exact halves (residue 4) round up.
constexpr Millis quantize_ms(Millis t) {
  Millis q = t / kResolutionMs;
  Millis r = t % kResolutionMs;
  if (r < 0) {
    r += kResolutionMs;
    --q;
  }
  return (q + (2 * r >= kResolutionMs ? 1 : 0)) * kResolutionMs;
}

struct EncodeOptions {
  bool emit_bars = true;
};

/// Serializes a score into the event vocabulary:
///
///   START, FEWER_/MORE_INSTRUMENTS, then per time step
///   [TIMESHIFT...] BAR? OFF... ON...
///
/// Times are quantized to the 8 ms grid; a note whose quantized length would
/// be zero keeps one grid step. Gaps longer than 1000 ms become runs of
/// TIMESHIFT_1000 followed by the remainder. Within a step OFF precedes ON,
/// then instrument order, then ascending pitch.
std::vector<Token> encode_events(const ScoreTimeline& score, const EncodeOptions& options = {});

struct DecodeDiagnostics {
  std::size_t unmatched_offs = 0;
  /// Notes still open at the end of the sequence, closed at the final cursor.
  std::size_t closed_at_end = 0;
  /// ON/OFF pairs with no time between them.
  std::size_t zero_length_dropped = 0;
};

struct DecodedSequence {
  ScoreTimeline score;
  /// Cursor time of every CHORD token, in sequence order.
  std::vector<Millis> chord_onsets_ms;
  Millis final_cursor_ms = 0;
  DecodeDiagnostics diagnostics;
};

/// Inverse of encode_events. Accepts any token list: OFF tokens with no open
/// note are counted and ignored, and repeated ONs of one key queue up and are
/// closed first-in first-out. Decoded notes carry kDefaultVelocity.
DecodedSequence decode_events(std::span<const Token> tokens);

/// Shifts every pitched note by `semitones` in [-3, 3], clipping to 0-127.
/// Drum notes and all timing are untouched.
ScoreTimeline transpose(const ScoreTimeline& score, int semitones);

/// FEWER_INSTRUMENTS when at most two categories have notes.
Token instrument_count_tag(const ScoreTimeline& score);

/// Drops notes starting at or after `duration_ms` and cuts longer ones to end
/// there. Bar marks at or after the duration are dropped too.
ScoreTimeline trim_to_duration(const ScoreTimeline& score, Millis duration_ms);

}  // namespace cuesync
