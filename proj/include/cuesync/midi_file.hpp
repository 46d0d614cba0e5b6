#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cuesync/score.hpp"

namespace cuesync {

/// Non-fatal findings while reading a Standard MIDI File.
struct MidiDiagnostics {
  int format = 0;
  int track_count = 0;
  int division = 0;
  bool has_tempo = false;
  bool has_time_signature = false;
  /// Note-ons never switched off; closed at the end of their track.
  std::size_t dangling_notes = 0;
  std::size_t unmatched_note_offs = 0;
  /// Notes whose on and off land on the same millisecond.
  std::size_t zero_length_dropped = 0;
  std::size_t skipped_chunks = 0;
};

/// Reads an SMF type 0 or 1 file into an absolute-time score.
///
/// Tick times are converted through the complete tempo map; the score's
/// tempo_bpm is the first tempo event (120 BPM when there is none). Notes are
/// paired first-in first-out per (track, channel, pitch), and the program in
/// effect on the channel at note-on selects the instrument category. Bar marks
/// follow the file's time signatures, or 4/4 when it has none, and cover
/// [0, last note-off).
///
/// Throws ParseError with the byte offset of the first malformed structure.
ScoreTimeline parse_midi(std::span<const std::uint8_t> bytes, MidiDiagnostics* diagnostics = nullptr);

/// Writes a type-1 file: a conductor track (tempo, 4/4) followed by one track
/// per instrument category in use. The division is chosen so that one tick is
/// exactly one millisecond, which rounds the stored tempo to a whole number of
/// milliseconds per beat.
std::vector<std::uint8_t> write_midi(const ScoreTimeline& score);

}  // namespace cuesync
