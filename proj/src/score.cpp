#include "cuesync/score.hpp"

#include <algorithm>
#include <string>
#include <tuple>

#include "cuesync/error.hpp"

namespace cuesync {

bool note_order(const NoteEvent& a, const NoteEvent& b) {
  return std::tuple(a.onset_ms, a.instrument, a.pitch, a.offset_ms, a.velocity) <
         std::tuple(b.onset_ms, b.instrument, b.pitch, b.offset_ms, b.velocity);
}

Millis ScoreTimeline::end_ms() const {
  Millis end = 0;
  for (const auto& n : notes) end = std::max(end, n.offset_ms);
  if (!bar_marks_ms.empty()) end = std::max(end, bar_marks_ms.back());
  return end;
}

void sort_notes(ScoreTimeline& score) { std::sort(score.notes.begin(), score.notes.end(), note_order); }

void validate(const ScoreTimeline& score) {
  if (!(score.tempo_bpm > 0.0)) throw ArgumentError("tempo must be positive");
  for (std::size_t i = 0; i < score.notes.size(); ++i) {
    const auto& n = score.notes[i];
    std::string where = "note " + std::to_string(i) + ": ";
    if (n.pitch < 0 || n.pitch > 127) throw ArgumentError(where + "pitch out of range");
    if (n.velocity < 1 || n.velocity > 127) throw ArgumentError(where + "velocity out of range");
    if (n.onset_ms < 0) throw ArgumentError(where + "negative onset");
    if (n.offset_ms <= n.onset_ms) throw ArgumentError(where + "offset must follow onset");
    if (i > 0 && note_order(n, score.notes[i - 1])) throw ArgumentError(where + "notes not sorted");
  }
  for (std::size_t i = 0; i < score.bar_marks_ms.size(); ++i) {
    if (score.bar_marks_ms[i] < 0) throw ArgumentError("negative bar mark");
    if (i > 0 && score.bar_marks_ms[i] <= score.bar_marks_ms[i - 1]) {
      throw ArgumentError("bar marks must be strictly increasing");
    }
  }
}

}  // namespace cuesync
