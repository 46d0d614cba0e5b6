#include "cuesync/chords.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <string>
#include <tuple>

#include "cuesync/error.hpp"
#include "cuesync/event_codec.hpp"

namespace cuesync {

Millis beat_ms_for(const ScoreTimeline& score) {
  return std::max<Millis>(1, std::llround(score.beat_ms()));
}

std::vector<ChordSpan> detect_chords(const ScoreTimeline& score, Millis beat_ms, Millis simultaneity_eps_ms) {
  if (beat_ms <= 0) throw ArgumentError("beat_ms must be positive");
  if (simultaneity_eps_ms < 0) throw ArgumentError("simultaneity window must be non-negative");
  const Millis min_duration = kMinChordBeats * beat_ms;

  std::vector<ChordSpan> spans;
  for (Instrument inst : {Instrument::Guitar, Instrument::Piano}) {
    std::vector<const NoteEvent*> sustained;
    for (const auto& n : score.notes) {
      if (n.instrument == inst && n.duration_ms() >= min_duration) sustained.push_back(&n);
    }
    std::stable_sort(sustained.begin(), sustained.end(),
                     [](const NoteEvent* a, const NoteEvent* b) { return a->onset_ms < b->onset_ms; });
    for (std::size_t i = 0; i < sustained.size();) {
      const Millis anchor = sustained[i]->onset_ms;
      ChordSpan span{inst, anchor, {}, sustained[i]->duration_ms()};
      std::size_t j = i;
      for (; j < sustained.size() && sustained[j]->onset_ms - anchor <= simultaneity_eps_ms; ++j) {
        span.note_pitches.insert(sustained[j]->pitch);
        span.duration_ms = std::min(span.duration_ms, sustained[j]->duration_ms());
      }
      if (static_cast<int>(span.note_pitches.size()) >= kMinChordNotes) spans.push_back(std::move(span));
      i = j;
    }
  }
  std::stable_sort(spans.begin(), spans.end(), [](const ChordSpan& a, const ChordSpan& b) {
    return std::tie(a.onset_ms, a.instrument) < std::tie(b.onset_ms, b.instrument);
  });
  return spans;
}

std::vector<Token> insert_chord_tokens(std::span<const Token> tokens, std::span<const ChordSpan> spans) {
  if (spans.empty()) return {tokens.begin(), tokens.end()};

  // Token index each span's CHORD goes in front of.
  std::vector<std::size_t> positions;
  positions.reserve(spans.size());
  for (const auto& span : spans) {
    const Millis target = quantize_ms(span.onset_ms);
    Millis cursor = 0;
    std::size_t found = tokens.size();
    for (std::size_t i = 0; i < tokens.size() && cursor <= target; ++i) {
      const Token& t = tokens[i];
      if (t.kind == TokenKind::TimeShift) {
        cursor += t.shift_ms;
      } else if (cursor == target && t.kind == TokenKind::On && t.instrument == span.instrument &&
                 span.note_pitches.contains(t.pitch)) {
        found = i;
        break;
      }
    }
    if (found == tokens.size()) {
      throw LabelingError("no ON token for " + std::string(instrument_name(span.instrument)) + " chord at " +
                          std::to_string(span.onset_ms) + " ms");
    }
    positions.push_back(found);
  }
  std::sort(positions.begin(), positions.end());

  std::vector<Token> out;
  out.reserve(tokens.size() + spans.size());
  std::size_t p = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    while (p < positions.size() && positions[p] == i) {
      out.push_back(Token::chord());
      ++p;
    }
    out.push_back(tokens[i]);
  }
  return out;
}

std::vector<Token> dropout_chords(std::span<const Token> tokens, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw ArgumentError("dropout rate must lie in [0, 1]");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution drop(rate);
  std::vector<Token> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (t.kind == TokenKind::Chord && drop(rng)) continue;
    out.push_back(t);
  }
  return out;
}

ScoreTimeline boost_chord_velocity(const ScoreTimeline& score, std::span<const Millis> chord_onsets_ms, int gain,
                                   Millis simultaneity_eps_ms) {
  if (gain < 0) throw ArgumentError("velocity gain must be non-negative");
  std::vector<Millis> onsets(chord_onsets_ms.begin(), chord_onsets_ms.end());
  std::sort(onsets.begin(), onsets.end());
  ScoreTimeline out = score;
  for (auto& n : out.notes) {
    auto it = std::lower_bound(onsets.begin(), onsets.end(), n.onset_ms - simultaneity_eps_ms);
    if (it != onsets.end() && *it <= n.onset_ms + simultaneity_eps_ms) {
      n.velocity = std::min(127, n.velocity + gain);
    }
  }
  sort_notes(out);
  return out;
}

void write_chord_report(std::ostream& out, std::span<const ChordSpan> spans) {
  for (const auto& s : spans) {
    out << s.onset_ms << '\t' << instrument_name(s.instrument) << '\t';
    bool first = true;
    for (int p : s.note_pitches) {
      out << (first ? "" : ",") << p;
      first = false;
    }
    out << '\t' << s.duration_ms << '\n';
  }
}

}  // namespace cuesync
