#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "cuesync/boundary.hpp"
#include "cuesync/score.hpp"
#include "cuesync/token.hpp"

namespace testsupport {

using cuesync::Instrument;
using cuesync::Millis;
using cuesync::NoteEvent;
using cuesync::ScoreTimeline;
using cuesync::Token;

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(CUESYNC_FIXTURE_DIR) / name;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("cuesync_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

struct ScoreShape {
  int max_notes = 40;
  Millis span_ms = 6000;
  Millis max_len_ms = 2400;
  bool on_grid = true;
  bool with_bars = true;
};

// Random score with no two notes of one (instrument, pitch) overlapping or
// touching, velocity 80 and tempo 120. On-grid scores use multiples of 8 ms.
inline ScoreTimeline random_score(std::mt19937_64& rng, const ScoreShape& shape = {}) {
  std::uniform_int_distribution<int> count(0, shape.max_notes);
  std::uniform_int_distribution<int> inst(0, 4);
  std::uniform_int_distribution<int> pitch(20, 100);
  std::uniform_int_distribution<Millis> onset(0, shape.span_ms);
  std::uniform_int_distribution<Millis> length(1, shape.max_len_ms);

  ScoreTimeline s;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    NoteEvent e;
    e.instrument = cuesync::kAllInstruments[static_cast<std::size_t>(inst(rng))];
    e.pitch = pitch(rng);
    e.onset_ms = onset(rng);
    e.offset_ms = e.onset_ms + length(rng);
    if (shape.on_grid) {
      e.onset_ms -= e.onset_ms % 8;
      e.offset_ms = std::max(e.offset_ms - e.offset_ms % 8, e.onset_ms + 8);
    } else if (e.offset_ms - e.onset_ms < 8) {
      // Shorter notes are stretched to one grid step by design.
      e.offset_ms = e.onset_ms + 8;
    }
    // Off-grid notes keep >= 16 ms of quantized separation from same-key
    // neighbours so rounding cannot merge them.
    const Millis guard = shape.on_grid ? 8 : 24;
    const bool clash = std::any_of(s.notes.begin(), s.notes.end(), [&](const NoteEvent& o) {
      return o.instrument == e.instrument && o.pitch == e.pitch && e.onset_ms < o.offset_ms + guard &&
             o.onset_ms < e.offset_ms + guard;
    });
    if (!clash) s.notes.push_back(e);
  }
  cuesync::sort_notes(s);
  if (shape.with_bars && !s.notes.empty()) {
    Millis end = 0;
    for (const auto& e : s.notes) end = std::max(end, e.offset_ms);
    for (Millis b = 0; b < end; b += 2000) s.bar_marks_ms.push_back(b);
  }
  return s;
}

struct StreamShape {
  int max_tokens = 300;
  double chord_rate = 0.08;
  double shift_rate = 0.45;
};

// Arbitrary (not necessarily grammatical) token stream mixing time shifts,
// chords and notes.
inline std::vector<Token> random_stream(std::mt19937_64& rng, const StreamShape& shape = {}) {
  std::uniform_int_distribution<int> len(0, shape.max_tokens);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> steps(1, 125);
  std::uniform_int_distribution<int> pitch(0, 127);
  std::vector<Token> out{Token::start()};
  const int n = len(rng);
  for (int i = 0; i < n; ++i) {
    const double r = u(rng);
    if (r < shape.chord_rate) {
      out.push_back(Token::chord());
    } else if (r < shape.chord_rate + shape.shift_rate) {
      // Bias toward short shifts so chords cluster near boundaries.
      const int k = u(rng) < 0.7 ? std::min(steps(rng), 20) : steps(rng);
      out.push_back(Token::time_shift(8 * k));
    } else if (r < 0.9) {
      out.push_back(Token::on(Instrument::Piano, pitch(rng)));
    } else {
      out.push_back(Token::bar());
    }
  }
  return out;
}

inline Millis stream_span_ms(const std::vector<Token>& tokens) {
  Millis c = 0;
  for (const auto& t : tokens) {
    if (t.kind == cuesync::TokenKind::TimeShift) c += t.shift_ms;
  }
  return c;
}

// Strictly increasing boundary times in [0, span + 2000], some on the grid.
inline std::vector<Millis> random_boundaries(std::mt19937_64& rng, Millis span_ms, int max_count = 12) {
  std::uniform_int_distribution<int> count(0, max_count);
  std::uniform_int_distribution<Millis> t(0, span_ms + 2000);
  std::set<Millis> s;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    Millis v = t(rng);
    if (i % 2 == 0) v -= v % 8;
    s.insert(v);
  }
  return {s.begin(), s.end()};
}

}  // namespace testsupport
