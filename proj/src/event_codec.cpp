#include "cuesync/event_codec.hpp"

#include <algorithm>
#include <array>
#include <tuple>

#include "cuesync/error.hpp"

namespace cuesync {

namespace {

// Sort class of events sharing one time step.
enum StepClass : int { kBar = 0, kOff = 1, kOn = 2 };

struct TimedEvent {
  Millis time;
  int cls;
  Instrument instrument;
  int pitch;

  bool operator<(const TimedEvent& o) const {
    return std::tie(time, cls, instrument, pitch) < std::tie(o.time, o.cls, o.instrument, o.pitch);
  }
};

void emit_gap(std::vector<Token>& out, Millis gap) {
  while (gap >= kMaxShiftMs) {
    out.push_back(Token::time_shift(kMaxShiftMs));
    gap -= kMaxShiftMs;
  }
  if (gap > 0) out.push_back(Token::time_shift(static_cast<int>(gap)));
}

}  // namespace

std::vector<Token> encode_events(const ScoreTimeline& score, const EncodeOptions& options) {
  std::vector<TimedEvent> events;
  events.reserve(score.notes.size() * 2 + score.bar_marks_ms.size());
  for (const auto& n : score.notes) {
    Millis on = quantize_ms(n.onset_ms);
    Millis off = std::max(quantize_ms(n.offset_ms), on + kResolutionMs);
    events.push_back({on, kOn, n.instrument, n.pitch});
    events.push_back({off, kOff, n.instrument, n.pitch});
  }
  if (options.emit_bars) {
    Millis last = -1;
    for (Millis b : score.bar_marks_ms) {
      Millis q = quantize_ms(b);
      if (q == last) continue;  // two marks collapsing onto one grid step
      events.push_back({q, kBar, Instrument::Bass, 0});
      last = q;
    }
  }
  std::sort(events.begin(), events.end());

  std::vector<Token> out;
  out.reserve(events.size() + events.size() / 2 + 2);
  out.push_back(Token::start());
  out.push_back(instrument_count_tag(score));
  Millis cursor = 0;
  for (const auto& e : events) {
    emit_gap(out, e.time - cursor);
    cursor = e.time;
    switch (e.cls) {
      case kBar: out.push_back(Token::bar()); break;
      case kOff: out.push_back(Token::off(e.instrument, e.pitch)); break;
      default: out.push_back(Token::on(e.instrument, e.pitch)); break;
    }
  }
  return out;
}

DecodedSequence decode_events(std::span<const Token> tokens) {
  DecodedSequence result;
  auto& score = result.score;
  // FIFO of onsets per (instrument, pitch).
  std::vector<std::vector<Millis>> open(kInstrumentCount * kPitchCount);
  auto slot = [](const Token& t) { return index_of(t.instrument) * kPitchCount + t.pitch; };
  auto close = [&](Instrument inst, int pitch, Millis on, Millis off) {
    if (off <= on) {
      ++result.diagnostics.zero_length_dropped;
      return;
    }
    score.notes.push_back({inst, pitch, on, off, kDefaultVelocity});
  };

  Millis cursor = 0;
  for (const auto& t : tokens) {
    switch (t.kind) {
      case TokenKind::TimeShift:
        cursor += t.shift_ms;
        break;
      case TokenKind::On:
        open[slot(t)].push_back(cursor);
        break;
      case TokenKind::Off: {
        auto& q = open[slot(t)];
        if (q.empty()) {
          ++result.diagnostics.unmatched_offs;
          break;
        }
        close(t.instrument, t.pitch, q.front(), cursor);
        q.erase(q.begin());
        break;
      }
      case TokenKind::Bar:
        if (score.bar_marks_ms.empty() || score.bar_marks_ms.back() < cursor) score.bar_marks_ms.push_back(cursor);
        break;
      case TokenKind::Chord:
        result.chord_onsets_ms.push_back(cursor);
        break;
      default:
        break;
    }
  }
  for (std::size_t k = 0; k < open.size(); ++k) {
    for (Millis on : open[k]) {
      ++result.diagnostics.closed_at_end;
      close(kAllInstruments[k / kPitchCount], static_cast<int>(k % kPitchCount), on, cursor);
    }
  }
  result.final_cursor_ms = cursor;
  sort_notes(score);
  return result;
}

ScoreTimeline transpose(const ScoreTimeline& score, int semitones) {
  if (semitones < -3 || semitones > 3) {
    throw ArgumentError("transposition must lie in [-3, 3], got " + std::to_string(semitones));
  }
  ScoreTimeline out = score;
  if (semitones == 0) return out;
  for (auto& n : out.notes) {
    if (!is_unpitched(n.instrument)) n.pitch = std::clamp(n.pitch + semitones, 0, 127);
  }
  sort_notes(out);
  return out;
}

Token instrument_count_tag(const ScoreTimeline& score) {
  std::array<bool, kInstrumentCount> used{};
  for (const auto& n : score.notes) used[index_of(n.instrument)] = true;
  auto count = std::count(used.begin(), used.end(), true);
  return count <= 2 ? Token::fewer_instruments() : Token::more_instruments();
}

ScoreTimeline trim_to_duration(const ScoreTimeline& score, Millis duration_ms) {
  ScoreTimeline out;
  out.tempo_bpm = score.tempo_bpm;
  for (auto n : score.notes) {
    if (n.onset_ms >= duration_ms) continue;
    n.offset_ms = std::min(n.offset_ms, duration_ms);
    out.notes.push_back(n);
  }
  for (Millis b : score.bar_marks_ms) {
    if (b < duration_ms) out.bar_marks_ms.push_back(b);
  }
  sort_notes(out);
  return out;
}

}  // namespace cuesync
