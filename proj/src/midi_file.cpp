#include "cuesync/midi_file.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <map>
#include <string>
#include <string_view>
#include <tuple>

#include "cuesync/error.hpp"

namespace cuesync {

namespace {

using Tick = std::int64_t;

class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> bytes, std::size_t base = 0) : bytes_(bytes), base_(base) {}

  std::size_t offset() const { return base_ + pos_; }
  bool at_end() const { return pos_ >= bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  std::uint8_t u8() {
    need(1);
    return bytes_[pos_++];
  }
  std::uint8_t peek() {
    need(1);
    return bytes_[pos_];
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] << 8 | bytes_[pos_ + 1]);
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = v << 8 | bytes_[pos_ + i];
    pos_ += 4;
    return v;
  }
  /// Variable-length quantity, at most four bytes.
  std::uint32_t varlen() {
    std::size_t start = offset();
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      std::uint8_t b = u8();
      v = v << 7 | (b & 0x7F);
      if (!(b & 0x80)) return v;
    }
    throw ParseError("variable-length quantity longer than 4 bytes", start);
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    need(n);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::string_view tag() {
    auto s = take(4);
    return {reinterpret_cast<const char*>(s.data()), 4};
  }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw ParseError("unexpected end of data", offset());
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

enum class RawKind { NoteOn, NoteOff, Program };

struct RawEvent {
  Tick tick;
  int track;
  std::size_t seq;
  RawKind kind;
  int channel;
  int data1;
  int data2;
};

struct TempoChange {
  Tick tick;
  int track;
  std::size_t seq;
  std::uint32_t usec_per_quarter;
};

struct TimeSignature {
  Tick tick;
  int track;
  std::size_t seq;
  int numerator;
  int denominator_pow2;
};

struct TrackData {
  std::vector<RawEvent> events;
  Tick end_tick = 0;
};

std::uint8_t data_byte(ByteReader& r) {
  std::size_t at = r.offset();
  std::uint8_t b = r.u8();
  if (b & 0x80) throw ParseError("status byte where data byte expected", at);
  return b;
}

TrackData read_track(ByteReader& r, int track, std::vector<TempoChange>& tempos,
                     std::vector<TimeSignature>& signatures) {
  TrackData data;
  Tick tick = 0;
  std::uint8_t running = 0;
  std::size_t seq = 0;
  while (!r.at_end()) {
    tick += r.varlen();
    std::size_t status_at = r.offset();
    std::uint8_t status = r.peek();
    if (status & 0x80) {
      r.u8();
    } else if (running == 0) {
      throw ParseError("data byte without running status", status_at);
    } else {
      status = running;
    }

    if (status == 0xFF) {
      running = 0;
      std::uint8_t type = r.u8();
      std::uint32_t len = r.varlen();
      std::size_t payload_at = r.offset();
      auto payload = r.take(len);
      if (type == 0x51) {
        if (len != 3) throw ParseError("tempo event must carry 3 bytes", payload_at);
        std::uint32_t usec = payload[0] << 16 | payload[1] << 8 | payload[2];
        if (usec == 0) throw ParseError("zero tempo", payload_at);
        tempos.push_back({tick, track, seq++, usec});
      } else if (type == 0x58) {
        if (len < 2) throw ParseError("time signature too short", payload_at);
        if (payload[0] == 0) throw ParseError("time signature numerator is zero", payload_at);
        signatures.push_back({tick, track, seq++, payload[0], payload[1]});
      } else if (type == 0x2F) {
        break;
      }
      continue;
    }
    if (status == 0xF0 || status == 0xF7) {
      running = 0;
      r.take(r.varlen());
      continue;
    }
    if (status >= 0xF0) throw ParseError("system message inside track chunk", status_at);

    running = status;
    int channel = status & 0x0F;
    switch (status & 0xF0) {
      case 0x80: {
        int pitch = data_byte(r);
        int velocity = data_byte(r);
        data.events.push_back({tick, track, seq++, RawKind::NoteOff, channel, pitch, velocity});
        break;
      }
      case 0x90: {
        int pitch = data_byte(r);
        int velocity = data_byte(r);
        auto kind = velocity == 0 ? RawKind::NoteOff : RawKind::NoteOn;
        data.events.push_back({tick, track, seq++, kind, channel, pitch, velocity});
        break;
      }
      case 0xC0:
        data.events.push_back({tick, track, seq++, RawKind::Program, channel, data_byte(r), 0});
        break;
      case 0xD0:
        data_byte(r);
        break;
      default:  // 0xA0 poly pressure, 0xB0 control change, 0xE0 pitch bend
        data_byte(r);
        data_byte(r);
        break;
    }
  }
  data.end_tick = tick;
  return data;
}

/// Tick -> millisecond conversion over a tempo map (or SMPTE timing).
class TickClock {
 public:
  TickClock(int division, std::vector<TempoChange> tempos) {
    if (division & 0x8000) {
      int fps = -static_cast<std::int8_t>(division >> 8);
      int ticks_per_frame = division & 0xFF;
      double frames = fps == 29 ? 30000.0 / 1001.0 : static_cast<double>(fps);
      smpte_ms_per_tick_ = 1000.0 / (frames * ticks_per_frame);
      return;
    }
    ppq_ = division;
    std::stable_sort(tempos.begin(), tempos.end(), [](const TempoChange& a, const TempoChange& b) {
      return std::tie(a.tick, a.track, a.seq) < std::tie(b.tick, b.track, b.seq);
    });
    // Segment start ticks with their accumulated (usec * ppq) offsets.
    Tick tick = 0;
    std::int64_t acc = 0;
    std::uint32_t tempo = 500000;
    segments_.push_back({0, 0, tempo});
    for (const auto& t : tempos) {
      acc += (t.tick - tick) * static_cast<std::int64_t>(tempo);
      tick = t.tick;
      tempo = t.usec_per_quarter;
      if (segments_.back().tick == tick) {
        segments_.back().tempo = tempo;
      } else {
        segments_.push_back({tick, acc, tempo});
      }
    }
  }

  Millis to_ms(Tick tick) const {
    if (ppq_ == 0) return std::llround(static_cast<double>(tick) * smpte_ms_per_tick_);
    auto it = std::upper_bound(segments_.begin(), segments_.end(), tick,
                               [](Tick t, const Segment& s) { return t < s.tick; });
    const Segment& s = *std::prev(it);
    std::int64_t scaled = s.scaled_usec + (tick - s.tick) * static_cast<std::int64_t>(s.tempo);
    // scaled is usec * ppq; round half up to whole milliseconds.
    std::int64_t denom = static_cast<std::int64_t>(ppq_) * 1000;
    return (2 * scaled + denom) / (2 * denom);
  }

  bool smpte() const { return ppq_ == 0; }
  int ppq() const { return ppq_; }

 private:
  struct Segment {
    Tick tick;
    std::int64_t scaled_usec;
    std::uint32_t tempo;
  };
  int ppq_ = 0;
  double smpte_ms_per_tick_ = 0.0;
  std::vector<Segment> segments_;
};

std::vector<Millis> bar_marks(const TickClock& clock, std::vector<TimeSignature> signatures,
                              Tick end_tick, Millis end_ms, double tempo_bpm) {
  std::vector<Millis> marks;
  if (clock.smpte()) {
    double bar_ms = 4.0 * 60000.0 / tempo_bpm;
    for (int k = 0;; ++k) {
      Millis m = std::llround(k * bar_ms);
      if (m >= end_ms) break;
      if (marks.empty() || m > marks.back()) marks.push_back(m);
    }
    return marks;
  }
  std::stable_sort(signatures.begin(), signatures.end(), [](const TimeSignature& a, const TimeSignature& b) {
    return std::tie(a.tick, a.track, a.seq) < std::tie(b.tick, b.track, b.seq);
  });
  auto bar_ticks = [&](const TimeSignature& ts) {
    Tick len = static_cast<Tick>(ts.numerator) * clock.ppq() * 4 / (Tick{1} << std::min(ts.denominator_pow2, 30));
    return std::max<Tick>(len, 1);
  };
  TimeSignature current{0, 0, 0, 4, 2};
  std::size_t next = 0;
  while (next < signatures.size() && signatures[next].tick == 0) current = signatures[next++];
  Tick tick = 0;
  while (tick < end_tick) {
    Millis m = clock.to_ms(tick);
    if (marks.empty() || m > marks.back()) marks.push_back(m);
    Tick following = tick + bar_ticks(current);
    if (next < signatures.size() && signatures[next].tick <= following) {
      following = std::max(signatures[next].tick, tick + 1);
      current = signatures[next++];
      while (next < signatures.size() && signatures[next].tick <= following) current = signatures[next++];
    }
    tick = following;
  }
  return marks;
}

// --- writing -----------------------------------------------------------

void put_u16(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_varlen(std::vector<std::uint8_t>& out, std::uint32_t v) {
  std::array<std::uint8_t, 5> buf{};
  int n = 0;
  buf[n++] = v & 0x7F;
  while (v >>= 7) buf[n++] = static_cast<std::uint8_t>((v & 0x7F) | 0x80);
  while (n > 0) out.push_back(buf[--n]);
}

void put_chunk(std::vector<std::uint8_t>& out, std::string_view tag, const std::vector<std::uint8_t>& body) {
  out.insert(out.end(), tag.begin(), tag.end());
  put_u32(out, static_cast<std::uint32_t>(body.size()));
  out.insert(out.end(), body.begin(), body.end());
}

void put_meta(std::vector<std::uint8_t>& track, std::uint8_t type, std::span<const std::uint8_t> payload) {
  track.push_back(0xFF);
  track.push_back(type);
  put_varlen(track, static_cast<std::uint32_t>(payload.size()));
  track.insert(track.end(), payload.begin(), payload.end());
}

}  // namespace

ScoreTimeline parse_midi(std::span<const std::uint8_t> bytes, MidiDiagnostics* diagnostics) {
  MidiDiagnostics diag;
  ByteReader file(bytes);
  if (file.remaining() < 14 || file.tag() != "MThd") throw ParseError("missing MThd header", 0);
  std::uint32_t header_len = file.u32();
  if (header_len < 6) throw ParseError("MThd chunk shorter than 6 bytes", 4);
  std::size_t format_at = file.offset();
  diag.format = file.u16();
  diag.track_count = file.u16();
  diag.division = file.u16();
  file.take(header_len - 6);
  if (diag.format == 2) throw ParseError("SMF type 2 is not supported", format_at);
  if (diag.format > 2) throw ParseError("unknown SMF format " + std::to_string(diag.format), format_at);
  if (diag.format == 0 && diag.track_count != 1) {
    throw ParseError("SMF type 0 must contain exactly one track", format_at + 2);
  }
  if (diag.division == 0) throw ParseError("division is zero", format_at + 4);

  std::vector<TempoChange> tempos;
  std::vector<TimeSignature> signatures;
  std::vector<TrackData> tracks;
  while (static_cast<int>(tracks.size()) < diag.track_count) {
    if (file.at_end()) {
      throw ParseError("expected " + std::to_string(diag.track_count) + " tracks, found " +
                           std::to_string(tracks.size()),
                       file.offset());
    }
    std::size_t chunk_at = file.offset();
    if (file.remaining() < 8) throw ParseError("truncated chunk header", chunk_at);
    auto tag = file.tag();
    std::uint32_t len = file.u32();
    if (len > file.remaining()) throw ParseError("chunk length exceeds file size", chunk_at + 4);
    std::size_t body_at = file.offset();
    auto body = file.take(len);
    if (tag != "MTrk") {
      ++diag.skipped_chunks;
      continue;
    }
    ByteReader track(body, body_at);
    tracks.push_back(read_track(track, static_cast<int>(tracks.size()), tempos, signatures));
  }
  diag.has_tempo = !tempos.empty();
  diag.has_time_signature = !signatures.empty();

  ScoreTimeline score;
  if (!tempos.empty()) {
    auto first = std::min_element(tempos.begin(), tempos.end(), [](const TempoChange& a, const TempoChange& b) {
      return std::tie(a.tick, a.track, a.seq) < std::tie(b.tick, b.track, b.seq);
    });
    score.tempo_bpm = 60'000'000.0 / first->usec_per_quarter;
  }
  TickClock clock(diag.division, tempos);

  std::vector<RawEvent> merged;
  for (const auto& t : tracks) merged.insert(merged.end(), t.events.begin(), t.events.end());
  std::stable_sort(merged.begin(), merged.end(), [](const RawEvent& a, const RawEvent& b) {
    return std::tie(a.tick, a.track, a.seq) < std::tie(b.tick, b.track, b.seq);
  });

  struct Open {
    Tick tick;
    int velocity;
    Instrument instrument;
  };
  std::array<int, 16> program{};
  std::map<std::tuple<int, int, int>, std::deque<Open>> open;
  Tick last_off_tick = 0;
  auto emit = [&](Tick on, Tick off, const Open& o, int pitch) {
    NoteEvent n{o.instrument, pitch, clock.to_ms(on), clock.to_ms(off), o.velocity};
    if (n.offset_ms <= n.onset_ms) {
      ++diag.zero_length_dropped;
      return;
    }
    last_off_tick = std::max(last_off_tick, off);
    score.notes.push_back(n);
  };
  for (const auto& e : merged) {
    switch (e.kind) {
      case RawKind::Program:
        program[e.channel] = e.data1;
        break;
      case RawKind::NoteOn:
        open[{e.track, e.channel, e.data1}].push_back(
            {e.tick, e.data2, instrument_for_program(program[e.channel], e.channel)});
        break;
      case RawKind::NoteOff: {
        auto it = open.find({e.track, e.channel, e.data1});
        if (it == open.end() || it->second.empty()) {
          ++diag.unmatched_note_offs;
          break;
        }
        emit(it->second.front().tick, e.tick, it->second.front(), e.data1);
        it->second.pop_front();
        break;
      }
    }
  }
  for (const auto& [key, queue] : open) {
    for (const auto& o : queue) {
      ++diag.dangling_notes;
      emit(o.tick, tracks[std::get<0>(key)].end_tick, o, std::get<2>(key));
    }
  }
  sort_notes(score);
  score.bar_marks_ms = bar_marks(clock, signatures, last_off_tick, score.end_ms(), score.tempo_bpm);

  if (diagnostics) *diagnostics = diag;
  return score;
}

std::vector<std::uint8_t> write_midi(const ScoreTimeline& score) {
  const int ms_per_quarter = std::clamp(static_cast<int>(std::lround(60000.0 / score.tempo_bpm)), 1, 0x7FFF);
  const std::uint32_t usec = static_cast<std::uint32_t>(ms_per_quarter) * 1000;

  std::vector<std::vector<std::uint8_t>> tracks;
  {
    std::vector<std::uint8_t> conductor;
    const std::uint8_t tempo[] = {static_cast<std::uint8_t>(usec >> 16), static_cast<std::uint8_t>(usec >> 8),
                                  static_cast<std::uint8_t>(usec)};
    const std::uint8_t four_four[] = {4, 2, 24, 8};
    put_varlen(conductor, 0);
    put_meta(conductor, 0x51, tempo);
    put_varlen(conductor, 0);
    put_meta(conductor, 0x58, four_four);
    put_varlen(conductor, 0);
    put_meta(conductor, 0x2F, {});
    tracks.push_back(std::move(conductor));
  }

  for (Instrument inst : kAllInstruments) {
    struct Ev {
      Millis t;
      int is_on;
      int pitch;
      int velocity;
    };
    std::vector<Ev> events;
    for (const auto& n : score.notes) {
      if (n.instrument != inst) continue;
      events.push_back({n.onset_ms, 1, n.pitch, n.velocity});
      events.push_back({n.offset_ms, 0, n.pitch, 0});
    }
    if (events.empty()) continue;
    std::stable_sort(events.begin(), events.end(),
                     [](const Ev& a, const Ev& b) { return std::tie(a.t, a.is_on, a.pitch) < std::tie(b.t, b.is_on, b.pitch); });

    const MidiVoice voice = voice_for(inst);
    std::vector<std::uint8_t> track;
    auto name = instrument_name(inst);
    put_varlen(track, 0);
    put_meta(track, 0x03, {reinterpret_cast<const std::uint8_t*>(name.data()), name.size()});
    if (inst != Instrument::Drums) {
      put_varlen(track, 0);
      track.push_back(static_cast<std::uint8_t>(0xC0 | voice.channel));
      track.push_back(static_cast<std::uint8_t>(voice.program));
    }
    Millis now = 0;
    for (const auto& e : events) {
      put_varlen(track, static_cast<std::uint32_t>(e.t - now));
      now = e.t;
      if (e.is_on) {
        track.push_back(static_cast<std::uint8_t>(0x90 | voice.channel));
        track.push_back(static_cast<std::uint8_t>(e.pitch));
        track.push_back(static_cast<std::uint8_t>(std::clamp(e.velocity, 1, 127)));
      } else {
        track.push_back(static_cast<std::uint8_t>(0x80 | voice.channel));
        track.push_back(static_cast<std::uint8_t>(e.pitch));
        track.push_back(0x40);
      }
    }
    put_varlen(track, 0);
    put_meta(track, 0x2F, {});
    tracks.push_back(std::move(track));
  }

  std::vector<std::uint8_t> out;
  std::vector<std::uint8_t> header;
  put_u16(header, 1);
  put_u16(header, static_cast<std::uint32_t>(tracks.size()));
  put_u16(header, static_cast<std::uint32_t>(ms_per_quarter));
  put_chunk(out, "MThd", header);
  for (const auto& t : tracks) put_chunk(out, "MTrk", t);
  return out;
}

}  // namespace cuesync
