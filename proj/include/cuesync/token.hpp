#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cuesync/instrument.hpp"

namespace cuesync {

/// Time grid of the event vocabulary.
inline constexpr int kResolutionMs = 8;
inline constexpr int kMaxShiftMs = 1000;
inline constexpr int kTimeShiftCount = kMaxShiftMs / kResolutionMs;  // 125
inline constexpr int kPitchCount = 128;

enum class TokenKind : std::uint8_t {
  On,
  Off,
  TimeShift,
  Start,
  Bar,
  Pad,
  Chord,
  FewerInstruments,
  MoreInstruments,
};

/// One vocabulary event. Only ON/OFF carry instrument and pitch, only
/// TIMESHIFT carries shift_ms; every other payload field stays zero so that
/// defaulted equality is token identity.
struct Token {
  TokenKind kind = TokenKind::Pad;
  Instrument instrument = Instrument::Bass;
  std::uint8_t pitch = 0;
  std::uint16_t shift_ms = 0;

  static Token on(Instrument instrument, int pitch);
  static Token off(Instrument instrument, int pitch);
  /// shift_ms must be a positive multiple of kResolutionMs, at most kMaxShiftMs.
  static Token time_shift(int shift_ms);
  static constexpr Token of_kind(TokenKind k) { return Token{k, Instrument::Bass, 0, 0}; }
  static constexpr Token start() { return of_kind(TokenKind::Start); }
  static constexpr Token bar() { return of_kind(TokenKind::Bar); }
  static constexpr Token pad() { return of_kind(TokenKind::Pad); }
  static constexpr Token chord() { return of_kind(TokenKind::Chord); }
  static constexpr Token fewer_instruments() { return of_kind(TokenKind::FewerInstruments); }
  static constexpr Token more_instruments() { return of_kind(TokenKind::MoreInstruments); }

  bool is_note() const { return kind == TokenKind::On || kind == TokenKind::Off; }

  friend bool operator==(const Token&, const Token&) = default;
};

/// Canonical spelling: PIANO_ON_60, DRUMS_OFF_42, TIMESHIFT_800, START, BAR,
/// PAD, CHORD, FEWER_INSTRUMENTS, MORE_INSTRUMENTS.
std::string to_string(const Token& t);
std::optional<Token> parse_token(std::string_view text);

// ---------------------------------------------------------------------------
// Vocabulary. Ids are laid out as
//   0 PAD, 1 START, 2 BAR, 3 CHORD, 4 FEWER_INSTRUMENTS, 5 MORE_INSTRUMENTS,
//   6    + 128*instrument + pitch   ON   (640 ids)
//   646  + 128*instrument + pitch   OFF  (640 ids)
//   1286 + (shift_ms/8 - 1)         TIMESHIFT_8 .. TIMESHIFT_1000 (125 ids)
// for a total of 1411. Instruments follow the Instrument enum order.
// ---------------------------------------------------------------------------
inline constexpr std::size_t kSpecialTokenCount = 6;
inline constexpr std::size_t kOnBase = kSpecialTokenCount;
inline constexpr std::size_t kOffBase = kOnBase + kInstrumentCount * kPitchCount;
inline constexpr std::size_t kTimeShiftBase = kOffBase + kInstrumentCount * kPitchCount;
inline constexpr std::size_t kVocabularySize = kTimeShiftBase + kTimeShiftCount;

std::size_t token_id(const Token& t);
/// Throws ArgumentError for ids >= kVocabularySize.
Token token_from_id(std::size_t id);

/// "id<TAB>name" per line, ids ascending.
void write_vocabulary_manifest(std::ostream& out);

/// One token per line. Blank lines and lines starting with '#' are skipped;
/// an unknown spelling raises ParseError naming the line.
std::vector<Token> read_tokens(std::istream& in);
void write_tokens(std::ostream& out, std::span<const Token> tokens);

}  // namespace cuesync
