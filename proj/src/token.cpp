#include "cuesync/token.hpp"

#include <charconv>
#include <istream>
#include <ostream>

#include "cuesync/error.hpp"

namespace cuesync {

namespace {

struct SpecialName {
  TokenKind kind;
  std::string_view name;
};

// Order matches the special-token id block.
constexpr SpecialName kSpecials[kSpecialTokenCount] = {
    {TokenKind::Pad, "PAD"},
    {TokenKind::Start, "START"},
    {TokenKind::Bar, "BAR"},
    {TokenKind::Chord, "CHORD"},
    {TokenKind::FewerInstruments, "FEWER_INSTRUMENTS"},
    {TokenKind::MoreInstruments, "MORE_INSTRUMENTS"},
};

std::optional<int> parse_int(std::string_view s) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

void check_pitch(int pitch) {
  if (pitch < 0 || pitch >= kPitchCount) {
    throw ArgumentError("pitch out of MIDI range: " + std::to_string(pitch));
  }
}

}  // namespace

Token Token::on(Instrument instrument, int pitch) {
  check_pitch(pitch);
  return Token{TokenKind::On, instrument, static_cast<std::uint8_t>(pitch), 0};
}

Token Token::off(Instrument instrument, int pitch) {
  check_pitch(pitch);
  return Token{TokenKind::Off, instrument, static_cast<std::uint8_t>(pitch), 0};
}

Token Token::time_shift(int shift_ms) {
  if (shift_ms <= 0 || shift_ms > kMaxShiftMs || shift_ms % kResolutionMs != 0) {
    throw ArgumentError("invalid time shift: " + std::to_string(shift_ms) + " ms");
  }
  return Token{TokenKind::TimeShift, Instrument::Bass, 0, static_cast<std::uint16_t>(shift_ms)};
}

std::string to_string(const Token& t) {
  switch (t.kind) {
    case TokenKind::On:
      return std::string(instrument_name(t.instrument)) + "_ON_" + std::to_string(t.pitch);
    case TokenKind::Off:
      return std::string(instrument_name(t.instrument)) + "_OFF_" + std::to_string(t.pitch);
    case TokenKind::TimeShift:
      return "TIMESHIFT_" + std::to_string(t.shift_ms);
    default:
      break;
  }
  for (const auto& s : kSpecials) {
    if (s.kind == t.kind) return std::string(s.name);
  }
  return "PAD";
}

std::optional<Token> parse_token(std::string_view text) {
  for (const auto& s : kSpecials) {
    if (s.name == text) return Token::of_kind(s.kind);
  }
  constexpr std::string_view kShift = "TIMESHIFT_";
  if (text.starts_with(kShift)) {
    auto v = parse_int(text.substr(kShift.size()));
    if (!v || *v <= 0 || *v > kMaxShiftMs || *v % kResolutionMs != 0) return std::nullopt;
    return Token::time_shift(*v);
  }
  auto first = text.find('_');
  if (first == std::string_view::npos) return std::nullopt;
  auto instrument = instrument_from_name(text.substr(0, first));
  if (!instrument) return std::nullopt;
  auto rest = text.substr(first + 1);
  bool is_on = rest.starts_with("ON_");
  bool is_off = rest.starts_with("OFF_");
  if (!is_on && !is_off) return std::nullopt;
  auto pitch = parse_int(rest.substr(is_on ? 3 : 4));
  if (!pitch || *pitch < 0 || *pitch >= kPitchCount) return std::nullopt;
  return is_on ? Token::on(*instrument, *pitch) : Token::off(*instrument, *pitch);
}

std::size_t token_id(const Token& t) {
  switch (t.kind) {
    case TokenKind::On:
      return kOnBase + index_of(t.instrument) * kPitchCount + t.pitch;
    case TokenKind::Off:
      return kOffBase + index_of(t.instrument) * kPitchCount + t.pitch;
    case TokenKind::TimeShift:
      return kTimeShiftBase + static_cast<std::size_t>(t.shift_ms / kResolutionMs - 1);
    default:
      break;
  }
  for (std::size_t i = 0; i < kSpecialTokenCount; ++i) {
    if (kSpecials[i].kind == t.kind) return i;
  }
  return 0;
}

Token token_from_id(std::size_t id) {
  if (id < kOnBase) return Token::of_kind(kSpecials[id].kind);
  if (id < kOffBase) {
    std::size_t k = id - kOnBase;
    return Token::on(kAllInstruments[k / kPitchCount], static_cast<int>(k % kPitchCount));
  }
  if (id < kTimeShiftBase) {
    std::size_t k = id - kOffBase;
    return Token::off(kAllInstruments[k / kPitchCount], static_cast<int>(k % kPitchCount));
  }
  if (id < kVocabularySize) {
    return Token::time_shift(static_cast<int>(id - kTimeShiftBase + 1) * kResolutionMs);
  }
  throw ArgumentError("token id out of range: " + std::to_string(id));
}

void write_vocabulary_manifest(std::ostream& out) {
  for (std::size_t id = 0; id < kVocabularySize; ++id) {
    out << id << '\t' << to_string(token_from_id(id)) << '\n';
  }
}

std::vector<Token> read_tokens(std::istream& in) {
  std::vector<Token> tokens;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    while (!view.empty() && (view.back() == '\r' || view.back() == ' ' || view.back() == '\t')) {
      view.remove_suffix(1);
    }
    while (!view.empty() && (view.front() == ' ' || view.front() == '\t')) view.remove_prefix(1);
    if (view.empty() || view.front() == '#') continue;
    auto token = parse_token(view);
    if (!token) {
      throw ParseError("unknown token '" + std::string(view) + "' on line " + std::to_string(line_no));
    }
    tokens.push_back(*token);
  }
  return tokens;
}

void write_tokens(std::ostream& out, std::span<const Token> tokens) {
  for (const auto& t : tokens) out << to_string(t) << '\n';
}

}  // namespace cuesync
