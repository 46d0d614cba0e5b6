#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace cuesync {

/// The five merged instrument categories. Enumeration order is part of the
/// vocabulary id layout and of the simultaneous-event ordering in encoded
/// streams, so it must not change.
enum class Instrument : std::uint8_t { Bass, Drums, Guitar, Piano, Strings };

inline constexpr std::size_t kInstrumentCount = 5;
inline constexpr std::array<Instrument, kInstrumentCount> kAllInstruments{
    Instrument::Bass, Instrument::Drums, Instrument::Guitar, Instrument::Piano, Instrument::Strings};

/// General-MIDI percussion channel (channel 10, zero-based 9).
inline constexpr int kDrumChannel = 9;

constexpr std::size_t index_of(Instrument i) { return static_cast<std::size_t>(i); }

/// Drums are unpitched: transposition leaves them alone.
constexpr bool is_unpitched(Instrument i) { return i == Instrument::Drums; }

/// Upper-case token spelling, e.g. "PIANO".
std::string_view instrument_name(Instrument i);
std::optional<Instrument> instrument_from_name(std::string_view name);

/// General-MIDI family bucketing:
///   channel 9 (any program)    -> drums
///   programs 0-23 (piano, chromatic percussion, organ) -> piano
///   programs 24-31             -> guitar
///   programs 32-39             -> bass
///   programs 40-127            -> strings
/// Out-of-range programs are clamped into 0-127 first.
Instrument instrument_for_program(int program, int channel);

/// Program/channel used when writing a category back to a MIDI file.
struct MidiVoice {
  int channel;
  int program;
};
MidiVoice voice_for(Instrument i);

}  // namespace cuesync
