#include "cuesync/instrument.hpp"

#include <algorithm>

namespace cuesync {

namespace {
constexpr std::array<std::string_view, kInstrumentCount> kNames{"BASS", "DRUMS", "GUITAR", "PIANO",
                                                                "STRINGS"};
}

std::string_view instrument_name(Instrument i) { return kNames[index_of(i)]; }

std::optional<Instrument> instrument_from_name(std::string_view name) {
  for (std::size_t k = 0; k < kNames.size(); ++k) {
    if (kNames[k] == name) return kAllInstruments[k];
  }
  return std::nullopt;
}

Instrument instrument_for_program(int program, int channel) {
  if (channel == kDrumChannel) return Instrument::Drums;
  program = std::clamp(program, 0, 127);
  if (program < 24) return Instrument::Piano;
  if (program < 32) return Instrument::Guitar;
  if (program < 40) return Instrument::Bass;
  return Instrument::Strings;
}

MidiVoice voice_for(Instrument i) {
  switch (i) {
    case Instrument::Bass: return {0, 33};      // electric bass (finger)
    case Instrument::Drums: return {kDrumChannel, 0};
    case Instrument::Guitar: return {1, 25};    // acoustic guitar (steel)
    case Instrument::Piano: return {2, 0};      // acoustic grand
    case Instrument::Strings: return {3, 48};   // string ensemble 1
  }
  return {2, 0};
}

}  // namespace cuesync
