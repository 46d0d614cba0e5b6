#include "cuesync/generator.hpp"

#include <cmath>
#include <sstream>

#include "cuesync/error.hpp"

namespace cuesync {

namespace {

std::size_t key_of(Instrument instrument, int pitch) {
  return index_of(instrument) * kPitchCount + static_cast<std::size_t>(pitch);
}

}  // namespace

void GrammarTracker::push(const Token& token) {
  switch (token.kind) {
    case TokenKind::On:
      ++open_[key_of(token.instrument, token.pitch)];
      chord_pending_ = false;
      break;
    case TokenKind::Off: {
      int& n = open_[key_of(token.instrument, token.pitch)];
      if (n > 0) --n;
      break;
    }
    case TokenKind::Chord:
      chord_pending_ = true;
      break;
    default:
      break;
  }
  ++length_;
}

bool GrammarTracker::permits(const Token& token) const {
  switch (token.kind) {
    case TokenKind::Off:
      return open_[key_of(token.instrument, token.pitch)] > 0;
    case TokenKind::Pad:
    case TokenKind::Start:
      return length_ == 0;
    case TokenKind::Chord:
      return !chord_pending_;
    default:
      return true;
  }
}

bool GrammarTracker::permits_id(std::size_t id) const {
  if (id >= kVocabularySize) return false;
  if (id < kSpecialTokenCount || (id >= kOffBase && id < kTimeShiftBase)) return permits(token_from_id(id));
  return true;
}

std::vector<bool> GrammarTracker::mask() const {
  std::vector<bool> m(kVocabularySize, true);
  m[token_id(Token::pad())] = length_ == 0;
  m[token_id(Token::start())] = length_ == 0;
  m[token_id(Token::chord())] = !chord_pending_;
  for (std::size_t k = 0; k < open_.size(); ++k) m[kOffBase + k] = open_[k] > 0;
  return m;
}

int GrammarTracker::open_count(Instrument instrument, int pitch) const {
  return open_[key_of(instrument, pitch)];
}

std::vector<bool> grammar_mask(std::span<const Token> history) {
  GrammarTracker g;
  for (const auto& t : history) g.push(t);
  return g.mask();
}

InputAssembly assemble_input(std::span<const Token> tokens, const ConditioningInputs& conditioning,
                             std::size_t feature_dim, double max_offset_s) {
  if (feature_dim == 0 || feature_dim % 2 != 0) {
    throw ArgumentError("feature dimension must be a positive even number, got " + std::to_string(feature_dim));
  }
  if (conditioning.offsets_s.size() != tokens.size()) {
    throw ArgumentError("offsets (" + std::to_string(conditioning.offsets_s.size()) + ") and tokens (" +
                        std::to_string(tokens.size()) + ") differ in length");
  }
  auto check_offset = [&](double o) {
    if (!std::isfinite(o) || o < 0.0 || (max_offset_s > 0.0 && o > max_offset_s)) {
      throw ArgumentError("boundary offset out of range: " + std::to_string(o));
    }
  };
  check_offset(conditioning.initial_offset_s);
  for (double o : conditioning.offsets_s) check_offset(o);

  InputAssembly a;
  a.sequence_length = tokens.size() + 2;
  a.feature_dim = feature_dim;
  a.offset_half = feature_dim / 2;
  a.positional_half = feature_dim - a.offset_half;
  a.slots.reserve(a.sequence_length);

  auto conditioning_slot = [&](SlotKind kind, std::size_t pos, const std::optional<double>& v) {
    AssemblySlot s;
    s.kind = kind;
    s.position = pos;
    s.value = v;
    s.learned_substitute = !v.has_value();
    s.offset_s = conditioning.initial_offset_s;
    a.slots.push_back(s);
  };
  conditioning_slot(SlotKind::Valence, 0, conditioning.valence);
  conditioning_slot(SlotKind::Arousal, 1, conditioning.arousal);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    AssemblySlot s;
    s.kind = SlotKind::Token;
    s.position = i + 2;
    s.token_id = token_id(tokens[i]);
    s.offset_s = conditioning.offsets_s[i];
    a.slots.push_back(s);
  }
  return a;
}

double GenerationDiagnostics::consumption_rate() const {
  const std::size_t resolved = consumed_s.size() + expired_s.size() + unmet_s.size();
  return resolved == 0 ? 1.0 : static_cast<double>(consumed_s.size()) / static_cast<double>(resolved);
}

std::vector<double> GenerationResult::offsets_s() const {
  std::vector<double> out;
  out.reserve(offsets_ms.size());
  for (Millis o : offsets_ms) out.push_back(ms_to_seconds(o));
  return out;
}

GenerationResult generate(const NextTokenModel& model, const GenerationRequest& request) {
  if (!(request.duration_s > 0.0) || !std::isfinite(request.duration_s)) {
    throw ArgumentError("duration must be positive");
  }
  request.scheduler.validate();
  const Millis duration_ms = seconds_to_ms(request.duration_s);

  GeneratorState state(request.boundaries);
  GrammarTracker grammar;
  TokenSampler sampler(request.sampling);
  GenerationDiagnostics diag;

  auto emit = [&](const Token& t) {
    scheduler_step(state, t, request.scheduler);
    grammar.push(t);
    if (t.kind == TokenKind::Chord) ++diag.chord_count;
  };
  emit(Token::start());

  while (state.cursor_ms < duration_ms) {
    if (state.tokens.size() >= request.max_tokens) {
      throw GenerationError("no end of duration after " + std::to_string(request.max_tokens) +
                            " tokens (cursor " + std::to_string(state.cursor_ms) + " ms)");
    }
    GenerationContext ctx{state.tokens, state.offsets_ms, request.va, request.scheduler, state.cursor_ms};
    std::vector<double> probs = model.next_distribution(ctx);
    validate_distribution(probs, kVocabularySize);

    const auto mask = grammar.mask();
    bool masked_mass = false;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (!mask[i] && probs[i] > 0.0) {
        probs[i] = 0.0;
        masked_mass = true;
      }
    }
    if (masked_mass) ++diag.masked_draws;

    const std::size_t id = sampler.sample(probs);
    if (id == TokenSampler::kNone) {
      std::ostringstream msg;
      msg << "model '" << model.name() << "' left no permitted token at position " << state.tokens.size()
          << " (cursor " << state.cursor_ms << " ms, last token " << to_string(state.tokens.back()) << ")";
      throw GenerationError(msg.str());
    }
    emit(token_from_id(id));
  }

  for (std::size_t i = 0; i < state.boundaries.size(); ++i) {
    const double t = ms_to_seconds(state.boundaries.time_ms(i));
    switch (state.boundaries.state(i)) {
      case BoundaryState::Consumed:
        diag.consumed_s.push_back(t);
        diag.consumed_at_s.push_back(ms_to_seconds(*state.boundaries.resolved_at_ms(i)));
        break;
      case BoundaryState::Expired:
        diag.expired_s.push_back(t);
        break;
      case BoundaryState::Pending:
        diag.unmet_s.push_back(t);
        break;
    }
  }
  diag.token_count = state.tokens.size();
  diag.final_cursor_s = state.cursor_s();

  GenerationResult result;
  result.tokens = std::move(state.tokens);
  result.offsets_ms = std::move(state.offsets_ms);
  result.boundaries = std::move(state.boundaries);
  result.diagnostics = std::move(diag);
  return result;
}

}  // namespace cuesync
