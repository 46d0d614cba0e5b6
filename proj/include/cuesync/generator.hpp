#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cuesync/boundary.hpp"
#include "cuesync/emotion.hpp"
#include "cuesync/sampling.hpp"
#include "cuesync/token.hpp"

namespace cuesync {

/// Everything a next-token model may look at. offsets_ms[i] is the boundary
/// offset after tokens[i], so the last entry is the offset at the current
/// cursor.
struct GenerationContext {
  std::span<const Token> tokens;
  std::span<const Millis> offsets_ms;
  VAPoint va;
  SchedulerParams scheduler;

  Millis cursor_ms = 0;
  Millis current_offset_ms() const { return offsets_ms.empty() ? scheduler.max_offset_ms : offsets_ms.back(); }
};

/// A next-token distribution over the full vocabulary. Implementations must
/// return kVocabularySize non-negative values summing to 1 and must be safe
/// for concurrent calls through a const reference.
class NextTokenModel {
 public:
  virtual ~NextTokenModel() = default;
  virtual std::vector<double> next_distribution(const GenerationContext& context) const = 0;
  virtual std::string name() const = 0;
};

/// Incremental tracker for the decoding grammar:
///   - an OFF needs a matching open note;
///   - PAD and START only at position 0;
///   - no CHORD after a CHORD until an ON has been emitted.
class GrammarTracker {
 public:
  void push(const Token& token);
  bool permits(const Token& token) const;
  bool permits_id(std::size_t id) const;
  /// One flag per vocabulary id.
  std::vector<bool> mask() const;

  std::size_t length() const { return length_; }
  int open_count(Instrument instrument, int pitch) const;
  bool chord_pending() const { return chord_pending_; }

 private:
  std::array<int, kInstrumentCount * kPitchCount> open_{};
  std::size_t length_ = 0;
  bool chord_pending_ = false;
};

std::vector<bool> grammar_mask(std::span<const Token> history);

/// Conditioning side of the transformer input. An empty valence or arousal
/// selects the learned substitute vector.
struct ConditioningInputs {
  std::optional<double> valence;
  std::optional<double> arousal;
  /// Seconds, one per token, each in [0, δ_max].
  std::vector<double> offsets_s;
  /// Offset at time 0, given to the two prepended conditioning positions.
  double initial_offset_s = 0.0;
};

enum class SlotKind : std::uint8_t { Valence, Arousal, Token };

struct AssemblySlot {
  SlotKind kind = SlotKind::Token;
  std::size_t position = 0;
  /// Vocabulary id for token slots.
  std::optional<std::size_t> token_id;
  /// Projected scalar for conditioning slots, empty when substituted.
  std::optional<double> value;
  bool learned_substitute = false;
  double offset_s = 0.0;
};

/// Shape descriptor of
///   X = Concat_s(v-slot, a-slot, token embeddings) + Concat_f(offset enc, positional enc)
/// Only shapes and slot bindings are described; no weights are involved.
struct InputAssembly {
  std::size_t sequence_length = 0;
  std::size_t feature_dim = 0;
  std::size_t offset_half = 0;
  std::size_t positional_half = 0;
  std::vector<AssemblySlot> slots;

  bool valence_substituted() const { return slots.at(0).learned_substitute; }
  bool arousal_substituted() const { return slots.at(1).learned_substitute; }
};

/// Throws ArgumentError for odd or zero feature_dim, for offsets not aligned
/// with tokens, or for offsets outside [0, δ_max] when `max_offset_s` > 0.
InputAssembly assemble_input(std::span<const Token> tokens, const ConditioningInputs& conditioning,
                             std::size_t feature_dim, double max_offset_s = kDefaultMaxOffsetS);

struct GenerationRequest {
  VAPoint va;
  BoundaryList boundaries;
  double duration_s = 0.0;
  SamplingParams sampling;
  SchedulerParams scheduler;
  /// Upper bound on emitted tokens, guarding against models that never
  /// advance time.
  std::size_t max_tokens = 1'000'000;
};

struct GenerationDiagnostics {
  std::vector<double> consumed_s;
  std::vector<double> expired_s;
  /// Still pending when the loop ended.
  std::vector<double> unmet_s;
  /// Cursor at which each consumed boundary was matched, aligned with
  /// consumed_s.
  std::vector<double> consumed_at_s;
  std::size_t chord_count = 0;
  std::size_t token_count = 0;
  std::size_t masked_draws = 0;
  double final_cursor_s = 0.0;

  double consumption_rate() const;
};

struct GenerationResult {
  std::vector<Token> tokens;
  std::vector<Millis> offsets_ms;
  BoundaryList boundaries;
  GenerationDiagnostics diagnostics;

  std::vector<double> offsets_s() const;
};

/// Autoregressive loop: starts from START, then queries the model, masks the
/// distribution with the grammar, samples, and feeds the token through
/// scheduler_step until the cursor reaches the duration. Throws
/// GenerationError for an invalid model distribution, an all-zero masked
/// distribution, or when max_tokens is exceeded.
GenerationResult generate(const NextTokenModel& model, const GenerationRequest& request);

}  // namespace cuesync
