#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cuesync/boundary.hpp"
#include "cuesync/token.hpp"

namespace cuesync {

/// Boundary offsets for a whole token stream, computed from a cumulative time
/// grid instead of a running cursor.
///
/// Because the grid is non-decreasing, every boundary's fate is independent of
/// the others: it is consumed by the first CHORD whose grid time lies strictly
/// inside (b - ξ, b + ξ), or (with expiry on) expires at the first token whose
/// time exceeds b + ξ. Each token's offset is then a lookup of the earliest
/// boundary still alive at that index, which parallelizes across tokens.
///
/// Produces exactly the values of folding scheduler_step over the stream
/// (see stepwise_offsets_ms). Boundary states in `boundaries` are ignored;
/// all are treated as pending.
std::vector<Millis> offsets_for_sequence(std::span<const Token> tokens, const BoundaryList& boundaries,
                                         const SchedulerParams& params);

std::vector<double> offsets_for_sequence_s(std::span<const Token> tokens, const BoundaryList& boundaries,
                                           const SchedulerParams& params);

/// Serial reference: replays the stream through scheduler_step from a fresh
/// state. Quadratic in the worst case; kept for testing and benchmarking.
std::vector<Millis> stepwise_offsets_ms(std::span<const Token> tokens, const BoundaryList& boundaries,
                                        const SchedulerParams& params);

struct OffsetJob {
  std::span<const Token> tokens;
  const BoundaryList* boundaries = nullptr;
};

/// Runs offsets_for_sequence over independent sequences in parallel.
std::vector<std::vector<Millis>> offsets_for_batch(std::span<const OffsetJob> jobs, const SchedulerParams& params);

/// Grid times of the CHORD tokens in a stream, de-duplicated. Training
/// sequences use these as their own boundary list.
BoundaryList chord_boundaries(std::span<const Token> tokens);

}  // namespace cuesync
