#include "cuesync/offset_kernels.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>

namespace cuesync {

namespace {

constexpr std::size_t kNever = std::numeric_limits<std::size_t>::max();

// Below this many tokens the per-token loop stays on the calling thread.
constexpr std::size_t kParallelTokenThreshold = 1 << 14;

}  // namespace

std::vector<Millis> offsets_for_sequence(std::span<const Token> tokens, const BoundaryList& boundaries,
                                         const SchedulerParams& params) {
  const std::size_t n = tokens.size();
  const std::size_t m = boundaries.size();
  const Millis xi = params.sensitivity_ms;
  const Millis cap = params.max_offset_ms;

  // time[i]: cursor after token i. next_chord[i]: first CHORD index >= i.
  std::vector<Millis> time(n);
  Millis cursor = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (tokens[i].kind == TokenKind::TimeShift) cursor += tokens[i].shift_ms;
    time[i] = cursor;
  }
  std::vector<std::size_t> next_chord(n + 1, kNever);
  for (std::size_t i = n; i-- > 0;) {
    next_chord[i] = tokens[i].kind == TokenKind::Chord ? i : next_chord[i + 1];
  }

  // Per-boundary fate. expire_at is non-decreasing in boundary order.
  auto b = boundaries.times_ms();
  std::vector<std::size_t> consume_at(m, kNever);
  std::vector<std::size_t> expire_at(m, kNever);
  for (std::size_t k = 0; k < m; ++k) {
    auto first_inside = std::upper_bound(time.begin(), time.end(), b[k] - xi) - time.begin();
    std::size_t c = next_chord[static_cast<std::size_t>(first_inside)];
    if (c != kNever && time[c] < b[k] + xi) consume_at[k] = c;
    if (params.expire_missed) {
      auto past = std::upper_bound(time.begin(), time.end(), b[k] + xi) - time.begin();
      if (static_cast<std::size_t>(past) < n) expire_at[k] = static_cast<std::size_t>(past);
    }
  }

  std::vector<Millis> offsets(n);
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static) if (n >= kParallelTokenThreshold)
  for (std::int64_t si = 0; si < count; ++si) {
    const auto i = static_cast<std::size_t>(si);
    // Boundaries expired strictly before token i form a prefix.
    std::size_t k = static_cast<std::size_t>(
        std::partition_point(expire_at.begin(), expire_at.end(), [i](std::size_t e) { return e < i; }) -
        expire_at.begin());
    while (k < m && consume_at[k] <= i) ++k;
    offsets[i] = k < m ? std::clamp<Millis>(b[k] - time[i], 0, cap) : cap;
  }
  return offsets;
}

std::vector<double> offsets_for_sequence_s(std::span<const Token> tokens, const BoundaryList& boundaries,
                                           const SchedulerParams& params) {
  auto ms = offsets_for_sequence(tokens, boundaries, params);
  std::vector<double> out(ms.size());
  std::transform(ms.begin(), ms.end(), out.begin(), ms_to_seconds);
  return out;
}

std::vector<Millis> stepwise_offsets_ms(std::span<const Token> tokens, const BoundaryList& boundaries,
                                        const SchedulerParams& params) {
  GeneratorState state(BoundaryList::from_millis({boundaries.times_ms().begin(), boundaries.times_ms().end()}));
  state.tokens.reserve(tokens.size());
  state.offsets_ms.reserve(tokens.size());
  for (const auto& t : tokens) scheduler_step(state, t, params);
  return std::move(state.offsets_ms);
}

std::vector<std::vector<Millis>> offsets_for_batch(std::span<const OffsetJob> jobs, const SchedulerParams& params) {
  std::vector<std::vector<Millis>> out(jobs.size());
  const BoundaryList none;
  const auto count = static_cast<std::int64_t>(jobs.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t j = 0; j < count; ++j) {
    const auto& job = jobs[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(j)] = offsets_for_sequence(job.tokens, job.boundaries ? *job.boundaries : none, params);
  }
  return out;
}

BoundaryList chord_boundaries(std::span<const Token> tokens) {
  std::vector<Millis> times;
  Millis cursor = 0;
  for (const auto& t : tokens) {
    if (t.kind == TokenKind::TimeShift) {
      cursor += t.shift_ms;
    } else if (t.kind == TokenKind::Chord && (times.empty() || times.back() != cursor)) {
      times.push_back(cursor);
    }
  }
  return BoundaryList::from_millis(std::move(times));
}

}  // namespace cuesync
