#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "cuesync/score.hpp"
#include "cuesync/token.hpp"

namespace cuesync {

inline constexpr double kDefaultSensitivityS = 1.0;
inline constexpr double kDefaultMaxOffsetS = 4.0;

/// Seconds to whole milliseconds, rounding half away from zero.
Millis seconds_to_ms(double seconds);
constexpr double ms_to_seconds(Millis ms) { return static_cast<double>(ms) / 1000.0; }

enum class BoundaryState : std::uint8_t { Pending, Consumed, Expired };

/// Sorted boundary times, each pending until a CHORD consumes it or the
/// cursor passes it by more than the sensitivity window. Times are held as
/// whole milliseconds; state transitions are one-way.
class BoundaryList {
 public:
  BoundaryList() = default;

  /// Throws ArgumentError unless the times are non-negative and strictly
  /// increasing after rounding to milliseconds.
  static BoundaryList from_seconds(std::span<const double> times_s);
  static BoundaryList from_millis(std::vector<Millis> times_ms);

  std::size_t size() const { return times_ms_.size(); }
  bool empty() const { return times_ms_.empty(); }

  std::span<const Millis> times_ms() const { return times_ms_; }
  std::vector<double> times_s() const;
  Millis time_ms(std::size_t i) const { return times_ms_[i]; }
  BoundaryState state(std::size_t i) const { return states_[i]; }
  /// Cursor at which the boundary was consumed or expired.
  std::optional<Millis> resolved_at_ms(std::size_t i) const;
  std::size_t count(BoundaryState s) const;

  /// Both are no-ops unless the boundary is still pending.
  void consume(std::size_t i, Millis cursor_ms);
  void expire(std::size_t i, Millis cursor_ms);

 private:
  std::vector<Millis> times_ms_;
  std::vector<BoundaryState> states_;
  std::vector<Millis> resolved_at_;
};

struct SchedulerParams {
  /// Window ξ: a CHORD consumes boundaries strictly closer than this.
  Millis sensitivity_ms = 1000;
  /// Cap δ_max on reported offsets.
  Millis max_offset_ms = 4000;
  /// Retire boundaries the cursor has passed by more than ξ.
  bool expire_missed = true;

  static SchedulerParams from_seconds(double sensitivity_s, double max_offset_s, bool expire_missed = true);
  double sensitivity_s() const { return ms_to_seconds(sensitivity_ms); }
  double max_offset_s() const { return ms_to_seconds(max_offset_ms); }
  /// Throws ArgumentError unless both durations are positive.
  void validate() const;
};

/// Mutable state of one generation session. offsets_ms[i] belongs to
/// tokens[i]; cursor_ms is the sum of all TIMESHIFT values in tokens.
struct GeneratorState {
  Millis cursor_ms = 0;
  std::vector<Token> tokens;
  std::vector<Millis> offsets_ms;
  BoundaryList boundaries;

  GeneratorState() = default;
  explicit GeneratorState(BoundaryList b) : boundaries(std::move(b)) {}

  double cursor_s() const { return ms_to_seconds(cursor_ms); }
  std::vector<double> offsets_s() const;
};

/// clamp(min over pending b of (b - cursor), 0, δ_max); δ_max when nothing is
/// pending.
Millis next_offset_ms(const GeneratorState& state, const SchedulerParams& params);
inline double next_offset(const GeneratorState& state, const SchedulerParams& params) {
  return ms_to_seconds(next_offset_ms(state, params));
}

/// Advances the cursor on TIMESHIFT; on CHORD consumes every pending boundary
/// b with |cursor - b| < ξ. Then appends the token and its offset.
void on_token(GeneratorState& state, const Token& token, const SchedulerParams& params);

/// Expires every pending boundary with cursor - b > ξ; returns their indices.
std::vector<std::size_t> expire_missed(GeneratorState& state, const SchedulerParams& params);

/// One scheduler step as run during generation: on_token, then expire_missed
/// when params.expire_missed is set.
void scheduler_step(GeneratorState& state, const Token& token, const SchedulerParams& params);

/// One decimal number of seconds per line; blank lines and '#' comments are
/// ignored. Values are returned sorted and de-duplicated.
std::vector<double> read_seconds_list(std::istream& in);
void write_seconds_list(std::ostream& out, std::span<const double> seconds);
void write_boundary_list(std::ostream& out, const BoundaryList& boundaries);

}  // namespace cuesync
