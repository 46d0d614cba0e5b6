#include "cuesync/boundary.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

#include "cuesync/error.hpp"

namespace cuesync {

namespace {
constexpr Millis kUnresolved = -1;
}

Millis seconds_to_ms(double seconds) {
  if (!std::isfinite(seconds)) throw ArgumentError("non-finite time value");
  return static_cast<Millis>(std::llround(seconds * 1000.0));
}

BoundaryList BoundaryList::from_seconds(std::span<const double> times_s) {
  std::vector<Millis> ms;
  ms.reserve(times_s.size());
  for (double s : times_s) ms.push_back(seconds_to_ms(s));
  return from_millis(std::move(ms));
}

BoundaryList BoundaryList::from_millis(std::vector<Millis> times_ms) {
  for (std::size_t i = 0; i < times_ms.size(); ++i) {
    if (times_ms[i] < 0) throw ArgumentError("boundary times must be non-negative");
    if (i > 0 && times_ms[i] <= times_ms[i - 1]) {
      throw ArgumentError("boundary times must be strictly increasing (at index " + std::to_string(i) + ")");
    }
  }
  BoundaryList list;
  list.states_.assign(times_ms.size(), BoundaryState::Pending);
  list.resolved_at_.assign(times_ms.size(), kUnresolved);
  list.times_ms_ = std::move(times_ms);
  return list;
}

std::vector<double> BoundaryList::times_s() const {
  std::vector<double> out;
  out.reserve(times_ms_.size());
  for (Millis t : times_ms_) out.push_back(ms_to_seconds(t));
  return out;
}

std::optional<Millis> BoundaryList::resolved_at_ms(std::size_t i) const {
  if (resolved_at_[i] == kUnresolved) return std::nullopt;
  return resolved_at_[i];
}

std::size_t BoundaryList::count(BoundaryState s) const {
  return static_cast<std::size_t>(std::count(states_.begin(), states_.end(), s));
}

void BoundaryList::consume(std::size_t i, Millis cursor_ms) {
  if (states_[i] != BoundaryState::Pending) return;
  states_[i] = BoundaryState::Consumed;
  resolved_at_[i] = cursor_ms;
}

void BoundaryList::expire(std::size_t i, Millis cursor_ms) {
  if (states_[i] != BoundaryState::Pending) return;
  states_[i] = BoundaryState::Expired;
  resolved_at_[i] = cursor_ms;
}

SchedulerParams SchedulerParams::from_seconds(double sensitivity_s, double max_offset_s, bool expire_missed) {
  SchedulerParams p{seconds_to_ms(sensitivity_s), seconds_to_ms(max_offset_s), expire_missed};
  p.validate();
  return p;
}

void SchedulerParams::validate() const {
  if (sensitivity_ms <= 0) throw ArgumentError("sensitivity must be positive");
  if (max_offset_ms <= 0) throw ArgumentError("maximum offset must be positive");
}

std::vector<double> GeneratorState::offsets_s() const {
  std::vector<double> out;
  out.reserve(offsets_ms.size());
  for (Millis o : offsets_ms) out.push_back(ms_to_seconds(o));
  return out;
}

Millis next_offset_ms(const GeneratorState& state, const SchedulerParams& params) {
  const auto& b = state.boundaries;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b.state(i) == BoundaryState::Pending) {
      // Sorted times: the first pending boundary minimises b - c.
      return std::clamp<Millis>(b.time_ms(i) - state.cursor_ms, 0, params.max_offset_ms);
    }
  }
  return params.max_offset_ms;
}

void on_token(GeneratorState& state, const Token& token, const SchedulerParams& params) {
  if (token.kind == TokenKind::TimeShift) {
    state.cursor_ms += token.shift_ms;
  } else if (token.kind == TokenKind::Chord) {
    auto& b = state.boundaries;
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (b.state(i) == BoundaryState::Pending && std::abs(state.cursor_ms - b.time_ms(i)) < params.sensitivity_ms) {
        b.consume(i, state.cursor_ms);
      }
    }
  }
  state.offsets_ms.push_back(next_offset_ms(state, params));
  state.tokens.push_back(token);
}

std::vector<std::size_t> expire_missed(GeneratorState& state, const SchedulerParams& params) {
  std::vector<std::size_t> expired;
  auto& b = state.boundaries;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b.state(i) == BoundaryState::Pending && state.cursor_ms - b.time_ms(i) > params.sensitivity_ms) {
      b.expire(i, state.cursor_ms);
      expired.push_back(i);
    }
  }
  return expired;
}

void scheduler_step(GeneratorState& state, const Token& token, const SchedulerParams& params) {
  on_token(state, token, params);
  if (params.expire_missed) expire_missed(state, params);
}

std::vector<double> read_seconds_list(std::istream& in) {
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    auto last = line.find_last_not_of(" \t\r");
    std::string_view text(line.data() + first, last - first + 1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v) || v < 0.0) {
      throw ParseError("line " + std::to_string(line_no) + ": expected non-negative seconds, got '" +
                       std::string(text) + "'");
    }
    values.push_back(v);
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

void write_seconds_list(std::ostream& out, std::span<const double> seconds) {
  char buf[32];
  for (double s : seconds) {
    std::snprintf(buf, sizeof buf, "%.3f\n", s);
    out << buf;
  }
}

void write_boundary_list(std::ostream& out, const BoundaryList& boundaries) {
  auto s = boundaries.times_s();
  write_seconds_list(out, s);
}

}  // namespace cuesync
