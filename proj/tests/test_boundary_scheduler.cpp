#include <algorithm>
#include <limits>
#include <sstream>

#include <doctest.h>

#include "cuesync/boundary.hpp"
#include "cuesync/error.hpp"
#include "cuesync/offset_kernels.hpp"
#include "support.hpp"

using namespace cuesync;

namespace {

const SchedulerParams kParams{1000, 4000, true};

// Literal scheduler: boundaries replaced by +inf once consumed or expired.
std::vector<Millis> naive_offsets(const std::vector<Token>& tokens, std::vector<Millis> b, const SchedulerParams& p) {
  constexpr Millis inf = std::numeric_limits<Millis>::max();
  std::vector<Millis> out;
  Millis c = 0;
  for (const auto& t : tokens) {
    if (t.kind == TokenKind::TimeShift) c += t.shift_ms;
    if (t.kind == TokenKind::Chord) {
      for (auto& x : b) {
        if (x != inf && std::abs(c - x) < p.sensitivity_ms) x = inf;
      }
    }
    Millis m = inf;
    for (Millis x : b) {
      if (x != inf) m = std::min(m, x - c);
    }
    out.push_back(m == inf ? p.max_offset_ms : std::clamp<Millis>(m, 0, p.max_offset_ms));
    if (p.expire_missed) {
      for (auto& x : b) {
        if (x != inf && c - x > p.sensitivity_ms) x = inf;
      }
    }
  }
  return out;
}

GeneratorState state_at(Millis cursor, std::vector<Millis> boundaries) {
  GeneratorState s(BoundaryList::from_millis(std::move(boundaries)));
  s.cursor_ms = cursor;
  return s;
}

}  // namespace

TEST_SUITE("boundary_scheduler") {
  TEST_CASE("next offset is the capped distance to the nearest pending boundary") {
    CHECK(next_offset(state_at(4500, {5000}), kParams) == doctest::Approx(0.5));
    CHECK(next_offset_ms(state_at(4500, {5000}), kParams) == 500);
    CHECK(next_offset(state_at(0, {5000}), kParams) == doctest::Approx(4.0));
    CHECK(next_offset(state_at(0, {}), kParams) == doctest::Approx(4.0));
    CHECK(next_offset_ms(state_at(5400, {5000}), kParams) == 0);
  }

  TEST_CASE("CHORD inside the window consumes, outside does not") {
    auto s = state_at(4600, {5000});
    on_token(s, Token::chord(), kParams);
    CHECK(s.boundaries.state(0) == BoundaryState::Consumed);
    CHECK(s.boundaries.resolved_at_ms(0) == 4600);
    CHECK(s.offsets_ms.back() == 4000);

    auto far = state_at(2000, {5000});
    on_token(far, Token::chord(), kParams);
    CHECK(far.boundaries.state(0) == BoundaryState::Pending);
    CHECK(far.offsets_ms.back() == 3000);

    auto edge = state_at(4000, {5000});
    on_token(edge, Token::chord(), kParams);
    CHECK(edge.boundaries.state(0) == BoundaryState::Pending);
  }

  TEST_CASE("TIMESHIFT advances the cursor") {
    auto s = state_at(1000, {});
    on_token(s, Token::time_shift(800), kParams);
    CHECK(s.cursor_ms == 1800);
    CHECK(s.cursor_s() == doctest::Approx(1.8));
    CHECK(s.tokens.size() == 1);
    CHECK(s.offsets_ms.size() == 1);
  }

  TEST_CASE("missed boundaries expire after the window") {
    auto s = state_at(7000, {5000});
    CHECK(expire_missed(s, kParams) == std::vector<std::size_t>{0});
    CHECK(s.boundaries.state(0) == BoundaryState::Expired);
    CHECK(next_offset_ms(s, kParams) == 4000);

    auto near = state_at(5500, {5000});
    CHECK(expire_missed(near, kParams).empty());
    CHECK(near.boundaries.state(0) == BoundaryState::Pending);

    auto exact = state_at(6000, {5000});
    CHECK(expire_missed(exact, kParams).empty());

    auto none = state_at(7000, {});
    CHECK(expire_missed(none, kParams).empty());
    CHECK(none.cursor_ms == 7000);
  }

  TEST_CASE("state transitions are one-way") {
    auto b = BoundaryList::from_millis({1000, 2000});
    b.consume(0, 900);
    b.expire(0, 3000);
    CHECK(b.state(0) == BoundaryState::Consumed);
    CHECK(b.resolved_at_ms(0) == 900);
    b.expire(1, 3100);
    b.consume(1, 3200);
    CHECK(b.state(1) == BoundaryState::Expired);
    CHECK(b.resolved_at_ms(1) == 3100);
    CHECK(b.count(BoundaryState::Pending) == 0);
  }

  TEST_CASE("boundary list validation") {
    CHECK_THROWS_AS(BoundaryList::from_seconds(std::vector<double>{2.0, 1.0}), ArgumentError);
    CHECK_THROWS_AS(BoundaryList::from_seconds(std::vector<double>{-1.0}), ArgumentError);
    CHECK_THROWS_AS(BoundaryList::from_seconds(std::vector<double>{1.0, 1.0004}), ArgumentError);
    CHECK(BoundaryList::from_seconds(std::vector<double>{0.0, 2.5}).times_ms()[1] == 2500);
    CHECK(seconds_to_ms(1.0005) == 1001);
    CHECK_THROWS_AS((SchedulerParams{0, 4000, true}.validate()), ArgumentError);
    CHECK_THROWS_AS((SchedulerParams{1000, 0, true}.validate()), ArgumentError);
  }

  TEST_CASE("no chords and no boundaries gives delta max everywhere") {
    const std::vector<Token> t{Token::start(), Token::time_shift(1000), Token::on(Instrument::Piano, 60),
                               Token::time_shift(8)};
    const auto o = offsets_for_sequence(t, BoundaryList{}, kParams);
    CHECK(o == std::vector<Millis>(t.size(), 4000));
  }

  TEST_CASE("a CHORD on its boundary: zero up to it, next boundary from it") {
    const std::vector<Token> t{Token::start(), Token::time_shift(1000), Token::time_shift(1000), Token::chord(),
                               Token::on(Instrument::Piano, 60)};
    const auto b = chord_boundaries(t);
    REQUIRE(b.size() == 1);
    CHECK(b.time_ms(0) == 2000);
    const auto o = offsets_for_sequence(t, BoundaryList::from_seconds(std::vector<double>{2.0}), kParams);
    CHECK(o == std::vector<Millis>{2000, 1000, 0, 4000, 4000});
    const auto pre = offsets_for_sequence(t, b, kParams);
    CHECK(pre == o);
    const auto secs = offsets_for_sequence_s(t, b, kParams);
    CHECK(secs[2] == 0.0);
  }

  TEST_CASE("kernel, stepwise fold and literal scheduler agree on random streams") {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> xi_steps(1, 250);
    std::uniform_int_distribution<int> cap_steps(1, 1000);
    for (int i = 0; i < 1500; ++i) {
      testsupport::StreamShape shape;
      shape.chord_rate = (i % 5) * 0.04;
      const auto tokens = testsupport::random_stream(rng, shape);
      const auto bms = testsupport::random_boundaries(rng, testsupport::stream_span_ms(tokens));
      const auto b = BoundaryList::from_millis(bms);
      SchedulerParams p{xi_steps(rng) * 8 + (i % 3), cap_steps(rng) * 8, i % 4 != 0};
      const auto want = naive_offsets(tokens, bms, p);
      CAPTURE(i);
      REQUIRE(stepwise_offsets_ms(tokens, b, p) == want);
      REQUIRE(offsets_for_sequence(tokens, b, p) == want);
    }
  }

  TEST_CASE("batch kernel matches per-sequence results") {
    std::mt19937_64 rng(32);
    std::vector<std::vector<Token>> streams;
    std::vector<BoundaryList> lists;
    for (int i = 0; i < 64; ++i) {
      streams.push_back(testsupport::random_stream(rng));
      lists.push_back(BoundaryList::from_millis(
          testsupport::random_boundaries(rng, testsupport::stream_span_ms(streams.back()))));
    }
    std::vector<OffsetJob> jobs;
    for (std::size_t i = 0; i < streams.size(); ++i) jobs.push_back({streams[i], &lists[i]});
    const auto out = offsets_for_batch(jobs, kParams);
    REQUIRE(out.size() == jobs.size());
    for (std::size_t i = 0; i < jobs.size(); ++i) CHECK(out[i] == stepwise_offsets_ms(streams[i], lists[i], kParams));
  }

  TEST_CASE("scheduler invariants hold along random streams") {
    std::mt19937_64 rng(33);
    for (int i = 0; i < 300; ++i) {
      const auto tokens = testsupport::random_stream(rng);
      GeneratorState s(
          BoundaryList::from_millis(testsupport::random_boundaries(rng, testsupport::stream_span_ms(tokens))));
      std::vector<BoundaryState> prev(s.boundaries.size(), BoundaryState::Pending);
      Millis last_offset = kParams.max_offset_ms;
      for (const auto& t : tokens) {
        scheduler_step(s, t, kParams);
        const Millis o = s.offsets_ms.back();
        CHECK(o >= 0);
        CHECK(o <= kParams.max_offset_ms);
        const std::size_t settled_after =
            s.boundaries.count(BoundaryState::Consumed) + s.boundaries.count(BoundaryState::Expired);
        // Offsets only rise once some boundary has been retired.
        if (o > last_offset) CHECK(settled_after > 0);
        for (std::size_t k = 0; k < prev.size(); ++k) {
          if (prev[k] != BoundaryState::Pending) CHECK(s.boundaries.state(k) == prev[k]);
          prev[k] = s.boundaries.state(k);
          if (s.boundaries.state(k) == BoundaryState::Consumed) {
            CHECK(std::abs(*s.boundaries.resolved_at_ms(k) - s.boundaries.time_ms(k)) < kParams.sensitivity_ms);
          }
        }
        last_offset = o;
      }
      CHECK(s.tokens == tokens);
      CHECK(s.offsets_ms.size() == tokens.size());
      CHECK(s.cursor_ms == testsupport::stream_span_ms(tokens));
    }
  }

  TEST_CASE("seconds list format") {
    std::istringstream in("# cuts\n12.0\n5\n\n5.0\n");
    CHECK(read_seconds_list(in) == std::vector<double>{5.0, 12.0});
    std::istringstream bad("1.0\nabc\n");
    CHECK_THROWS_AS(read_seconds_list(bad), ParseError);
    std::ostringstream out;
    write_seconds_list(out, std::vector<double>{0.5, 2.0});
    std::istringstream back(out.str());
    CHECK(read_seconds_list(back) == std::vector<double>{0.5, 2.0});
  }
}
