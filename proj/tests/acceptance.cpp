// One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>

#include "cuesync/chords.hpp"
#include "cuesync/event_codec.hpp"
#include "cuesync/generator.hpp"
#include "cuesync/io.hpp"
#include "cuesync/offset_kernels.hpp"
#include "cuesync/pipeline.hpp"
#include "cuesync/reference_model.hpp"
#include "cuesync/scenes.hpp"
#include "support.hpp"

using namespace cuesync;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(const char* name, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s  %-28s %-70s (%.2f s)\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome codec_round_trip() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1001);
  int exact = 0;
  const int n = 600;
  for (int i = 0; i < n; ++i) {
    const auto s = testsupport::random_score(rng);
    if (decode_events(encode_events(s)).score == s) ++exact;
  }
  testsupport::ScoreShape off;
  off.on_grid = false;
  Millis worst = 0;
  for (int i = 0; i < n; ++i) {
    const auto s = testsupport::random_score(rng, off);
    const auto d = decode_events(encode_events(s));
    if (d.score.notes.size() != s.notes.size()) return {false, "off-grid note count changed"};
    // Match each original note to its decoded counterpart by key and order.
    std::map<std::pair<int, int>, std::vector<const NoteEvent*>> a, b;
    for (const auto& x : s.notes) a[{static_cast<int>(x.instrument), x.pitch}].push_back(&x);
    for (const auto& x : d.score.notes) b[{static_cast<int>(x.instrument), x.pitch}].push_back(&x);
    for (auto& [k, v] : a) {
      const auto& w = b[k];
      if (w.size() != v.size()) return {false, "off-grid key count changed"};
      for (std::size_t j = 0; j < v.size(); ++j) {
        worst = std::max({worst, std::abs(v[j]->onset_ms - w[j]->onset_ms), std::abs(v[j]->offset_ms - w[j]->offset_ms)});
      }
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {exact == n && worst <= 4 && secs < 30.0,
          fmt("%d/%d exact on grid, off-grid max error %lld ms, %.2f s", exact, n, static_cast<long long>(worst), secs)};
}

Outcome timeshift_semantics() {
  ScoreTimeline a;
  a.notes.push_back({Instrument::Piano, 60, 0, 800, 80});
  const auto ta = encode_events(a, {.emit_bars = false});
  ScoreTimeline b;
  b.notes.push_back({Instrument::Piano, 60, 0, 8, 80});
  b.notes.push_back({Instrument::Piano, 60, 1808, 1816, 80});
  const auto tb = encode_events(b, {.emit_bars = false});
  const bool ok_a = ta.size() == 5 && ta[3] == Token::time_shift(800);
  const bool ok_b = tb.size() == 10 && tb[5] == Token::time_shift(1000) && tb[6] == Token::time_shift(800) &&
                    tb[7].kind == TokenKind::On;
  return {ok_a && ok_b, fmt("800 ms -> %s; 1800 ms -> %s + %s", to_string(ta[3]).c_str(), to_string(tb[5]).c_str(),
                            to_string(tb[6]).c_str())};
}

Outcome offset_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1003);
  std::uniform_int_distribution<int> xi(1, 250), cap(1, 1000);
  const int n = 2000;
  int equal = 0;
  for (int i = 0; i < n; ++i) {
    testsupport::StreamShape shape;
    shape.max_tokens = 600;
    shape.chord_rate = 0.02 + (i % 5) * 0.04;
    const auto t = testsupport::random_stream(rng, shape);
    const auto b = BoundaryList::from_millis(testsupport::random_boundaries(rng, testsupport::stream_span_ms(t), 20));
    const SchedulerParams p{xi(rng) * 8 + i % 7, cap(rng) * 8, i % 3 != 0};
    if (offsets_for_sequence(t, b, p) == stepwise_offsets_ms(t, b, p)) ++equal;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {equal == n && secs < 60.0, fmt("%d/%d instances identical, %.2f s", equal, n, secs)};
}

Outcome boundary_consumption() {
  std::mt19937_64 rng(1004);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ScriptedChordModel scripted;
  ReferenceModel reference;
  std::size_t s_cons = 0, s_total = 0, s_far = 0, r_cons = 0, r_total = 0;
  const int runs = 120;
  for (int i = 0; i < runs; ++i) {
    // Boundaries as the scene filter would deliver them: at least 4 s apart.
    std::vector<double> cuts;
    for (double t = 0.5 + 3.0 * (u(rng) + 1.0); t < 55.0; t += 4.0 + 4.0 * (u(rng) + 1.0)) cuts.push_back(t);
    const auto kept = filter_boundaries(scene_cuts_from_list(cuts, 60.0), 4.0);
    GenerationRequest req;
    req.va = {u(rng), u(rng)};
    req.boundaries = kept;
    req.duration_s = 60.0;
    req.sampling.seed = static_cast<std::uint64_t>(i);
    req.scheduler = SchedulerParams{1000, 4000, true};
    const auto rs = generate(scripted, req);
    const auto& d = rs.diagnostics;
    s_total += d.consumed_s.size() + d.unmet_s.size();
    s_cons += d.consumed_s.size();
    for (std::size_t k = 0; k < d.consumed_s.size(); ++k) {
      if (std::abs(d.consumed_at_s[k] - d.consumed_s[k]) >= 1.0) ++s_far;
    }
    const auto rr = generate(reference, req);
    r_total += rr.boundaries.size();
    r_cons += rr.diagnostics.consumed_s.size();
  }
  const double s_rate = s_total ? static_cast<double>(s_cons) / static_cast<double>(s_total) : 1.0;
  const double r_rate = r_total ? static_cast<double>(r_cons) / static_cast<double>(r_total) : 1.0;
  return {s_rate == 1.0 && s_far == 0 && r_rate >= 0.8,
          fmt("scripted %zu/%zu (%.1f%%), reference %zu/%zu (%.1f%%, need 80%%), %d runs", s_cons, s_total,
              100 * s_rate, r_cons, r_total, 100 * r_rate, runs)};
}

Outcome emotion_constants() {
  static constexpr double table[6][2] = {{-0.51, 0.59}, {-0.60, 0.35}, {-0.64, 0.60},
                                         {0.76, 0.48},  {-0.63, -0.27}, {0.40, 0.67}};
  int exact = 0;
  for (std::size_t i = 0; i < 6; ++i) {
    const auto m = mixture_mean(build_mixture(EmotionDistribution::one_hot(kAllEmotions[i]), VATable::standard(), 0.76));
    exact += (*m.valence == table[i][0]) + (*m.arousal == table[i][1]);
  }
  const double coef = scaling_coefficient(VATable::standard(), 0.8);
  const double mx = scale_table(VATable::standard(), 0.8).max_abs_mean();
  return {exact == 12 && std::abs(coef - 0.8 / 0.76) <= 1e-12 && mx == 0.8,
          fmt("%d/12 means exact, coefficient %.15f, scaled max %.17g", exact, coef, mx)};
}

Outcome monte_carlo() {
  const int n = 100000;
  int ok = 0;
  double worst = 0.0;
  const auto table = VATable::standard();
  for (std::size_t i = 0; i < 6; ++i) {
    const auto mix = build_mixture(EmotionDistribution::one_hot(kAllEmotions[i]), table, 0.76);
    VASampler s(mix, 2000 + i);
    double sv = 0, sa = 0, sv2 = 0, sa2 = 0;
    for (int k = 0; k < n; ++k) {
      const auto d = s.draw_unclamped();
      sv += d.value.valence;
      sa += d.value.arousal;
      sv2 += d.value.valence * d.value.valence;
      sa2 += d.value.arousal * d.value.arousal;
    }
    const auto& r = table.rows[i];
    const double mv = sv / n, ma = sa / n;
    const double sdv = std::sqrt(sv2 / n - mv * mv), sda = std::sqrt(sa2 / n - ma * ma);
    const double zs[4] = {std::abs(mv - r.valence_mean) / (r.valence_sd / std::sqrt(n)),
                          std::abs(ma - r.arousal_mean) / (r.arousal_sd / std::sqrt(n)),
                          std::abs(sdv - r.valence_sd) / (r.valence_sd / std::sqrt(n)),
                          std::abs(sda - r.arousal_sd) / (r.arousal_sd / std::sqrt(n))};
    for (double z : zs) {
      worst = std::max(worst, z);
      ok += z <= 3.0;
    }
  }
  return {ok == 24, fmt("%d/24 moments within 3 sigma/sqrt(n), worst %.2f sigma, n = %d", ok, worst, n)};
}

Outcome inverse_map_consistency() {
  int ok = 0;
  const auto t = VATable::standard();
  for (auto metric : {DistanceMetric::Euclidean, DistanceMetric::Mahalanobis, DistanceMetric::Likelihood}) {
    for (std::size_t i = 0; i < 6; ++i) {
      const auto m = mixture_mean(build_mixture(EmotionDistribution::one_hot(kAllEmotions[i]), t, 0.76));
      ok += inverse_map(m, t, metric) == kAllEmotions[i];
    }
  }
  return {ok == 18, fmt("%d/18 (category, metric) pairs recovered", ok)};
}

Outcome scene_filter() {
  const auto ex = filter_boundaries(scene_cuts_from_list({2.0, 4.5, 5.0, 10.0}, 60.0), 4.0).times_s();
  std::mt19937_64 rng(1008);
  std::uniform_int_distribution<int> n(0, 80);
  std::uniform_int_distribution<Millis> t(0, 300000);
  int ok = 0;
  const int trials = 2000;
  for (int i = 0; i < trials; ++i) {
    std::vector<Millis> c;
    for (int k = n(rng); k > 0; --k) c.push_back(t(rng));
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    const auto kept = filter_boundaries_ms(c, 4000);
    bool good = std::includes(c.begin(), c.end(), kept.begin(), kept.end()) && filter_boundaries_ms(kept, 4000) == kept;
    for (std::size_t k = 1; k < kept.size(); ++k) good = good && kept[k] - kept[k - 1] >= 4000;
    ok += good;
  }
  const bool example = ex == std::vector<double>{2.0, 10.0};
  return {example && ok == trials, fmt("example %s, %d/%d random lists satisfy gap/subset/idempotence",
                                       example ? "[2, 10]" : "wrong", ok, trials)};
}

Outcome chord_dropout() {
  std::vector<Token> t;
  for (int i = 0; i < 10000; ++i) {
    t.push_back(Token::chord());
    t.push_back(Token::on(Instrument::Piano, 60));
  }
  const auto out = dropout_chords(t, 0.2, 1009);
  const long kept = std::count(out.begin(), out.end(), Token::chord());
  const long removed = 10000 - kept;
  return {std::abs(removed - 2000) <= 120, fmt("%ld of 10000 removed (2000 +/- 120)", removed)};
}

Outcome assembly_shapes() {
  std::mt19937_64 rng(1010);
  std::uniform_int_distribution<std::size_t> len(0, 2000), half(1, 1024);
  std::uniform_int_distribution<int> coin(0, 1);
  int ok = 0;
  const int trials = 500;
  for (int i = 0; i < trials; ++i) {
    const std::size_t k = len(rng), d = 2 * half(rng);
    ConditioningInputs c;
    if (coin(rng)) c.valence = 0.3;
    if (coin(rng)) c.arousal = -0.3;
    c.offsets_s.assign(k, 1.0);
    const auto a = assemble_input(std::vector<Token>(k, Token::bar()), c, d);
    ok += a.sequence_length == k + 2 && a.offset_half == d / 2 && a.positional_half == d / 2 &&
          a.valence_substituted() == !c.valence && a.arousal_substituted() == !c.arousal;
  }
  return {ok == trials, fmt("%d/%d random (length, d) cases", ok, trials)};
}

Outcome end_to_end_determinism() {
  const auto dir = testsupport::scratch_dir("acceptance_e2e");
  GenerateOptions o;
  o.emotion_file = testsupport::fixture("emotion_mostly_sad.json");
  o.scenes_file = testsupport::fixture("scenes_showinfo.log");
  PipelineConfig c;
  c.seed = 2024;
  cmd_generate(o, c, GenerationOutputs::beside(dir / "a.mid"));
  cmd_generate(o, c, GenerationOutputs::beside(dir / "b.mid"));
  const auto a = read_bytes(dir / "a.tokens");
  const auto b = read_bytes(dir / "b.tokens");
  const bool midi_same = read_bytes(dir / "a.mid") == read_bytes(dir / "b.mid");
  return {a == b && !a.empty() && midi_same,
          fmt("token files %zu bytes, identical: %s; SMF identical: %s", a.size(), a == b ? "yes" : "no",
              midi_same ? "yes" : "no")};
}

}  // namespace

int main() {
  criterion("codec-round-trip", codec_round_trip);
  criterion("timeshift-semantics", timeshift_semantics);
  criterion("offset-oracle-equivalence", offset_equivalence);
  criterion("boundary-consumption", boundary_consumption);
  criterion("emotion-constants", emotion_constants);
  criterion("monte-carlo-moments", monte_carlo);
  criterion("inverse-map-consistency", inverse_map_consistency);
  criterion("scene-filter", scene_filter);
  criterion("chord-dropout-rate", chord_dropout);
  criterion("assembly-shapes", assembly_shapes);
  criterion("end-to-end-determinism", end_to_end_determinism);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
