#include <algorithm>
#include <fstream>

#include <doctest.h>

#include "cuesync/error.hpp"
#include "cuesync/io.hpp"
#include "cuesync/scenes.hpp"
#include "support.hpp"

using namespace cuesync;
using testsupport::fixture;

namespace {

std::vector<double> filtered(std::vector<double> cuts, double gap = 4.0) {
  return filter_boundaries(scene_cuts_from_list(std::move(cuts), 1000.0), gap).times_s();
}

}  // namespace

TEST_SUITE("scene_ingest") {
  TEST_CASE("showinfo log yields sorted unique cuts and the duration") {
    SceneLogDiagnostics d;
    const auto cuts = parse_scene_log(read_text(fixture("scenes_showinfo.log")), &d);
    CHECK(cuts.video_duration_s == doctest::Approx(30.0));
    CHECK(cuts.cut_times_s == std::vector<double>{3.2, 9.7, 13.0, 22.0});
    CHECK(d.records == 5);
    CHECK(d.duplicates == 1);
    CHECK(d.malformed_records == 0);
  }

  TEST_CASE("scdet log with a malformed record") {
    SceneLogDiagnostics d;
    const auto cuts = parse_scene_log(read_text(fixture("scenes_scdet.log")), &d);
    CHECK(cuts.video_duration_s == doctest::Approx(60.5));
    CHECK(cuts.cut_times_s == std::vector<double>{2.0, 4.5, 5.0, 10.0});
    CHECK(d.malformed_records == 1);
    CHECK(filter_boundaries(cuts).times_s() == std::vector<double>{2.0, 10.0});
  }

  TEST_CASE("log without cuts and log without duration") {
    const auto cuts = parse_scene_log(read_text(fixture("scenes_no_cuts.log")));
    CHECK(cuts.cut_times_s.empty());
    CHECK(cuts.video_duration_s == doctest::Approx(12.48));
    CHECK_THROWS_AS(parse_scene_log(read_text(fixture("scenes_no_duration.log"))), ParseError);
  }

  TEST_CASE("cuts at or past the duration are dropped") {
    SceneLogDiagnostics d;
    const auto cuts = parse_scene_log(
        "  Duration: 00:00:10.00, start: 0.000000\n"
        "[Parsed_showinfo_1 @ 0x1] n: 0 pts: 1 pts_time:4\n"
        "[Parsed_showinfo_1 @ 0x1] n: 1 pts: 2 pts_time:10\n"
        "[Parsed_showinfo_1 @ 0x1] n: 2 pts: 3 pts_time:12.5\n",
        &d);
    CHECK(cuts.cut_times_s == std::vector<double>{4.0});
    CHECK(d.beyond_duration == 2);
  }

  TEST_CASE("difference filter examples") {
    CHECK(filtered({2.0, 4.5, 5.0, 10.0}) == std::vector<double>{2.0, 10.0});
    CHECK(filtered({}).empty());
    CHECK(filtered({0.0, 4.0}) == std::vector<double>{0.0, 4.0});
    CHECK(filtered({0.0, 3.999}) == std::vector<double>{0.0});
    CHECK(filtered({1.0, 3.0, 5.5, 7.0, 9.6}) == std::vector<double>{1.0, 5.5, 9.6});
    CHECK_THROWS_AS(filtered({1.0}, 0.0), ArgumentError);
  }

  TEST_CASE("plain lists are validated") {
    CHECK_THROWS_AS(scene_cuts_from_list({1.0}, 0.0), ArgumentError);
    CHECK_THROWS_AS(scene_cuts_from_list({-1.0}, 10.0), ArgumentError);
    const auto c = scene_cuts_from_list({5.0, 1.0, 5.0, 12.0}, 10.0);
    CHECK(c.cut_times_s == std::vector<double>{1.0, 5.0});
  }

  TEST_CASE("filter properties on random cut lists") {
    std::mt19937_64 rng(51);
    std::uniform_int_distribution<int> n(0, 60);
    std::uniform_int_distribution<Millis> t(0, 120000);
    std::uniform_int_distribution<Millis> gap(1, 8000);
    for (int i = 0; i < 500; ++i) {
      std::vector<Millis> cuts;
      const int k = n(rng);
      for (int j = 0; j < k; ++j) cuts.push_back(t(rng));
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
      const Millis g = i % 2 ? 4000 : gap(rng);
      const auto kept = filter_boundaries_ms(cuts, g);
      for (std::size_t j = 1; j < kept.size(); ++j) CHECK(kept[j] - kept[j - 1] >= g);
      CHECK(std::includes(cuts.begin(), cuts.end(), kept.begin(), kept.end()));
      CHECK(filter_boundaries_ms(kept, g) == kept);
      if (!cuts.empty()) CHECK(kept.front() == cuts.front());
      // Every dropped cut lies within the gap after some kept cut.
      for (Millis c : cuts) {
        const bool covered = std::any_of(kept.begin(), kept.end(), [&](Millis x) { return c >= x && c - x < g; });
        CHECK(covered);
      }
    }
  }

  TEST_CASE("seconds filter agrees with the millisecond filter") {
    std::mt19937_64 rng(52);
    std::uniform_real_distribution<double> t(0.0, 60.0);
    for (int i = 0; i < 200; ++i) {
      std::vector<double> s;
      for (int j = 0; j < 20; ++j) s.push_back(t(rng));
      const auto cuts = scene_cuts_from_list(s, 61.0);
      std::vector<Millis> ms;
      for (double x : cuts.cut_times_s) ms.push_back(seconds_to_ms(x));
      std::sort(ms.begin(), ms.end());
      ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
      const auto b = filter_boundaries(cuts, 4.0);
      const auto want = filter_boundaries_ms(ms, 4000);
      CHECK(std::vector<Millis>(b.times_ms().begin(), b.times_ms().end()) == want);
    }
  }

  TEST_CASE("scene detector runs an external tool and parses its output") {
    const auto dir = testsupport::scratch_dir("scene_tool");
    const auto tool = dir / "fake-ffmpeg";
    {
      std::ofstream f(tool);
      f << "#!/bin/sh\ncat '" << fixture("scenes_showinfo.log").string() << "' >&2\n";
    }
    std::filesystem::permissions(tool, std::filesystem::perms::owner_all);
    const auto cuts = detect_scenes("clip.mp4", 0.4, tool.string());
    CHECK(cuts.cut_times_s.size() == 4);
    CHECK(scene_detect_command("ffmpeg", "my clip.mp4", 0.4).find("'my clip.mp4'") != std::string::npos);
    CHECK(scene_detect_command("ffmpeg", "a.mp4", 0.4).find("gt(scene,0.400)") != std::string::npos);
    CHECK_THROWS_AS(detect_scenes("clip.mp4", 0.4, (dir / "missing-tool").string()), IoError);
  }
}
