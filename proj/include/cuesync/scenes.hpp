#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "cuesync/boundary.hpp"

namespace cuesync {

inline constexpr double kDefaultMinGapS = 4.0;
inline constexpr double kDefaultSceneThreshold = 0.4;
/// Environment variable naming the ffmpeg binary used for scene detection.
inline constexpr const char* kSceneToolEnv = "CUESYNC_FFMPEG";

/// Scene cut times of one video, strictly increasing and below the duration.
struct SceneCuts {
  std::vector<double> cut_times_s;
  double video_duration_s = 0.0;
};

struct SceneLogDiagnostics {
  std::size_t records = 0;
  std::size_t malformed_records = 0;
  std::size_t duplicates = 0;
  std::size_t beyond_duration = 0;
};

/// Parses ffmpeg stderr output. Recognised records:
///
///   [Parsed_showinfo_1 @ 0x...] n: 3 pts: 76800 pts_time:3.2 ...   (select+showinfo)
///   [scdet @ 0x...] lavfi.scd.score: 10.525, lavfi.scd.time: 45.167  (scdet)
///   Duration: 00:00:30.00, start: 0.000000, bitrate: ...            (input banner)
///
/// Other lines are ignored. A record whose number does not parse is skipped
/// and counted. Cuts are sorted and de-duplicated; cuts at or past the
/// duration are dropped. Throws ParseError when no Duration line is present.
SceneCuts parse_scene_log(std::string_view text, SceneLogDiagnostics* diagnostics = nullptr);

/// Builds validated cuts from a plain list of seconds and a known duration.
SceneCuts scene_cuts_from_list(std::vector<double> seconds, double video_duration_s);

/// Greedy left-to-right difference filter: keeps the first cut, then each
/// cut at least `min_gap_s` after the last kept one. Comparison happens on
/// whole milliseconds, so a gap of exactly min_gap_s survives.
BoundaryList filter_boundaries(const SceneCuts& cuts, double min_gap_s = kDefaultMinGapS);
std::vector<Millis> filter_boundaries_ms(std::span<const Millis> sorted_cuts_ms, Millis min_gap_ms);

/// Shell command running ffmpeg's scene score select filter over a video.
std::string scene_detect_command(const std::string& tool, const std::string& video_path,
                                 double threshold = kDefaultSceneThreshold);

/// Runs the command above as a subprocess and parses its log. `tool` empty
/// means $CUESYNC_FFMPEG, falling back to "ffmpeg" on PATH. Throws IoError
/// if the process cannot be started or exits non-zero.
SceneCuts detect_scenes(const std::string& video_path, double threshold = kDefaultSceneThreshold,
                        std::string tool = {});

}  // namespace cuesync
