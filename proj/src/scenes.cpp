#include "cuesync/scenes.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <sstream>

#include "cuesync/error.hpp"

namespace cuesync {

namespace {

std::optional<double> leading_number(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr == s.data() || !std::isfinite(v)) return std::nullopt;
  return v;
}

// "HH:MM:SS.ss" -> seconds.
std::optional<double> parse_clock(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  int h = 0, m = 0;
  auto r1 = std::from_chars(s.data(), s.data() + s.size(), h);
  if (r1.ec != std::errc{} || r1.ptr == s.data() + s.size() || *r1.ptr != ':') return std::nullopt;
  const char* p = r1.ptr + 1;
  auto r2 = std::from_chars(p, s.data() + s.size(), m);
  if (r2.ec != std::errc{} || r2.ptr == s.data() + s.size() || *r2.ptr != ':') return std::nullopt;
  auto sec = leading_number(std::string_view(r2.ptr + 1, s.data() + s.size()));
  if (!sec || h < 0 || m < 0 || m >= 60) return std::nullopt;
  return h * 3600.0 + m * 60.0 + *sec;
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

SceneCuts finish(std::vector<double> cuts, double duration, SceneLogDiagnostics& diag) {
  std::sort(cuts.begin(), cuts.end());
  auto last = std::unique(cuts.begin(), cuts.end());
  diag.duplicates += static_cast<std::size_t>(cuts.end() - last);
  cuts.erase(last, cuts.end());
  auto past = std::lower_bound(cuts.begin(), cuts.end(), duration);
  diag.beyond_duration += static_cast<std::size_t>(cuts.end() - past);
  cuts.erase(past, cuts.end());
  return {std::move(cuts), duration};
}

}  // namespace

SceneCuts parse_scene_log(std::string_view text, SceneLogDiagnostics* diagnostics) {
  SceneLogDiagnostics diag;
  std::vector<double> cuts;
  std::optional<double> duration;

  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    std::string_view l(line);
    if (auto pos = l.find("Duration:"); pos != std::string_view::npos && !duration) {
      auto d = parse_clock(l.substr(pos + 9));
      if (d && *d > 0.0) {
        duration = d;
      } else if (l.substr(pos + 9).find("N/A") == std::string_view::npos) {
        ++diag.malformed_records;
      }
      continue;
    }
    std::optional<std::size_t> value_at;
    if (l.find("showinfo") != std::string_view::npos) {
      if (auto pos = l.find("pts_time:"); pos != std::string_view::npos) value_at = pos + 9;
    } else if (auto pos = l.find("lavfi.scd.time:"); pos != std::string_view::npos) {
      value_at = pos + 15;
    }
    if (!value_at) continue;
    ++diag.records;
    auto v = leading_number(l.substr(*value_at));
    if (!v || *v < 0.0) {
      ++diag.malformed_records;
      continue;
    }
    cuts.push_back(*v);
  }
  if (!duration) throw ParseError("scene log has no Duration record");
  auto result = finish(std::move(cuts), *duration, diag);
  if (diagnostics) *diagnostics = diag;
  return result;
}

SceneCuts scene_cuts_from_list(std::vector<double> seconds, double video_duration_s) {
  if (!(video_duration_s > 0.0) || !std::isfinite(video_duration_s)) {
    throw ArgumentError("video duration must be positive");
  }
  for (double s : seconds) {
    if (!std::isfinite(s) || s < 0.0) throw ArgumentError("scene cut times must be non-negative");
  }
  SceneLogDiagnostics unused;
  return finish(std::move(seconds), video_duration_s, unused);
}

std::vector<Millis> filter_boundaries_ms(std::span<const Millis> sorted_cuts_ms, Millis min_gap_ms) {
  if (min_gap_ms <= 0) throw ArgumentError("minimum gap must be positive");
  std::vector<Millis> kept;
  for (Millis c : sorted_cuts_ms) {
    if (kept.empty() || c - kept.back() >= min_gap_ms) kept.push_back(c);
  }
  return kept;
}

BoundaryList filter_boundaries(const SceneCuts& cuts, double min_gap_s) {
  std::vector<Millis> ms;
  ms.reserve(cuts.cut_times_s.size());
  for (double s : cuts.cut_times_s) ms.push_back(seconds_to_ms(s));
  std::sort(ms.begin(), ms.end());
  return BoundaryList::from_millis(filter_boundaries_ms(ms, seconds_to_ms(min_gap_s)));
}

std::string scene_detect_command(const std::string& tool, const std::string& video_path, double threshold) {
  char select[64];
  std::snprintf(select, sizeof select, "select='gt(scene,%.3f)',showinfo", threshold);
  return shell_quote(tool) + " -hide_banner -nostats -i " + shell_quote(video_path) + " -vf " +
         shell_quote(select) + " -an -f null - 2>&1";
}

SceneCuts detect_scenes(const std::string& video_path, double threshold, std::string tool) {
  if (tool.empty()) {
    const char* env = std::getenv(kSceneToolEnv);
    tool = env && *env ? env : "ffmpeg";
  }
  const std::string cmd = scene_detect_command(tool, video_path, threshold);
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) throw IoError("cannot start scene detector '" + tool + "'");
  std::string output;
  std::array<char, 4096> buf;
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) output.append(buf.data(), n);
  int status = pclose(pipe);
  if (status != 0) {
    throw IoError("scene detector '" + tool + "' failed with status " + std::to_string(status));
  }
  return parse_scene_log(output);
}

}  // namespace cuesync
