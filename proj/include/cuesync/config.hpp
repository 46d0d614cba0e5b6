#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "cuesync/boundary.hpp"
#include "cuesync/sampling.hpp"

namespace cuesync {

enum class VAMode { Mean, Sample };

std::string_view va_mode_name(VAMode m);
VAMode va_mode_from_name(std::string_view name);  // throws ArgumentError

/// Every tunable of the pipeline. Serialized as a flat JSON object whose keys
/// are the member names; keys missing from a file keep their defaults.
struct PipelineConfig {
  int resolution_ms = 8;
  int max_shift_ms = 1000;
  bool emit_bars = true;

  double min_gap_s = 4.0;
  double scene_threshold = 0.4;
  double sensitivity_s = 1.0;
  double max_offset_s = 4.0;
  bool expire_missed = true;

  double target_max = 0.8;
  bool scale_sd = true;
  VAMode va_mode = VAMode::Mean;

  double chord_dropout = 0.2;
  int boost_gain = 20;
  int simultaneity_ms = 8;

  double temperature = 1.0;
  std::size_t top_k = 32;
  std::uint64_t seed = 0;
  std::string model = "reference";

  /// Scene detector binary; empty falls back to $CUESYNC_FFMPEG, then ffmpeg.
  std::string scene_tool;
  /// Directory that relative output paths are resolved against; empty means
  /// the working directory.
  std::string output_dir;

  /// Throws ArgumentError on non-positive values, a resolution other than the
  /// vocabulary's, or a resolution that does not divide max_shift_ms.
  void validate() const;

  SchedulerParams scheduler() const;
  SamplingParams sampling() const;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

std::string dump_config(const PipelineConfig& config);
/// Throws ParseError on malformed JSON, unknown keys or mistyped values.
PipelineConfig load_config(std::string_view json_text);

}  // namespace cuesync
