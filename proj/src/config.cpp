#include "cuesync/config.hpp"

#include <json.hpp>

#include "cuesync/error.hpp"
#include "cuesync/token.hpp"

namespace cuesync {

namespace {

using nlohmann::json;

template <class T>
void read_field(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(std::string("config field '") + key + "' has the wrong type");
  }
}

}  // namespace

std::string_view va_mode_name(VAMode m) { return m == VAMode::Mean ? "mean" : "sample"; }

VAMode va_mode_from_name(std::string_view name) {
  if (name == "mean") return VAMode::Mean;
  if (name == "sample") return VAMode::Sample;
  throw ArgumentError("va mode must be 'mean' or 'sample', got '" + std::string(name) + "'");
}

void PipelineConfig::validate() const {
  if (resolution_ms != kResolutionMs) {
    throw ArgumentError("resolution_ms must be " + std::to_string(kResolutionMs) + " to match the vocabulary");
  }
  if (max_shift_ms != kMaxShiftMs) {
    throw ArgumentError("max_shift_ms must be " + std::to_string(kMaxShiftMs) + " to match the vocabulary");
  }
  if (max_shift_ms % resolution_ms != 0) throw ArgumentError("resolution_ms must divide max_shift_ms");
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw ArgumentError(std::string(name) + " must be positive");
  };
  positive(min_gap_s, "min_gap_s");
  positive(scene_threshold, "scene_threshold");
  positive(sensitivity_s, "sensitivity_s");
  positive(max_offset_s, "max_offset_s");
  positive(target_max, "target_max");
  if (target_max > 1.0) throw ArgumentError("target_max must not exceed 1");
  if (chord_dropout < 0.0 || chord_dropout > 1.0) throw ArgumentError("chord_dropout must lie in [0, 1]");
  if (boost_gain < 0) throw ArgumentError("boost_gain must not be negative");
  positive(simultaneity_ms, "simultaneity_ms");
  positive(temperature, "temperature");
  if (model != "reference" && model != "scripted" && model != "external") {
    throw ArgumentError("model must be reference, scripted or external");
  }
}

SchedulerParams PipelineConfig::scheduler() const {
  return SchedulerParams::from_seconds(sensitivity_s, max_offset_s, expire_missed);
}

SamplingParams PipelineConfig::sampling() const {
  SamplingParams p;
  p.temperature = temperature;
  p.top_k = top_k;
  p.seed = seed;
  return p;
}

std::string dump_config(const PipelineConfig& c) {
  json j = {
      {"resolution_ms", c.resolution_ms},
      {"max_shift_ms", c.max_shift_ms},
      {"emit_bars", c.emit_bars},
      {"min_gap_s", c.min_gap_s},
      {"scene_threshold", c.scene_threshold},
      {"sensitivity_s", c.sensitivity_s},
      {"max_offset_s", c.max_offset_s},
      {"expire_missed", c.expire_missed},
      {"target_max", c.target_max},
      {"scale_sd", c.scale_sd},
      {"va_mode", std::string(va_mode_name(c.va_mode))},
      {"chord_dropout", c.chord_dropout},
      {"boost_gain", c.boost_gain},
      {"simultaneity_ms", c.simultaneity_ms},
      {"temperature", c.temperature},
      {"top_k", c.top_k},
      {"seed", c.seed},
      {"model", c.model},
      {"scene_tool", c.scene_tool},
      {"output_dir", c.output_dir},
  };
  return j.dump(2) + "\n";
}

PipelineConfig load_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("config must be a JSON object");

  static const json known = json::parse(dump_config(PipelineConfig{}));
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ParseError("unknown config field '" + key + "'");
  }

  PipelineConfig c;
  read_field(j, "resolution_ms", c.resolution_ms);
  read_field(j, "max_shift_ms", c.max_shift_ms);
  read_field(j, "emit_bars", c.emit_bars);
  read_field(j, "min_gap_s", c.min_gap_s);
  read_field(j, "scene_threshold", c.scene_threshold);
  read_field(j, "sensitivity_s", c.sensitivity_s);
  read_field(j, "max_offset_s", c.max_offset_s);
  read_field(j, "expire_missed", c.expire_missed);
  read_field(j, "target_max", c.target_max);
  read_field(j, "scale_sd", c.scale_sd);
  std::string mode(va_mode_name(c.va_mode));
  read_field(j, "va_mode", mode);
  try {
    c.va_mode = va_mode_from_name(mode);
  } catch (const ArgumentError& e) {
    throw ParseError(e.what());
  }
  read_field(j, "chord_dropout", c.chord_dropout);
  read_field(j, "boost_gain", c.boost_gain);
  read_field(j, "simultaneity_ms", c.simultaneity_ms);
  read_field(j, "temperature", c.temperature);
  read_field(j, "top_k", c.top_k);
  read_field(j, "seed", c.seed);
  read_field(j, "model", c.model);
  read_field(j, "scene_tool", c.scene_tool);
  read_field(j, "output_dir", c.output_dir);
  return c;
}

}  // namespace cuesync
