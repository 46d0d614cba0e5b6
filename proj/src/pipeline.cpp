#include "cuesync/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <random>
#include <sstream>

#include <json.hpp>

#include "cuesync/chords.hpp"
#include "cuesync/io.hpp"
#include "cuesync/offset_kernels.hpp"
#include "cuesync/reference_model.hpp"
#include "cuesync/scenes.hpp"

namespace cuesync {

namespace {

using nlohmann::json;

template <class F>
auto in_stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

std::string tokens_text(std::span<const Token> tokens) {
  std::ostringstream out;
  write_tokens(out, tokens);
  return out.str();
}

std::vector<Token> load_tokens(const fs::path& path) {
  std::istringstream in(read_text(path));
  return read_tokens(in);
}

bool is_midi_path(const fs::path& p) {
  std::string ext = p.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext == ".mid" || ext == ".midi";
}

std::vector<PreparedSequence> prepare_one(const fs::path& source, const fs::path& out_dir,
                                          const PipelineConfig& config, int augment, std::uint64_t seed) {
  const ScoreTimeline score = parse_midi(read_bytes(source));
  std::mt19937_64 rng(seed);
  constexpr std::array<int, 6> kShifts{-3, -2, -1, 1, 2, 3};
  std::uniform_int_distribution<std::size_t> pick(0, kShifts.size() - 1);

  std::vector<PreparedSequence> out;
  for (int v = 0; v <= augment; ++v) {
    PreparedSequence seq;
    seq.source = source;
    seq.transpose = v == 0 ? 0 : kShifts[pick(rng)];
    const ScoreTimeline s = seq.transpose == 0 ? score : transpose(score, seq.transpose);

    auto tokens = encode_events(s, EncodeOptions{config.emit_bars});
    const auto spans = detect_chords(s, beat_ms_for(s), config.simultaneity_ms);
    tokens = insert_chord_tokens(tokens, spans);
    tokens = dropout_chords(tokens, config.chord_dropout, derive_seed(seed, static_cast<std::uint64_t>(v) + 1));
    const auto offsets = offsets_for_sequence_s(tokens, chord_boundaries(tokens), config.scheduler());

    const std::string stem = source.stem().string() + (v == 0 ? "" : ".a" + std::to_string(v));
    seq.tokens_path = out_dir / (stem + ".tokens");
    seq.offsets_path = out_dir / (stem + ".offsets");
    seq.token_count = tokens.size();
    seq.chords_detected = spans.size();
    seq.chords_kept = static_cast<std::size_t>(
        std::count_if(tokens.begin(), tokens.end(), [](const Token& t) { return t.kind == TokenKind::Chord; }));

    write_text(seq.tokens_path, tokens_text(tokens));
    std::ostringstream off;
    write_seconds_list(off, offsets);
    write_text(seq.offsets_path, off.str());
    out.push_back(std::move(seq));
  }
  return out;
}

json va_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> va_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

json seconds_json(std::span<const double> s) { return json(std::vector<double>(s.begin(), s.end())); }

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

EncodedFile encode_midi_file(const fs::path& midi_path, const PipelineConfig& config, bool label_chords) {
  EncodedFile f;
  const ScoreTimeline score = parse_midi(read_bytes(midi_path), &f.midi);
  f.tokens = encode_events(score, EncodeOptions{config.emit_bars});
  if (label_chords) {
    const auto spans = detect_chords(score, beat_ms_for(score), config.simultaneity_ms);
    f.tokens = insert_chord_tokens(f.tokens, spans);
    f.chords = spans.size();
  }
  return f;
}

EncodedFile cmd_encode(const fs::path& midi_path, const fs::path& out_tokens, const PipelineConfig& config,
                       bool label_chords) {
  EncodedFile f = encode_midi_file(midi_path, config, label_chords);
  write_text(out_tokens, tokens_text(f.tokens));
  return f;
}

DecodedSequence cmd_decode(const fs::path& tokens_path, const fs::path& out_midi) {
  DecodedSequence d = decode_events(load_tokens(tokens_path));
  write_bytes(out_midi, write_midi(d.score));
  return d;
}

PrepareReport cmd_prepare(const fs::path& midi_dir, const fs::path& out_dir, const PipelineConfig& config,
                          int augment) {
  config.validate();
  if (augment < 0) throw ArgumentError("augment count must not be negative");
  if (!fs::is_directory(midi_dir)) throw IoError("'" + midi_dir.string() + "' is not a directory");

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(midi_dir)) {
    if (entry.is_regular_file() && is_midi_path(entry.path())) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  fs::create_directories(out_dir);

  struct Slot {
    std::vector<PreparedSequence> sequences;
    std::optional<PrepareFailure> failure;
  };
  std::vector<Slot> slots(files.size());
  const auto n = static_cast<std::ptrdiff_t>(files.size());

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& file = files[static_cast<std::size_t>(i)];
    try {
      slots[static_cast<std::size_t>(i)].sequences =
          prepare_one(file, out_dir, config, augment, derive_seed(config.seed, static_cast<std::uint64_t>(i)));
    } catch (const std::exception& e) {
      slots[static_cast<std::size_t>(i)].failure = PrepareFailure{file, e.what()};
    }
  }

  PrepareReport report;
  report.files_seen = files.size();
  for (auto& s : slots) {
    for (auto& seq : s.sequences) report.sequences.push_back(std::move(seq));
    if (s.failure) report.failures.push_back(std::move(*s.failure));
  }
  return report;
}

std::unique_ptr<NextTokenModel> make_model(const std::string& name) {
  if (name == "reference") return std::make_unique<ReferenceModel>();
  if (name == "scripted") return std::make_unique<ScriptedChordModel>();
  if (name == "external") throw ArgumentError("no external model is linked into this build");
  throw ArgumentError("unknown model '" + name + "'");
}

VAPoint emotion_to_va(const EmotionDistribution& dist, const PipelineConfig& config) {
  const auto mix = build_mixture(dist, VATable::standard(), config.target_max, config.scale_sd);
  return config.va_mode == VAMode::Mean ? mixture_mean(mix) : sample_va(mix, derive_seed(config.seed, 0));
}

GenerationOutputs GenerationOutputs::beside(const fs::path& midi) {
  GenerationOutputs o;
  o.midi = midi;
  fs::path base = midi;
  base.replace_extension();
  o.tokens = base.string() + ".tokens";
  o.diagnostics = base.string() + ".diagnostics.json";
  o.manifest = base.string() + ".manifest.json";
  return o;
}

GenerationPlan plan_generation(const GenerateOptions& options, const PipelineConfig& config) {
  in_stage("config", [&] { config.validate(); });
  GenerationPlan plan;
  plan.config = config;

  in_stage("emotion", [&] {
    const bool both_overridden = options.valence_override && options.arousal_override;
    if (!options.emotion_file.empty()) {
      plan.emotion_source = options.emotion_file.string();
      plan.emotions = parse_emotion_json(read_text(options.emotion_file));
      plan.va = emotion_to_va(*plan.emotions, config);
    } else if (!both_overridden) {
      throw ArgumentError("an emotion file is required unless both valence and arousal are given");
    } else {
      plan.emotion_source = "overrides";
    }
    if (options.valence_override) plan.va.valence = parse_va_component(*options.valence_override);
    if (options.arousal_override) plan.va.arousal = parse_va_component(*options.arousal_override);
  });

  in_stage("scenes", [&] {
    SceneCuts cuts;
    if (options.video) {
      plan.boundary_source = options.video->string();
      cuts = detect_scenes(options.video->string(), config.scene_threshold, config.scene_tool);
    } else if (options.scenes_file) {
      plan.boundary_source = options.scenes_file->string();
      const std::string text = read_text(*options.scenes_file);
      if (text.find("Duration:") != std::string::npos) {
        cuts = parse_scene_log(text);
      } else {
        if (!options.duration_s) throw ArgumentError("a plain boundary list needs an explicit duration");
        std::istringstream in(text);
        cuts = scene_cuts_from_list(read_seconds_list(in), *options.duration_s);
      }
    } else {
      if (!options.duration_s) throw ArgumentError("a duration is required when no scenes are given");
      plan.boundary_source = "none";
      cuts = scene_cuts_from_list({}, *options.duration_s);
    }
    plan.duration_s = options.duration_s.value_or(cuts.video_duration_s);
    if (!(plan.duration_s > 0.0)) throw ArgumentError("duration must be positive");
    plan.raw_cuts_s = cuts.cut_times_s;
    for (double b : filter_boundaries(cuts, config.min_gap_s).times_s()) {
      if (b < plan.duration_s) plan.boundaries_s.push_back(b);
    }
  });
  return plan;
}

GenerationRun run_generation(const GenerationPlan& plan, const GenerationOutputs& outputs) {
  GenerationRun run;
  run.plan = plan;
  const auto model = in_stage("model", [&] { return make_model(plan.config.model); });

  run.result = in_stage("generate", [&] {
    GenerationRequest request;
    request.va = plan.va;
    request.boundaries = BoundaryList::from_seconds(plan.boundaries_s);
    request.duration_s = plan.duration_s;
    request.sampling = plan.config.sampling();
    request.scheduler = plan.config.scheduler();
    return generate(*model, request);
  });

  in_stage("decode", [&] {
    run.decoded = decode_events(run.result.tokens);
    const auto boosted = boost_chord_velocity(run.decoded.score, run.decoded.chord_onsets_ms,
                                              plan.config.boost_gain, plan.config.simultaneity_ms);
    run.written = trim_to_duration(boosted, seconds_to_ms(plan.duration_s));
  });

  in_stage("write", [&] {
    write_bytes(outputs.midi, write_midi(run.written));
    if (!outputs.tokens.empty()) write_text(outputs.tokens, tokens_text(run.result.tokens));
    if (!outputs.diagnostics.empty()) write_text(outputs.diagnostics, diagnostics_json(run));
    if (!outputs.manifest.empty()) write_text(outputs.manifest, manifest_json(plan, outputs));
  });
  return run;
}

GenerationRun cmd_generate(const GenerateOptions& options, const PipelineConfig& config,
                           const GenerationOutputs& outputs) {
  return run_generation(plan_generation(options, config), outputs);
}

std::string manifest_json(const GenerationPlan& plan, const GenerationOutputs& outputs) {
  json emotions = nullptr;
  if (plan.emotions) {
    emotions = json::object();
    for (Emotion e : kAllEmotions) emotions[std::string(emotion_name(e))] = (*plan.emotions)[e];
  }
  json j = {
      {"inputs",
       {
           {"emotion_source", plan.emotion_source},
           {"emotions", emotions},
           {"valence", va_json(plan.va.valence)},
           {"arousal", va_json(plan.va.arousal)},
           {"boundary_source", plan.boundary_source},
           {"scene_cuts_s", seconds_json(plan.raw_cuts_s)},
           {"boundaries_s", seconds_json(plan.boundaries_s)},
           {"duration_s", plan.duration_s},
           {"config", json::parse(dump_config(plan.config))},
       }},
      {"outputs",
       {
           {"midi", outputs.midi.string()},
           {"tokens", outputs.tokens.string()},
           {"diagnostics", outputs.diagnostics.string()},
       }},
  };
  return j.dump(2) + "\n";
}

GenerationPlan plan_from_manifest(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("manifest is not valid JSON: ") + e.what());
  }
  try {
    const json& in = j.at("inputs");
    GenerationPlan plan;
    plan.config = load_config(in.at("config").dump());
    plan.emotion_source = in.value("emotion_source", "");
    if (in.contains("emotions") && !in.at("emotions").is_null()) {
      EmotionDistribution d;
      for (Emotion e : kAllEmotions) {
        d.probabilities[static_cast<std::size_t>(e)] = in.at("emotions").at(std::string(emotion_name(e))).get<double>();
      }
      plan.emotions = d;
    }
    plan.va.valence = va_from_json(in.at("valence"));
    plan.va.arousal = va_from_json(in.at("arousal"));
    plan.boundary_source = in.value("boundary_source", "");
    plan.raw_cuts_s = in.value("scene_cuts_s", std::vector<double>{});
    plan.boundaries_s = in.at("boundaries_s").get<std::vector<double>>();
    plan.duration_s = in.at("duration_s").get<double>();
    return plan;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed manifest: ") + e.what());
  }
}

std::string diagnostics_json(const GenerationRun& run) {
  const auto& d = run.result.diagnostics;
  json consumed = json::array();
  for (std::size_t i = 0; i < d.consumed_s.size(); ++i) {
    consumed.push_back({{"time_s", d.consumed_s[i]},
                        {"matched_at_s", d.consumed_at_s[i]},
                        {"error_s", d.consumed_at_s[i] - d.consumed_s[i]}});
  }
  Millis last_offset = 0;
  for (const auto& n : run.written.notes) last_offset = std::max(last_offset, n.offset_ms);

  json j = {
      {"model", run.plan.config.model},
      {"seed", run.plan.config.seed},
      {"duration_s", run.plan.duration_s},
      {"final_cursor_s", d.final_cursor_s},
      {"token_count", d.token_count},
      {"chord_count", d.chord_count},
      {"masked_draws", d.masked_draws},
      {"va", {{"valence", va_json(run.plan.va.valence)}, {"arousal", va_json(run.plan.va.arousal)}}},
      {"boundaries",
       {
           {"total", run.plan.boundaries_s.size()},
           {"consumed", consumed},
           {"expired", seconds_json(d.expired_s)},
           {"unmet", seconds_json(d.unmet_s)},
           {"consumption_rate", d.consumption_rate()},
       }},
      {"decode",
       {
           {"notes", run.decoded.score.notes.size()},
           {"notes_written", run.written.notes.size()},
           {"unmatched_offs", run.decoded.diagnostics.unmatched_offs},
           {"closed_at_end", run.decoded.diagnostics.closed_at_end},
           {"zero_length_dropped", run.decoded.diagnostics.zero_length_dropped},
           {"last_note_offset_s", ms_to_seconds(last_offset)},
       }},
  };
  return j.dump(2) + "\n";
}

}  // namespace cuesync
