#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cuesync/chords.hpp"
#include "cuesync/io.hpp"
#include "cuesync/offset_kernels.hpp"
#include "cuesync/pipeline.hpp"
#include "cuesync/scenes.hpp"

using namespace cuesync;

namespace {

struct GlobalFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> va_mode;
  std::optional<std::string> valence;
  std::optional<std::string> arousal;
  std::optional<double> delta_max;
  std::optional<double> sensitivity;
  std::optional<double> min_gap;
  std::optional<double> temperature;
  std::optional<std::size_t> top_k;
  std::optional<std::string> model;
};

PipelineConfig resolve_config(const GlobalFlags& g) {
  PipelineConfig c;
  if (!g.config_path.empty()) c = load_config(read_text(g.config_path));
  if (g.seed) c.seed = *g.seed;
  if (g.va_mode) c.va_mode = va_mode_from_name(*g.va_mode);
  if (g.delta_max) c.max_offset_s = *g.delta_max;
  if (g.sensitivity) c.sensitivity_s = *g.sensitivity;
  if (g.min_gap) c.min_gap_s = *g.min_gap;
  if (g.temperature) c.temperature = *g.temperature;
  if (g.top_k) c.top_k = *g.top_k;
  if (g.model) c.model = *g.model;
  c.validate();
  return c;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    write_text(out_path, text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cuesync: boundary-aware, emotion-conditioned symbolic music for video"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  app.add_option("--config", g.config_path, "JSON pipeline configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Seed for every random choice");
  app.add_option("--va-mode", g.va_mode, "Emotion to valence/arousal mapping")
      ->check(CLI::IsMember({"mean", "sample"}));
  app.add_option("--valence", g.valence, "Valence override in [-1, 1] or 'none'");
  app.add_option("--arousal", g.arousal, "Arousal override in [-1, 1] or 'none'");
  app.add_option("--delta-max", g.delta_max, "Boundary offset cap in seconds");
  app.add_option("--sensitivity", g.sensitivity, "Boundary matching window in seconds");
  app.add_option("--min-gap", g.min_gap, "Minimum spacing of scene boundaries in seconds");
  app.add_option("--temperature", g.temperature, "Sampling temperature");
  app.add_option("--top-k", g.top_k, "Top-k cutoff, 0 for none");
  app.add_option("--model", g.model, "Next-token model")->check(CLI::IsMember({"reference", "scripted", "external"}));

  std::string in_path, out_path, extra_path;
  bool with_chords = false, no_bars = false, stepwise = false;
  int augment = 0;
  std::optional<double> duration;
  std::string metric_name = "euclidean";
  std::vector<std::string> inverse;

  auto* encode = app.add_subcommand("encode", "SMF to token text");
  encode->add_option("midi", in_path, "Input SMF")->required();
  encode->add_option("-o,--output", out_path, "Token file (stdout if omitted)");
  encode->add_flag("--chords", with_chords, "Insert CHORD tokens for detected chords");
  encode->add_flag("--no-bars", no_bars, "Omit BAR tokens");

  auto* decode = app.add_subcommand("decode", "Token text to SMF");
  decode->add_option("tokens", in_path, "Input token file")->required();
  decode->add_option("-o,--output", out_path, "Output SMF")->required();

  auto* vocab = app.add_subcommand("vocab", "Write the vocabulary manifest");
  vocab->add_option("-o,--output", out_path, "Manifest file (stdout if omitted)");

  auto* chords = app.add_subcommand("chords", "Report long guitar/piano chords of an SMF");
  chords->add_option("midi", in_path, "Input SMF")->required();
  chords->add_option("-o,--output", out_path, "Report file (stdout if omitted)");

  auto* offsets = app.add_subcommand("offsets", "Boundary offsets for a token file");
  offsets->add_option("tokens", in_path, "Input token file")->required();
  offsets->add_option("-b,--boundaries", extra_path, "Boundary list in seconds (default: the CHORD times)");
  offsets->add_option("-o,--output", out_path, "Offset file (stdout if omitted)");
  offsets->add_flag("--stepwise", stepwise, "Use the token-by-token reference fold");

  auto* emotion = app.add_subcommand("emotion", "Map an emotion distribution to valence/arousal");
  emotion->add_option("probabilities", in_path, "Emotion JSON file");
  emotion->add_option("--inverse", inverse, "Map a '<valence> <arousal>' pair back to a category")
      ->expected(2);
  emotion->add_option("--metric", metric_name, "Inverse-map metric")
      ->check(CLI::IsMember({"euclidean", "mahalanobis", "likelihood"}));

  auto* scenes = app.add_subcommand("scenes", "Scene cuts to a filtered boundary list");
  scenes->add_option("log", in_path, "ffmpeg scene log");
  scenes->add_option("--video", extra_path, "Run the scene detector on a video instead");
  scenes->add_option("-o,--output", out_path, "Boundary file (stdout if omitted)");

  auto* prepare = app.add_subcommand("prepare", "Training sequences from a directory of SMF files");
  prepare->add_option("midi_dir", in_path, "Input directory")->required()->check(CLI::ExistingDirectory);
  prepare->add_option("-o,--output", out_path, "Output directory")->required();
  prepare->add_option("--augment", augment, "Extra transposed copies per file")->check(CLI::NonNegativeNumber);

  GenerateOptions gen;
  std::string emotion_file, scenes_file, video_file, manifest_in;
  auto* generate_cmd = app.add_subcommand("generate", "Generate a score for a video");
  generate_cmd->add_option("-e,--emotion", emotion_file, "Emotion JSON file");
  generate_cmd->add_option("-s,--scenes", scenes_file, "Scene log or boundary list");
  generate_cmd->add_option("--video", video_file, "Video to run the scene detector on");
  generate_cmd->add_option("-d,--duration", duration, "Duration in seconds (default: video duration)");
  generate_cmd->add_option("--manifest", manifest_in, "Replay the inputs of an earlier manifest");
  generate_cmd->add_option("-o,--output", out_path, "Output SMF")->required();

  auto* config_cmd = app.add_subcommand("config", "Print the effective configuration");

  CLI11_PARSE(app, argc, argv);

  const char* stage = "arguments";
  try {
    stage = "config";
    const PipelineConfig config = resolve_config(g);

    if (*encode) {
      stage = "encode";
      PipelineConfig c = config;
      c.emit_bars = !no_bars;
      auto f = encode_midi_file(in_path, c, with_chords);
      std::ostringstream out;
      write_tokens(out, f.tokens);
      emit(out_path, out.str());
      if (!out_path.empty()) {
        std::fprintf(stderr, "%zu tokens, %zu chords\n", f.tokens.size(), f.chords);
      }
    } else if (*decode) {
      stage = "decode";
      auto d = cmd_decode(in_path, out_path);
      std::fprintf(stderr, "%zu notes, %zu chords, %zu unmatched offs, %zu closed at end\n", d.score.notes.size(),
                   d.chord_onsets_ms.size(), d.diagnostics.unmatched_offs, d.diagnostics.closed_at_end);
    } else if (*vocab) {
      std::ostringstream out;
      write_vocabulary_manifest(out);
      emit(out_path, out.str());
    } else if (*chords) {
      stage = "chords";
      const auto score = parse_midi(read_bytes(in_path));
      const auto spans = detect_chords(score, beat_ms_for(score), config.simultaneity_ms);
      std::ostringstream out;
      write_chord_report(out, spans);
      emit(out_path, out.str());
    } else if (*offsets) {
      stage = "offsets";
      std::istringstream tin(read_text(in_path));
      const auto tokens = read_tokens(tin);
      BoundaryList b;
      if (extra_path.empty()) {
        b = chord_boundaries(tokens);
      } else {
        std::istringstream bin(read_text(extra_path));
        const auto s = read_seconds_list(bin);
        b = BoundaryList::from_seconds(s);
      }
      const auto ms = stepwise ? stepwise_offsets_ms(tokens, b, config.scheduler())
                               : offsets_for_sequence(tokens, b, config.scheduler());
      std::vector<double> secs;
      for (Millis m : ms) secs.push_back(ms_to_seconds(m));
      std::ostringstream out;
      write_seconds_list(out, secs);
      emit(out_path, out.str());
    } else if (*emotion) {
      stage = "emotion";
      if (!inverse.empty()) {
        const VAPoint p{parse_va_component(inverse[0]), parse_va_component(inverse[1])};
        const auto table = scale_table(VATable::standard(), config.target_max, config.scale_sd);
        std::cout << emotion_name(inverse_map(p, table, *metric_from_name(metric_name))) << "\n";
      } else {
        if (in_path.empty()) throw ArgumentError("an emotion file or --inverse is required");
        VAPoint va = emotion_to_va(parse_emotion_json(read_text(in_path)), config);
        if (g.valence) va.valence = parse_va_component(*g.valence);
        if (g.arousal) va.arousal = parse_va_component(*g.arousal);
        std::cout << format_va_point(va) << "\n";
      }
    } else if (*scenes) {
      stage = "scenes";
      SceneCuts cuts;
      if (!extra_path.empty()) {
        cuts = detect_scenes(extra_path, config.scene_threshold, config.scene_tool);
      } else if (!in_path.empty()) {
        SceneLogDiagnostics diag;
        cuts = parse_scene_log(read_text(in_path), &diag);
        if (diag.malformed_records > 0) std::fprintf(stderr, "%zu malformed records skipped\n", diag.malformed_records);
      } else {
        throw ArgumentError("a scene log or --video is required");
      }
      std::ostringstream out;
      write_boundary_list(out, filter_boundaries(cuts, config.min_gap_s));
      emit(out_path, out.str());
    } else if (*prepare) {
      stage = "prepare";
      const auto report = cmd_prepare(in_path, out_path, config, augment);
      for (const auto& f : report.failures) {
        std::fprintf(stderr, "skipped %s: %s\n", f.source.string().c_str(), f.message.c_str());
      }
      std::fprintf(stderr, "%zu files, %zu sequences written, %zu failed\n", report.files_seen,
                   report.sequences.size(), report.failures.size());
    } else if (*generate_cmd) {
      stage = "generate";
      const auto outputs = GenerationOutputs::beside(out_path);
      GenerationPlan plan;
      if (!manifest_in.empty()) {
        plan = plan_from_manifest(read_text(manifest_in));
      } else {
        gen.emotion_file = emotion_file;
        gen.valence_override = g.valence;
        gen.arousal_override = g.arousal;
        if (!scenes_file.empty()) gen.scenes_file = scenes_file;
        if (!video_file.empty()) gen.video = video_file;
        gen.duration_s = duration;
        plan = plan_generation(gen, config);
      }
      const auto run = run_generation(plan, outputs);
      const auto& d = run.result.diagnostics;
      std::fprintf(stderr, "%zu tokens, %zu chords, boundaries %zu consumed / %zu expired / %zu unmet\n",
                   d.token_count, d.chord_count, d.consumed_s.size(), d.expired_s.size(), d.unmet_s.size());
    } else if (*config_cmd) {
      std::cout << dump_config(config);
    }
  } catch (const StageError& e) {
    std::fprintf(stderr, "cuesync: %s failed in stage %s\n", stage, e.what());
    return 1;
  } catch (const ArgumentError& e) {
    std::fprintf(stderr, "cuesync: %s: %s\n", stage, e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "cuesync: %s: %s\n", stage, e.what());
    return 1;
  }
  return 0;
}
