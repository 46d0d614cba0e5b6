#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cuesync/config.hpp"
#include "cuesync/emotion.hpp"
#include "cuesync/error.hpp"
#include "cuesync/event_codec.hpp"
#include "cuesync/generator.hpp"
#include "cuesync/midi_file.hpp"

namespace cuesync {

namespace fs = std::filesystem;

/// Wraps a failure with the name of the pipeline stage it came from.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

/// Independent stream seed for item `index` of a run seeded with `base`
/// (splitmix64 of the pair).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

// -- encode / decode --------------------------------------------------------

struct EncodedFile {
  std::vector<Token> tokens;
  MidiDiagnostics midi;
  std::size_t chords = 0;
};

/// Parses an SMF and encodes it; with label_chords the detected chords are
/// marked with CHORD tokens.
EncodedFile encode_midi_file(const fs::path& midi_path, const PipelineConfig& config, bool label_chords);
EncodedFile cmd_encode(const fs::path& midi_path, const fs::path& out_tokens, const PipelineConfig& config,
                       bool label_chords = false);
DecodedSequence cmd_decode(const fs::path& tokens_path, const fs::path& out_midi);

// -- training preparation ---------------------------------------------------

struct PreparedSequence {
  fs::path source;
  int transpose = 0;
  fs::path tokens_path;
  fs::path offsets_path;
  std::size_t token_count = 0;
  std::size_t chords_detected = 0;
  std::size_t chords_kept = 0;
};

struct PrepareFailure {
  fs::path source;
  std::string message;
};

struct PrepareReport {
  std::size_t files_seen = 0;
  std::vector<PreparedSequence> sequences;
  std::vector<PrepareFailure> failures;
};

/// For every .mid/.midi file directly inside `midi_dir` (sorted by name):
/// parse, optionally transpose, encode, label chords, drop chords with the
/// configured rate, and write <stem>.tokens plus <stem>.offsets (seconds,
/// one per token) to `out_dir`. Offsets use the sequence's own surviving
/// CHORD times as boundaries. With augment = k, k further copies transposed
/// by a random non-zero shift in [-3, 3] are written as <stem>.a<i>.*.
/// Files are processed in parallel with per-file seeds; a failing file is
/// reported and skipped.
PrepareReport cmd_prepare(const fs::path& midi_dir, const fs::path& out_dir, const PipelineConfig& config,
                          int augment = 0);

// -- generation -------------------------------------------------------------

/// Creates "reference" or "scripted"; "external" raises ArgumentError since
/// no trained model is linked into this build.
std::unique_ptr<NextTokenModel> make_model(const std::string& name);

/// Mixture mean (VAMode::Mean) or one draw seeded from config.seed.
VAPoint emotion_to_va(const EmotionDistribution& dist, const PipelineConfig& config);

struct GenerateOptions {
  fs::path emotion_file;
  /// "none" selects the learned substitute, a number overrides the mapping.
  std::optional<std::string> valence_override;
  std::optional<std::string> arousal_override;
  /// Scene log (recognised by its Duration line) or a plain list of seconds.
  std::optional<fs::path> scenes_file;
  std::optional<fs::path> video;
  std::optional<double> duration_s;
};

/// Fully resolved inputs of one generation run; this is what a manifest
/// records and replays.
struct GenerationPlan {
  PipelineConfig config;
  std::string emotion_source;
  std::optional<EmotionDistribution> emotions;
  VAPoint va;
  std::string boundary_source;
  std::vector<double> raw_cuts_s;
  std::vector<double> boundaries_s;
  double duration_s = 0.0;
};

struct GenerationOutputs {
  fs::path midi;
  fs::path tokens;
  fs::path diagnostics;
  fs::path manifest;

  /// <midi stem>.tokens, .diagnostics.json and .manifest.json next to it.
  static GenerationOutputs beside(const fs::path& midi);
};

struct GenerationRun {
  GenerationPlan plan;
  GenerationResult result;
  DecodedSequence decoded;
  ScoreTimeline written;
};

/// Emotion and scene stages: maps emotions to valence/arousal (mean or a
/// seeded draw), applies overrides, and filters the scene cuts.
GenerationPlan plan_generation(const GenerateOptions& options, const PipelineConfig& config);

/// Generation, decoding, chord velocity boost, trimming to the duration, then
/// writes the SMF, the token text, the diagnostics report and the manifest.
GenerationRun run_generation(const GenerationPlan& plan, const GenerationOutputs& outputs);

GenerationRun cmd_generate(const GenerateOptions& options, const PipelineConfig& config,
                           const GenerationOutputs& outputs);

std::string manifest_json(const GenerationPlan& plan, const GenerationOutputs& outputs);
/// Throws ParseError on a malformed manifest.
GenerationPlan plan_from_manifest(std::string_view json_text);
std::string diagnostics_json(const GenerationRun& run);

}  // namespace cuesync
