#pragma once

// End-to-end run: rank candidates, choose the family, then emit every
// training stage with a shared vocabulary and a checksum manifest.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "lrmt/align.hpp"
#include "lrmt/corpus.hpp"
#include "lrmt/datagen.hpp"
#include "lrmt/rank.hpp"

namespace lrmt {

enum class FamilySource { kFamd, kFamp, kList };

struct PipelineConfig {
  std::string target_language;
  std::filesystem::path target_corpus;
  std::filesystem::path candidate_dir;  // <language>.txt per candidate
  std::optional<std::filesystem::path> lexicon;
  FamilySource family_source = FamilySource::kFamd;
  std::vector<std::string> family_list;  // when family_source == kList
  std::size_t k = 10;
  std::size_t edit_threshold = kDefaultEditThreshold;
  std::filesystem::path output_dir;
  std::uint64_t split_seed = 0;
  SplitMode split_mode = SplitMode::kContiguous;
  AlignmentConfig alignment;
  std::size_t min_shared_lines = 50;
  std::size_t max_ne = 0;  // lower bound on placeholder tokens in the vocabulary
  std::vector<StageKind> stages{StageKind::kPretrain, StageKind::kSymmetric, StageKind::kStar};
};

/// Parses and fully validates a JSON config; relative paths resolve against
/// `base_dir`. Throws Error listing the first problem found.
PipelineConfig parse_config(const nlohmann::json& json, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path);

/// Every "<language>.txt" in `dir`, sorted by language, skipping `exclude`.
std::vector<ParallelText> load_corpus_dir(const std::filesystem::path& dir, const std::string& exclude = "");

struct PipelineResult {
  FamilyOfChoice family;
  std::optional<RankingResult> ranking;
  nlohmann::json manifest;
};

/// Writes ranking.tsv / skipped.tsv (metric families only), vocab.txt,
/// <stage>/<split>.{src,tgt} and manifest.json under config.output_dir.
PipelineResult run_pipeline(const PipelineConfig& config, std::size_t workers = 1);

/// Emits the configured stages for an already chosen family.
nlohmann::json generate_stages(const PipelineConfig& config, const FamilyOfChoice& family,
                               std::span<const ParallelText> candidates, const ParallelText& low,
                               std::size_t workers = 1);

}  // namespace lrmt
