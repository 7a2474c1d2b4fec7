#pragma once

// Ranks candidate source languages by closeness to a low-resource target
// language using word-alignment statistics, and picks the top-k family.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lrmt/align.hpp"
#include "lrmt/corpus.hpp"

namespace lrmt {

enum class Metric {
  kFamd,  // probability of zero distortion, frequency-weighted over words
  kFamp,  // BLEU of the word-replacement model on held-out lines
};

std::string_view metric_name(Metric metric);
Metric parse_metric(std::string_view name);

struct LanguageScore {
  std::string language;
  double value = 0.0;
};

struct LanguageRanking {
  Metric metric = Metric::kFamd;
  std::vector<LanguageScore> entries;  // descending value, then ascending code
};

/// Sorts descending by value, ties by ascending language code. Throws on
/// duplicate languages or values outside [0,1].
void sort_ranking(LanguageRanking& ranking);

struct SkippedCandidate {
  std::string language;
  std::string reason;
};

struct RankingResult {
  LanguageRanking ranking;
  std::vector<SkippedCandidate> skipped;
};

struct RankOptions {
  AlignmentConfig alignment;
  std::size_t min_shared_lines = 50;
  /// FAMP trains on the leading lines and scores on this trailing fraction.
  double heldout_fraction = 0.1;
  std::size_t workers = 1;
};

/// Replaces every source token s by argmax_t t(t|s) * p_joint(s). Tokens
/// outside the table or with p_joint(s) == 0 are copied through.
Tokens word_replacement_translate(const AlignmentModel& model, const AlignmentStatistics& stats,
                                  const Tokens& sentence);

/// sum(n_obs * p_dist0) / sum(n_obs). Throws if nothing was aligned.
double famd_score(const AlignmentStatistics& stats);

/// Corpus BLEU of word replacement over `heldout` sources against its targets.
double famp_score(const AlignmentModel& model, const AlignmentStatistics& stats, const Bitext& heldout);

/// Scores one candidate (source side) against the target on their shared
/// lines. Throws Error when the candidate cannot be scored.
double score_candidate(const ParallelText& target, const ParallelText& candidate, Metric metric,
                       const RankOptions& options = {});

/// Scores every candidate independently (in parallel when options.workers >
/// 1) and sorts. Candidates that cannot be scored, e.g. with fewer than
/// options.min_shared_lines shared lines, go to the skip report.
RankingResult rank_languages(const ParallelText& target, std::span<const ParallelText> candidates,
                             Metric metric, const RankOptions& options = {});

struct FamilyOfChoice {
  std::string target;
  std::vector<std::string> members;
  std::string provenance;  // "FAMD", "FAMP" or "FAMO+"
};

/// Top-k ranked languages, skipping the target itself. Throws if fewer than
/// k are available.
FamilyOfChoice select_family(const LanguageRanking& ranking, std::size_t k, std::string_view target);

/// Reads a manually curated family, one language code per line.
FamilyOfChoice load_family_list(const std::filesystem::path& path, std::string_view target);

void write_ranking(std::ostream& out, const LanguageRanking& ranking);
void write_skip_report(std::ostream& out, std::span<const SkippedCandidate> skipped);

}  // namespace lrmt
