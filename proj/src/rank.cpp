#include "lrmt/rank.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <set>

#include "lrmt/error.hpp"
#include "lrmt/eval.hpp"
#include "lrmt/parallel.hpp"

namespace lrmt {

std::string_view metric_name(Metric metric) {
  return metric == Metric::kFamd ? "FAMD" : "FAMP";
}

Metric parse_metric(std::string_view name) {
  if (name == "famd" || name == "FAMD") return Metric::kFamd;
  if (name == "famp" || name == "FAMP") return Metric::kFamp;
  throw Error("unknown metric '" + std::string(name) + "' (expected famd or famp)");
}

void sort_ranking(LanguageRanking& ranking) {
  std::set<std::string> seen;
  for (const auto& e : ranking.entries) {
    if (!seen.insert(e.language).second) throw Error("ranking: duplicate language '" + e.language + "'");
    if (!(e.value >= 0.0 && e.value <= 1.0)) throw Error("ranking: score for '" + e.language + "' outside [0,1]");
  }
  std::sort(ranking.entries.begin(), ranking.entries.end(), [](const LanguageScore& a, const LanguageScore& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.language < b.language;
  });
}

Tokens word_replacement_translate(const AlignmentModel& model, const AlignmentStatistics& stats,
                                  const Tokens& sentence) {
  Tokens out;
  out.reserve(sentence.size());
  for (const auto& s : sentence) {
    const TranslationRow* row = model.row(s);
    const WordStatistics* ws = stats.find(s);
    if (row == nullptr || row->empty() || ws == nullptr || ws->p_joint <= 0.0) {
      out.push_back(s);
      continue;
    }
    const std::string* best = nullptr;
    double best_score = -1.0;
    for (const auto& [t, p] : *row) {
      const double score = p * ws->p_joint;
      if (score > best_score) {
        best_score = score;
        best = &t;
      }
    }
    out.push_back(*best);
  }
  return out;
}

double famd_score(const AlignmentStatistics& stats) {
  double weighted = 0.0;
  std::size_t total = 0;
  for (const auto& [_, w] : stats.words) {
    weighted += static_cast<double>(w.n_obs) * w.p_dist0;
    total += w.n_obs;
  }
  if (total == 0) throw Error("famd_score: no aligned source tokens");
  return weighted / static_cast<double>(total);
}

double famp_score(const AlignmentModel& model, const AlignmentStatistics& stats, const Bitext& heldout) {
  if (heldout.empty()) throw Error("famp_score: empty held-out set");
  std::vector<Tokens> hypotheses;
  std::vector<Tokens> references;
  hypotheses.reserve(heldout.size());
  references.reserve(heldout.size());
  for (const auto& pair : heldout) {
    hypotheses.push_back(word_replacement_translate(model, stats, pair.source));
    references.push_back(pair.target);
  }
  return corpus_bleu(hypotheses, references).value;
}

double score_candidate(const ParallelText& target, const ParallelText& candidate, Metric metric,
                       const RankOptions& options) {
  std::vector<ParallelText> pair{candidate, target};
  const auto shared = intersect(pair);
  const ParallelText& source = shared[0];
  const ParallelText& low = shared[1];
  if (source.size() < options.min_shared_lines) {
    throw Error("only " + std::to_string(source.size()) + " shared lines (minimum " +
                std::to_string(options.min_shared_lines) + ")");
  }
  if (metric == Metric::kFamd) {
    const Bitext bitext = make_bitext(source, low);
    const auto model = train_alignment(bitext, options.alignment);
    return famd_score(collect_statistics(model, bitext));
  }
  const SplitSpec spec{{{"train", 1.0 - options.heldout_fraction}, {"heldout", options.heldout_fraction}},
                       0, SplitMode::kContiguous};
  const auto parts = split(source, spec);
  const Bitext train = make_bitext(parts.at("train"), low);
  const Bitext heldout = make_bitext(parts.at("heldout"), low);
  const auto model = train_alignment(train, options.alignment);
  return famp_score(model, collect_statistics(model, train), heldout);
}

RankingResult rank_languages(const ParallelText& target, std::span<const ParallelText> candidates,
                             Metric metric, const RankOptions& options) {
  std::set<std::string> seen;
  for (const auto& c : candidates) {
    if (!seen.insert(c.language()).second) throw Error("rank: duplicate candidate '" + c.language() + "'");
  }
  std::vector<std::optional<double>> scores(candidates.size());
  std::vector<std::string> reasons(candidates.size());
  parallel_for(candidates.size(), options.workers, [&](std::size_t i) {
    const auto& candidate = candidates[i];
    if (candidate.language() == target.language()) {
      reasons[i] = "same language as target";
      return;
    }
    try {
      scores[i] = score_candidate(target, candidate, metric, options);
    } catch (const Error& e) {
      reasons[i] = e.what();
    }
  });

  RankingResult result;
  result.ranking.metric = metric;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (scores[i]) {
      result.ranking.entries.push_back({candidates[i].language(), *scores[i]});
    } else {
      result.skipped.push_back({candidates[i].language(), reasons[i]});
    }
  }
  sort_ranking(result.ranking);
  std::sort(result.skipped.begin(), result.skipped.end(),
            [](const SkippedCandidate& a, const SkippedCandidate& b) { return a.language < b.language; });
  return result;
}

FamilyOfChoice select_family(const LanguageRanking& ranking, std::size_t k, std::string_view target) {
  if (k == 0) throw Error("select_family: k must be >= 1");
  LanguageRanking sorted = ranking;
  sort_ranking(sorted);
  FamilyOfChoice family{std::string(target), {}, std::string(metric_name(ranking.metric))};
  for (const auto& e : sorted.entries) {
    if (family.members.size() == k) break;
    if (e.language != target) family.members.push_back(e.language);
  }
  if (family.members.size() < k) {
    throw Error("select_family: only " + std::to_string(family.members.size()) + " ranked languages for k=" +
                std::to_string(k) + "; supply an explicit FAMO+ family list instead");
  }
  return family;
}

FamilyOfChoice load_family_list(const std::filesystem::path& path, std::string_view target) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  FamilyOfChoice family{std::string(target), {}, "FAMO+"};
  std::set<std::string> seen;
  std::string line;
  while (std::getline(in, line)) {
    const Tokens fields = split_whitespace(line);
    if (fields.empty()) continue;
    if (fields.size() != 1) throw Error(path.string() + ": expected one language code per line");
    const auto& code = fields[0];
    if (code == target) throw Error(path.string() + ": family contains the target language '" + code + "'");
    if (!seen.insert(code).second) throw Error(path.string() + ": duplicate language '" + code + "'");
    family.members.push_back(code);
  }
  if (family.members.empty()) throw Error(path.string() + ": empty family list");
  return family;
}

void write_ranking(std::ostream& out, const LanguageRanking& ranking) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "rank\tlanguage\tmetric\tscore\n";
  for (std::size_t i = 0; i < ranking.entries.size(); ++i) {
    const auto& e = ranking.entries[i];
    out << (i + 1) << '\t' << e.language << '\t' << metric_name(ranking.metric) << '\t' << e.value << '\n';
  }
  out.precision(old_precision);
}

void write_skip_report(std::ostream& out, std::span<const SkippedCandidate> skipped) {
  out << "language\treason\n";
  for (const auto& s : skipped) out << s.language << '\t' << s.reason << '\n';
}

}  // namespace lrmt
