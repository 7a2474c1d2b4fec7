#include "lrmt/combine.hpp"

#include <algorithm>
#include <limits>
#include <ostream>

#include "lrmt/error.hpp"
#include "lrmt/eval.hpp"
#include "lrmt/parallel.hpp"

namespace lrmt {

double similarity(const Tokens& a, const Tokens& b) {
  if (a == b) return 1.0;
  return 0.5 * (sentence_bleu(a, b) + sentence_bleu(b, a));
}

CentroidChoice select_center(const TranslationCluster& cluster) {
  const auto& cands = cluster.candidates;
  if (cands.empty()) throw Error("select_center: empty cluster for line '" + cluster.line_id + "'");
  const std::size_t k = cands.size();
  std::vector<double> sim(k * k, 1.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) sim[i * k + j] = sim[j * k + i] = similarity(cands[i].tokens, cands[j].tokens);
  }
  // Summing each row in sorted order makes equal multisets give equal sums,
  // so exact duplicates tie exactly and the first one wins.
  std::vector<double> centrality(k, 0.0);
  std::vector<double> row;
  for (std::size_t i = 0; i < k; ++i) {
    row.clear();
    for (std::size_t j = 0; j < k; ++j) {
      if (j != i) row.push_back(sim[i * k + j]);
    }
    std::sort(row.begin(), row.end());
    for (double v : row) centrality[i] += v;
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < k; ++i) {
    if (centrality[i] > centrality[best]) best = i;
  }
  return {cluster.line_id, best, cands[best].language, cands[best].tokens, centrality[best]};
}

CombineResult combine_corpus(std::span<const ParallelText> translations, std::string output_language,
                             std::size_t workers) {
  if (translations.empty()) throw Error("combine: no translations given");
  const ParallelText& first = translations.front();
  for (const auto& t : translations.subspan(1)) {
    if (t.language() == first.language()) throw Error("combine: duplicate language '" + t.language() + "'");
    for (const auto& line : first.lines()) {
      if (!t.contains(line.id)) throw Error("combine: line '" + line.id + "' missing from " + t.language());
    }
    for (const auto& line : t.lines()) {
      if (!first.contains(line.id)) throw Error("combine: line '" + line.id + "' missing from " + first.language());
    }
  }

  CombineResult result;
  result.choices.resize(first.size());
  parallel_for(first.size(), workers, [&](std::size_t i) {
    TranslationCluster cluster{first[i].id, {}};
    cluster.candidates.reserve(translations.size());
    for (const auto& t : translations) cluster.candidates.push_back({t.language(), *t.find(first[i].id)});
    result.choices[i] = select_center(cluster);
  });

  std::vector<Line> lines;
  lines.reserve(first.size());
  for (const auto& t : translations) result.histogram[t.language()] = 0;
  for (const auto& choice : result.choices) {
    lines.push_back({choice.line_id, choice.tokens});
    ++result.histogram[choice.language];
  }
  result.combined = ParallelText(std::move(output_language), std::move(lines));
  return result;
}

void write_combine_report(std::ostream& out, const CombineResult& result) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (const auto& c : result.choices) out << c.line_id << '\t' << c.language << '\t' << c.centrality << '\n';
  out.precision(old_precision);
}

}  // namespace lrmt
