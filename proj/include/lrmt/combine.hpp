#pragma once

// Combines per-source-language translations of one text by picking, for every
// line, the candidate closest to the center of its cluster.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lrmt/corpus.hpp"
#include "lrmt/text.hpp"

namespace lrmt {

struct Candidate {
  std::string language;
  Tokens tokens;
};

struct TranslationCluster {
  std::string line_id;
  std::vector<Candidate> candidates;
};

struct CentroidChoice {
  std::string line_id;
  std::size_t index = 0;  // position of the chosen candidate in the cluster
  std::string language;
  Tokens tokens;
  double centrality = 0.0;
};

/// Mean of sentence_bleu in both directions; symmetric, 1 for identical
/// token sequences (including two empty ones).
double similarity(const Tokens& a, const Tokens& b);

/// argmax_i sum_{j != i} similarity(c_i, c_j), first index on ties.
/// Throws Error on an empty cluster.
CentroidChoice select_center(const TranslationCluster& cluster);

struct CombineResult {
  ParallelText combined;
  std::vector<CentroidChoice> choices;              // one per line, in line order
  std::map<std::string, std::size_t> histogram;     // language -> lines chosen
};

/// All inputs must cover exactly the same line IDs; lines follow the order of
/// the first input. Throws Error naming the first offending ID otherwise.
CombineResult combine_corpus(std::span<const ParallelText> translations, std::string output_language = "combined",
                             std::size_t workers = 1);

/// "line_id<TAB>chosen_language<TAB>centrality" rows.
void write_combine_report(std::ostream& out, const CombineResult& result);

}  // namespace lrmt
