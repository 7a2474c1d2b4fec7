#pragma once

// Lexical-translation word alignment trained by EM, plus the per-source-word
// fertility and distortion statistics derived from its Viterbi alignments.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lrmt/corpus.hpp"
#include "lrmt/text.hpp"

namespace lrmt {

struct SentencePair {
  Tokens source;
  Tokens target;
};

using Bitext = std::vector<SentencePair>;

/// Pairs the lines two texts share, in the source text's order.
Bitext make_bitext(const ParallelText& source, const ParallelText& target);

/// Name of the empty source word in tables and serialized models.
inline constexpr std::string_view kNullWord = "<null>";

struct AlignmentConfig {
  int iterations = 5;
  /// Prior probability that a target word is generated by the null word.
  double p_null = 0.08;
  /// Probability returned for (source, target) pairs absent from the table.
  double epsilon = 1e-9;
};

using TranslationRow = std::map<std::string, double, std::less<>>;

/// t(target | source) for every co-occurring pair seen in training, with the
/// null word as an extra source row. Every row sums to 1.
class AlignmentModel {
 public:
  AlignmentModel() = default;

  /// Table probability, or epsilon when the pair was never seen.
  double prob(std::string_view source, std::string_view target) const;
  double null_prob(std::string_view target) const { return prob(kNullWord, target); }
  bool has_entry(std::string_view source, std::string_view target) const;
  /// nullptr for source words outside the table.
  const TranslationRow* row(std::string_view source) const;
  const std::map<std::string, TranslationRow, std::less<>>& table() const { return table_; }

  double p_null() const { return p_null_; }
  double epsilon() const { return epsilon_; }
  int iterations() const { return iterations_; }
  /// Corpus log-likelihood under the initial parameters and after each
  /// iteration (iterations() + 1 entries for a trained model).
  const std::vector<double>& log_likelihood() const { return log_likelihood_; }
  std::size_t skipped_pairs() const { return skipped_pairs_; }

 private:
  friend AlignmentModel train_alignment(const Bitext&, const AlignmentConfig&);
  friend AlignmentModel read_model(std::istream&);

  std::map<std::string, TranslationRow, std::less<>> table_;
  double p_null_ = 0.08;
  double epsilon_ = 1e-9;
  int iterations_ = 0;
  std::vector<double> log_likelihood_;
  std::size_t skipped_pairs_ = 0;
};

/// IBM-Model-1-style EM, source -> target, with a null word and uniform
/// initialization over co-occurring pairs. Pairs with an empty side are
/// skipped and counted; throws Error if nothing remains or iterations < 1.
AlignmentModel train_alignment(const Bitext& bitext, const AlignmentConfig& config = {});

/// Log-likelihood of the target sides given the source sides under `model`.
double corpus_log_likelihood(const AlignmentModel& model, const Bitext& bitext);

/// Links sorted by target index; each target index appears at most once.
struct SentenceAlignment {
  std::vector<std::pair<std::size_t, std::size_t>> links;  // (source, target)

  friend bool operator==(const SentenceAlignment&, const SentenceAlignment&) = default;
};

/// Each target token links to its most probable source token, or stays
/// unaligned (null). Ties go to the lowest source index; target words with no
/// table entry for any source token in the sentence are left unaligned.
SentenceAlignment viterbi_align(const AlignmentModel& model, const SentencePair& pair);

struct WordStatistics {
  std::size_t n_obs = 0;  // aligned occurrences
  std::size_t fert1 = 0;
  std::size_t dist0 = 0;
  std::size_t joint = 0;
  double p_fert1 = 0.0;
  double p_dist0 = 0.0;
  double p_joint = 0.0;
};

struct AlignmentStatistics {
  std::map<std::string, WordStatistics, std::less<>> words;
  /// Source sentence length -> number of sentences.
  std::map<std::size_t, std::size_t> source_lengths;

  const WordStatistics* find(std::string_view word) const;
  std::size_t total_observations() const;
};

/// Distortion of a link at source position `source` whose previous aligned
/// target token linked to `previous_source` (-1 at sentence start).
inline long distortion(long source, long previous_source) { return source - previous_source - 1; }

/// Viterbi-aligns every pair. For each aligned source occurrence, fertility is
/// its number of links and distortion is taken at its first linked target
/// token. Every source type in the bitext gets an entry, n_obs = 0 if never
/// aligned.
AlignmentStatistics collect_statistics(const AlignmentModel& model, const Bitext& bitext);

void write_model(std::ostream& out, const AlignmentModel& model);
AlignmentModel read_model(std::istream& in);
void write_statistics(std::ostream& out, const AlignmentStatistics& stats);
void write_alignments(std::ostream& out, std::span<const SentenceAlignment> alignments);

}  // namespace lrmt
