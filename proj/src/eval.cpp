#include "lrmt/eval.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "lrmt/error.hpp"

namespace lrmt {

namespace {

using NgramCounts = std::unordered_map<std::string, std::size_t>;

NgramCounts count_ngrams(const Tokens& tokens, std::size_t n) {
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (std::size_t k = 1; k < n; ++k) {
      key += '\x1f';
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

// Clipped matches and total hypothesis n-grams of order n for one sentence.
std::pair<std::size_t, std::size_t> clipped_matches(const Tokens& hyp, const Tokens& ref, std::size_t n) {
  const auto hyp_counts = count_ngrams(hyp, n);
  const auto ref_counts = count_ngrams(ref, n);
  std::size_t matches = 0;
  for (const auto& [gram, count] : hyp_counts) {
    auto it = ref_counts.find(gram);
    if (it != ref_counts.end()) matches += std::min(count, it->second);
  }
  const std::size_t total = hyp.size() >= n ? hyp.size() - n + 1 : 0;
  return {matches, total};
}

double brevity_penalty(std::size_t hyp_len, std::size_t ref_len) {
  if (hyp_len >= ref_len) return 1.0;
  if (hyp_len == 0) return 0.0;
  return std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
}

double geometric_value(const std::array<double, kBleuOrder>& precisions, double bp) {
  double log_sum = 0.0;
  for (double p : precisions) {
    if (p <= 0.0) return 0.0;
    log_sum += std::log(p);
  }
  return bp * std::exp(log_sum / static_cast<double>(kBleuOrder));
}

}  // namespace

BleuScore corpus_bleu(std::span<const Tokens> hypotheses, std::span<const Tokens> references) {
  if (hypotheses.size() != references.size()) {
    throw Error("corpus_bleu: " + std::to_string(hypotheses.size()) + " hypotheses vs " +
                std::to_string(references.size()) + " references");
  }
  if (hypotheses.empty()) throw Error("corpus_bleu: empty hypothesis set");

  std::array<std::size_t, kBleuOrder> matches{};
  std::array<std::size_t, kBleuOrder> totals{};
  BleuScore score;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    score.hypothesis_length += hypotheses[i].size();
    score.reference_length += references[i].size();
    for (std::size_t n = 1; n <= kBleuOrder; ++n) {
      const auto [m, c] = clipped_matches(hypotheses[i], references[i], n);
      matches[n - 1] += m;
      totals[n - 1] += c;
    }
  }
  if (score.hypothesis_length == 0 && score.reference_length == 0) {
    score.precisions.fill(1.0);
    score.value = 1.0;
    return score;
  }
  for (std::size_t n = 0; n < kBleuOrder; ++n) {
    score.precisions[n] = totals[n] == 0 ? 1.0 : static_cast<double>(matches[n]) / static_cast<double>(totals[n]);
  }
  if (score.hypothesis_length == 0) score.precisions[0] = 0.0;
  score.brevity_penalty = brevity_penalty(score.hypothesis_length, score.reference_length);
  score.value = geometric_value(score.precisions, score.brevity_penalty);
  return score;
}

double sentence_bleu(const Tokens& hypothesis, const Tokens& reference) {
  if (hypothesis.empty() && reference.empty()) return 1.0;
  if (hypothesis.empty()) return 0.0;
  std::array<double, kBleuOrder> precisions{};
  for (std::size_t n = 1; n <= kBleuOrder; ++n) {
    const auto [m, c] = clipped_matches(hypothesis, reference, n);
    precisions[n - 1] = n == 1 ? static_cast<double>(m) / static_cast<double>(c)
                               : static_cast<double>(m + 1) / static_cast<double>(c + 1);
  }
  return geometric_value(precisions, brevity_penalty(hypothesis.size(), reference.size()));
}

}  // namespace lrmt
