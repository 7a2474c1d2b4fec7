#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "lrmt/text.hpp"

namespace lrmt {

inline constexpr std::size_t kBleuOrder = 4;

struct BleuScore {
  double value = 0.0;
  std::array<double, kBleuOrder> precisions{};
  // In (0,1]; 0 only when every hypothesis is empty and references are not.
  double brevity_penalty = 1.0;
  std::size_t hypothesis_length = 0;
  std::size_t reference_length = 0;
};

/// 4-gram corpus BLEU over whitespace tokens, case-sensitive, one reference
/// per line. Clipped counts are pooled over the corpus before dividing. An
/// order with no hypothesis n-grams at all has precision 1 (nothing to get
/// wrong), so corpus_bleu(h, h) == 1 for every h.
BleuScore corpus_bleu(std::span<const Tokens> hypotheses, std::span<const Tokens> references);

/// Sentence BLEU with add-one smoothing on orders 2..4: p_n = (m_n + 1) / (c_n + 1).
/// Unigram precision is unsmoothed, so zero overlap scores exactly 0.
/// Two empty sentences score 1.
double sentence_bleu(const Tokens& hypothesis, const Tokens& reference);

}  // namespace lrmt
