#pragma once

// Brute-force BLEU for cross-checking, plus hypothesis/reference corpora whose
// scores were computed independently (tests/oracles/oracle_values.py).

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "lrmt/text.hpp"

namespace lrmt::testing {

// Clipped matches of order n by scanning every hypothesis window against every
// reference window, marking used reference windows.
inline std::size_t brute_matches(const Tokens& hyp, const Tokens& ref, std::size_t n) {
  if (hyp.size() < n || ref.size() < n) return 0;
  std::vector<bool> used(ref.size() - n + 1, false);
  std::size_t matches = 0;
  for (std::size_t i = 0; i + n <= hyp.size(); ++i) {
    for (std::size_t j = 0; j + n <= ref.size(); ++j) {
      if (used[j]) continue;
      if (std::equal(hyp.begin() + i, hyp.begin() + i + n, ref.begin() + j)) {
        used[j] = true;
        ++matches;
        break;
      }
    }
  }
  return matches;
}

inline std::size_t windows(std::size_t len, std::size_t n) { return len >= n ? len - n + 1 : 0; }

inline double brute_force_corpus_bleu(const std::vector<Tokens>& hyps, const std::vector<Tokens>& refs) {
  std::array<double, 4> m{}, c{};
  double hl = 0, rl = 0;
  for (std::size_t k = 0; k < hyps.size(); ++k) {
    hl += hyps[k].size();
    rl += refs[k].size();
    for (std::size_t n = 1; n <= 4; ++n) {
      m[n - 1] += brute_matches(hyps[k], refs[k], n);
      c[n - 1] += windows(hyps[k].size(), n);
    }
  }
  double log_sum = 0;
  for (std::size_t n = 0; n < 4; ++n) {
    const double p = c[n] == 0 ? 1.0 : m[n] / c[n];
    if (p == 0) return 0.0;
    log_sum += std::log(p);
  }
  const double bp = hl >= rl ? 1.0 : (hl == 0 ? 0.0 : std::exp(1 - rl / hl));
  return bp * std::exp(log_sum / 4);
}

inline double brute_force_sentence_bleu(const Tokens& hyp, const Tokens& ref) {
  if (hyp.empty()) return ref.empty() ? 1.0 : 0.0;
  double log_sum = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    const double mm = brute_matches(hyp, ref, n);
    const double cc = windows(hyp.size(), n);
    const double p = n == 1 ? mm / cc : (mm + 1) / (cc + 1);
    if (p == 0) return 0.0;
    log_sum += std::log(p);
  }
  const double h = hyp.size(), r = ref.size();
  const double bp = h >= r ? 1.0 : std::exp(1 - r / h);
  return bp * std::exp(log_sum / 4);
}

struct BleuCase {
  std::vector<const char*> hyps;
  std::vector<const char*> refs;
  double expected;

  std::vector<Tokens> hypotheses() const { return tokenize(hyps); }
  std::vector<Tokens> references() const { return tokenize(refs); }

 private:
  static std::vector<Tokens> tokenize(const std::vector<const char*>& lines) {
    std::vector<Tokens> out;
    for (const char* l : lines) out.push_back(split_whitespace(l));
    return out;
  }
};

inline const std::vector<BleuCase> kBleuCases = {
    {{"a b c d"}, {"a b c d e"}, 0.7788007830714049},
    {{"the cat sat on the mat today", "a dog ran in the park"},
     {"the cat sat on the red mat today", "the dog ran in the park"},
     0.6781602569983369},
    {{"he went to the market to buy fresh bread", "she likes green tea"},
     {"he went to the market to buy bread", "she really likes green tea"},
     0.7111340471337392},
    {{"one two three four five", "six seven eight nine ten eleven", "x y z"},
     {"one two three four five", "six seven eight nine ten twelve", "x y w z"},
     0.7650380986230612},
    {{"a a a a a a", "b b b b"}, {"a a a b b b", "b b c c"}, 0.0},
};

}  // namespace lrmt::testing
