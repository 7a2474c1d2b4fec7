#include "lrmt/align.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include <spdlog/spdlog.h>

#include "lrmt/error.hpp"

namespace lrmt {

Bitext make_bitext(const ParallelText& source, const ParallelText& target) {
  Bitext bitext;
  for (const auto& line : source.lines()) {
    if (const Tokens* tgt = target.find(line.id)) bitext.push_back({line.tokens, *tgt});
  }
  return bitext;
}

double AlignmentModel::prob(std::string_view source, std::string_view target) const {
  auto row_it = table_.find(source);
  if (row_it == table_.end()) return epsilon_;
  auto it = row_it->second.find(target);
  return it == row_it->second.end() ? epsilon_ : it->second;
}

bool AlignmentModel::has_entry(std::string_view source, std::string_view target) const {
  auto row_it = table_.find(source);
  return row_it != table_.end() && row_it->second.find(target) != row_it->second.end();
}

const TranslationRow* AlignmentModel::row(std::string_view source) const {
  auto it = table_.find(source);
  return it == table_.end() ? nullptr : &it->second;
}

namespace {

class Interner {
 public:
  std::uint32_t intern(const std::string& word) {
    auto [it, inserted] = ids_.emplace(word, static_cast<std::uint32_t>(words_.size()));
    if (inserted) words_.push_back(word);
    return it->second;
  }
  const std::string& word(std::uint32_t id) const { return words_[id]; }

 private:
  std::unordered_map<std::string, std::uint32_t> ids_;
  std::vector<std::string> words_;
};

// One usable sentence pair with the parameter index of every (source, target)
// cell; source position 0 is the null word.
struct IndexedPair {
  std::size_t source_len = 0;
  std::size_t target_len = 0;
  std::vector<std::uint32_t> cells;  // (source_len + 1) * target_len, target-major
};

// Runs one E-step: returns the log-likelihood and, if counts is non-null,
// accumulates expected counts.
double expectation(const std::vector<IndexedPair>& pairs, const std::vector<double>& t, double p_null,
                   std::vector<double>* counts) {
  double log_likelihood = 0.0;
  std::vector<double> weights;
  for (const auto& pair : pairs) {
    const std::size_t width = pair.source_len + 1;
    const double word_prior = (1.0 - p_null) / static_cast<double>(pair.source_len);
    weights.resize(width);
    for (std::size_t j = 0; j < pair.target_len; ++j) {
      const std::uint32_t* cell = &pair.cells[j * width];
      weights[0] = p_null * t[cell[0]];
      double denom = weights[0];
      for (std::size_t i = 1; i < width; ++i) {
        weights[i] = word_prior * t[cell[i]];
        denom += weights[i];
      }
      log_likelihood += std::log(denom);
      if (counts != nullptr && denom > 0.0) {
        for (std::size_t i = 0; i < width; ++i) (*counts)[cell[i]] += weights[i] / denom;
      }
    }
  }
  return log_likelihood;
}

}  // namespace

AlignmentModel train_alignment(const Bitext& bitext, const AlignmentConfig& config) {
  if (config.iterations < 1) throw Error("train_alignment: iterations must be >= 1");
  if (!(config.p_null >= 0.0 && config.p_null < 1.0)) throw Error("train_alignment: p_null must be in [0,1)");

  Interner sources;
  Interner targets;
  sources.intern(std::string(kNullWord));
  std::unordered_map<std::uint64_t, std::uint32_t> cell_ids;
  std::vector<std::uint32_t> cell_source;
  std::vector<std::uint32_t> cell_target;
  std::vector<IndexedPair> pairs;
  std::size_t skipped = 0;

  auto cell_for = [&](std::uint32_t s, std::uint32_t t) {
    const std::uint64_t key = (static_cast<std::uint64_t>(s) << 32) | t;
    auto [it, inserted] = cell_ids.emplace(key, static_cast<std::uint32_t>(cell_source.size()));
    if (inserted) {
      cell_source.push_back(s);
      cell_target.push_back(t);
    }
    return it->second;
  };

  for (const auto& pair : bitext) {
    if (pair.source.empty() || pair.target.empty()) {
      ++skipped;
      continue;
    }
    IndexedPair indexed;
    indexed.source_len = pair.source.size();
    indexed.target_len = pair.target.size();
    std::vector<std::uint32_t> src_ids{0};
    for (const auto& w : pair.source) src_ids.push_back(sources.intern(w));
    indexed.cells.reserve(src_ids.size() * pair.target.size());
    for (const auto& w : pair.target) {
      const std::uint32_t tgt = targets.intern(w);
      for (auto s : src_ids) indexed.cells.push_back(cell_for(s, tgt));
    }
    pairs.push_back(std::move(indexed));
  }
  if (skipped > 0) spdlog::warn("train_alignment: skipped {} sentence pairs with an empty side", skipped);
  if (pairs.empty()) throw Error("train_alignment: no usable sentence pairs");

  // Uniform over the targets each source word co-occurs with.
  std::vector<double> row_size;
  for (auto s : cell_source) {
    if (s >= row_size.size()) row_size.resize(s + 1, 0.0);
    row_size[s] += 1.0;
  }
  std::vector<double> t(cell_source.size());
  for (std::size_t c = 0; c < t.size(); ++c) t[c] = 1.0 / row_size[cell_source[c]];

  AlignmentModel model;
  model.p_null_ = config.p_null;
  model.epsilon_ = config.epsilon;
  model.iterations_ = config.iterations;
  model.skipped_pairs_ = skipped;

  std::vector<double> counts(t.size());
  std::vector<double> row_total(row_size.size());
  for (int iter = 0; iter < config.iterations; ++iter) {
    std::fill(counts.begin(), counts.end(), 0.0);
    model.log_likelihood_.push_back(expectation(pairs, t, config.p_null, &counts));
    std::fill(row_total.begin(), row_total.end(), 0.0);
    for (std::size_t c = 0; c < counts.size(); ++c) row_total[cell_source[c]] += counts[c];
    for (std::size_t c = 0; c < t.size(); ++c) {
      const double total = row_total[cell_source[c]];
      if (total > 0.0) t[c] = counts[c] / total;
    }
  }
  model.log_likelihood_.push_back(expectation(pairs, t, config.p_null, nullptr));

  for (std::size_t c = 0; c < t.size(); ++c) {
    model.table_[sources.word(cell_source[c])][targets.word(cell_target[c])] = t[c];
  }
  return model;
}

double corpus_log_likelihood(const AlignmentModel& model, const Bitext& bitext) {
  double total = 0.0;
  for (const auto& pair : bitext) {
    if (pair.source.empty() || pair.target.empty()) continue;
    const double word_prior = (1.0 - model.p_null()) / static_cast<double>(pair.source.size());
    for (const auto& f : pair.target) {
      double p = model.p_null() * model.null_prob(f);
      for (const auto& e : pair.source) p += word_prior * model.prob(e, f);
      total += std::log(p);
    }
  }
  return total;
}

SentenceAlignment viterbi_align(const AlignmentModel& model, const SentencePair& pair) {
  SentenceAlignment alignment;
  if (pair.source.empty()) return alignment;
  const double word_prior = (1.0 - model.p_null()) / static_cast<double>(pair.source.size());
  for (std::size_t j = 0; j < pair.target.size(); ++j) {
    const auto& f = pair.target[j];
    double best = -1.0;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < pair.source.size(); ++i) {
      const TranslationRow* row = model.row(pair.source[i]);
      if (row == nullptr) continue;
      auto it = row->find(f);
      if (it == row->end()) continue;
      const double score = word_prior * it->second;
      if (score > best) {
        best = score;
        best_i = i;
      }
    }
    if (best < 0.0) continue;
    if (model.p_null() * model.null_prob(f) > best) continue;
    alignment.links.emplace_back(best_i, j);
  }
  return alignment;
}

const WordStatistics* AlignmentStatistics::find(std::string_view word) const {
  auto it = words.find(word);
  return it == words.end() ? nullptr : &it->second;
}

std::size_t AlignmentStatistics::total_observations() const {
  std::size_t total = 0;
  for (const auto& [_, w] : words) total += w.n_obs;
  return total;
}

AlignmentStatistics collect_statistics(const AlignmentModel& model, const Bitext& bitext) {
  AlignmentStatistics stats;
  std::vector<std::size_t> fertility;
  std::vector<long> first_distortion;
  for (const auto& pair : bitext) {
    if (pair.source.empty() || pair.target.empty()) continue;
    ++stats.source_lengths[pair.source.size()];
    for (const auto& w : pair.source) stats.words.try_emplace(w);

    const auto alignment = viterbi_align(model, pair);
    fertility.assign(pair.source.size(), 0);
    first_distortion.assign(pair.source.size(), 0);
    long previous = -1;
    for (const auto& [i, j] : alignment.links) {
      if (fertility[i] == 0) first_distortion[i] = distortion(static_cast<long>(i), previous);
      ++fertility[i];
      previous = static_cast<long>(i);
    }
    for (std::size_t i = 0; i < pair.source.size(); ++i) {
      if (fertility[i] == 0) continue;
      auto& w = stats.words[pair.source[i]];
      ++w.n_obs;
      const bool f1 = fertility[i] == 1;
      const bool d0 = first_distortion[i] == 0;
      w.fert1 += f1 ? 1 : 0;
      w.dist0 += d0 ? 1 : 0;
      w.joint += (f1 && d0) ? 1 : 0;
    }
  }
  for (auto& [_, w] : stats.words) {
    if (w.n_obs == 0) continue;
    const auto n = static_cast<double>(w.n_obs);
    w.p_fert1 = static_cast<double>(w.fert1) / n;
    w.p_dist0 = static_cast<double>(w.dist0) / n;
    w.p_joint = static_cast<double>(w.joint) / n;
  }
  return stats;
}

void write_model(std::ostream& out, const AlignmentModel& model) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "# p_null\t" << model.p_null() << '\n';
  out << "# epsilon\t" << model.epsilon() << '\n';
  out << "# iterations\t" << model.iterations() << '\n';
  for (const auto& [source, row] : model.table()) {
    for (const auto& [target, p] : row) out << source << '\t' << target << '\t' << p << '\n';
  }
  out.precision(old_precision);
}

AlignmentModel read_model(std::istream& in) {
  AlignmentModel model;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, '\t')) fields.push_back(field);
    try {
      if (line.rfind("# ", 0) == 0) {
        if (fields.size() != 2) throw Error("bad header");
        if (fields[0] == "# p_null") model.p_null_ = std::stod(fields[1]);
        else if (fields[0] == "# epsilon") model.epsilon_ = std::stod(fields[1]);
        else if (fields[0] == "# iterations") model.iterations_ = std::stoi(fields[1]);
        else throw Error("unknown header " + fields[0]);
        continue;
      }
      if (fields.size() != 3) throw Error("expected source<TAB>target<TAB>prob");
      model.table_[fields[0]][fields[1]] = std::stod(fields[2]);
    } catch (const std::logic_error& e) {
      throw Error("model line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error("model line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return model;
}

void write_statistics(std::ostream& out, const AlignmentStatistics& stats) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (const auto& [word, w] : stats.words) {
    out << word << '\t' << w.n_obs << '\t' << w.p_fert1 << '\t' << w.p_dist0 << '\t' << w.p_joint << '\n';
  }
  out.precision(old_precision);
}

void write_alignments(std::ostream& out, std::span<const SentenceAlignment> alignments) {
  for (const auto& a : alignments) {
    for (std::size_t k = 0; k < a.links.size(); ++k) {
      if (k > 0) out << ' ';
      out << a.links[k].first << '-' << a.links[k].second;
    }
    out << '\n';
  }
}

}  // namespace lrmt
