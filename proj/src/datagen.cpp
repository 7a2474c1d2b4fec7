#include "lrmt/datagen.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "lrmt/checksum.hpp"
#include "lrmt/error.hpp"

namespace lrmt {

std::string source_tag_token(std::string_view language) { return "__opt_src_" + std::string(language); }
std::string target_tag_token(std::string_view language) { return "__opt_tgt_" + std::string(language); }

DirectionTag::DirectionTag(std::string src_code, std::string tgt_code)
    : src(std::move(src_code)), tgt(std::move(tgt_code)) {
  if (src.empty() || tgt.empty()) throw Error("direction tag: empty language code");
  if (src == tgt) throw Error("direction tag: source and target are both '" + src + "'");
}

Tokens DirectionTag::tokens() const { return {source_tag_token(src), target_tag_token(tgt)}; }

std::string DirectionTag::render() const { return join(tokens()); }

std::size_t Dataset::size() const {
  std::size_t n = 0;
  for (const auto& b : blocks_) n += b.rows.size();
  return n;
}

Example Dataset::make_example(const Block& block, const std::pair<std::size_t, std::size_t>& row) {
  const Line& src = (*block.source)[row.first];
  const Line& tgt = (*block.target)[row.second];
  Example ex{block.id_from_target ? tgt.id : src.id, block.direction, block.direction.tokens(), tgt.tokens};
  ex.source.insert(ex.source.end(), src.tokens.begin(), src.tokens.end());
  return ex;
}

std::vector<Example> Dataset::materialize() const {
  std::vector<Example> out;
  out.reserve(size());
  for_each([&](const Example& ex) { out.push_back(ex); });
  return out;
}

CorpusView::CorpusView(std::span<const ParallelText> texts) {
  if (texts.empty()) throw Error("corpus view: no texts");
  std::set<std::string> seen;
  for (const auto& t : texts) {
    if (!seen.insert(t.language()).second) throw Error("corpus view: duplicate language '" + t.language() + "'");
  }
  if (texts.size() == 1) {
    texts_.push_back(std::make_shared<const ParallelText>(texts[0]));
  } else {
    for (auto& t : intersect(texts)) texts_.push_back(std::make_shared<const ParallelText>(std::move(t)));
  }
  ids_ = texts_.front()->ids();
}

std::shared_ptr<const ParallelText> CorpusView::shared(std::string_view language) const {
  for (const auto& t : texts_) {
    if (t->language() == language) return t;
  }
  throw Error("language '" + std::string(language) + "' is not in the corpus view");
}

const ParallelText& CorpusView::at(std::string_view language) const { return *shared(language); }

bool CorpusView::has(std::string_view language) const {
  return std::any_of(texts_.begin(), texts_.end(), [&](const auto& t) { return t->language() == language; });
}

std::vector<std::string> CorpusView::languages() const {
  std::vector<std::string> out;
  for (const auto& t : texts_) out.push_back(t->language());
  return out;
}

CorpusView CorpusView::restricted(std::span<const std::string> ids) const {
  CorpusView view;
  for (const auto& t : texts_) view.texts_.push_back(std::make_shared<const ParallelText>(t->restrict_to(ids)));
  view.ids_.assign(ids.begin(), ids.end());
  return view;
}

namespace {

std::vector<std::pair<std::size_t, std::size_t>> diagonal_rows(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = {i, i};
  return rows;
}

void check_distinct(std::span<const std::string> languages, const char* what) {
  std::set<std::string> seen;
  for (const auto& l : languages) {
    if (!seen.insert(l).second) throw Error(std::string(what) + ": duplicate language '" + l + "'");
  }
}

}  // namespace

Dataset emit_complete(std::span<const std::string> languages, const CorpusView& view) {
  if (languages.size() < 2) throw Error("emit_complete: need at least two languages");
  check_distinct(languages, "emit_complete");
  for (const auto& l : languages) {
    if (!view.has(l)) throw Error("emit_complete: language '" + l + "' missing from corpus view");
  }
  Dataset data;
  const auto rows = diagonal_rows(view.size());
  for (const auto& a : languages) {
    for (const auto& b : languages) {
      if (a == b) continue;
      data.add_block({DirectionTag(a, b), view.shared(a), view.shared(b), rows});
    }
  }
  return data;
}

Dataset emit_star(std::span<const std::string> sources, std::string_view target, const CorpusView& view) {
  if (sources.empty()) throw Error("emit_star: no source languages");
  check_distinct(sources, "emit_star");
  if (std::find(sources.begin(), sources.end(), target) != sources.end()) {
    throw Error("emit_star: target '" + std::string(target) + "' is also a source");
  }
  if (!view.has(target)) throw Error("emit_star: target '" + std::string(target) + "' missing from corpus view");
  for (const auto& l : sources) {
    if (!view.has(l)) throw Error("emit_star: language '" + l + "' missing from corpus view");
  }
  Dataset data;
  const auto rows = diagonal_rows(view.size());
  for (const auto& s : sources) {
    data.add_block({DirectionTag(s, std::string(target)), view.shared(s), view.shared(target), rows});
  }
  return data;
}

CorpusView symmetrize(const ParallelText& low, std::span<const ParallelText> sources) {
  std::vector<ParallelText> texts{low};
  for (const auto& source : sources) {
    std::vector<std::string> missing;
    for (const auto& line : low.lines()) {
      if (!source.contains(line.id)) missing.push_back(line.id);
    }
    if (!missing.empty()) {
      std::string list;
      for (std::size_t i = 0; i < missing.size() && i < 10; ++i) list += (i ? ", " : "") + missing[i];
      if (missing.size() > 10) list += ", ... (" + std::to_string(missing.size()) + " total)";
      throw Error("symmetrize: " + source.language() + " lacks low-resource line IDs: " + list);
    }
    texts.push_back(source);
  }
  return CorpusView(texts);
}

ParallelText replicate_asymmetric(const ParallelText& low, std::size_t target_size) {
  if (low.empty()) throw Error("replicate_asymmetric: empty text");
  if (target_size < low.size()) throw Error("replicate_asymmetric: target size below text size");
  std::vector<Line> lines;
  lines.reserve(target_size);
  for (std::size_t k = 0; k < target_size; ++k) {
    const Line& line = low[k % low.size()];
    lines.push_back({line.id + "#" + std::to_string(k / low.size()), line.tokens});
  }
  return ParallelText(low.language(), std::move(lines));
}

Dataset emit_asymmetric(std::span<const std::string> family, const CorpusView& family_view, const ParallelText& low) {
  if (family.empty()) throw Error("emit_asymmetric: empty family");
  check_distinct(family, "emit_asymmetric");
  const std::string& low_code = low.language();
  if (std::find(family.begin(), family.end(), low_code) != family.end()) {
    throw Error("emit_asymmetric: family contains the low-resource language");
  }
  const auto replicated =
      std::make_shared<const ParallelText>(replicate_asymmetric(low, std::max(family_view.size(), low.size())));
  // Position of every low-resource line's ID inside the family view.
  std::unordered_map<std::string, std::size_t> view_index;
  for (std::size_t i = 0; i < family_view.size(); ++i) view_index.emplace(family_view.ids()[i], i);
  std::vector<std::size_t> base(replicated->size());
  for (std::size_t k = 0; k < replicated->size(); ++k) {
    const auto& id = low[k % low.size()].id;
    auto it = view_index.find(id);
    if (it == view_index.end()) throw Error("emit_asymmetric: low-resource line '" + id + "' missing from family");
    base[k] = it->second;
  }

  std::vector<std::string> languages(family.begin(), family.end());
  languages.push_back(low_code);
  const auto family_rows = diagonal_rows(family_view.size());
  Dataset data;
  for (const auto& a : languages) {
    for (const auto& b : languages) {
      if (a == b) continue;
      Dataset::Block block{DirectionTag(a, b), nullptr, nullptr, {}};
      if (a == low_code) {
        block.source = replicated;
        block.target = family_view.shared(b);
        for (std::size_t k = 0; k < base.size(); ++k) block.rows.emplace_back(k, base[k]);
      } else if (b == low_code) {
        block.source = family_view.shared(a);
        block.target = replicated;
        block.id_from_target = true;
        for (std::size_t k = 0; k < base.size(); ++k) block.rows.emplace_back(base[k], k);
      } else {
        block.source = family_view.shared(a);
        block.target = family_view.shared(b);
        block.rows = family_rows;
      }
      data.add_block(std::move(block));
    }
  }
  return data;
}

bool Vocabulary::contains(std::string_view token) const {
  return std::find(tokens.begin(), tokens.end(), token) != tokens.end();
}

Vocabulary build_vocab(std::span<const ParallelText> texts, const ParallelText& low,
                       std::span<const DirectionTag> tags, std::size_t max_ne) {
  std::vector<std::string> specials;
  {
    std::set<std::string> tag_tokens;
    for (const auto& tag : tags) {
      tag_tokens.insert(source_tag_token(tag.src));
      tag_tokens.insert(target_tag_token(tag.tgt));
    }
    specials.assign(tag_tokens.begin(), tag_tokens.end());
    for (std::size_t i = 0; i < max_ne; ++i) specials.push_back(placeholder(i));
  }
  const std::unordered_set<std::string> special_set(specials.begin(), specials.end());

  std::unordered_map<std::string, std::size_t> freq;
  auto count = [&](const ParallelText& text) {
    for (const auto& line : text.lines()) {
      for (const auto& tok : line.tokens) ++freq[tok];
    }
  };
  for (const auto& t : texts) count(t);
  count(low);

  std::vector<std::pair<std::string, std::size_t>> ordered;
  ordered.reserve(freq.size());
  for (auto& [tok, n] : freq) {
    if (!special_set.contains(tok)) ordered.emplace_back(tok, n);
  }
  std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocabulary vocab{std::move(specials)};
  for (auto& [tok, _] : ordered) vocab.tokens.push_back(std::move(tok));
  return vocab;
}

std::size_t max_placeholders(std::span<const ParallelText> texts) {
  std::size_t max_ne = 0;
  for (const auto& text : texts) {
    for (const auto& line : text.lines()) {
      for (const auto& tok : line.tokens) {
        if (auto idx = parse_placeholder(tok)) max_ne = std::max(max_ne, *idx + 1);
      }
    }
  }
  return max_ne;
}

std::string stage_name(StageKind stage) {
  switch (stage) {
    case StageKind::kPretrain: return "stage1";
    case StageKind::kSymmetric: return "stage2";
    case StageKind::kStar: return "stage3";
    case StageKind::kAsymmetric: return "aml";
  }
  throw Error("invalid stage");
}

StageKind parse_stage(std::string_view name) {
  if (name == "1" || name == "stage1") return StageKind::kPretrain;
  if (name == "2" || name == "stage2") return StageKind::kSymmetric;
  if (name == "3" || name == "stage3") return StageKind::kStar;
  if (name == "aml") return StageKind::kAsymmetric;
  throw Error("unknown stage '" + std::string(name) + "' (expected 1, 2, 3 or aml)");
}

SplitSpec default_split(StageKind stage) {
  if (stage == StageKind::kPretrain) return {{{"train", 0.8}, {"val", 0.1}, {"test", 0.1}}, 0, SplitMode::kContiguous};
  return {{{"train", 0.95}, {"val", 0.05}}, 0, SplitMode::kContiguous};
}

namespace {

// Shared line IDs of each split, decided once on `reference`.
std::map<std::string, std::vector<std::string>> split_ids(const ParallelText& reference, const SplitSpec& spec) {
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& [name, part] : split(reference, spec)) out[name] = part.ids();
  return out;
}

}  // namespace

StageData emit_stage(const StageSpec& spec, std::span<const ParallelText> corpora, const ParallelText& low,
                     const LexiconTable* lexicon, std::size_t edit_threshold, std::size_t workers) {
  if (spec.languages.empty()) throw Error("emit_stage: empty family");
  check_distinct(spec.languages, "emit_stage");
  const std::string& low_code = spec.low_resource.empty() ? low.language() : spec.low_resource;
  if (low_code != low.language()) throw Error("emit_stage: low-resource text is '" + low.language() + "'");
  if (std::find(spec.languages.begin(), spec.languages.end(), low_code) != spec.languages.end()) {
    throw Error("emit_stage: family contains the low-resource language '" + low_code + "'");
  }

  auto prepare = [&](const ParallelText& text) {
    if (lexicon == nullptr) return text;
    return tag_corpus(text, EntityTagger(*lexicon, text.language(), edit_threshold), nullptr, workers);
  };
  std::vector<ParallelText> family;
  for (const auto& code : spec.languages) {
    auto it = std::find_if(corpora.begin(), corpora.end(), [&](const ParallelText& t) { return t.language() == code; });
    if (it == corpora.end()) throw Error("emit_stage: no corpus for language '" + code + "'");
    family.push_back(prepare(*it));
  }
  const ParallelText low_text = prepare(low);

  StageData data;
  data.stage = spec.stage;
  data.languages = spec.languages;
  std::vector<std::string> with_low = spec.languages;
  with_low.push_back(low_code);

  switch (spec.stage) {
    case StageKind::kPretrain: {
      const CorpusView view(family);
      for (const auto& [name, ids] : split_ids(view.at(spec.languages.front()), spec.split)) {
        data.splits.emplace(name, emit_complete(spec.languages, view.restricted(ids)));
      }
      break;
    }
    case StageKind::kSymmetric:
    case StageKind::kStar: {
      data.languages = with_low;
      const CorpusView view = symmetrize(low_text, family);
      for (const auto& [name, ids] : split_ids(low_text, spec.split)) {
        const CorpusView part = view.restricted(ids);
        data.splits.emplace(name, spec.stage == StageKind::kSymmetric ? emit_complete(with_low, part)
                                                                      : emit_star(spec.languages, low_code, part));
      }
      break;
    }
    case StageKind::kAsymmetric: {
      data.languages = with_low;
      const CorpusView symmetric = symmetrize(low_text, family);
      const CorpusView full(family);
      const auto parts = split_ids(low_text, spec.split);
      const auto& first_split = spec.split.ratios.front().first;
      // Held-out low-resource lines stay out of the family-to-family train data.
      std::unordered_set<std::string> held_out;
      for (const auto& [name, ids] : parts) {
        if (name != first_split) held_out.insert(ids.begin(), ids.end());
      }
      std::vector<std::string> train_ids;
      for (const auto& id : full.ids()) {
        if (!held_out.contains(id)) train_ids.push_back(id);
      }
      for (const auto& [name, ids] : parts) {
        if (name == first_split) {
          data.splits.emplace(name, emit_asymmetric(spec.languages, full.restricted(train_ids), low_text.restrict_to(ids)));
        } else {
          data.splits.emplace(name, emit_complete(with_low, symmetric.restricted(ids)));
        }
      }
      break;
    }
  }
  for (const auto& block : data.splits.begin()->second.blocks()) data.directions.push_back(block.direction);
  return data;
}

std::vector<DirectionTag> pipeline_directions(std::span<const std::string> family, std::string_view low) {
  std::vector<std::string> all(family.begin(), family.end());
  all.emplace_back(low);
  std::vector<DirectionTag> tags;
  for (const auto& a : all) {
    for (const auto& b : all) {
      if (a != b) tags.emplace_back(a, b);
    }
  }
  return tags;
}

namespace {

struct HashedWriter {
  std::ofstream out;
  Sha256 hasher;

  explicit HashedWriter(const std::filesystem::path& path) : out(path, std::ios::binary) {
    if (!out) throw Error("cannot write " + path.string());
  }
  void line(const Tokens& tokens) {
    std::string text = join(tokens);
    text += '\n';
    out << text;
    hasher.update(text);
  }
  std::string finish() {
    out.close();
    if (!out) throw Error("write failed");
    return hasher.hex_digest();
  }
};

}  // namespace

nlohmann::json write_stage(const std::filesystem::path& root, const StageData& data) {
  const auto dir = root / stage_name(data.stage);
  std::filesystem::create_directories(dir);
  nlohmann::json entry;
  entry["languages"] = data.languages;
  entry["directions"] = data.directions.size();
  for (const auto& [name, dataset] : data.splits) {
    HashedWriter src(dir / (name + ".src"));
    HashedWriter tgt(dir / (name + ".tgt"));
    dataset.for_each([&](const Example& ex) {
      src.line(ex.source);
      tgt.line(ex.target);
    });
    nlohmann::json split;
    split["examples"] = dataset.size();
    split["src_sha256"] = src.finish();
    split["tgt_sha256"] = tgt.finish();
    entry["splits"][name] = split;
  }
  return entry;
}

nlohmann::json write_vocab(const std::filesystem::path& path, const Vocabulary& vocab) {
  HashedWriter out(path);
  for (const auto& tok : vocab.tokens) out.line({tok});
  nlohmann::json entry;
  entry["size"] = vocab.tokens.size();
  entry["sha256"] = out.finish();
  return entry;
}

}  // namespace lrmt
