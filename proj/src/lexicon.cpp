#include "lrmt/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "lrmt/error.hpp"
#include "lrmt/parallel.hpp"

namespace lrmt {

namespace {

constexpr std::string_view kPlaceholderPrefix = "__NE";
constexpr std::string_view kFormSeparator = "||";

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

bool is_reserved_token(std::string_view token) {
  return parse_placeholder(token).has_value() || token.starts_with("__opt_");
}

}  // namespace

void LexiconTable::add(const std::string& entity, const std::string& language, std::vector<std::string> forms) {
  auto& slot = entities_[entity][language];
  for (auto& f : forms) {
    if (std::find(slot.begin(), slot.end(), f) == slot.end()) slot.push_back(std::move(f));
  }
}

const std::vector<std::string>* LexiconTable::forms(std::string_view entity, std::string_view language) const {
  auto it = entities_.find(entity);
  if (it == entities_.end()) return nullptr;
  auto lang_it = it->second.find(language);
  return lang_it == it->second.end() ? nullptr : &lang_it->second;
}

LexiconTable parse_lexicon(std::istream& in, std::string_view source_name) {
  LexiconTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (split_whitespace(line).empty()) continue;
    const std::string where = std::string(source_name) + ":" + std::to_string(line_no);
    const auto fields = split_tabs(line);
    if (fields.size() != 3) throw Error(where + ": expected entity<TAB>language<TAB>forms");
    if (fields[0].empty()) throw Error(where + ": empty entity id");
    if (fields[1].empty()) throw Error(where + ": empty language code");
    std::vector<std::string> forms;
    std::size_t start = 0;
    while (true) {
      const auto sep = fields[2].find(kFormSeparator, start);
      const Tokens tokens = split_whitespace(std::string_view(fields[2]).substr(start, sep - start));
      if (tokens.empty()) throw Error(where + ": empty surface form");
      forms.push_back(join(tokens));
      if (sep == std::string::npos) break;
      start = sep + kFormSeparator.size();
    }
    table.add(fields[0], fields[1], std::move(forms));
  }
  return table;
}

LexiconTable load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return parse_lexicon(in, path.string());
}

std::string placeholder(std::size_t index) {
  return std::string(kPlaceholderPrefix) + std::to_string(index);
}

std::optional<std::size_t> parse_placeholder(std::string_view token) {
  if (!token.starts_with(kPlaceholderPrefix)) return std::nullopt;
  const auto digits = token.substr(kPlaceholderPrefix.size());
  if (digits.empty() || digits.size() > 9) return std::nullopt;
  if (digits.size() > 1 && digits[0] == '0') return std::nullopt;
  std::size_t value = 0;
  for (char c : digits) {
    if (c < '0' || c > '9') return std::nullopt;
    value = value * 10 + static_cast<std::size_t>(c - '0');
  }
  return value;
}

const std::string* TargetDictionary::find(std::string_view key) const {
  for (const auto& [ph, surface] : entries) {
    if (ph == key) return &surface;
  }
  return nullptr;
}

EntityTagger::EntityTagger(const LexiconTable& table, std::string language, std::size_t edit_threshold)
    : language_(std::move(language)), threshold_(edit_threshold) {
  for (const auto& [entity, by_language] : table.entities()) {
    auto it = by_language.find(language_);
    if (it == by_language.end()) continue;
    for (const auto& form : it->second) {
      Tokens tokens = split_whitespace(form);
      if (tokens.size() == 1) fuzzy_forms_.push_back({fold_case(decode_utf8(tokens[0])), entity});
      forms_.push_back({std::move(tokens), entity});
    }
  }
  for (std::size_t f = 0; f < forms_.size(); ++f) by_first_token_[forms_[f].tokens.front()].push_back(f);
  // Longest first; forms_ is already in entity order, so a stable sort keeps
  // ties ordered by entity id.
  for (auto& [_, candidates] : by_first_token_) {
    std::stable_sort(candidates.begin(), candidates.end(), [this](std::size_t a, std::size_t b) {
      return forms_[a].tokens.size() > forms_[b].tokens.size();
    });
  }
}

std::optional<std::size_t> EntityTagger::fuzzy_match(const std::string& token) const {
  if (threshold_ == 0 || is_reserved_token(token)) return std::nullopt;
  const std::u32string folded = fold_case(decode_utf8(token));
  const std::size_t cap = std::min(threshold_, (folded.size() + 2) / 3);
  std::optional<std::size_t> best;
  std::size_t best_distance = cap + 1;
  for (std::size_t f = 0; f < fuzzy_forms_.size(); ++f) {
    const auto& form = fuzzy_forms_[f].folded;
    const std::size_t length_gap = form.size() > folded.size() ? form.size() - folded.size() : folded.size() - form.size();
    if (length_gap >= best_distance) continue;
    const std::size_t d = levenshtein(folded, form);
    if (d < best_distance) {
      best_distance = d;
      best = f;
    }
  }
  return best;
}

TaggedSentence EntityTagger::tag(const Tokens& tokens) const {
  TaggedSentence out;
  std::map<std::string, std::string> placeholder_of;  // entity -> placeholder
  auto bind = [&](const std::string& entity, std::string surface) {
    auto [it, inserted] = placeholder_of.emplace(entity, std::string());
    if (inserted) {
      it->second = placeholder(out.source_dict.size());
      out.source_dict.push_back({it->second, entity, std::move(surface)});
    }
    out.tokens.push_back(it->second);
  };

  std::size_t pos = 0;
  while (pos < tokens.size()) {
    const Form* exact = nullptr;
    if (auto it = by_first_token_.find(tokens[pos]); it != by_first_token_.end()) {
      for (std::size_t f : it->second) {
        const auto& form = forms_[f].tokens;
        if (pos + form.size() <= tokens.size() &&
            std::equal(form.begin(), form.end(), tokens.begin() + static_cast<std::ptrdiff_t>(pos))) {
          exact = &forms_[f];
          break;
        }
      }
    }
    if (exact != nullptr) {
      bind(exact->entity, join(exact->tokens));
      pos += exact->tokens.size();
      continue;
    }
    if (auto fuzzy = fuzzy_match(tokens[pos])) {
      bind(fuzzy_forms_[*fuzzy].entity, tokens[pos]);
    } else {
      out.tokens.push_back(tokens[pos]);
    }
    ++pos;
  }
  return out;
}

TaggedSentence tag_sentence(const Tokens& tokens, std::string_view source_language, const LexiconTable& table,
                            std::size_t edit_threshold) {
  return EntityTagger(table, std::string(source_language), edit_threshold).tag(tokens);
}

TargetDictionary build_target_dictionary(std::span<const EntityMention> source_dict,
                                         std::string_view target_language, const LexiconTable& table) {
  TargetDictionary dict;
  for (const auto& mention : source_dict) {
    const auto* forms = table.forms(mention.entity, target_language);
    dict.entries.emplace_back(mention.placeholder,
                              forms != nullptr && !forms->empty() ? forms->front() : mention.surface);
  }
  return dict;
}

TargetDictionary build_target_dictionary(const TaggedSentence& tagged, std::string_view target_language,
                                         const LexiconTable& table) {
  return build_target_dictionary(tagged.source_dict, target_language, table);
}

Tokens detag(const Tokens& translated, const TargetDictionary& dict, DetagReport* report) {
  Tokens out;
  out.reserve(translated.size());
  for (const auto& token : translated) {
    if (!parse_placeholder(token)) {
      out.push_back(token);
      continue;
    }
    if (const std::string* surface = dict.find(token)) {
      for (auto& t : split_whitespace(*surface)) out.push_back(std::move(t));
      if (report != nullptr) ++report->substituted;
    } else if (report != nullptr) {
      ++report->dropped;
      report->dropped_tokens.push_back(token);
    }
  }
  return out;
}

ParallelText tag_corpus(const ParallelText& text, const EntityTagger& tagger, std::vector<TaggedSentence>* dicts,
                        std::size_t workers) {
  std::vector<TaggedSentence> tagged(text.size());
  parallel_for(text.size(), workers, [&](std::size_t i) { tagged[i] = tagger.tag(text[i].tokens); });
  std::vector<Line> lines;
  lines.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) lines.push_back({text[i].id, tagged[i].tokens});
  if (dicts != nullptr) *dicts = std::move(tagged);
  return ParallelText(text.language(), std::move(lines));
}

void write_source_dicts(std::ostream& out, const ParallelText& tagged, const std::vector<TaggedSentence>& dicts) {
  if (dicts.size() != tagged.size()) throw Error("write_source_dicts: dictionary count does not match lines");
  for (std::size_t i = 0; i < dicts.size(); ++i) {
    for (const auto& m : dicts[i].source_dict) {
      out << tagged[i].id << '\t' << m.placeholder << '\t' << m.entity << '\t' << m.surface << '\n';
    }
  }
}

std::map<std::string, std::vector<EntityMention>> read_source_dicts(std::istream& in) {
  std::map<std::string, std::vector<EntityMention>> dicts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 4 || !parse_placeholder(fields[1])) {
      throw Error("source dictionary line " + std::to_string(line_no) +
                  ": expected line_id<TAB>placeholder<TAB>entity<TAB>surface");
    }
    dicts[fields[0]].push_back({fields[1], fields[2], fields[3]});
  }
  return dicts;
}

}  // namespace lrmt
