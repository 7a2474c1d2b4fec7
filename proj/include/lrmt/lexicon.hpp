#pragma once

// Order-preserving named-entity lexiconization. Entities in a sentence are
// replaced by placeholders __NE0, __NE1, ... numbered by first appearance;
// after translation the placeholders are decoded through a per-sentence
// target dictionary built from a multilingual lexicon table.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lrmt/corpus.hpp"
#include "lrmt/text.hpp"

namespace lrmt {

/// entity id -> language -> surface forms (a form may span several tokens).
class LexiconTable {
 public:
  using FormsByLanguage = std::map<std::string, std::vector<std::string>, std::less<>>;

  /// Appends forms, merging with any already present for (entity, language).
  void add(const std::string& entity, const std::string& language, std::vector<std::string> forms);

  /// nullptr if the entity has no entry for the language.
  const std::vector<std::string>* forms(std::string_view entity, std::string_view language) const;
  const std::map<std::string, FormsByLanguage, std::less<>>& entities() const { return entities_; }
  std::size_t size() const { return entities_.size(); }

 private:
  std::map<std::string, FormsByLanguage, std::less<>> entities_;
};

/// Rows "entity_id<TAB>language<TAB>form1||form2...". Blank lines are
/// ignored; malformed rows throw Error with the line number.
LexiconTable parse_lexicon(std::istream& in, std::string_view source_name = "<stream>");
LexiconTable load_lexicon(const std::filesystem::path& path);

std::string placeholder(std::size_t index);
/// Index of a "__NE<digits>" token, nullopt for anything else.
std::optional<std::size_t> parse_placeholder(std::string_view token);

struct EntityMention {
  std::string placeholder;
  std::string entity;
  std::string surface;  // first matched source surface, tokens joined by spaces

  friend bool operator==(const EntityMention&, const EntityMention&) = default;
};

struct TaggedSentence {
  Tokens tokens;                           // template with placeholders
  std::vector<EntityMention> source_dict;  // ordered by placeholder index
};

struct TargetDictionary {
  std::vector<std::pair<std::string, std::string>> entries;  // placeholder -> surface

  const std::string* find(std::string_view placeholder) const;
};

inline constexpr std::size_t kDefaultEditThreshold = 2;

/// Per-language matcher built once from a lexicon table.
class EntityTagger {
 public:
  EntityTagger(const LexiconTable& table, std::string language,
               std::size_t edit_threshold = kDefaultEditThreshold);

  /// Scans left to right. At each position the longest exact form match wins
  /// (ties by entity id); otherwise a single token may match a single-token
  /// form fuzzily: case-insensitive Levenshtein distance <= edit_threshold
  /// and <= ceil(len / 3), len counted in code points of the token.
  TaggedSentence tag(const Tokens& tokens) const;

  const std::string& language() const { return language_; }

 private:
  struct Form {
    Tokens tokens;
    std::string entity;
  };
  struct FuzzyForm {
    std::u32string folded;
    std::string entity;
  };

  std::string language_;
  std::size_t threshold_;
  std::vector<Form> forms_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_first_token_;
  std::vector<FuzzyForm> fuzzy_forms_;

  std::optional<std::size_t> fuzzy_match(const std::string& token) const;
};

TaggedSentence tag_sentence(const Tokens& tokens, std::string_view source_language, const LexiconTable& table,
                            std::size_t edit_threshold = kDefaultEditThreshold);

/// Maps each placeholder to the first listed target-language form of its
/// entity, or to the matched source surface when the entity has none.
TargetDictionary build_target_dictionary(const TaggedSentence& tagged, std::string_view target_language,
                                         const LexiconTable& table);
TargetDictionary build_target_dictionary(std::span<const EntityMention> source_dict,
                                         std::string_view target_language, const LexiconTable& table);

struct DetagReport {
  std::size_t substituted = 0;
  std::size_t dropped = 0;                 // placeholders absent from the dictionary
  std::vector<std::string> dropped_tokens;
};

/// Replaces known placeholders by their surfaces and deletes unknown ones.
/// All other tokens pass through unchanged.
Tokens detag(const Tokens& translated, const TargetDictionary& dict, DetagReport* report = nullptr);

/// Tags every line; source dictionaries are returned in line order when
/// `dicts` is non-null.
ParallelText tag_corpus(const ParallelText& text, const EntityTagger& tagger,
                        std::vector<TaggedSentence>* dicts = nullptr, std::size_t workers = 1);

/// "line_id<TAB>placeholder<TAB>entity<TAB>surface" rows.
void write_source_dicts(std::ostream& out, const ParallelText& tagged, const std::vector<TaggedSentence>& dicts);
std::map<std::string, std::vector<EntityMention>> read_source_dicts(std::istream& in);

}  // namespace lrmt
