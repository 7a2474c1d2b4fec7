#pragma once

// Training-data emission for the three-stage multilingual pipeline:
// complete (many-to-many) and star (many-to-one) direction graphs, the
// symmetric low-resource subset, the shared vocabulary and the
// asymmetric-replication baseline.

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "lrmt/corpus.hpp"
#include "lrmt/lexicon.hpp"

namespace lrmt {

struct DirectionTag {
  std::string src;
  std::string tgt;

  /// Throws Error when src == tgt or either code is empty.
  DirectionTag(std::string src_code, std::string tgt_code);

  Tokens tokens() const;                 // {"__opt_src_<src>", "__opt_tgt_<tgt>"}
  std::string render() const;            // the two tokens joined by a space

  friend bool operator==(const DirectionTag&, const DirectionTag&) = default;
};

std::string source_tag_token(std::string_view language);
std::string target_tag_token(std::string_view language);

struct Example {
  std::string line_id;
  DirectionTag direction;
  Tokens source;  // direction tag tokens followed by the source sentence
  Tokens target;
};

/// Examples grouped into per-direction blocks that reference shared texts, so
/// large complete graphs are generated on the fly instead of copied.
class Dataset {
 public:
  struct Block {
    DirectionTag direction;
    std::shared_ptr<const ParallelText> source;
    std::shared_ptr<const ParallelText> target;
    std::vector<std::pair<std::size_t, std::size_t>> rows;  // (source line, target line)
    bool id_from_target = false;
  };

  void add_block(Block block) { blocks_.push_back(std::move(block)); }
  const std::vector<Block>& blocks() const { return blocks_; }
  std::size_t size() const;
  bool empty() const { return size() == 0; }

  /// Calls fn(const Example&) in emission order.
  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (const auto& block : blocks_) {
      for (const auto& row : block.rows) fn(make_example(block, row));
    }
  }
  std::vector<Example> materialize() const;

 private:
  static Example make_example(const Block& block, const std::pair<std::size_t, std::size_t>& row);
  std::vector<Block> blocks_;
};

/// Several languages restricted to one shared, ordered set of line IDs.
class CorpusView {
 public:
  CorpusView() = default;
  /// Intersects the texts on their line IDs (order of texts[0]). A single
  /// text is taken as is. Throws on duplicate languages or no shared IDs.
  explicit CorpusView(std::span<const ParallelText> texts);

  const ParallelText& at(std::string_view language) const;
  std::shared_ptr<const ParallelText> shared(std::string_view language) const;
  bool has(std::string_view language) const;
  const std::vector<std::string>& ids() const { return ids_; }
  std::size_t size() const { return ids_.size(); }
  std::vector<std::string> languages() const;
  CorpusView restricted(std::span<const std::string> ids) const;

 private:
  std::vector<std::shared_ptr<const ParallelText>> texts_;
  std::vector<std::string> ids_;
};

/// One example per ordered pair (a, b), a != b, per line: k(k-1)n examples,
/// pair-major then line-minor, pairs in `languages` order.
Dataset emit_complete(std::span<const std::string> languages, const CorpusView& view);

/// One example per source per line into `target`: |sources| * n examples.
Dataset emit_star(std::span<const std::string> sources, std::string_view target, const CorpusView& view);

/// Restricts every source to exactly the low-resource line IDs. Throws Error
/// naming the missing IDs of the first source that lacks some.
CorpusView symmetrize(const ParallelText& low, std::span<const ParallelText> sources);

/// Repeats lines cyclically up to `target_size`; the replica index is appended
/// to each ID as "<id>#<r>".
ParallelText replicate_asymmetric(const ParallelText& low, std::size_t target_size);

/// Complete graph over `family` plus `low.language()` where the low-resource
/// side is replicated to the size of `family_view`. Family-to-family pairs
/// cover every family_view line; pairs involving the low-resource language
/// cover the replicas, each paired with its original line ID.
Dataset emit_asymmetric(std::span<const std::string> family, const CorpusView& family_view, const ParallelText& low);

struct Vocabulary {
  std::vector<std::string> tokens;

  bool contains(std::string_view token) const;
};

/// Direction-tag tokens (sorted), then __NE0..__NE{max_ne-1}, then every other
/// corpus token by descending frequency, ties lexicographic.
Vocabulary build_vocab(std::span<const ParallelText> texts, const ParallelText& low,
                       std::span<const DirectionTag> tags, std::size_t max_ne);

/// Largest placeholder index + 1 found in the texts (0 if none).
std::size_t max_placeholders(std::span<const ParallelText> texts);

enum class StageKind { kPretrain = 1, kSymmetric = 2, kStar = 3, kAsymmetric = 4 };

std::string stage_name(StageKind stage);
StageKind parse_stage(std::string_view name);

struct StageSpec {
  StageKind stage = StageKind::kPretrain;
  std::vector<std::string> languages;  // family members
  std::string low_resource;
  SplitSpec split;
};

/// Default splits: 80/10/10 train/val/test for stage 1, 95/5 train/val after.
SplitSpec default_split(StageKind stage);

struct StageData {
  StageKind stage = StageKind::kPretrain;
  std::vector<std::string> languages;   // every language in the stage's graph
  std::vector<DirectionTag> directions;
  std::map<std::string, Dataset> splits;
};

/// Emits one stage from full-text corpora (keyed by language) and the
/// low-resource text. When `lexicon` is non-null every sentence is tagged
/// with it first; pass nullptr for corpora that are already tagged.
///   stage 1: complete graph over the family, low-resource excluded
///   stage 2: complete graph over family + low on the low-resource line IDs
///   stage 3: star graph from the family into low on the same IDs
///   aml:     complete graph over family + low with low replicated (train),
///            symmetric validation as in stage 2
StageData emit_stage(const StageSpec& spec, std::span<const ParallelText> corpora, const ParallelText& low,
                     const LexiconTable* lexicon = nullptr, std::size_t edit_threshold = kDefaultEditThreshold,
                     std::size_t workers = 1);

/// Every direction tag a pipeline run over `family` and `low` can emit.
std::vector<DirectionTag> pipeline_directions(std::span<const std::string> family, std::string_view low);

/// Writes <root>/<stage>/<split>.src and .tgt and returns the manifest entry
/// for the stage (languages, counts, SHA-256 of every file).
nlohmann::json write_stage(const std::filesystem::path& root, const StageData& data);

/// Writes one token per line; returns {size, sha256}.
nlohmann::json write_vocab(const std::filesystem::path& path, const Vocabulary& vocab);

}  // namespace lrmt
