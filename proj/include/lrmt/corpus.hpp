#pragma once

// Line-aligned multilingual text: every language is a ParallelText whose lines
// are keyed by opaque IDs shared across languages.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lrmt/text.hpp"

namespace lrmt {

struct Line {
  std::string id;
  Tokens tokens;

  friend bool operator==(const Line&, const Line&) = default;
};

/// One language's lines in document order. Immutable after construction.
class ParallelText {
 public:
  ParallelText() = default;
  /// Throws Error on duplicate or empty IDs and on lines without tokens.
  ParallelText(std::string language, std::vector<Line> lines);

  const std::string& language() const { return language_; }
  const std::vector<Line>& lines() const { return lines_; }
  std::size_t size() const { return lines_.size(); }
  bool empty() const { return lines_.empty(); }
  const Line& operator[](std::size_t i) const { return lines_[i]; }

  bool contains(std::string_view id) const;
  /// nullptr when the ID is absent.
  const Tokens* find(std::string_view id) const;
  std::vector<std::string> ids() const;

  /// Lines for `ids`, in that order. Throws Error naming the first missing ID.
  ParallelText restrict_to(std::span<const std::string> ids) const;
  ParallelText renamed(std::string language) const;

  friend bool operator==(const ParallelText& a, const ParallelText& b) {
    return a.language_ == b.language_ && a.lines_ == b.lines_;
  }

 private:
  std::string language_;
  std::vector<Line> lines_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Reads "ID<TAB>text" lines, or bare text lines whose IDs become the
/// zero-based line index. The format is decided by the first line.
ParallelText load_text(const std::filesystem::path& path, std::string language);
ParallelText parse_text(std::istream& in, std::string language,
                        std::string_view source_name = "<stream>");

/// Writes the keyed "ID<TAB>tokens" format, one line per entry.
void save_text(const std::filesystem::path& path, const ParallelText& text);
void write_text(std::ostream& out, const ParallelText& text);
/// Writes tokens only, without IDs.
void write_bare(std::ostream& out, const ParallelText& text);

/// Restricts every text to the IDs they all share, ordered as in texts[0].
std::vector<ParallelText> intersect(std::span<const ParallelText> texts);

enum class SplitMode { kContiguous, kShuffled };

struct SplitSpec {
  std::vector<std::pair<std::string, double>> ratios;
  std::uint64_t seed = 0;
  SplitMode mode = SplitMode::kContiguous;

  void validate() const;
};

SplitMode parse_split_mode(std::string_view name);

/// Line counts per split: floor for every split but the last, which takes
/// the remainder.
std::vector<std::size_t> split_sizes(std::size_t n, const SplitSpec& spec);

/// Partitions `text` by `spec`. Within each split, lines keep document order.
std::map<std::string, ParallelText> split(const ParallelText& text, const SplitSpec& spec);

}  // namespace lrmt
