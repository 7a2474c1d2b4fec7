#include "lrmt/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "lrmt/error.hpp"

namespace lrmt {

ParallelText::ParallelText(std::string language, std::vector<Line> lines)
    : language_(std::move(language)), lines_(std::move(lines)) {
  index_.reserve(lines_.size());
  for (std::size_t i = 0; i < lines_.size(); ++i) {
    const auto& line = lines_[i];
    if (line.id.empty()) throw Error(language_ + ": empty line ID at position " + std::to_string(i));
    if (line.tokens.empty()) throw Error(language_ + ": line '" + line.id + "' has no tokens");
    if (!index_.emplace(line.id, i).second) {
      throw Error(language_ + ": duplicate line ID '" + line.id + "'");
    }
  }
}

bool ParallelText::contains(std::string_view id) const {
  return index_.find(std::string(id)) != index_.end();
}

const Tokens* ParallelText::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &lines_[it->second].tokens;
}

std::vector<std::string> ParallelText::ids() const {
  std::vector<std::string> out;
  out.reserve(lines_.size());
  for (const auto& line : lines_) out.push_back(line.id);
  return out;
}

ParallelText ParallelText::restrict_to(std::span<const std::string> ids) const {
  std::vector<Line> lines;
  lines.reserve(ids.size());
  for (const auto& id : ids) {
    const Tokens* tokens = find(id);
    if (tokens == nullptr) throw Error(language_ + ": missing line ID '" + id + "'");
    lines.push_back({id, *tokens});
  }
  return ParallelText(language_, std::move(lines));
}

ParallelText ParallelText::renamed(std::string language) const {
  ParallelText copy = *this;
  copy.language_ = std::move(language);
  return copy;
}

ParallelText parse_text(std::istream& in, std::string language, std::string_view source_name) {
  std::vector<Line> lines;
  std::string raw;
  std::size_t line_no = 0;
  bool keyed = false;
  std::set<std::string> seen;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (line_no == 1) keyed = raw.find('\t') != std::string::npos;
    const std::string where = std::string(source_name) + ":" + std::to_string(line_no);
    std::string id;
    std::string_view body = raw;
    if (keyed) {
      const auto tab = raw.find('\t');
      if (tab == std::string::npos) throw Error(where + ": expected ID<TAB>text");
      id = raw.substr(0, tab);
      body = std::string_view(raw).substr(tab + 1);
      if (id.empty()) throw Error(where + ": empty line ID");
    } else {
      id = std::to_string(line_no - 1);
    }
    Tokens tokens = split_whitespace(body);
    if (tokens.empty()) throw Error(where + ": empty line");
    if (!seen.insert(id).second) throw Error(where + ": duplicate line ID '" + id + "'");
    lines.push_back({std::move(id), std::move(tokens)});
  }
  if (lines.empty()) throw Error(std::string(source_name) + ": empty file");
  return ParallelText(std::move(language), std::move(lines));
}

ParallelText load_text(const std::filesystem::path& path, std::string language) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return parse_text(in, std::move(language), path.string());
}

void write_text(std::ostream& out, const ParallelText& text) {
  for (const auto& line : text.lines()) {
    out << line.id << '\t' << join(line.tokens) << '\n';
  }
}

void write_bare(std::ostream& out, const ParallelText& text) {
  for (const auto& line : text.lines()) out << join(line.tokens) << '\n';
}

void save_text(const std::filesystem::path& path, const ParallelText& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_text(out, text);
}

std::vector<ParallelText> intersect(std::span<const ParallelText> texts) {
  if (texts.size() < 2) throw Error("intersect needs at least two texts");
  std::vector<std::string> shared;
  for (const auto& line : texts[0].lines()) {
    const bool everywhere = std::all_of(texts.begin() + 1, texts.end(),
                                        [&](const ParallelText& t) { return t.contains(line.id); });
    if (everywhere) shared.push_back(line.id);
  }
  if (shared.empty()) throw Error("intersect: texts share no line IDs");
  std::vector<ParallelText> out;
  out.reserve(texts.size());
  for (const auto& text : texts) out.push_back(text.restrict_to(shared));
  return out;
}

void SplitSpec::validate() const {
  if (ratios.empty()) throw Error("split: no ratios given");
  double total = 0.0;
  std::set<std::string> names;
  for (const auto& [name, fraction] : ratios) {
    if (name.empty()) throw Error("split: empty split name");
    if (!names.insert(name).second) throw Error("split: duplicate split name '" + name + "'");
    if (!(fraction >= 0.0 && fraction <= 1.0)) {
      throw Error("split: fraction for '" + name + "' outside [0,1]");
    }
    total += fraction;
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error("split: fractions do not sum to 1");
}

SplitMode parse_split_mode(std::string_view name) {
  if (name == "contiguous") return SplitMode::kContiguous;
  if (name == "shuffled") return SplitMode::kShuffled;
  throw Error("unknown split mode '" + std::string(name) + "'");
}

std::vector<std::size_t> split_sizes(std::size_t n, const SplitSpec& spec) {
  spec.validate();
  std::vector<std::size_t> sizes;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i + 1 < spec.ratios.size(); ++i) {
    // The epsilon absorbs representation error, e.g. 0.29 * 100.
    auto size = static_cast<std::size_t>(std::floor(static_cast<double>(n) * spec.ratios[i].second + 1e-9));
    size = std::min(size, n - assigned);
    sizes.push_back(size);
    assigned += size;
  }
  sizes.push_back(n - assigned);
  return sizes;
}

std::map<std::string, ParallelText> split(const ParallelText& text, const SplitSpec& spec) {
  const auto sizes = split_sizes(text.size(), spec);
  std::vector<std::size_t> order(text.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (spec.mode == SplitMode::kShuffled) {
    // Fisher-Yates over mt19937_64, whose output sequence is fixed by the
    // standard; std::shuffle is not portable across library vendors.
    std::mt19937_64 rng(spec.seed);
    for (std::size_t i = order.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(rng() % i);
      std::swap(order[i - 1], order[j]);
    }
  }
  std::map<std::string, ParallelText> out;
  std::size_t offset = 0;
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    const auto& name = spec.ratios[s].first;
    if (sizes[s] == 0) throw Error("split '" + name + "' receives no lines");
    std::vector<std::size_t> members(order.begin() + static_cast<std::ptrdiff_t>(offset),
                                     order.begin() + static_cast<std::ptrdiff_t>(offset + sizes[s]));
    std::sort(members.begin(), members.end());
    std::vector<Line> lines;
    lines.reserve(members.size());
    for (auto i : members) lines.push_back(text[i]);
    out.emplace(name, ParallelText(text.language(), std::move(lines)));
    offset += sizes[s];
  }
  return out;
}

}  // namespace lrmt
