#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "lrmt/corpus.hpp"
#include "lrmt/error.hpp"
#include "support/synthetic.hpp"

using namespace lrmt;

namespace {

ParallelText parse(const std::string& content, const std::string& language = "xx") {
  std::istringstream in(content);
  return parse_text(in, language);
}

ParallelText numbered(std::size_t n, const std::string& language = "xx") {
  std::vector<Line> lines;
  for (std::size_t i = 0; i < n; ++i) lines.push_back({"L" + std::to_string(i), {"t" + std::to_string(i)}});
  return ParallelText(language, std::move(lines));
}

ParallelText with_ids(std::initializer_list<const char*> ids, const std::string& language) {
  std::vector<Line> lines;
  for (const char* id : ids) lines.push_back({id, {std::string("w") + id}});
  return ParallelText(language, std::move(lines));
}

}  // namespace

TEST_CASE("split_whitespace handles ASCII and Unicode spaces") {
  CHECK(split_whitespace("  a\tb \n c ") == Tokens{"a", "b", "c"});
  // U+3000 ideographic space, U+00A0 no-break space.
  CHECK(split_whitespace("x\xE3\x80\x80y\xC2\xA0z") == Tokens{"x", "y", "z"});
  CHECK(split_whitespace("Tec'b'ejec e b'a") == Tokens{"Tec'b'ejec", "e", "b'a"});
  CHECK(split_whitespace("   ").empty());
}

TEST_CASE("load keyed text preserves IDs") {
  const auto text = parse("MRK_1_1\ta b\nMRK_1_2\tc\n");
  REQUIRE(text.size() == 2);
  CHECK(text[0].id == "MRK_1_1");
  CHECK(text[0].tokens == Tokens{"a", "b"});
  CHECK(text[1].id == "MRK_1_2");
  CHECK(*text.find("MRK_1_2") == Tokens{"c"});
}

TEST_CASE("load bare text synthesizes zero-based IDs") {
  const auto text = parse("a b\nc\n");
  REQUIRE(text.size() == 2);
  CHECK(text.ids() == std::vector<std::string>{"0", "1"});
}

TEST_CASE("load rejects duplicate IDs, empty files and empty lines") {
  CHECK_THROWS_WITH_AS(parse("MRK_1_1\ta\nMRK_1_1\tb\n"), doctest::Contains("MRK_1_1"), Error);
  CHECK_THROWS_AS(parse(""), Error);
  CHECK_THROWS_AS(parse("a\n\nb\n"), Error);
  CHECK_THROWS_AS(parse("id\t   \n"), Error);
  CHECK_THROWS_AS(parse("id\ta\nno tab here\n"), Error);
}

TEST_CASE("save then load round-trips keyed files byte for byte") {
  const std::string content = "LUK_1_1\tEn terwyl Hy\nLUK_1_2\tsien Hy Simon\nx\tq\n";
  const auto dir = std::filesystem::temp_directory_path() / "lrmt_corpus_roundtrip";
  std::filesystem::create_directories(dir);
  const auto path = dir / "a.txt";
  {
    std::ofstream out(path, std::ios::binary);
    out << content;
  }
  const auto text = load_text(path, "af");
  save_text(dir / "b.txt", text);
  std::ifstream in(dir / "b.txt", std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == content);
  std::filesystem::remove_all(dir);
}

TEST_CASE("intersect restricts to shared IDs in first-text order") {
  const auto a = with_ids({"1", "2", "3"}, "a");
  const auto b = with_ids({"4", "3", "2"}, "b");
  const std::vector<ParallelText> texts{a, b};
  const auto out = intersect(texts);
  REQUIRE(out.size() == 2);
  CHECK(out[0].ids() == std::vector<std::string>{"2", "3"});
  CHECK(out[1].ids() == std::vector<std::string>{"2", "3"});
  CHECK(*out[1].find("3") == Tokens{"w3"});
}

TEST_CASE("intersect of identical texts is the identity") {
  const auto a = numbered(5, "a");
  const std::vector<ParallelText> texts{a, a.renamed("b")};
  const auto out = intersect(texts);
  CHECK(out[0] == a);
}

TEST_CASE("intersect errors on disjoint IDs and on a single text") {
  const std::vector<ParallelText> disjoint{with_ids({"1"}, "a"), with_ids({"2"}, "b")};
  CHECK_THROWS_AS(intersect(disjoint), Error);
  const std::vector<ParallelText> one{with_ids({"1"}, "a")};
  CHECK_THROWS_AS(intersect(one), Error);
}

TEST_CASE("intersect is idempotent and commutative on ID sets") {
  testing::Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Line> la, lb;
    for (int i = 0; i < 30; ++i) {
      if (rng.below(2)) la.push_back({std::to_string(i), {"a"}});
      if (rng.below(2)) lb.push_back({std::to_string(i), {"b"}});
    }
    la.push_back({"common", {"a"}});
    lb.push_back({"common", {"b"}});
    const ParallelText a("a", la), b("b", lb);
    const std::vector<ParallelText> ab{a, b}, ba{b, a};
    const auto x = intersect(ab);
    const auto y = intersect(ba);
    const auto xx = intersect(x);
    CHECK(xx[0] == x[0]);
    CHECK(xx[1] == x[1]);
    auto ids_x = x[0].ids();
    auto ids_y = y[0].ids();
    std::sort(ids_x.begin(), ids_x.end());
    std::sort(ids_y.begin(), ids_y.end());
    CHECK(ids_x == ids_y);
  }
}

TEST_CASE("split sizes follow floor-all-but-last") {
  const SplitSpec three{{{"train", 0.8}, {"val", 0.1}, {"test", 0.1}}, 0, SplitMode::kContiguous};
  const auto parts = split(numbered(100), three);
  CHECK(parts.at("train").size() == 80);
  CHECK(parts.at("val").size() == 10);
  CHECK(parts.at("test").size() == 10);

  const SplitSpec luke{{{"train", 0.95}, {"val", 0.05}}, 0, SplitMode::kContiguous};
  const auto text = numbered(1093);
  const auto lk = split(text, luke);
  CHECK(lk.at("train").size() == 1038);
  CHECK(lk.at("val").size() == 55);
  // Contiguous keeps document order: train is the leading block.
  CHECK(lk.at("train")[0].id == "L0");
  CHECK(lk.at("val")[0].id == "L1038");

  const SplitSpec all{{{"all", 1.0}}, 0, SplitMode::kContiguous};
  CHECK(split(text, all).at("all") == text);
}

TEST_CASE("split errors") {
  // floor(3 * 0.1) = 0 lines for the first split.
  const SplitSpec empty_part{{{"train", 0.1}, {"val", 0.9}}, 0, SplitMode::kContiguous};
  CHECK_THROWS_AS(split(numbered(3), empty_part), Error);
  const SplitSpec bad_sum{{{"a", 0.5}, {"b", 0.6}}, 0, SplitMode::kContiguous};
  CHECK_THROWS_AS(split(numbered(50), bad_sum), Error);
  const SplitSpec dup{{{"a", 0.5}, {"a", 0.5}}, 0, SplitMode::kContiguous};
  CHECK_THROWS_AS(split(numbered(50), dup), Error);
  const SplitSpec negative{{{"a", -0.5}, {"b", 1.5}}, 0, SplitMode::kContiguous};
  CHECK_THROWS_AS(split(numbered(50), negative), Error);
}

TEST_CASE("shuffled split partitions the input deterministically") {
  const auto text = numbered(237);
  for (std::uint64_t seed : {1u, 2u, 99u}) {
    const SplitSpec spec{{{"train", 0.8}, {"val", 0.1}, {"test", 0.1}}, seed, SplitMode::kShuffled};
    const auto a = split(text, spec);
    const auto b = split(text, spec);
    std::set<std::string> seen;
    std::size_t total = 0;
    for (const auto& [name, part] : a) {
      CHECK(part == b.at(name));
      total += part.size();
      for (const auto& line : part.lines()) CHECK(seen.insert(line.id).second);
    }
    CHECK(total == text.size());
    CHECK(a.at("train").size() == 189);
    CHECK(a.at("val").size() == 23);
    CHECK(a.at("test").size() == 25);
  }
  const SplitSpec s1{{{"train", 0.5}, {"val", 0.5}}, 1, SplitMode::kShuffled};
  const SplitSpec s2{{{"train", 0.5}, {"val", 0.5}}, 2, SplitMode::kShuffled};
  CHECK_FALSE(split(text, s1).at("train") == split(text, s2).at("train"));
}
