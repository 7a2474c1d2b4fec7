#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"

#include "lrmt/error.hpp"
#include "lrmt/rank.hpp"
#include "support/synthetic.hpp"

using namespace lrmt;

namespace {

AlignmentModel model_from(const std::string& text) {
  std::istringstream in(text);
  return read_model(in);
}

ParallelText target_text(std::uint64_t seed, std::size_t lines = 200) {
  return testing::unique_word_text("tgt", lines, 120, 4, 10, seed);
}

std::vector<std::string> order(const LanguageRanking& r) {
  std::vector<std::string> out;
  for (const auto& e : r.entries) out.push_back(e.language);
  return out;
}

}  // namespace

TEST_CASE("word replacement picks the argmax and copies unknown tokens") {
  const auto model = model_from("s\tx\t0.6\ns\ty\t0.4\nq\tz\t1\n");
  AlignmentStatistics stats;
  stats.words["s"].p_joint = 0.5;
  stats.words["q"].p_joint = 0.0;
  CHECK(word_replacement_translate(model, stats, {"s", "zzz", "q"}) == Tokens{"x", "zzz", "q"});
}

TEST_CASE("word replacement ties go to the smaller target word") {
  const auto model = model_from("s\tb\t0.5\ns\ta\t0.5\n");
  AlignmentStatistics stats;
  stats.words["s"].p_joint = 1.0;
  CHECK(word_replacement_translate(model, stats, {"s"}) == Tokens{"a"});
}

TEST_CASE("identity model translates a sentence to itself") {
  const auto text = testing::unique_word_text("xx", 60, 30, 3, 3, 2);
  const Bitext bitext = make_bitext(text, text);
  const auto model = train_alignment(bitext, {10, 0.08, 1e-9});
  const auto stats = collect_statistics(model, bitext);
  for (const auto& pair : bitext) CHECK(word_replacement_translate(model, stats, pair.source) == pair.source);
}

TEST_CASE("famd weighted mean") {
  AlignmentStatistics stats;
  stats.words["a"].n_obs = 3;
  stats.words["a"].p_dist0 = 1.0;
  stats.words["b"].n_obs = 1;
  stats.words["b"].p_dist0 = 0.0;
  CHECK(famd_score(stats) == 0.75);
  AlignmentStatistics empty;
  empty.words["a"];
  CHECK_THROWS_AS(famd_score(empty), Error);
}

TEST_CASE("famp errors on an empty held-out set") {
  CHECK_THROWS_AS(famp_score(AlignmentModel{}, AlignmentStatistics{}, Bitext{}), Error);
}

TEST_CASE("self-alignment maximizes both metrics") {
  const auto tgt = target_text(5, 120);
  CHECK(score_candidate(tgt, tgt.renamed("cp"), Metric::kFamd) == 1.0);
  CHECK(score_candidate(tgt, tgt.renamed("cp"), Metric::kFamp) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("a bijectively renamed candidate reaches FAMP 1") {
  const auto tgt = target_text(6, 300);
  const auto renamed = testing::renamed_words(tgt, "rn", "R");
  CHECK(score_candidate(tgt, renamed, Metric::kFamp, {{10, 0.08, 1e-9}}) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("unrelated random text scores FAMP near 0") {
  const auto tgt = target_text(7);
  const auto rnd = testing::random_text_like(tgt, "rnd", 70);
  CHECK(score_candidate(tgt, rnd, Metric::kFamp) < 0.05);
}

TEST_CASE("ranking discriminates copy, noised, shuffled and random candidates") {
  const auto tgt = target_text(11);
  const std::vector<ParallelText> candidates{
      tgt.renamed("copy"), testing::noised_copy(tgt, "noised", 0.25, 12),
      testing::shuffled_words(tgt, "shuffled", 13), testing::locally_shuffled_words(tgt, "swapped", 0.3, 15),
      testing::random_text_like(tgt, "random", 14)};

  const auto famp = rank_languages(tgt, candidates, Metric::kFamp);
  CHECK(famp.skipped.empty());
  std::map<std::string, double> v;
  for (const auto& e : famp.ranking.entries) v[e.language] = e.value;
  CHECK(order(famp.ranking).front() == "copy");
  CHECK(v["copy"] > v["noised"]);
  CHECK(v["noised"] > v["random"]);
  CHECK(v["copy"] > v["swapped"]);
  CHECK(v["swapped"] > v["random"]);
  // A full permutation of each line usually leaves no 4-gram intact, so
  // unsmoothed corpus BLEU can tie it with random text at 0.
  CHECK(v["copy"] > v["shuffled"]);
  CHECK(v["shuffled"] >= v["random"]);

  const auto famd = rank_languages(tgt, candidates, Metric::kFamd);
  std::map<std::string, double> d;
  for (const auto& e : famd.ranking.entries) d[e.language] = e.value;
  CHECK(d["copy"] == 1.0);
  CHECK(d["shuffled"] < d["copy"]);
  CHECK(d["swapped"] < d["copy"]);
}

TEST_CASE("FAMP is non-increasing in the noise fraction") {
  const auto tgt = target_text(21);
  double previous = 2.0;
  for (double q : {0.0, 0.25, 0.5, 1.0}) {
    const double v = score_candidate(tgt, testing::noised_copy(tgt, "c", q, 22), Metric::kFamp);
    CHECK(v <= previous);
    previous = v;
  }
}

TEST_CASE("ranking is independent of candidate order and worker count") {
  const auto tgt = target_text(31, 120);
  std::vector<ParallelText> candidates{
      testing::noised_copy(tgt, "b", 0.3, 1), testing::noised_copy(tgt, "a", 0.3, 1),
      testing::shuffled_words(tgt, "c", 2), testing::random_text_like(tgt, "d", 3)};
  RankOptions options;
  const auto base = rank_languages(tgt, candidates, Metric::kFamd, options);
  // "a" and "b" are identical texts: equal scores, code order decides.
  CHECK(order(base.ranking)[0] == "a");
  CHECK(order(base.ranking)[1] == "b");
  std::reverse(candidates.begin(), candidates.end());
  options.workers = 3;
  const auto other = rank_languages(tgt, candidates, Metric::kFamd, options);
  REQUIRE(other.ranking.entries.size() == base.ranking.entries.size());
  for (std::size_t i = 0; i < base.ranking.entries.size(); ++i) {
    CHECK(other.ranking.entries[i].language == base.ranking.entries[i].language);
    CHECK(other.ranking.entries[i].value == base.ranking.entries[i].value);
  }
}

TEST_CASE("candidates with too few shared lines go to the skip report") {
  const auto tgt = target_text(41, 100);
  std::vector<Line> few;
  for (std::size_t i = 0; i < 49; ++i) few.push_back(tgt[i]);
  std::vector<Line> disjoint{{"elsewhere", {"x"}}};
  const std::vector<ParallelText> candidates{ParallelText("few", few), tgt.renamed("ok"),
                                             ParallelText("none", disjoint), tgt};
  const auto r = rank_languages(tgt, candidates, Metric::kFamd);
  REQUIRE(r.ranking.entries.size() == 1);
  CHECK(r.ranking.entries[0].language == "ok");
  REQUIRE(r.skipped.size() == 3);
  CHECK(r.skipped[0].language == "few");
  CHECK(r.skipped[0].reason.find("49") != std::string::npos);
  CHECK(r.skipped[1].language == "none");
  CHECK(r.skipped[2].language == "tgt");
}

TEST_CASE("single candidate gives a ranking of length 1") {
  const auto tgt = target_text(42, 60);
  const std::vector<ParallelText> one{tgt.renamed("x")};
  CHECK(rank_languages(tgt, one, Metric::kFamp).ranking.entries.size() == 1);
}

TEST_CASE("sort_ranking order and validation") {
  LanguageRanking r{Metric::kFamd, {{"zz", 0.5}, {"aa", 0.5}, {"mm", 0.9}}};
  sort_ranking(r);
  CHECK(order(r) == std::vector<std::string>{"mm", "aa", "zz"});
  LanguageRanking dup{Metric::kFamd, {{"a", 0.1}, {"a", 0.2}}};
  CHECK_THROWS_AS(sort_ranking(dup), Error);
  LanguageRanking out_of_range{Metric::kFamd, {{"a", 1.5}}};
  CHECK_THROWS_AS(sort_ranking(out_of_range), Error);
}

TEST_CASE("select_family") {
  LanguageRanking r{Metric::kFamd, {}};
  for (int i = 0; i < 12; ++i) r.entries.push_back({"l" + std::to_string(10 + i), 1.0 - 0.05 * i});
  sort_ranking(r);
  const auto ten = select_family(r, 10, "tgt");
  CHECK(ten.members.size() == 10);
  CHECK(ten.members.front() == "l10");
  CHECK(ten.members.back() == "l19");
  CHECK(ten.provenance == "FAMD");
  CHECK(select_family(r, 1, "tgt").members == std::vector<std::string>{"l10"});
  // Stable prefix.
  for (std::size_t k1 = 1; k1 < 12; ++k1) {
    const auto a = select_family(r, k1, "tgt").members;
    const auto b = select_family(r, k1 + 1, "tgt").members;
    CHECK(std::equal(a.begin(), a.end(), b.begin()));
  }
  // Tie at the boundary: the smaller code wins.
  LanguageRanking tie{Metric::kFamp, {{"c", 0.9}, {"b", 0.5}, {"a", 0.5}}};
  CHECK(select_family(tie, 2, "t").members == std::vector<std::string>{"c", "a"});
  // The target never appears among the members.
  LanguageRanking with_target{Metric::kFamp, {{"t", 0.99}, {"a", 0.5}}};
  CHECK(select_family(with_target, 1, "t").members == std::vector<std::string>{"a"});
  CHECK_THROWS_WITH_AS(select_family(r, 13, "tgt"), doctest::Contains("FAMO+"), Error);
}

TEST_CASE("family list file") {
  const auto dir = std::filesystem::temp_directory_path() / "lrmt_family_list";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "ok.txt") << "ca\nck\n\nqu\n";
    std::ofstream(dir / "target.txt") << "ca\npoh\n";
    std::ofstream(dir / "dup.txt") << "ca\nca\n";
  }
  const auto f = load_family_list(dir / "ok.txt", "poh");
  CHECK(f.members == std::vector<std::string>{"ca", "ck", "qu"});
  CHECK(f.provenance == "FAMO+");
  CHECK_THROWS_AS(load_family_list(dir / "target.txt", "poh"), Error);
  CHECK_THROWS_AS(load_family_list(dir / "dup.txt", "poh"), Error);
  CHECK_THROWS_AS(load_family_list(dir / "missing.txt", "poh"), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("report writers") {
  LanguageRanking r{Metric::kFamp, {{"da", 0.5}, {"nl", 0.25}}};
  std::ostringstream out;
  write_ranking(out, r);
  CHECK(out.str() == "rank\tlanguage\tmetric\tscore\n1\tda\tFAMP\t0.5\n2\tnl\tFAMP\t0.25\n");
  const std::vector<SkippedCandidate> skipped{{"xx", "only 3 shared lines (minimum 50)"}};
  std::ostringstream s;
  write_skip_report(s, skipped);
  CHECK(s.str() == "language\treason\nxx\tonly 3 shared lines (minimum 50)\n");
  CHECK(parse_metric("famd") == Metric::kFamd);
  CHECK(parse_metric("FAMP") == Metric::kFamp);
  CHECK_THROWS_AS(parse_metric("bleu"), Error);
}
