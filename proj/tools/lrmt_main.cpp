// lrmt: command-line front end for the low-resource translation toolkit.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"

#include "lrmt/align.hpp"
#include "lrmt/combine.hpp"
#include "lrmt/corpus.hpp"
#include "lrmt/datagen.hpp"
#include "lrmt/error.hpp"
#include "lrmt/eval.hpp"
#include "lrmt/lexicon.hpp"
#include "lrmt/pipeline.hpp"
#include "lrmt/rank.hpp"

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw lrmt::Error("cannot write " + path.string());
  return out;
}

std::string language_of(const fs::path& path, const std::string& given) {
  return given.empty() ? path.stem().string() : given;
}

struct AlignArgs {
  fs::path source, target, model, stats, alignments, lengths;
  std::string source_language, target_language;
  lrmt::AlignmentConfig config;
};

int run_align(const AlignArgs& a) {
  const auto source = lrmt::load_text(a.source, language_of(a.source, a.source_language));
  const auto target = lrmt::load_text(a.target, language_of(a.target, a.target_language));
  const auto bitext = lrmt::make_bitext(source, target);
  if (bitext.empty()) throw lrmt::Error("source and target share no line IDs");
  const auto model = lrmt::train_alignment(bitext, a.config);
  spdlog::info("trained on {} pairs, final log-likelihood {:.6f}", bitext.size(), model.log_likelihood().back());
  {
    auto out = open_output(a.model);
    lrmt::write_model(out, model);
  }
  if (!a.stats.empty() || !a.lengths.empty()) {
    const auto stats = lrmt::collect_statistics(model, bitext);
    if (!a.stats.empty()) {
      auto out = open_output(a.stats);
      lrmt::write_statistics(out, stats);
    }
    if (!a.lengths.empty()) {
      auto out = open_output(a.lengths);
      for (const auto& [length, count] : stats.source_lengths) out << length << '\t' << count << '\n';
    }
  }
  if (!a.alignments.empty()) {
    std::vector<lrmt::SentenceAlignment> links;
    links.reserve(bitext.size());
    for (const auto& pair : bitext) links.push_back(lrmt::viterbi_align(model, pair));
    auto out = open_output(a.alignments);
    lrmt::write_alignments(out, links);
  }
  return 0;
}

struct RankArgs {
  fs::path target, candidates, output, skipped, family_out;
  std::string target_language, metric = "famd";
  std::size_t min_shared = 50;
  std::size_t k = 0;
  lrmt::AlignmentConfig config;
};

int run_rank(const RankArgs& a, std::size_t workers) {
  const std::string target_language = language_of(a.target, a.target_language);
  const auto target = lrmt::load_text(a.target, target_language);
  const auto candidates = lrmt::load_corpus_dir(a.candidates, target_language);
  lrmt::RankOptions options;
  options.alignment = a.config;
  options.min_shared_lines = a.min_shared;
  options.workers = workers;
  const auto result = lrmt::rank_languages(target, candidates, lrmt::parse_metric(a.metric), options);
  if (a.output.empty()) {
    lrmt::write_ranking(std::cout, result.ranking);
  } else {
    auto out = open_output(a.output);
    lrmt::write_ranking(out, result.ranking);
  }
  for (const auto& s : result.skipped) spdlog::warn("skipped {}: {}", s.language, s.reason);
  if (!a.skipped.empty()) {
    auto out = open_output(a.skipped);
    lrmt::write_skip_report(out, result.skipped);
  }
  if (a.k > 0) {
    const auto family = lrmt::select_family(result.ranking, a.k, target_language);
    if (a.family_out.empty()) throw lrmt::Error("--k needs --family-out");
    auto out = open_output(a.family_out);
    for (const auto& m : family.members) out << m << '\n';
  }
  return 0;
}

struct TagArgs {
  fs::path input, lexicon, output, dict_out;
  std::string language;
  std::size_t threshold = lrmt::kDefaultEditThreshold;
};

int run_tag(const TagArgs& a, std::size_t workers) {
  const auto text = lrmt::load_text(a.input, a.language);
  const auto table = lrmt::load_lexicon(a.lexicon);
  const lrmt::EntityTagger tagger(table, a.language, a.threshold);
  std::vector<lrmt::TaggedSentence> dicts;
  const auto tagged = lrmt::tag_corpus(text, tagger, &dicts, workers);
  lrmt::save_text(a.output, tagged);
  if (!a.dict_out.empty()) {
    auto out = open_output(a.dict_out);
    lrmt::write_source_dicts(out, tagged, dicts);
  }
  std::size_t mentions = 0;
  for (const auto& d : dicts) mentions += d.source_dict.size();
  spdlog::info("tagged {} lines, {} entity placeholders", tagged.size(), mentions);
  return 0;
}

struct DetagArgs {
  fs::path input, dict, lexicon, output, report;
  std::string target_language;
};

int run_detag(const DetagArgs& a) {
  const auto translated = lrmt::load_text(a.input, a.target_language);
  const auto table = lrmt::load_lexicon(a.lexicon);
  std::map<std::string, std::vector<lrmt::EntityMention>> dicts;
  {
    std::ifstream in(a.dict);
    if (!in) throw lrmt::Error("cannot open " + a.dict.string());
    dicts = lrmt::read_source_dicts(in);
  }
  std::vector<lrmt::Line> lines;
  std::optional<std::ofstream> report;
  if (!a.report.empty()) report = open_output(a.report);
  std::size_t substituted = 0;
  std::size_t dropped = 0;
  for (const auto& line : translated.lines()) {
    auto it = dicts.find(line.id);
    const auto mentions = it == dicts.end() ? std::span<const lrmt::EntityMention>{}
                                            : std::span<const lrmt::EntityMention>(it->second);
    const auto target_dict = lrmt::build_target_dictionary(mentions, a.target_language, table);
    lrmt::DetagReport line_report;
    auto tokens = lrmt::detag(line.tokens, target_dict, &line_report);
    substituted += line_report.substituted;
    dropped += line_report.dropped;
    if (report) {
      *report << line.id << '\t' << line_report.substituted << '\t' << line_report.dropped << '\t'
              << lrmt::join(line_report.dropped_tokens, ",") << '\n';
    }
    // Dropping every token of a line would leave nothing to write.
    if (tokens.empty()) throw lrmt::Error("line '" + line.id + "' is empty after detagging");
    lines.push_back({line.id, std::move(tokens)});
  }
  if (report) *report << "TOTAL\t" << substituted << '\t' << dropped << "\t\n";
  lrmt::save_text(a.output, lrmt::ParallelText(a.target_language, std::move(lines)));
  if (dropped > 0) spdlog::warn("{} placeholders had no dictionary entry and were dropped", dropped);
  return 0;
}

struct GenArgs {
  fs::path config, family, output;
  std::vector<std::string> stages;
};

int run_gen(const GenArgs& a, std::size_t workers) {
  auto config = lrmt::load_config(a.config);
  if (!a.output.empty()) config.output_dir = a.output;
  if (!a.stages.empty()) {
    config.stages.clear();
    for (const auto& s : a.stages) config.stages.push_back(lrmt::parse_stage(s));
  }
  lrmt::FamilyOfChoice family;
  if (!a.family.empty()) {
    family = lrmt::load_family_list(a.family, config.target_language);
  } else if (config.family_source == lrmt::FamilySource::kList) {
    family = {config.target_language, config.family_list, "FAMO+"};
  } else {
    throw lrmt::Error("gen needs an explicit family: pass --family or list it in the config (or use pipeline)");
  }
  const auto low = lrmt::load_text(config.target_corpus, config.target_language);
  const auto candidates = lrmt::load_corpus_dir(config.candidate_dir, config.target_language);
  lrmt::generate_stages(config, family, candidates, low, workers);
  return 0;
}

struct CombineArgs {
  std::vector<fs::path> inputs;
  fs::path output, report;
  std::string language = "combined";
};

int run_combine(const CombineArgs& a, std::size_t workers) {
  std::vector<lrmt::ParallelText> texts;
  for (const auto& path : a.inputs) texts.push_back(lrmt::load_text(path, path.stem().string()));
  const auto result = lrmt::combine_corpus(texts, a.language, workers);
  lrmt::save_text(a.output, result.combined);
  if (!a.report.empty()) {
    auto out = open_output(a.report);
    lrmt::write_combine_report(out, result);
  }
  for (const auto& [language, count] : result.histogram) spdlog::info("{}: {} lines chosen", language, count);
  return 0;
}

struct ScoreArgs {
  fs::path hypotheses, references;
  bool sentence = false;
};

int run_score(const ScoreArgs& a) {
  const auto hyp = lrmt::load_text(a.hypotheses, "hyp");
  const auto ref = lrmt::load_text(a.references, "ref");
  if (hyp.size() != ref.size()) {
    throw lrmt::Error("hypotheses have " + std::to_string(hyp.size()) + " lines, references " +
                      std::to_string(ref.size()));
  }
  std::vector<lrmt::Tokens> hyps;
  std::vector<lrmt::Tokens> refs;
  for (std::size_t i = 0; i < hyp.size(); ++i) {
    hyps.push_back(hyp[i].tokens);
    // Keyed files pair by ID; bare files pair by position.
    const lrmt::Tokens* r = ref.find(hyp[i].id);
    if (r == nullptr) throw lrmt::Error("no reference for line '" + hyp[i].id + "'");
    refs.push_back(*r);
  }
  std::cout << std::setprecision(std::numeric_limits<double>::max_digits10);
  if (a.sentence) {
    std::cout << "line_id\tsentence_bleu\n";
    for (std::size_t i = 0; i < hyps.size(); ++i) {
      std::cout << hyp[i].id << '\t' << lrmt::sentence_bleu(hyps[i], refs[i]) << '\n';
    }
  }
  const auto score = lrmt::corpus_bleu(hyps, refs);
  std::cout << "bleu\tp1\tp2\tp3\tp4\tbp\n" << score.value;
  for (double p : score.precisions) std::cout << '\t' << p;
  std::cout << '\t' << score.brevity_penalty << '\n';
  return 0;
}

struct PipelineArgs {
  fs::path config, output;
};

int run_pipeline_cmd(const PipelineArgs& a, std::size_t workers) {
  auto config = lrmt::load_config(a.config);
  if (!a.output.empty()) config.output_dir = a.output;
  lrmt::run_pipeline(config, workers);
  return 0;
}

void add_alignment_flags(CLI::App* cmd, lrmt::AlignmentConfig& config) {
  cmd->add_option("--iterations", config.iterations, "EM iterations")->check(CLI::PositiveNumber);
  cmd->add_option("--p-null", config.p_null, "Null-alignment prior")->check(CLI::Range(0.0, 0.999999));
}

std::size_t env_workers() {
  if (const char* v = std::getenv("LRMT_WORKERS")) {
    try {
      return std::max<std::size_t>(1, std::stoul(v));
    } catch (const std::exception&) {
      spdlog::warn("ignoring invalid LRMT_WORKERS='{}'", v);
    }
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("lrmt"));
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"Toolkit for translating a closed text into a low-resource language"};
  app.require_subcommand(1);
  std::size_t workers = env_workers();
  std::string log_level = std::getenv("LRMT_LOG_LEVEL") ? std::getenv("LRMT_LOG_LEVEL") : "info";
  app.add_option("--workers", workers, "Worker threads (env LRMT_WORKERS)")->check(CLI::PositiveNumber);
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off (env LRMT_LOG_LEVEL)");

  AlignArgs align;
  auto* align_cmd = app.add_subcommand("align", "Train a word-alignment model and write its statistics");
  align_cmd->add_option("--source", align.source, "Source text")->required()->check(CLI::ExistingFile);
  align_cmd->add_option("--target", align.target, "Target text")->required()->check(CLI::ExistingFile);
  align_cmd->add_option("--source-language", align.source_language);
  align_cmd->add_option("--target-language", align.target_language);
  align_cmd->add_option("--model", align.model, "Output translation table")->required();
  align_cmd->add_option("--stats", align.stats, "Output per-word fertility/distortion statistics");
  align_cmd->add_option("--lengths", align.lengths, "Output source length histogram");
  align_cmd->add_option("--alignments", align.alignments, "Output Viterbi links");
  add_alignment_flags(align_cmd, align.config);

  RankArgs rank;
  auto* rank_cmd = app.add_subcommand("rank", "Rank candidate source languages against a target");
  rank_cmd->add_option("--target", rank.target, "Low-resource text")->required()->check(CLI::ExistingFile);
  rank_cmd->add_option("--target-language", rank.target_language);
  rank_cmd->add_option("--candidates", rank.candidates, "Directory of <language>.txt files")
      ->required()
      ->check(CLI::ExistingDirectory);
  rank_cmd->add_option("--metric", rank.metric, "famd or famp")->check(CLI::IsMember({"famd", "famp", "FAMD", "FAMP"}));
  rank_cmd->add_option("--output", rank.output, "Ranking TSV (default: stdout)");
  rank_cmd->add_option("--skipped", rank.skipped, "Skip report TSV");
  rank_cmd->add_option("--min-shared", rank.min_shared, "Minimum shared lines per candidate");
  rank_cmd->add_option("--k", rank.k, "Also select the top-k family");
  rank_cmd->add_option("--family-out", rank.family_out, "Family list output (with --k)");
  add_alignment_flags(rank_cmd, rank.config);

  TagArgs tag;
  auto* tag_cmd = app.add_subcommand("tag", "Replace named entities by ordered placeholders");
  tag_cmd->add_option("--input", tag.input)->required()->check(CLI::ExistingFile);
  tag_cmd->add_option("--language", tag.language)->required();
  tag_cmd->add_option("--lexicon", tag.lexicon)->required()->check(CLI::ExistingFile);
  tag_cmd->add_option("--threshold", tag.threshold, "Maximum edit distance for fuzzy matches");
  tag_cmd->add_option("--output", tag.output)->required();
  tag_cmd->add_option("--dict-out", tag.dict_out, "Source dictionaries TSV");

  DetagArgs detag;
  auto* detag_cmd = app.add_subcommand("detag", "Restore named entities in translated text");
  detag_cmd->add_option("--input", detag.input)->required()->check(CLI::ExistingFile);
  detag_cmd->add_option("--dict", detag.dict, "Source dictionaries from tag")->required()->check(CLI::ExistingFile);
  detag_cmd->add_option("--lexicon", detag.lexicon)->required()->check(CLI::ExistingFile);
  detag_cmd->add_option("--target-language", detag.target_language)->required();
  detag_cmd->add_option("--output", detag.output)->required();
  detag_cmd->add_option("--report", detag.report, "Per-line substitution report TSV");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Emit training stages for a given family");
  gen_cmd->add_option("--config", gen.config)->required()->check(CLI::ExistingFile);
  gen_cmd->add_option("--family", gen.family, "Family list, one code per line")->check(CLI::ExistingFile);
  gen_cmd->add_option("--stage", gen.stages, "1, 2, 3 or aml (repeatable)");
  gen_cmd->add_option("--output", gen.output, "Override output directory");

  CombineArgs combine;
  auto* combine_cmd = app.add_subcommand("combine", "Pick the most central translation per line");
  combine_cmd->add_option("--inputs", combine.inputs, "One translation file per source language")
      ->required()
      ->check(CLI::ExistingFile);
  combine_cmd->add_option("--output", combine.output)->required();
  combine_cmd->add_option("--report", combine.report, "line_id/language/centrality TSV");

  ScoreArgs score;
  auto* score_cmd = app.add_subcommand("score", "Corpus BLEU of hypotheses against references");
  score_cmd->add_option("--hyp", score.hypotheses)->required()->check(CLI::ExistingFile);
  score_cmd->add_option("--ref", score.references)->required()->check(CLI::ExistingFile);
  score_cmd->add_flag("--sentence", score.sentence, "Also print smoothed sentence BLEU per line");

  PipelineArgs pipeline;
  auto* pipeline_cmd = app.add_subcommand("pipeline", "Rank, select a family and emit all stages");
  pipeline_cmd->add_option("--config", pipeline.config)->required()->check(CLI::ExistingFile);
  pipeline_cmd->add_option("--output", pipeline.output, "Override output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  const auto level = spdlog::level::from_str(log_level);
  if (level == spdlog::level::off && log_level != "off") {
    std::cerr << "error: unknown log level '" << log_level << "'\n";
    return 2;
  }
  spdlog::set_level(level);

  try {
    if (*align_cmd) return run_align(align);
    if (*rank_cmd) return run_rank(rank, workers);
    if (*tag_cmd) return run_tag(tag, workers);
    if (*detag_cmd) return run_detag(detag);
    if (*gen_cmd) return run_gen(gen, workers);
    if (*combine_cmd) return run_combine(combine, workers);
    if (*score_cmd) return run_score(score);
    if (*pipeline_cmd) return run_pipeline_cmd(pipeline, workers);
  } catch (const lrmt::Error& e) {
    spdlog::error("{}", e.what());
    return 1;
  } catch (const std::exception& e) {
    spdlog::error("unexpected failure: {}", e.what());
    return 1;
  }
  return 2;
}
