#include "lrmt/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <spdlog/spdlog.h>

#include "lrmt/error.hpp"
#include "lrmt/lexicon.hpp"

namespace lrmt {

namespace {

const std::set<std::string> kKnownKeys = {
    "target_language", "target_corpus", "candidate_dir", "lexicon",  "family",      "k",
    "edit_threshold",  "output_dir",    "seeds",         "split_mode", "alignment", "min_shared_lines",
    "max_ne",          "stages"};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

template <typename T>
T get_number(const nlohmann::json& json, const char* key, T fallback) {
  if (!json.contains(key)) return fallback;
  const auto& v = json.at(key);
  if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) throw Error(std::string("config: '") + key + "' must be a number");
  } else {
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw Error(std::string("config: '") + key + "' must be a non-negative integer");
    }
  }
  return v.get<T>();
}

std::string get_string(const nlohmann::json& json, const char* key) {
  if (!json.contains(key) || !json.at(key).is_string() || json.at(key).get<std::string>().empty()) {
    throw Error(std::string("config: missing string '") + key + "'");
  }
  return json.at(key).get<std::string>();
}

}  // namespace

PipelineConfig parse_config(const nlohmann::json& json, const std::filesystem::path& base_dir) {
  if (!json.is_object()) throw Error("config: expected a JSON object");
  for (const auto& [key, _] : json.items()) {
    if (!kKnownKeys.contains(key)) throw Error("config: unknown key '" + key + "'");
  }
  PipelineConfig config;
  config.target_language = get_string(json, "target_language");
  config.target_corpus = resolve(base_dir, get_string(json, "target_corpus"));
  config.candidate_dir = resolve(base_dir, get_string(json, "candidate_dir"));
  config.output_dir = resolve(base_dir, get_string(json, "output_dir"));
  if (json.contains("lexicon")) config.lexicon = resolve(base_dir, get_string(json, "lexicon"));

  if (!std::filesystem::is_regular_file(config.target_corpus)) {
    throw Error("config: target corpus " + config.target_corpus.string() + " does not exist");
  }
  if (!std::filesystem::is_directory(config.candidate_dir)) {
    throw Error("config: candidate directory " + config.candidate_dir.string() + " does not exist");
  }
  if (config.lexicon && !std::filesystem::is_regular_file(*config.lexicon)) {
    throw Error("config: lexicon " + config.lexicon->string() + " does not exist");
  }

  const bool has_k = json.contains("k");
  config.k = get_number<std::size_t>(json, "k", config.k);
  if (config.k < 1) throw Error("config: k must be >= 1");
  if (!json.contains("family")) throw Error("config: missing 'family' (famd, famp or a list of codes)");
  const auto& family = json.at("family");
  if (family.is_string()) {
    const auto name = family.get<std::string>();
    if (name == "famd") config.family_source = FamilySource::kFamd;
    else if (name == "famp") config.family_source = FamilySource::kFamp;
    else throw Error("config: family must be famd, famp or a list of language codes");
  } else if (family.is_array()) {
    config.family_source = FamilySource::kList;
    std::set<std::string> seen;
    for (const auto& code : family) {
      if (!code.is_string()) throw Error("config: family list entries must be strings");
      const auto c = code.get<std::string>();
      if (c == config.target_language) throw Error("config: family list contains the target language");
      if (!seen.insert(c).second) throw Error("config: duplicate family member '" + c + "'");
      if (!std::filesystem::is_regular_file(config.candidate_dir / (c + ".txt"))) {
        throw Error("config: no corpus file for family member '" + c + "'");
      }
      config.family_list.push_back(c);
    }
    if (config.family_list.empty()) throw Error("config: empty family list");
    if (has_k && config.k != config.family_list.size()) throw Error("config: k differs from the family list size");
    config.k = config.family_list.size();
  } else {
    throw Error("config: family must be famd, famp or a list of language codes");
  }

  config.edit_threshold = get_number<std::size_t>(json, "edit_threshold", config.edit_threshold);
  config.min_shared_lines = get_number<std::size_t>(json, "min_shared_lines", config.min_shared_lines);
  config.max_ne = get_number<std::size_t>(json, "max_ne", config.max_ne);
  if (json.contains("split_mode")) config.split_mode = parse_split_mode(get_string(json, "split_mode"));
  if (json.contains("seeds")) {
    const auto& seeds = json.at("seeds");
    if (!seeds.is_object()) throw Error("config: 'seeds' must be an object");
    for (const auto& [key, _] : seeds.items()) {
      if (key != "split") throw Error("config: unknown seed '" + key + "'");
    }
    config.split_seed = get_number<std::uint64_t>(seeds, "split", 0);
  }
  if (json.contains("alignment")) {
    const auto& a = json.at("alignment");
    if (!a.is_object()) throw Error("config: 'alignment' must be an object");
    for (const auto& [key, _] : a.items()) {
      if (key != "iterations" && key != "p_null" && key != "epsilon") {
        throw Error("config: unknown alignment key '" + key + "'");
      }
    }
    config.alignment.iterations = static_cast<int>(get_number<std::size_t>(a, "iterations", 5));
    config.alignment.p_null = get_number<double>(a, "p_null", config.alignment.p_null);
    config.alignment.epsilon = get_number<double>(a, "epsilon", config.alignment.epsilon);
    if (config.alignment.iterations < 1) throw Error("config: alignment.iterations must be >= 1");
    if (!(config.alignment.p_null >= 0.0 && config.alignment.p_null < 1.0)) {
      throw Error("config: alignment.p_null must be in [0,1)");
    }
  }
  if (json.contains("stages")) {
    const auto& stages = json.at("stages");
    if (!stages.is_array() || stages.empty()) throw Error("config: 'stages' must be a non-empty list");
    config.stages.clear();
    for (const auto& s : stages) {
      config.stages.push_back(parse_stage(s.is_string() ? s.get<std::string>() : s.dump()));
    }
  }
  return config;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  nlohmann::json json;
  try {
    json = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("config " + path.string() + ": " + e.what());
  }
  return parse_config(json, path.parent_path());
}

std::vector<ParallelText> load_corpus_dir(const std::filesystem::path& dir, const std::string& exclude) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<ParallelText> texts;
  for (const auto& f : files) {
    const std::string language = f.stem().string();
    if (language == exclude) continue;
    texts.push_back(load_text(f, language));
  }
  if (texts.empty()) throw Error("no candidate corpora in " + dir.string());
  return texts;
}

nlohmann::json generate_stages(const PipelineConfig& config, const FamilyOfChoice& family,
                               std::span<const ParallelText> candidates, const ParallelText& low,
                               std::size_t workers) {
  std::optional<LexiconTable> lexicon;
  if (config.lexicon) lexicon = load_lexicon(*config.lexicon);

  auto prepare = [&](const ParallelText& text) {
    if (!lexicon) return text;
    return tag_corpus(text, EntityTagger(*lexicon, text.language(), config.edit_threshold), nullptr, workers);
  };
  std::vector<ParallelText> tagged;
  for (const auto& code : family.members) {
    auto it = std::find_if(candidates.begin(), candidates.end(),
                           [&](const ParallelText& t) { return t.language() == code; });
    if (it == candidates.end()) throw Error("no corpus for family member '" + code + "'");
    tagged.push_back(prepare(*it));
  }
  const ParallelText tagged_low = prepare(low);

  std::vector<ParallelText> all = tagged;
  all.push_back(tagged_low);
  const std::size_t max_ne = std::max(config.max_ne, max_placeholders(all));
  const auto directions = pipeline_directions(family.members, low.language());
  const Vocabulary vocab = build_vocab(tagged, tagged_low, directions, max_ne);

  std::filesystem::create_directories(config.output_dir);
  nlohmann::json manifest;
  manifest["target"] = low.language();
  manifest["family"] = {{"members", family.members}, {"provenance", family.provenance}};
  manifest["vocab"] = write_vocab(config.output_dir / "vocab.txt", vocab);
  manifest["vocab"]["max_ne"] = max_ne;
  for (StageKind stage : config.stages) {
    StageSpec spec{stage, family.members, low.language(), default_split(stage)};
    spec.split.seed = config.split_seed;
    spec.split.mode = config.split_mode;
    const StageData data = emit_stage(spec, tagged, tagged_low, nullptr, config.edit_threshold, workers);
    manifest["stages"][stage_name(stage)] = write_stage(config.output_dir, data);
    spdlog::info("{}: {} directions written", stage_name(stage), data.directions.size());
  }
  std::ofstream out(config.output_dir / "manifest.json", std::ios::binary);
  if (!out) throw Error("cannot write manifest in " + config.output_dir.string());
  out << manifest.dump(2) << '\n';
  return manifest;
}

PipelineResult run_pipeline(const PipelineConfig& config, std::size_t workers) {
  const ParallelText low = load_text(config.target_corpus, config.target_language);
  const auto candidates = load_corpus_dir(config.candidate_dir, config.target_language);
  spdlog::info("loaded {} target lines and {} candidate languages", low.size(), candidates.size());

  PipelineResult result;
  std::filesystem::create_directories(config.output_dir);
  if (config.family_source == FamilySource::kList) {
    result.family = {config.target_language, config.family_list, "FAMO+"};
  } else {
    const Metric metric = config.family_source == FamilySource::kFamd ? Metric::kFamd : Metric::kFamp;
    RankOptions options;
    options.alignment = config.alignment;
    options.min_shared_lines = config.min_shared_lines;
    options.workers = workers;
    result.ranking = rank_languages(low, candidates, metric, options);
    {
      std::ofstream out(config.output_dir / "ranking.tsv", std::ios::binary);
      write_ranking(out, result.ranking->ranking);
      std::ofstream skipped(config.output_dir / "skipped.tsv", std::ios::binary);
      write_skip_report(skipped, result.ranking->skipped);
    }
    for (const auto& s : result.ranking->skipped) spdlog::warn("skipped {}: {}", s.language, s.reason);
    result.family = select_family(result.ranking->ranking, config.k, config.target_language);
  }
  spdlog::info("family ({}): {}", result.family.provenance, join(result.family.members, ","));
  result.manifest = generate_stages(config, result.family, candidates, low, workers);
  return result;
}

}  // namespace lrmt
