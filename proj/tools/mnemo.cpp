// mnemo: keyword-mnemonic generation and evaluation CLI.
//
// Exit codes: 0 success, 1 internal error, 2 config/usage error,
// 3 backend failure, 4 no valid cue survived filtering.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "mnemo/config.hpp"
#include "mnemo/cue_pipeline.hpp"
#include "mnemo/error.hpp"
#include "mnemo/evaluator.hpp"
#include "mnemo/http_backend.hpp"
#include "mnemo/keyword_pipeline.hpp"
#include "mnemo/lexicon.hpp"
#include "mnemo/llm_gateway.hpp"
#include "mnemo/phonetics.hpp"

namespace {

using nlohmann::ordered_json;

struct CliState {
  mnemo::AppConfig cfg;
  std::string config_path;
  std::string data_dir = "data";
  std::string replay_dir;
  std::string output_mode = "json";
};

void resolve_defaults(CliState& st) {
  auto fallback = [&](std::string& field, const char* name) {
    if (field.empty()) field = st.data_dir + "/" + name;
  };
  fallback(st.cfg.arpabet_ipa_map, "arpabet_to_ipa.tsv");
  fallback(st.cfg.pronouncing_dict, "cmudict.sample.txt");
  fallback(st.cfg.stopwords, "stopwords.txt");
  fallback(st.cfg.keyword_prompt, "prompts/keyword_prompt.txt");
  fallback(st.cfg.cue_prompt, "prompts/cue_prompt.txt");
  fallback(st.cfg.mask_prompt, "prompts/mask_prompt.txt");
}

mnemo::LexiconBundle load_lexicon(const mnemo::AppConfig& cfg) {
  mnemo::LexiconPaths p;
  p.imageability_primary = cfg.imageability_primary;
  p.imageability_secondary = cfg.imageability_secondary;
  p.aoa = cfg.aoa;
  p.stopwords = cfg.stopwords;
  p.lemmas = cfg.lemmas;
  p.embeddings = cfg.embeddings;
  return mnemo::LexiconBundle::load(p);
}

struct Runtime {
  std::unique_ptr<mnemo::Backend> backend;
  std::unique_ptr<mnemo::ResponseCache> cache;
  std::unique_ptr<mnemo::Gateway> gateway;
};

// Replay mode runs cache-less so repeated runs are byte-identical.
Runtime make_runtime(const CliState& st) {
  Runtime rt;
  mnemo::GatewayConfig gw;
  gw.generation_model = st.cfg.generation_model;
  gw.scoring_model = st.cfg.scoring_model;
  gw.max_inflight = st.cfg.max_inflight;
  gw.mask_prompt_template = mnemo::read_file(st.cfg.mask_prompt);
  if (!st.replay_dir.empty()) {
    rt.backend = std::make_unique<mnemo::ReplayBackend>(st.replay_dir);
  } else {
    if (st.cfg.api_base.empty())
      throw mnemo::ConfigError(
          "no backend configured: set --api-base, MNEMO_API_BASE, or use "
          "--replay");
    mnemo::HttpBackendConfig hb;
    hb.base_url = st.cfg.api_base;
    hb.api_key = st.cfg.api_key;
    hb.timeout_seconds = st.cfg.timeout_seconds;
    rt.backend = std::make_unique<mnemo::HttpBackend>(hb);
    if (!st.cfg.cache_file.empty())
      rt.cache = std::make_unique<mnemo::ResponseCache>(st.cfg.cache_file);
  }
  rt.gateway = std::make_unique<mnemo::Gateway>(*rt.backend, gw,
                                                rt.cache.get());
  return rt;
}

ordered_json keyword_set_json(const mnemo::KeywordSet& s, bool ranked) {
  ordered_json j;
  j["keywords"] = s.keywords;
  j["raw_scores"] = {{"img", s.raw_scores.img},
                     {"orth", s.raw_scores.orth},
                     {"sem", s.raw_scores.sem}};
  if (ranked) {
    j["ranks"] = {{"img", s.ranks.img},
                  {"orth", s.ranks.orth},
                  {"sem", s.ranks.sem}};
    j["aggregate"] = s.aggregate;
  }
  return j;
}

ordered_json cue_json(const mnemo::VerbalCue& c, bool ranked) {
  ordered_json j;
  j["text"] = c.text;
  j["constraints"] = {{"contains_target", c.constraint.contains_target},
                      {"contains_all_keywords",
                       c.constraint.contains_all_keywords},
                      {"keywords_in_order", c.constraint.keywords_in_order}};
  if (ranked) {
    j["raw_scores"] = {{"cont", c.raw_scores.cont},
                       {"aoa", c.raw_scores.aoa}};
    j["ranks"] = {{"cont", c.ranks.cont}, {"aoa", c.ranks.aoa}};
    j["aggregate"] = c.aggregate;
  }
  return j;
}

void emit(const CliState& st, const ordered_json& j) {
  if (st.output_mode == "json")
    std::cout << j.dump(2) << '\n';
  else
    std::cout << j.dump(2) << '\n'; // text mode currently mirrors JSON
}

int cmd_generate(CliState& st, const std::string& word,
                 const std::string& meaning, bool dry_run) {
  auto dict = mnemo::PhoneticDictionary::load(st.cfg.pronouncing_dict,
                                              st.cfg.arpabet_ipa_map);
  auto lex = load_lexicon(st.cfg);
  auto target = mnemo::TargetWord::make(
      word, meaning.empty() ? std::nullopt : std::make_optional(meaning),
      dict);

  std::string keyword_tmpl = mnemo::read_file(st.cfg.keyword_prompt);
  std::string cue_tmpl = mnemo::read_file(st.cfg.cue_prompt);

  if (dry_run) {
    ordered_json j;
    j["keyword_prompt"] =
        mnemo::fill_template(keyword_tmpl, "target", target.surface);
    j["cue_prompt_template"] = cue_tmpl;
    j["mask_prompt_template"] = mnemo::read_file(st.cfg.mask_prompt);
    j["backend_calls"] = 0;
    emit(st, j);
    return 0;
  }

  Runtime rt = make_runtime(st);
  mnemo::KeywordPipeline kp(lex, dict, *rt.gateway, keyword_tmpl);
  auto ranked_sets =
      kp.run(target, st.cfg.seed,
             static_cast<size_t>(st.cfg.keyword_cap));
  const mnemo::KeywordSet& chosen = ranked_sets.front();

  mnemo::CuePipeline cp(lex, *rt.gateway, cue_tmpl);
  std::vector<mnemo::VerbalCue> all_cues;
  std::vector<mnemo::VerbalCue> survivors;
  for (int round = 0; round <= st.cfg.retry_rounds; ++round) {
    all_cues = cp.overgenerate(target, chosen,
                               static_cast<size_t>(st.cfg.cue_cap));
    for (auto& c : all_cues)
      c.constraint = mnemo::check_constraints(c, target, chosen, lex);
    survivors = cp.filter(all_cues, target, chosen);
    if (!survivors.empty()) break;
  }
  if (survivors.empty())
    throw mnemo::NoValidCueError("no cue satisfied the constraints for \"" +
                                 target.surface + "\"");
  for (auto& c : survivors) cp.score(c, target);
  auto ranked_cues = mnemo::rank_cues(std::move(survivors), st.cfg.seed);

  ordered_json out;
  out["target"] = {{"surface", target.surface},
                   {"meaning", target.meaning ? ordered_json(*target.meaning)
                                              : ordered_json(nullptr)},
                   {"syllables", target.syllables()},
                   {"ipa", target.pronunciation.ipa}};
  out["keyword_candidates"] = ordered_json::array();
  for (const auto& s : ranked_sets)
    out["keyword_candidates"].push_back(keyword_set_json(s, true));
  out["chosen_keywords"] = chosen.keywords;
  out["cue_candidates"] = ordered_json::array();
  for (const auto& c : all_cues) {
    // surviving cues carry scores/ranks from the ranked list
    const mnemo::VerbalCue* scored = nullptr;
    for (const auto& rc : ranked_cues)
      if (rc.text == c.text) scored = &rc;
    out["cue_candidates"].push_back(scored ? cue_json(*scored, true)
                                           : cue_json(c, false));
  }
  out["chosen_cue"] = ranked_cues.front().text;
  out["seed"] = st.cfg.seed;
  out["cache_stats"] = {
      {"hits", rt.cache ? rt.cache->hits() : 0},
      {"misses", rt.cache ? rt.cache->misses() : 0},
      {"entries", rt.cache ? rt.cache->size() : 0}};
  emit(st, out);
  return 0;
}

int cmd_score_cue(CliState& st, const std::string& word,
                  const std::string& meaning, const std::string& keywords_csv,
                  const std::string& cue_text, bool no_llm, bool strict) {
  auto dict = mnemo::PhoneticDictionary::load(st.cfg.pronouncing_dict,
                                              st.cfg.arpabet_ipa_map);
  auto lex = load_lexicon(st.cfg);
  auto target = mnemo::TargetWord::make(
      word, meaning.empty() ? std::nullopt : std::make_optional(meaning),
      dict);
  mnemo::KeywordSet set;
  for (const auto& piece : mnemo::split(keywords_csv, ',')) {
    std::string k = mnemo::to_lower(mnemo::strip_punct(mnemo::trim(piece)));
    if (!k.empty()) set.keywords.push_back(k);
  }
  if (set.keywords.empty())
    throw mnemo::ConfigError("score-cue: no keywords given");

  auto cue = mnemo::VerbalCue::from_text(cue_text);
  cue.constraint = mnemo::check_constraints(cue, target, set, lex);

  ordered_json out;
  out["target"] = target.surface;
  out["keywords"] = set.keywords;
  out["cue"] = cue.text;
  out["constraints"] = {
      {"contains_target", cue.constraint.contains_target},
      {"contains_all_keywords", cue.constraint.contains_all_keywords},
      {"keywords_in_order", cue.constraint.keywords_in_order}};
  out["f_aoa"] = mnemo::score_aoa(cue, lex);
  if (!no_llm) {
    Runtime rt = make_runtime(st);
    out["f_cont"] =
        mnemo::score_context_completeness(cue, target, *rt.gateway, lex);
  }
  emit(st, out);
  if (strict && !cue.constraint.all()) return 1;
  return 0;
}

int cmd_rank_keywords(CliState& st, const std::string& word,
                      const std::vector<std::string>& set_specs) {
  auto dict = mnemo::PhoneticDictionary::load(st.cfg.pronouncing_dict,
                                              st.cfg.arpabet_ipa_map);
  auto lex = load_lexicon(st.cfg);
  auto target = mnemo::TargetWord::make(word, std::nullopt, dict);
  std::vector<mnemo::KeywordSet> sets;
  for (const auto& spec : set_specs) {
    mnemo::KeywordSet s;
    for (const auto& piece : mnemo::split(spec, ',')) {
      std::string k = mnemo::to_lower(mnemo::strip_punct(mnemo::trim(piece)));
      if (!k.empty()) s.keywords.push_back(k);
    }
    if (s.keywords.empty())
      throw mnemo::ConfigError("rank-keywords: empty set \"" + spec + "\"");
    s.raw_scores.img = mnemo::score_imageability(s, lex);
    s.raw_scores.orth = mnemo::score_orthographic(s, target);
    s.raw_scores.sem = mnemo::score_semantic(s, target, lex);
    sets.push_back(std::move(s));
  }
  auto ranked = mnemo::rank_keyword_sets(std::move(sets), st.cfg.seed);
  ordered_json out;
  out["target"] = target.surface;
  out["candidates"] = ordered_json::array();
  for (const auto& s : ranked)
    out["candidates"].push_back(keyword_set_json(s, true));
  out["seed"] = st.cfg.seed;
  emit(st, out);
  return 0;
}

mnemo::ExternalScorer make_http_scorer(const std::string& url,
                                       int timeout_seconds) {
  return [url, timeout_seconds](const std::string& text) {
    size_t scheme = url.find("://");
    size_t path_start =
        url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    std::string host =
        path_start == std::string::npos ? url : url.substr(0, path_start);
    std::string path =
        path_start == std::string::npos ? "/" : url.substr(path_start);
    httplib::Client cli(host);
    cli.set_read_timeout(timeout_seconds, 0);
    nlohmann::json body{{"text", text}};
    auto res = cli.Post(path, body.dump(), "application/json");
    if (!res || res->status < 200 || res->status >= 300)
      throw mnemo::BackendError("imageability scorer unreachable: " + url);
    return nlohmann::json::parse(res->body).at("score").get<double>();
  };
}

int cmd_eval(CliState& st, const std::string& dataset,
             const std::string& report_path, const std::string& csv_path,
             const std::string& metrics, bool no_llm,
             const std::string& scorer_url) {
  if (!std::filesystem::exists(dataset))
    throw mnemo::ConfigError("dataset not found: " + dataset);
  auto dict = mnemo::PhoneticDictionary::load(st.cfg.pronouncing_dict,
                                              st.cfg.arpabet_ipa_map);
  auto lex = load_lexicon(st.cfg);

  mnemo::ReportOptions opt;
  opt.seed = st.cfg.seed;
  opt.keyword_metrics = metrics == "all" || metrics == "keywords";
  opt.cue_metrics = metrics == "all" || metrics == "cues";
  opt.perplexity = opt.cue_metrics && !no_llm;
  if (!scorer_url.empty())
    opt.imageability_scorer =
        make_http_scorer(scorer_url, st.cfg.timeout_seconds);

  Runtime rt;
  mnemo::Gateway* gw = nullptr;
  if (opt.perplexity) {
    rt = make_runtime(st);
    gw = rt.gateway.get();
  }
  mnemo::Evaluator ev(lex, dict, gw);
  ordered_json report = ev.run_report(dataset, opt);

  if (!report_path.empty()) {
    std::ofstream out(report_path);
    if (!out)
      throw mnemo::ConfigError("cannot write report: " + report_path);
    out << report.dump(2) << '\n';
    std::cerr << "report written to " << report_path << '\n';
  } else {
    emit(st, report);
  }
  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    if (!out) throw mnemo::ConfigError("cannot write CSV: " + csv_path);
    out << mnemo::Evaluator::report_to_csv(report);
  }
  return 0;
}

int cmd_cache(CliState& st, bool clear) {
  if (st.cfg.cache_file.empty())
    throw mnemo::ConfigError("no cache file configured (--cache-file)");
  if (clear) {
    std::error_code ec;
    std::filesystem::remove(st.cfg.cache_file, ec);
    emit(st, ordered_json{{"cleared", st.cfg.cache_file}});
    return 0;
  }
  size_t entries = 0;
  if (std::filesystem::exists(st.cfg.cache_file)) {
    mnemo::ResponseCache cache(st.cfg.cache_file);
    entries = cache.size();
  }
  emit(st, ordered_json{{"path", st.cfg.cache_file}, {"entries", entries}});
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CliState st;
  CLI::App app{"Keyword-mnemonic generation and evaluation"};
  app.require_subcommand(1);

  app.add_option("--config", st.config_path, "config file (default mnemo.toml)");
  app.add_option("--data-dir", st.data_dir, "shipped data directory");
  app.add_option("--output", st.output_mode, "output mode: json")
      ->check(CLI::IsMember({"json", "text"}));
  app.add_option("--replay", st.replay_dir,
                 "replay fixture directory (deterministic offline backend)");
  app.add_option("--seed", st.cfg.seed, "tie-break RNG seed");
  app.add_option("--api-base", st.cfg.api_base, "backend base URL");
  app.add_option("--api-key", st.cfg.api_key, "backend API key");
  app.add_option("--gen-model", st.cfg.generation_model, "generation model");
  app.add_option("--score-model", st.cfg.scoring_model, "logprob model");
  app.add_option("--cache-file", st.cfg.cache_file, "JSONL response cache");
  app.add_option("--norms", st.cfg.imageability_primary,
                 "primary imageability CSV (7-point scale)");
  app.add_option("--norms-secondary", st.cfg.imageability_secondary,
                 "secondary imageability CSV (rescaled to [1,7])");
  app.add_option("--aoa", st.cfg.aoa, "age-of-acquisition CSV");
  app.add_option("--stopwords", st.cfg.stopwords, "stopword list");
  app.add_option("--lemmas", st.cfg.lemmas, "lemma TSV (form<TAB>lemma)");
  app.add_option("--embeddings", st.cfg.embeddings, "word embedding text file");
  app.add_option("--dict", st.cfg.pronouncing_dict, "pronouncing dictionary");
  app.add_option("--ipa-map", st.cfg.arpabet_ipa_map, "ARPABET-to-IPA TSV");
  app.add_option("--keyword-cap", st.cfg.keyword_cap,
                 "keyword overgeneration cap (0 = 2L+1)");
  app.add_option("--cue-cap", st.cfg.cue_cap, "cue overgeneration cap");
  app.add_option("--retry-rounds", st.cfg.retry_rounds,
                 "extra cue rounds when all candidates fail the filter");

  std::string word, meaning, keywords_csv, cue_text;
  bool dry_run = false, no_llm = false, strict = false;

  auto* gen = app.add_subcommand("generate", "full two-stage pipeline");
  gen->add_option("word", word, "target word")->required();
  gen->add_option("--meaning", meaning, "target word meaning");
  gen->add_flag("--dry-run", dry_run, "print prompts, no backend calls");

  auto* score = app.add_subcommand("score-cue", "score one cue in isolation");
  score->add_option("--target", word, "target word")->required();
  score->add_option("--meaning", meaning, "target word meaning");
  score->add_option("--keywords", keywords_csv, "comma-separated keywords")
      ->required();
  score->add_option("--cue", cue_text, "cue sentence")->required();
  score->add_flag("--no-llm", no_llm, "skip f_cont (offline)");
  score->add_flag("--strict", strict, "nonzero exit on failed constraints");

  std::vector<std::string> set_specs;
  auto* rank = app.add_subcommand("rank-keywords",
                                  "score and rank given keyword sets");
  rank->add_option("--target", word, "target word")->required();
  rank->add_option("--set", set_specs, "comma-separated keyword set "
                                       "(repeatable)")
      ->required();

  std::string dataset, report_path, csv_path, metrics = "all", scorer_url;
  auto* eval = app.add_subcommand("eval", "batch metric report over JSONL");
  eval->add_option("dataset", dataset, "JSONL dataset")->required();
  eval->add_option("--report", report_path, "write report JSON here");
  eval->add_option("--csv", csv_path, "also write flattened CSV");
  eval->add_option("--metrics", metrics, "all | keywords | cues")
      ->check(CLI::IsMember({"all", "keywords", "cues"}));
  eval->add_flag("--no-llm", no_llm, "skip PPL scoring");
  eval->add_option("--imageability-scorer", scorer_url,
                   "external sentence-imageability endpoint");

  bool cache_clear = false;
  auto* cache = app.add_subcommand("cache", "inspect or clear the cache");
  cache->add_flag("--clear", cache_clear, "delete the cache file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (st.config_path.empty() && std::filesystem::exists("mnemo.toml"))
      st.config_path = "mnemo.toml";
    mnemo::AppConfig file_env_cfg;
    mnemo::apply_config_sources(file_env_cfg, st.config_path);
    // flags already wrote into st.cfg; fill anything still at its default
    auto take = [](std::string& flag_val, const std::string& other) {
      if (flag_val.empty() && !other.empty()) flag_val = other;
    };
    take(st.cfg.imageability_primary, file_env_cfg.imageability_primary);
    take(st.cfg.imageability_secondary, file_env_cfg.imageability_secondary);
    take(st.cfg.aoa, file_env_cfg.aoa);
    take(st.cfg.stopwords, file_env_cfg.stopwords);
    take(st.cfg.lemmas, file_env_cfg.lemmas);
    take(st.cfg.embeddings, file_env_cfg.embeddings);
    take(st.cfg.pronouncing_dict, file_env_cfg.pronouncing_dict);
    take(st.cfg.arpabet_ipa_map, file_env_cfg.arpabet_ipa_map);
    take(st.cfg.keyword_prompt, file_env_cfg.keyword_prompt);
    take(st.cfg.cue_prompt, file_env_cfg.cue_prompt);
    take(st.cfg.mask_prompt, file_env_cfg.mask_prompt);
    take(st.cfg.api_base, file_env_cfg.api_base);
    take(st.cfg.api_key, file_env_cfg.api_key);
    take(st.cfg.cache_file, file_env_cfg.cache_file);
    if (st.cfg.generation_model == "gpt-4")
      st.cfg.generation_model = file_env_cfg.generation_model;
    if (st.cfg.scoring_model == "gpt-4")
      st.cfg.scoring_model = file_env_cfg.scoring_model;
    // numeric knobs: a flag on the command line wins over the config file
    if (!app.count("--seed")) st.cfg.seed = file_env_cfg.seed;
    if (!app.count("--keyword-cap"))
      st.cfg.keyword_cap = file_env_cfg.keyword_cap;
    if (!app.count("--cue-cap")) st.cfg.cue_cap = file_env_cfg.cue_cap;
    if (!app.count("--retry-rounds"))
      st.cfg.retry_rounds = file_env_cfg.retry_rounds;
    st.cfg.timeout_seconds = file_env_cfg.timeout_seconds;
    st.cfg.max_inflight = file_env_cfg.max_inflight;
    resolve_defaults(st);
    st.cfg.validate();

    if (gen->parsed()) return cmd_generate(st, word, meaning, dry_run);
    if (score->parsed())
      return cmd_score_cue(st, word, meaning, keywords_csv, cue_text, no_llm,
                           strict);
    if (rank->parsed()) return cmd_rank_keywords(st, word, set_specs);
    if (eval->parsed())
      return cmd_eval(st, dataset, report_path, csv_path, metrics, no_llm,
                      scorer_url);
    if (cache->parsed()) return cmd_cache(st, cache_clear);
  } catch (const mnemo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const mnemo::NoValidCueError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const mnemo::BackendError& e) {
    std::cerr << "backend error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
