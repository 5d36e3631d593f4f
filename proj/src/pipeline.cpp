#include "snare/pipeline.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "snare/corpus.hpp"
#include "snare/dataset.hpp"
#include "snare/errors.hpp"
#include "snare/fewshot.hpp"
#include "snare/refiner.hpp"
#include "snare/scout.hpp"
#include "snare/util.hpp"

namespace snare {

namespace fs = std::filesystem;

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config: malformed JSON: " + std::string(e.what()));
  }
  RunConfig c;
  c.ontology_path = j.value("ontology", c.ontology_path);
  c.corpus_path = j.value("corpus", c.corpus_path);
  c.corpus_format = j.value("corpus_format", c.corpus_format);
  c.templates_dir = j.value("templates", c.templates_dir);
  c.out_dir = j.value("out", c.out_dir);
  c.replay_log = j.value("replay", c.replay_log);
  c.record_path = j.value("record", c.record_path);
  c.t = j.value("t", c.t);
  c.n_per_event = j.value("n", c.n_per_event);
  c.strategy = j.value("strategy", c.strategy);
  c.min_count = j.value("min_count", c.min_count);
  c.pair_probability = j.value("pair_probability", c.pair_probability);
  c.oversample_factor = j.value("oversample_factor", c.oversample_factor);
  c.k = j.value("k", c.k);
  c.gold_path = j.value("gold", c.gold_path);
  c.seed = j.value("seed", c.seed);
  c.corpus_fraction = j.value("corpus_fraction", c.corpus_fraction);
  c.dedup = j.value("dedup", c.dedup);
  c.trigger_internal = j.value("trigger_internal", c.trigger_internal);
  if (j.contains("generation")) {
    const auto& g = j["generation"];
    c.generation.model = g.value("model", c.generation.model);
    c.generation.temperature = g.value("temperature", c.generation.temperature);
    c.generation.top_p = g.value("top_p", c.generation.top_p);
    c.generation.max_tokens = g.value("max_tokens", c.generation.max_tokens);
    c.generation.parallelism = g.value("parallelism", c.generation.parallelism);
    c.generation.max_retries = g.value("max_retries", c.generation.max_retries);
    c.generation.backoff_base_ms = g.value("backoff_base_ms", c.generation.backoff_base_ms);
  }
  return c;
}

void validate_run_config(const RunConfig& config, bool needs_corpus) {
  if (config.ontology_path.empty() || !fs::exists(config.ontology_path))
    throw ConfigError("config: ontology file missing: " + config.ontology_path);
  if (needs_corpus && (config.corpus_path.empty() || !fs::exists(config.corpus_path)))
    throw ConfigError("config: corpus file missing: " + config.corpus_path);
  if (!config.replay_log.empty() && !fs::exists(config.replay_log))
    throw ConfigError("config: replay log missing: " + config.replay_log);
  if (!config.templates_dir.empty() && !fs::exists(config.templates_dir))
    throw ConfigError("config: templates dir missing: " + config.templates_dir);
  if (config.t < 1) throw ConfigError("config: t must be >= 1");
  if (config.n_per_event < 1) throw ConfigError("config: n must be >= 1");
  if (config.k < 0) throw ConfigError("config: k must be >= 0");
  if (config.generation.parallelism < 1) throw ConfigError("config: parallelism must be >= 1");
  if (config.pair_probability < 0.0 || config.pair_probability > 1.0)
    throw ConfigError("config: pair_probability must be in [0,1]");
  if (config.k > 0 && (config.gold_path.empty() || !fs::exists(config.gold_path)))
    throw ConfigError("config: k > 0 requires an existing gold dataset (--gold)");
  strategy_from_name(config.strategy);
}

std::shared_ptr<Backend> make_backend(const RunConfig& config) {
  if (!config.replay_log.empty()) return load_log(config.replay_log);
  const char* base = std::getenv("SNARE_API_BASE");
  if (base && *base) {
    const char* key = std::getenv("SNARE_API_KEY");
    return std::make_shared<HttpBackend>(base, key ? key : "");
  }
  throw ConfigError("no backend configured: set --replay or SNARE_API_BASE");
}

StagePaths stage_paths(const RunConfig& config) {
  fs::create_directories(config.out_dir);
  fs::path out(config.out_dir);
  return StagePaths{(out / "lexicon.json").string(), (out / "drafts.jsonl").string(),
                    (out / "dataset.jsonl").string(), (out / "run_report.json").string()};
}

void write_run_report(const RunConfig& config, const RunCounters& counters,
                      const std::string& path) {
  nlohmann::ordered_json j;
  j["seed"] = config.seed;
  j["model"] = config.generation.model;
  j["pipeline_version"] = kPipelineVersion;
  j["counters"] = nlohmann::ordered_json::object();
  for (const auto& [name, value] : counters.values) j["counters"][name] = value;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write run report: " + path);
  out << j.dump(2) << "\n";
}

namespace {

std::string now_iso8601() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

struct StageContext {
  Ontology ontology;
  TemplateSet templates;
  std::shared_ptr<Backend> backend;
  LlmGateway gateway;

  explicit StageContext(const RunConfig& config)
      : ontology(load_ontology(config.ontology_path)),
        templates(config.templates_dir.empty() ? TemplateSet::defaults()
                                               : TemplateSet::load(config.templates_dir)),
        backend(make_backend(config)),
        gateway(backend) {}
};

void maybe_record(const RunConfig& config, const std::vector<LlmExchange>& exchanges) {
  if (!config.record_path.empty()) record_log(exchanges, config.record_path);
}

TriggerLexicon build_lexicon(const RunConfig& config, StageContext& ctx, RunCounters& counters) {
  Scout scout(ctx.gateway, ctx.ontology, ctx.templates, config.generation);
  TriggerLexicon lexicon;
  if (config.trigger_internal) {
    lexicon = scout.generate_triggers_internal(config.t, &counters);
  } else {
    Corpus corpus = load_corpus(config.corpus_path,
                                config.corpus_format == "plain" ? CorpusFormat::Plain
                                                                : CorpusFormat::Jsonl,
                                config.dedup);
    if (config.corpus_fraction < 1.0)
      corpus = sample_corpus(corpus, config.corpus_fraction, config.seed);
    counters.bump("corpus.sentences", static_cast<std::int64_t>(corpus.sentences.size()));
    auto extractions = scout.extract_corpus(corpus, &counters);
    auto stats = aggregate(extractions);
    lexicon = select_triggers(stats, strategy_from_name(config.strategy), config.t, config.seed,
                              config.min_count);
    lexicon.provenance.corpus_digest = corpus.digest;
  }
  lexicon.provenance.model = config.generation.model;
  // deterministic replay runs get no wall-clock stamp
  if (config.replay_log.empty()) lexicon.provenance.created_at = now_iso8601();
  maybe_record(config, scout.exchanges());
  for (const auto& [event, list] : lexicon.per_event)
    counters.bump("lexicon.triggers", static_cast<std::int64_t>(list.size()));
  return lexicon;
}

std::vector<std::string> few_shot_blocks_for(const std::vector<LabelSpec>& specs,
                                             const FewShotBank& bank, const Ontology& ontology) {
  std::vector<std::string> blocks;
  blocks.reserve(specs.size());
  for (const auto& spec : specs) {
    std::vector<std::string> events;
    for (const auto& [event, trigger] : spec.targets) events.push_back(event);
    blocks.push_back(render_examples(bank, events, ontology));
  }
  return blocks;
}

std::vector<DraftInstance> run_narrator(const RunConfig& config, StageContext& ctx,
                                        const TriggerLexicon& lexicon, RunCounters& counters) {
  NarratorOptions options;
  options.count_per_event = config.n_per_event;
  options.pair_probability = config.pair_probability;
  options.oversample_factor = config.oversample_factor;
  options.seed = config.seed;
  auto specs = sample_label_specs(lexicon, ctx.ontology, options);
  counters.bump("narrator.specs", static_cast<std::int64_t>(specs.size()));

  std::vector<std::string> blocks;
  if (config.k > 0) {
    Dataset gold = read_dataset(config.gold_path, ctx.ontology);
    FewShotBank bank = sample_few_shot(gold, config.k, config.seed);
    blocks = few_shot_blocks_for(specs, bank, ctx.ontology);
  }

  Narrator narrator(ctx.gateway, ctx.ontology, ctx.templates, config.generation);
  auto drafts = narrator.narrate(specs, blocks, &counters);
  maybe_record(config, narrator.exchanges());
  return drafts;
}

Dataset run_refiner(const RunConfig& config, StageContext& ctx,
                    const std::vector<DraftInstance>& drafts, RunCounters& counters) {
  std::vector<SyntheticInstance> pool;
  for (const auto& draft : drafts) {
    auto result = verify_and_anchor(draft);
    if (std::holds_alternative<Rejected>(result)) {
      counters.bump("refiner.rejected_drafts");
      continue;
    }
    pool.push_back(std::get<SyntheticInstance>(std::move(result)));
  }
  counters.bump("refiner.verified_drafts", static_cast<std::int64_t>(pool.size()));

  Refiner refiner(ctx.gateway, ctx.ontology, ctx.templates, config.generation);
  pool = refiner.refine_batch(pool, &counters);
  maybe_record(config, refiner.exchanges());

  Dataset dataset = greedy_sample(pool, ctx.ontology, config.n_per_event);
  counters.bump("dataset.sampled", static_cast<std::int64_t>(dataset.instances.size()));
  for (const auto& [event, stat] : dataset.stats)
    if (stat.shortfall) counters.bump("dataset.shortfall_events");

  dataset.ontology_digest = util::file_digest(config.ontology_path);
  dataset.meta["model"] = config.generation.model;
  dataset.meta["seed"] = std::to_string(config.seed);
  dataset.meta["pipeline_version"] = kPipelineVersion;
  return dataset;
}

}  // namespace

std::string cmd_scout(const RunConfig& config, RunCounters& counters) {
  validate_run_config(config, !config.trigger_internal);
  StageContext ctx(config);
  auto paths = stage_paths(config);
  TriggerLexicon lexicon = build_lexicon(config, ctx, counters);
  write_lexicon(lexicon, paths.lexicon);
  write_run_report(config, counters, paths.run_report);
  return paths.lexicon;
}

std::string cmd_narrate(const RunConfig& config, const std::string& lexicon_path,
                        RunCounters& counters) {
  validate_run_config(config, false);
  StageContext ctx(config);
  auto paths = stage_paths(config);
  TriggerLexicon lexicon = read_lexicon(lexicon_path);
  auto drafts = run_narrator(config, ctx, lexicon, counters);
  write_drafts(drafts, paths.drafts);
  write_run_report(config, counters, paths.run_report);
  return paths.drafts;
}

std::string cmd_refine(const RunConfig& config, const std::string& drafts_path,
                       RunCounters& counters) {
  validate_run_config(config, false);
  StageContext ctx(config);
  auto paths = stage_paths(config);
  auto drafts = read_drafts(drafts_path);
  Dataset dataset = run_refiner(config, ctx, drafts, counters);
  write_dataset(dataset, paths.dataset);
  write_run_report(config, counters, paths.run_report);
  return paths.dataset;
}

std::string cmd_generate(const RunConfig& config, RunCounters& counters) {
  validate_run_config(config, !config.trigger_internal);
  StageContext ctx(config);
  auto paths = stage_paths(config);

  TriggerLexicon lexicon;
  if (config.resume && fs::exists(paths.lexicon)) {
    lexicon = read_lexicon(paths.lexicon);
    counters.bump("resume.lexicon_reused");
  } else {
    lexicon = build_lexicon(config, ctx, counters);
    write_lexicon(lexicon, paths.lexicon);
  }

  auto drafts = run_narrator(config, ctx, lexicon, counters);
  write_drafts(drafts, paths.drafts);

  Dataset dataset = run_refiner(config, ctx, drafts, counters);

  if (config.k > 0) {
    Dataset gold = read_dataset(config.gold_path, ctx.ontology);
    FewShotBank bank = sample_few_shot(gold, config.k, config.seed);
    auto gold_instances = bank_instances(bank, ctx.ontology);
    dataset = append_gold(dataset, gold_instances, ctx.ontology);
    counters.bump("dataset.gold_appended", static_cast<std::int64_t>(gold_instances.size()));
  }

  write_dataset(dataset, paths.dataset);
  write_run_report(config, counters, paths.run_report);
  return paths.dataset;
}

std::string cmd_label(const RunConfig& config, RunCounters& counters) {
  validate_run_config(config, true);
  StageContext ctx(config);
  auto paths = stage_paths(config);
  Corpus corpus = load_corpus(config.corpus_path,
                              config.corpus_format == "plain" ? CorpusFormat::Plain
                                                              : CorpusFormat::Jsonl,
                              config.dedup);
  if (config.corpus_fraction < 1.0)
    corpus = sample_corpus(corpus, config.corpus_fraction, config.seed);
  Scout scout(ctx.gateway, ctx.ontology, ctx.templates, config.generation);
  Dataset dataset = scout.label_sentences(corpus, &counters);
  dataset.ontology_digest = util::file_digest(config.ontology_path);
  dataset.meta["model"] = config.generation.model;
  dataset.meta["seed"] = std::to_string(config.seed);
  dataset.meta["pipeline_version"] = kPipelineVersion;
  maybe_record(config, scout.exchanges());
  write_dataset(dataset, paths.dataset);
  write_run_report(config, counters, paths.run_report);
  return paths.dataset;
}

std::string cmd_score(const std::string& pred_path, const std::string& gold_path,
                      const std::string& ontology_path, TriggerMatch mode) {
  Ontology ontology = load_ontology(ontology_path);
  Dataset pred = read_dataset(pred_path, ontology);
  Dataset gold = read_dataset(gold_path, ontology);
  return score_report_json(score(pred, gold, mode));
}

std::string cmd_hitrate(const std::string& synth_path, const std::string& gold_path,
                        const std::string& ontology_path, bool weighted) {
  Ontology ontology = load_ontology(ontology_path);
  Dataset synth = read_dataset(synth_path, ontology);
  Dataset gold = read_dataset(gold_path, ontology);
  return hit_rate_report_json(hit_rate(synth, extract_gold_triggers(gold), weighted));
}

void write_drafts(const std::vector<DraftInstance>& drafts, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("drafts: cannot open for writing: " + path);
  for (const auto& d : drafts) {
    nlohmann::ordered_json j;
    j["id"] = d.id;
    j["passage"] = d.passage;
    j["targets"] = nlohmann::ordered_json::array();
    for (const auto& [event, trigger] : d.spec.targets)
      j["targets"].push_back({{"type", event}, {"trigger", trigger}});
    j["exchange_ref"] = d.exchange_ref;
    j["sample_seed"] = d.spec.sample_seed;
    out << j.dump() << "\n";
  }
}

std::vector<DraftInstance> read_drafts(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("drafts: cannot open: " + path);
  std::vector<DraftInstance> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (util::trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      DraftInstance d;
      d.id = j.at("id").get<std::string>();
      d.passage = j.at("passage").get<std::string>();
      for (const auto& t : j.at("targets"))
        d.spec.targets.emplace_back(t.at("type").get<std::string>(),
                                    t.at("trigger").get<std::string>());
      d.exchange_ref = j.value("exchange_ref", std::string{});
      d.spec.sample_seed = j.value("sample_seed", std::uint64_t{0});
      out.push_back(std::move(d));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("drafts: line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace snare
