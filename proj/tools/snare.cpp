// snare: synthetic event-detection data toolkit.
// Subcommands: scout | narrate | refine | generate | label | score | hitrate | sample

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "snare/corpus.hpp"
#include "snare/errors.hpp"
#include "snare/pipeline.hpp"

using namespace snare;

namespace {

// common flags shared by the pipeline subcommands; flags win over --config
struct CliOptions {
  std::string config_path;
  RunConfig config;
  bool have_config = false;
};

void add_common(CLI::App* cmd, CliOptions& opts) {
  cmd->add_option("--config", opts.config_path, "JSON config file (flags override it)");
  cmd->add_option("--ontology", opts.config.ontology_path, "ontology JSON file");
  cmd->add_option("--corpus", opts.config.corpus_path, "unlabeled corpus file");
  cmd->add_option("--corpus-format", opts.config.corpus_format, "jsonl|plain")
      ->check(CLI::IsMember({"jsonl", "plain"}));
  cmd->add_option("--templates", opts.config.templates_dir, "prompt template dir");
  cmd->add_option("--out", opts.config.out_dir, "output directory");
  cmd->add_option("--seed", opts.config.seed, "root seed for all randomness");
  cmd->add_option("--replay", opts.config.replay_log, "replay log (offline backend)");
  cmd->add_option("--record", opts.config.record_path, "record live exchanges to this file");
  cmd->add_option("--t", opts.config.t, "triggers kept per event type");
  cmd->add_option("--n", opts.config.n_per_event, "instances sampled per event type");
  cmd->add_option("--k", opts.config.k, "few-shot examples per event type");
  cmd->add_option("--gold", opts.config.gold_path, "gold dataset (few-shot source)");
  cmd->add_option("--strategy", opts.config.strategy,
                  "frequency_ranking|uniform_sampling|weighted_sampling|min_count");
  cmd->add_option("--min-count", opts.config.min_count, "min_count strategy threshold");
  cmd->add_option("--pair-prob", opts.config.pair_probability, "two-event spec probability");
  cmd->add_option("--oversample", opts.config.oversample_factor, "narrator oversample factor");
  cmd->add_option("--parallelism", opts.config.generation.parallelism, "max in-flight requests");
  cmd->add_option("--model", opts.config.generation.model, "model name");
  cmd->add_option("--fraction", opts.config.corpus_fraction, "corpus fraction to use");
  cmd->add_flag("--dedup", opts.config.dedup, "drop exact-duplicate corpus texts");
  cmd->add_flag("--resume", opts.config.resume, "reuse existing stage artifacts in --out");
  cmd->add_flag("--trigger-internal", opts.config.trigger_internal,
                "LLM-internal trigger source (no corpus pass)");
}

// merge: config file values fill fields the flags left at defaults
RunConfig resolve(const CLI::App* cmd, CliOptions& opts) {
  if (opts.config_path.empty()) return opts.config;
  RunConfig base = load_run_config(opts.config_path);
  RunConfig out = base;
  auto take = [&](const char* flag, auto member) {
    if (cmd->count(flag) > 0) out.*member = opts.config.*member;
  };
  take("--ontology", &RunConfig::ontology_path);
  take("--corpus", &RunConfig::corpus_path);
  take("--corpus-format", &RunConfig::corpus_format);
  take("--templates", &RunConfig::templates_dir);
  take("--out", &RunConfig::out_dir);
  take("--seed", &RunConfig::seed);
  take("--replay", &RunConfig::replay_log);
  take("--record", &RunConfig::record_path);
  take("--t", &RunConfig::t);
  take("--n", &RunConfig::n_per_event);
  take("--k", &RunConfig::k);
  take("--gold", &RunConfig::gold_path);
  take("--strategy", &RunConfig::strategy);
  take("--min-count", &RunConfig::min_count);
  take("--pair-prob", &RunConfig::pair_probability);
  take("--oversample", &RunConfig::oversample_factor);
  take("--fraction", &RunConfig::corpus_fraction);
  take("--dedup", &RunConfig::dedup);
  take("--resume", &RunConfig::resume);
  take("--trigger-internal", &RunConfig::trigger_internal);
  if (cmd->count("--parallelism") > 0)
    out.generation.parallelism = opts.config.generation.parallelism;
  if (cmd->count("--model") > 0) out.generation.model = opts.config.generation.model;
  return out;
}

void emit_report(const std::string& json, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << json << "\n";
  } else {
    std::ofstream out(out_path, std::ios::binary);
    out << json << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"snare: domain-aware synthetic data generation for event detection"};
  app.require_subcommand(1);

  CliOptions opts;
  std::string lexicon_path, drafts_path, pred_path, gold_path, synth_path, report_out;
  bool string_match = false, weighted = false;
  double fraction = 0.2;
  std::string sample_out;

  auto* scout_cmd = app.add_subcommand("scout", "mine a trigger lexicon from the corpus");
  add_common(scout_cmd, opts);

  auto* narrate_cmd = app.add_subcommand("narrate", "generate draft passages from a lexicon");
  add_common(narrate_cmd, opts);
  narrate_cmd->add_option("--lexicon", lexicon_path, "lexicon JSON file")->required();

  auto* refine_cmd = app.add_subcommand("refine", "annotate, filter and sample drafts");
  add_common(refine_cmd, opts);
  refine_cmd->add_option("--drafts", drafts_path, "drafts jsonl file")->required();

  auto* generate_cmd = app.add_subcommand("generate", "end-to-end scout|narrate|refine");
  add_common(generate_cmd, opts);

  auto* label_cmd = app.add_subcommand("label", "weak-supervision labeling of the corpus");
  add_common(label_cmd, opts);

  auto* score_cmd = app.add_subcommand("score", "Eve-I / Tri-C F1 of pred vs gold");
  score_cmd->add_option("--pred", pred_path)->required();
  score_cmd->add_option("--gold", gold_path)->required();
  score_cmd->add_option("--ontology", opts.config.ontology_path)->required();
  score_cmd->add_flag("--string-match", string_match, "match triggers by string, not span");
  score_cmd->add_option("--out", report_out, "write report here instead of stdout");

  auto* hitrate_cmd = app.add_subcommand("hitrate", "trigger hit rate vs gold triggers");
  hitrate_cmd->add_option("--synth", synth_path)->required();
  hitrate_cmd->add_option("--gold", gold_path)->required();
  hitrate_cmd->add_option("--ontology", opts.config.ontology_path)->required();
  hitrate_cmd->add_flag("--weighted", weighted, "mention-count weighted hit rate");
  hitrate_cmd->add_option("--out", report_out, "write report here instead of stdout");

  auto* sample_cmd = app.add_subcommand("sample", "deterministic corpus subsampling");
  sample_cmd->add_option("--corpus", opts.config.corpus_path)->required();
  sample_cmd->add_option("--corpus-format", opts.config.corpus_format)
      ->check(CLI::IsMember({"jsonl", "plain"}));
  sample_cmd->add_option("--fraction", fraction)->required();
  sample_cmd->add_option("--seed", opts.config.seed);
  sample_cmd->add_option("--out", sample_out, "output jsonl path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    RunCounters counters;
    if (scout_cmd->parsed()) {
      auto path = cmd_scout(resolve(scout_cmd, opts), counters);
      std::cerr << "lexicon written: " << path << "\n";
    } else if (narrate_cmd->parsed()) {
      auto path = cmd_narrate(resolve(narrate_cmd, opts), lexicon_path, counters);
      std::cerr << "drafts written: " << path << "\n";
    } else if (refine_cmd->parsed()) {
      auto path = cmd_refine(resolve(refine_cmd, opts), drafts_path, counters);
      std::cerr << "dataset written: " << path << "\n";
    } else if (generate_cmd->parsed()) {
      auto path = cmd_generate(resolve(generate_cmd, opts), counters);
      std::cerr << "dataset written: " << path << "\n";
    } else if (label_cmd->parsed()) {
      auto path = cmd_label(resolve(label_cmd, opts), counters);
      std::cerr << "dataset written: " << path << "\n";
    } else if (score_cmd->parsed()) {
      emit_report(cmd_score(pred_path, gold_path, opts.config.ontology_path,
                            string_match ? TriggerMatch::String : TriggerMatch::Span),
                  report_out);
    } else if (hitrate_cmd->parsed()) {
      emit_report(cmd_hitrate(synth_path, gold_path, opts.config.ontology_path, weighted),
                  report_out);
    } else if (sample_cmd->parsed()) {
      Corpus corpus = load_corpus(opts.config.corpus_path,
                                  opts.config.corpus_format == "plain" ? CorpusFormat::Plain
                                                                       : CorpusFormat::Jsonl);
      Corpus sampled = sample_corpus(corpus, fraction, opts.config.seed);
      write_corpus_jsonl(sampled, sample_out);
      std::cerr << "sampled " << sampled.sentences.size() << " of " << corpus.sentences.size()
                << " sentences: " << sample_out << "\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const CLI::Error& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: runtime: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
