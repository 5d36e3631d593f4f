#ifndef SNARE_PIPELINE_HPP
#define SNARE_PIPELINE_HPP

#include <memory>
#include <string>

#include "snare/llm_gateway.hpp"
#include "snare/metrics.hpp"
#include "snare/narrator.hpp"
#include "snare/report.hpp"

namespace snare {

inline const char* kPipelineVersion = "1.0.0";

// Aggregated run configuration; JSON config file fields mirror this, flags win.
struct RunConfig {
  std::string ontology_path;
  std::string corpus_path;
  std::string corpus_format = "jsonl";  // jsonl | plain
  std::string templates_dir;
  std::string out_dir = ".";
  std::string replay_log;       // offline replay backend when set
  std::string record_path;      // record live exchanges here when set

  GenerationConfig generation;

  int t = 10;
  int n_per_event = 50;
  std::string strategy = "frequency_ranking";
  std::int64_t min_count = 1;
  double pair_probability = 0.5;
  double oversample_factor = 1.5;
  int k = 0;
  std::string gold_path;        // gold dataset for few-shot
  std::uint64_t seed = 0;
  double corpus_fraction = 1.0;
  bool dedup = false;
  bool resume = false;
  bool trigger_internal = false;  // LLM-internal trigger source (no corpus pass)
};

RunConfig load_run_config(const std::string& path);
void validate_run_config(const RunConfig& config, bool needs_corpus);

// Replay backend when replay_log is set, otherwise a live HTTP backend from
// SNARE_API_BASE / SNARE_API_KEY. Throws ConfigError when neither is available.
std::shared_ptr<Backend> make_backend(const RunConfig& config);

struct StagePaths {
  std::string lexicon;      // <out_dir>/lexicon.json
  std::string drafts;       // <out_dir>/drafts.jsonl
  std::string dataset;      // <out_dir>/dataset.jsonl
  std::string run_report;   // <out_dir>/run_report.json
};
StagePaths stage_paths(const RunConfig& config);

void write_run_report(const RunConfig& config, const RunCounters& counters,
                      const std::string& path);

// Stage commands; each writes its artifact(s) into out_dir and merges its
// counters into `counters`.
std::string cmd_scout(const RunConfig& config, RunCounters& counters);
std::string cmd_narrate(const RunConfig& config, const std::string& lexicon_path,
                        RunCounters& counters);
std::string cmd_refine(const RunConfig& config, const std::string& drafts_path,
                       RunCounters& counters);
std::string cmd_generate(const RunConfig& config, RunCounters& counters);
std::string cmd_label(const RunConfig& config, RunCounters& counters);
std::string cmd_score(const std::string& pred_path, const std::string& gold_path,
                      const std::string& ontology_path, TriggerMatch mode);
std::string cmd_hitrate(const std::string& synth_path, const std::string& gold_path,
                        const std::string& ontology_path, bool weighted);

// Drafts jsonl round-trip:
// {"id","passage","targets":[{"type","trigger"}],"exchange_ref","sample_seed"}
void write_drafts(const std::vector<DraftInstance>& drafts, const std::string& path);
std::vector<DraftInstance> read_drafts(const std::string& path);

}  // namespace snare

#endif  // SNARE_PIPELINE_HPP
