#ifndef SNARE_NARRATOR_HPP
#define SNARE_NARRATOR_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "snare/fewshot.hpp"
#include "snare/llm_gateway.hpp"
#include "snare/ontology.hpp"
#include "snare/prompts.hpp"
#include "snare/report.hpp"
#include "snare/scout.hpp"

namespace snare {

// 1-2 (event type, trigger) targets for one synthetic instance.
struct LabelSpec {
  std::vector<std::pair<std::string, std::string>> targets;
  std::uint64_t sample_seed = 0;
};

struct DraftInstance {
  std::string id;
  std::string passage;
  LabelSpec spec;
  std::string exchange_ref;  // prompt digest of the generating call
};

struct NarratorOptions {
  int count_per_event = 50;
  double pair_probability = 0.5;
  double oversample_factor = 1.5;
  bool weight_triggers_by_count = false;  // default: uniform over the lexicon list
  std::uint64_t seed = 0;
};

// Deterministic under seed. Every ontology event appears as a target in at
// least ceil(oversample_factor*count_per_event) specs. Throws
// EmptyLexiconError when an ontology event has no lexicon triggers.
std::vector<LabelSpec> sample_label_specs(const TriggerLexicon& lexicon,
                                          const Ontology& ontology,
                                          const NarratorOptions& options);

// (system, user) prompt pair for one spec.
std::pair<std::string, std::string> render_narrator_prompt(
    const LabelSpec& spec, const Ontology& ontology, const TemplateSet& templates,
    const std::string& few_shot_block);

class Narrator {
 public:
  Narrator(LlmGateway& gateway, const Ontology& ontology, const TemplateSet& templates,
           GenerationConfig config);

  // One gateway call per spec, batched; failed or empty generations are
  // dropped with counters. Draft ids are "narr-<zero-padded index>".
  // few_shot_blocks is empty or one rendered example block per spec.
  std::vector<DraftInstance> narrate(const std::vector<LabelSpec>& specs,
                                     const std::vector<std::string>& few_shot_blocks = {},
                                     RunCounters* counters = nullptr);

  const std::vector<LlmExchange>& exchanges() const { return exchanges_; }

 private:
  LlmGateway& gateway_;
  const Ontology& ontology_;
  const TemplateSet& templates_;
  GenerationConfig config_;
  std::vector<LlmExchange> exchanges_;
};

// Strips surrounding markdown fencing and quotes from a generated passage.
std::string clean_passage(const std::string& raw);

}  // namespace snare

#endif  // SNARE_NARRATOR_HPP
