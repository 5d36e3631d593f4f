#ifndef SNARE_SCOUT_HPP
#define SNARE_SCOUT_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "snare/corpus.hpp"
#include "snare/dataset.hpp"
#include "snare/llm_gateway.hpp"
#include "snare/ontology.hpp"
#include "snare/prompts.hpp"
#include "snare/report.hpp"

namespace snare {

struct SentenceExtraction {
  std::string sentence_id;
  // (event type name, trigger surface) pairs; triggers substring-occur in the sentence
  std::vector<std::pair<std::string, std::string>> mentions;
};

struct TriggerStat {
  std::string trigger_key;  // lowercased, whitespace-collapsed
  std::int64_t count = 0;
  std::map<std::string, std::int64_t> variants;  // raw surface form -> count
};

struct LexiconProvenance {
  std::string corpus_digest;
  std::string model;
  std::string source = "corpus";  // "corpus" or "llm-internal"
  std::string created_at;
};

struct TriggerLexicon {
  // per event: descending count, ties lexicographic by trigger_key
  std::map<std::string, std::vector<TriggerStat>> per_event;
  int t = 10;
  std::string strategy = "frequency_ranking";
  LexiconProvenance provenance;
};

enum class SelectionStrategy { FrequencyRanking, UniformSampling, WeightedSampling, MinCount };

SelectionStrategy strategy_from_name(const std::string& name);
std::string strategy_name(SelectionStrategy s);

// Pure aggregation/selection functions -------------------------------------

// Corpus-level counting; output independent of extraction order.
std::map<std::string, std::vector<TriggerStat>> aggregate(
    const std::vector<SentenceExtraction>& extractions);

// Keep the t highest-count stats per event under (count desc, key asc).
TriggerLexicon filter_top_t(const std::map<std::string, std::vector<TriggerStat>>& stats, int t);

TriggerLexicon select_triggers(const std::map<std::string, std::vector<TriggerStat>>& stats,
                               SelectionStrategy strategy, int t, std::uint64_t seed,
                               std::int64_t min_count = 1);

// Two-stage prompt pipeline -------------------------------------------------

class Scout {
 public:
  Scout(LlmGateway& gateway, const Ontology& ontology, const TemplateSet& templates,
        GenerationConfig config);

  std::vector<EventType> stage1_identify(const UnlabeledSentence& sentence,
                                         RunCounters* counters = nullptr);
  std::optional<std::string> stage2_extract(const UnlabeledSentence& sentence,
                                            const EventType& event,
                                            RunCounters* counters = nullptr);

  // stage1 then stage2 per surviving (sentence, type), with batched gateway
  // calls; one SentenceExtraction per sentence, corpus order.
  std::vector<SentenceExtraction> extract_corpus(const Corpus& corpus,
                                                 RunCounters* counters = nullptr);

  // One prompt per event asking for t plausible triggers from the event
  // definition alone; counts fixed at 1, provenance "llm-internal".
  TriggerLexicon generate_triggers_internal(int t, RunCounters* counters = nullptr);

  // Weak-supervision mode: extract_corpus, then anchor each mention at its
  // first case-insensitive occurrence.
  Dataset label_sentences(const Corpus& corpus, RunCounters* counters = nullptr);

  // Prompt construction, exposed for fixture building.
  LlmRequest build_stage1_request(const UnlabeledSentence& sentence) const;
  LlmRequest build_stage2_request(const UnlabeledSentence& sentence,
                                  const EventType& event) const;
  LlmRequest build_internal_request(const EventType& event, int t) const;

  // Response parsing, exposed for unit tests.
  std::vector<EventType> parse_stage1_response(const std::string& text,
                                               RunCounters* counters = nullptr) const;
  std::optional<std::string> parse_stage2_response(const std::string& text,
                                                   const std::string& sentence_text,
                                                   RunCounters* counters = nullptr) const;

  const std::vector<LlmExchange>& exchanges() const { return exchanges_; }

 private:
  std::string event_catalog() const;

  LlmGateway& gateway_;
  const Ontology& ontology_;
  const TemplateSet& templates_;
  GenerationConfig config_;
  std::vector<LlmExchange> exchanges_;
};

// Lexicon file round-trip (schema in docs).
void write_lexicon(const TriggerLexicon& lexicon, const std::string& path);
TriggerLexicon read_lexicon(const std::string& path);

}  // namespace snare

#endif  // SNARE_SCOUT_HPP
