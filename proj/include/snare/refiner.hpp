#ifndef SNARE_REFINER_HPP
#define SNARE_REFINER_HPP

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "snare/dataset.hpp"
#include "snare/llm_gateway.hpp"
#include "snare/narrator.hpp"
#include "snare/ontology.hpp"
#include "snare/prompts.hpp"
#include "snare/report.hpp"

namespace snare {

struct AnchoredTrigger {
  std::string surface;  // the passage's actual surface form
  std::size_t start = 0;
  std::size_t end = 0;
  int tier = 1;  // 1 exact, 2 case-insensitive, 3 morphological variant
};

inline const std::vector<std::string> kDefaultSuffixes = {"s", "es", "ed", "d",
                                                          "ing", "ion", "ions"};

// Whole-word matching cascade, offsets in Unicode scalar values:
//   tier 1: exact case-sensitive
//   tier 2: case-insensitive
//   tier 3: stems equal after removing one suffix from the set on either side
// Earliest position wins within each tier.
std::optional<AnchoredTrigger> anchor_trigger(
    const std::string& passage, const std::string& trigger,
    const std::vector<std::string>& suffixes = kDefaultSuffixes);

struct Rejected {
  std::string draft_id;
  std::string reason;
};

using VerifyResult = std::variant<SyntheticInstance, Rejected>;

// Every sampled target must anchor; otherwise the draft is rejected.
VerifyResult verify_and_anchor(const DraftInstance& draft);

class Refiner {
 public:
  Refiner(LlmGateway& gateway, const Ontology& ontology, const TemplateSet& templates,
          GenerationConfig config);

  // Asks the LLM for all mentions in the passage; appends newly discovered
  // event types whose triggers anchor; never mutates existing mentions.
  SyntheticInstance refine(const SyntheticInstance& instance, RunCounters* counters = nullptr);

  std::vector<SyntheticInstance> refine_batch(const std::vector<SyntheticInstance>& instances,
                                              RunCounters* counters = nullptr);

  LlmRequest build_request(const SyntheticInstance& instance) const;

  // Merge step, exposed for testing with scripted responses: applies the
  // response's (type, trigger) proposals to the instance per the merge rule.
  SyntheticInstance merge_response(const SyntheticInstance& instance,
                                   const std::string& response_text,
                                   RunCounters* counters = nullptr) const;

  const std::vector<LlmExchange>& exchanges() const { return exchanges_; }

 private:
  LlmGateway& gateway_;
  const Ontology& ontology_;
  const TemplateSet& templates_;
  GenerationConfig config_;
  std::vector<LlmExchange> exchanges_;
};

// Parses "EventType: trigger" lines (also "EventType - trigger", list bullets
// and numbering tolerated). Unparseable lines are skipped.
std::vector<std::pair<std::string, std::string>> parse_mention_lines(const std::string& text);

}  // namespace snare

#endif  // SNARE_REFINER_HPP
