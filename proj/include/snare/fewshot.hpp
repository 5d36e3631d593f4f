#ifndef SNARE_FEWSHOT_HPP
#define SNARE_FEWSHOT_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "snare/dataset.hpp"
#include "snare/ontology.hpp"

namespace snare {

struct FewShotBank {
  int k = 0;
  // per event: up to k gold instances mentioning that event
  std::map<std::string, std::vector<SyntheticInstance>> per_event;
  std::map<std::string, int> shortfall;  // events with fewer than k available
};

// Deterministic seeded sample without replacement per event; an instance may
// serve multiple events.
FewShotBank sample_few_shot(const Dataset& gold, int k, std::uint64_t seed);

// In-context serialization: per requested event (ontology order), each
// example as the sentence plus "trigger -> EventType" mention lines.
std::string render_examples(const FewShotBank& bank, const std::vector<std::string>& events,
                            const Ontology& ontology);

// Flattened bank contents for append_gold (deduplicated by instance id,
// ontology event order).
std::vector<SyntheticInstance> bank_instances(const FewShotBank& bank, const Ontology& ontology);

}  // namespace snare

#endif  // SNARE_FEWSHOT_HPP
