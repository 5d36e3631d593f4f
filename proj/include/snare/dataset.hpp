#ifndef SNARE_DATASET_HPP
#define SNARE_DATASET_HPP

#include <map>
#include <string>
#include <vector>

#include "snare/ontology.hpp"

namespace snare {

enum class MentionOrigin { Sampled, Refined, Gold };

std::string origin_name(MentionOrigin origin);
MentionOrigin origin_from_name(const std::string& name);

// (event type, trigger span) annotation. Offsets are Unicode scalar values,
// end exclusive; passage[start:end] must equal trigger exactly.
struct EventMention {
  std::string event_type;
  std::string trigger;
  std::size_t start = 0;
  std::size_t end = 0;
  MentionOrigin origin = MentionOrigin::Sampled;

  bool operator==(const EventMention&) const = default;
};

struct SyntheticInstance {
  std::string id;
  std::string passage;
  std::vector<EventMention> mentions;  // sorted by (start, event_type)
  std::map<std::string, std::string> metadata;
};

// Sorts mentions, checks span/duplicate invariants and (when an ontology is
// given) that every event type resolves. Throws ValidationError.
void validate_instance(SyntheticInstance& instance, const Ontology* ontology);

struct EventStat {
  std::int64_t mention_count = 0;
  std::int64_t instance_count = 0;
  bool shortfall = false;  // fewer than N instances were available
};

struct Dataset {
  std::vector<SyntheticInstance> instances;
  std::string ontology_digest;
  std::map<std::string, std::string> meta;  // model, seed, pipeline_version...
  std::map<std::string, EventStat> stats;
};

// Recompute stats from instances (mention/instance counts per event).
void refresh_stats(Dataset& dataset);

// Deficit-driven greedy selection of ~N instances per event type from the
// pool. Deterministic: ties on event deficit break by ontology order, ties
// on instance choice break by earliest pool index.
Dataset greedy_sample(const std::vector<SyntheticInstance>& pool, const Ontology& ontology,
                      int n_per_event);

// Appends gold instances after the synthetic ones; ids get a "gold-" prefix.
Dataset append_gold(const Dataset& dataset, const std::vector<SyntheticInstance>& gold,
                    const Ontology& ontology);

// JSONL, fixed key order, UTF-8, no pretty-printing; row 1 is the optional
// {"_meta": ...} sidecar. Bit-stable across runs.
void write_dataset(const Dataset& dataset, const std::string& path);
Dataset read_dataset(const std::string& path, const Ontology& ontology);

}  // namespace snare

#endif  // SNARE_DATASET_HPP
