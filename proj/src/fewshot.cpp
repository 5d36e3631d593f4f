#include "snare/fewshot.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "snare/errors.hpp"
#include "snare/util.hpp"

namespace snare {

FewShotBank sample_few_shot(const Dataset& gold, int k, std::uint64_t seed) {
  if (k < 0) throw ValidationError("sample_few_shot: k must be >= 0");
  FewShotBank bank;
  bank.k = k;
  if (k == 0) return bank;

  std::map<std::string, std::vector<std::size_t>> by_event;  // gold pool indices, pool order
  for (std::size_t i = 0; i < gold.instances.size(); ++i) {
    std::set<std::string> types;
    for (const auto& m : gold.instances[i].mentions) types.insert(m.event_type);
    for (const auto& t : types) by_event[t].push_back(i);
  }

  for (const auto& [event, indices] : by_event) {
    util::Rng rng(seed ^ std::stoull(util::fnv1a_hex(event).substr(0, 15), nullptr, 16));
    auto want = static_cast<std::size_t>(k);
    auto picked = util::sample_without_replacement(rng, indices.size(), want);
    std::sort(picked.begin(), picked.end());
    auto& list = bank.per_event[event];
    for (std::size_t p : picked) list.push_back(gold.instances[indices[p]]);
    if (list.size() < want)
      bank.shortfall[event] = static_cast<int>(want - list.size());
  }
  return bank;
}

std::string render_examples(const FewShotBank& bank, const std::vector<std::string>& events,
                            const Ontology& ontology) {
  // requested events in ontology order
  std::vector<std::string> ordered;
  for (const auto& e : ontology.events()) {
    if (std::any_of(events.begin(), events.end(),
                    [&](const std::string& x) { return util::iequals_ascii(x, e.name); }))
      ordered.push_back(e.name);
  }
  std::ostringstream ss;
  for (const auto& event : ordered) {
    auto it = bank.per_event.find(event);
    if (it == bank.per_event.end()) continue;
    for (const auto& inst : it->second) {
      ss << "Sentence: " << inst.passage << "\n";
      for (const auto& m : inst.mentions) {
        ss << "  " << m.trigger << " -> " << m.event_type << "\n";
      }
    }
  }
  return ss.str();
}

std::vector<SyntheticInstance> bank_instances(const FewShotBank& bank, const Ontology& ontology) {
  std::vector<SyntheticInstance> out;
  std::set<std::string> seen;
  for (const auto& e : ontology.events()) {
    auto it = bank.per_event.find(e.name);
    if (it == bank.per_event.end()) continue;
    for (const auto& inst : it->second) {
      if (seen.insert(inst.id).second) out.push_back(inst);
    }
  }
  return out;
}

}  // namespace snare
