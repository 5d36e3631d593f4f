#include "snare/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "snare/errors.hpp"
#include "snare/util.hpp"

namespace snare {

std::string origin_name(MentionOrigin origin) {
  switch (origin) {
    case MentionOrigin::Sampled: return "sampled";
    case MentionOrigin::Refined: return "refined";
    case MentionOrigin::Gold: return "gold";
  }
  return "sampled";
}

MentionOrigin origin_from_name(const std::string& name) {
  if (name == "sampled") return MentionOrigin::Sampled;
  if (name == "refined") return MentionOrigin::Refined;
  if (name == "gold") return MentionOrigin::Gold;
  throw ParseError("unknown mention origin: " + name);
}

void validate_instance(SyntheticInstance& instance, const Ontology* ontology) {
  std::u32string cps = util::utf8_decode(instance.passage);
  std::sort(instance.mentions.begin(), instance.mentions.end(),
            [](const EventMention& a, const EventMention& b) {
              return std::tie(a.start, a.event_type, a.end) <
                     std::tie(b.start, b.event_type, b.end);
            });
  std::set<std::tuple<std::size_t, std::size_t, std::string>> seen;
  for (const auto& m : instance.mentions) {
    if (m.start >= m.end || m.end > cps.size())
      throw ValidationError("instance " + instance.id + ": mention span [" +
                            std::to_string(m.start) + "," + std::to_string(m.end) +
                            ") out of range");
    if (util::utf8_encode(cps.substr(m.start, m.end - m.start)) != m.trigger)
      throw ValidationError("instance " + instance.id + ": passage[" +
                            std::to_string(m.start) + ":" + std::to_string(m.end) +
                            "] != trigger \"" + m.trigger + "\"");
    if (!seen.insert({m.start, m.end, m.event_type}).second)
      throw ValidationError("instance " + instance.id + ": duplicate mention (" +
                            m.event_type + "@" + std::to_string(m.start) + ")");
    if (ontology && !ontology->resolve(m.event_type))
      throw ValidationError("instance " + instance.id + ": unknown event type " + m.event_type);
  }
}

void refresh_stats(Dataset& dataset) {
  dataset.stats.clear();
  for (const auto& inst : dataset.instances) {
    std::set<std::string> types;
    for (const auto& m : inst.mentions) {
      dataset.stats[m.event_type].mention_count++;
      types.insert(m.event_type);
    }
    for (const auto& t : types) dataset.stats[t].instance_count++;
  }
}

Dataset greedy_sample(const std::vector<SyntheticInstance>& pool, const Ontology& ontology,
                      int n_per_event) {
  const auto& events = ontology.events();
  std::vector<int> selected_count(events.size(), 0);

  // event types per pool instance, as ontology indices (deduplicated)
  std::vector<std::vector<std::size_t>> inst_events(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    std::set<std::size_t> types;
    for (const auto& m : pool[i].mentions) {
      std::size_t idx = ontology.index_of(m.event_type);
      if (idx != static_cast<std::size_t>(-1)) types.insert(idx);
    }
    inst_events[i].assign(types.begin(), types.end());
  }

  std::vector<bool> taken(pool.size(), false);
  std::vector<std::size_t> picked_order;

  for (;;) {
    // event with the largest positive deficit; ties by ontology order
    std::size_t best_event = events.size();
    int best_deficit = 0;
    for (std::size_t e = 0; e < events.size(); ++e) {
      int deficit = n_per_event - selected_count[e];
      if (deficit > best_deficit) {
        best_deficit = deficit;
        best_event = e;
      }
    }
    if (best_event == events.size()) break;

    // among unselected instances covering best_event, maximize the number of
    // its event types with positive deficit; ties by earliest pool index
    std::size_t best_inst = pool.size();
    int best_gain = -1;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (taken[i]) continue;
      bool covers = false;
      int gain = 0;
      for (std::size_t e : inst_events[i]) {
        if (e == best_event) covers = true;
        if (n_per_event - selected_count[e] > 0) ++gain;
      }
      if (covers && gain > best_gain) {
        best_gain = gain;
        best_inst = i;
      }
    }
    if (best_inst == pool.size()) {
      // the deficient event has no remaining coverage; any instance that could
      // still reduce some positive deficit is preferable to stopping, but the
      // loop requires coverage of the chosen event, so retire that event
      bool any_left = false;
      for (std::size_t e = 0; e < events.size(); ++e) {
        if (n_per_event - selected_count[e] <= 0) continue;
        for (std::size_t i = 0; i < pool.size(); ++i) {
          if (taken[i]) continue;
          if (std::find(inst_events[i].begin(), inst_events[i].end(), e) !=
              inst_events[i].end()) {
            any_left = true;
            break;
          }
        }
        if (any_left) break;
      }
      if (!any_left) break;
      selected_count[best_event] = n_per_event;  // no instance can help this event
      continue;
    }

    taken[best_inst] = true;
    picked_order.push_back(best_inst);
    for (std::size_t e : inst_events[best_inst]) selected_count[e]++;
  }

  std::sort(picked_order.begin(), picked_order.end());  // keep pool order in output
  Dataset out;
  for (std::size_t i : picked_order) out.instances.push_back(pool[i]);
  refresh_stats(out);
  for (const auto& e : events) {
    auto& stat = out.stats[e.name];
    if (stat.instance_count < n_per_event) stat.shortfall = true;
  }
  return out;
}

Dataset append_gold(const Dataset& dataset, const std::vector<SyntheticInstance>& gold,
                    const Ontology& ontology) {
  Dataset out = dataset;
  std::set<std::string> ids;
  for (const auto& inst : out.instances) ids.insert(inst.id);
  for (const auto& g : gold) {
    SyntheticInstance inst = g;
    if (inst.id.rfind("gold-", 0) != 0) inst.id = "gold-" + inst.id;
    for (auto& m : inst.mentions) m.origin = MentionOrigin::Gold;
    validate_instance(inst, &ontology);
    if (!ids.insert(inst.id).second)
      throw ValidationError("append_gold: duplicate id " + inst.id);
    out.instances.push_back(std::move(inst));
  }
  refresh_stats(out);
  return out;
}

void write_dataset(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("dataset: cannot open for writing: " + path);
  if (!dataset.meta.empty() || !dataset.ontology_digest.empty()) {
    nlohmann::ordered_json meta;
    if (!dataset.ontology_digest.empty()) meta["ontology_digest"] = dataset.ontology_digest;
    for (const auto& [k, v] : dataset.meta) meta[k] = v;
    nlohmann::ordered_json row;
    row["_meta"] = meta;
    out << row.dump() << "\n";
  }
  for (const auto& inst : dataset.instances) {
    nlohmann::ordered_json row;
    row["id"] = inst.id;
    row["text"] = inst.passage;
    row["mentions"] = nlohmann::ordered_json::array();
    for (const auto& m : inst.mentions) {
      nlohmann::ordered_json mj;
      mj["type"] = m.event_type;
      mj["trigger"] = m.trigger;
      mj["start"] = m.start;
      mj["end"] = m.end;
      mj["origin"] = origin_name(m.origin);
      row["mentions"].push_back(std::move(mj));
    }
    out << row.dump() << "\n";
  }
}

Dataset read_dataset(const std::string& path, const Ontology& ontology) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("dataset: cannot open: " + path);
  Dataset dataset;
  std::set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("dataset: line " + std::to_string(lineno) + ": " + e.what());
    }
    if (j.contains("_meta")) {
      const auto& meta = j["_meta"];
      for (auto it = meta.begin(); it != meta.end(); ++it) {
        if (it.key() == "ontology_digest")
          dataset.ontology_digest = it.value().get<std::string>();
        else if (it.value().is_string())
          dataset.meta[it.key()] = it.value().get<std::string>();
      }
      continue;
    }
    SyntheticInstance inst;
    try {
      inst.id = j.at("id").get<std::string>();
      inst.passage = j.at("text").get<std::string>();
      for (const auto& mj : j.at("mentions")) {
        EventMention m;
        m.event_type = mj.at("type").get<std::string>();
        m.trigger = mj.at("trigger").get<std::string>();
        m.start = mj.at("start").get<std::size_t>();
        m.end = mj.at("end").get<std::size_t>();
        m.origin = origin_from_name(mj.value("origin", std::string{"sampled"}));
        inst.mentions.push_back(std::move(m));
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("dataset: line " + std::to_string(lineno) + ": " + e.what());
    }
    validate_instance(inst, &ontology);
    if (!ids.insert(inst.id).second)
      throw ValidationError("dataset: duplicate id " + inst.id + " at line " +
                            std::to_string(lineno));
    dataset.instances.push_back(std::move(inst));
  }
  refresh_stats(dataset);
  return dataset;
}

}  // namespace snare
