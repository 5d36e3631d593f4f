#include "snare/metrics.hpp"

#include <nlohmann/json.hpp>

#include "snare/errors.hpp"
#include "snare/util.hpp"

namespace snare {

namespace {

using Unit = std::tuple<std::string, std::string, std::string>;  // id, key, type

// Eve-I unit key is empty; Tri-C uses "start:end" or the normalized trigger.
std::set<Unit> units(const Dataset& d, bool with_key, TriggerMatch mode) {
  std::set<Unit> out;
  for (const auto& inst : d.instances) {
    for (const auto& m : inst.mentions) {
      std::string key;
      if (with_key) {
        key = mode == TriggerMatch::Span
                  ? std::to_string(m.start) + ":" + std::to_string(m.end)
                  : util::normalize_trigger(m.trigger);
      }
      out.insert({inst.id, key, m.event_type});
    }
  }
  return out;
}

MetricReport report_from_units(const std::set<Unit>& pred, const std::set<Unit>& gold) {
  MetricReport rep;
  rep.overall.num_pred = static_cast<std::int64_t>(pred.size());
  rep.overall.num_gold = static_cast<std::int64_t>(gold.size());
  for (const auto& u : pred) {
    rep.per_event[std::get<2>(u)].num_pred++;
    if (gold.count(u)) {
      rep.overall.num_matched++;
      rep.per_event[std::get<2>(u)].num_matched++;
    }
  }
  for (const auto& u : gold) rep.per_event[std::get<2>(u)].num_gold++;
  return rep;
}

}  // namespace

ScoreReport score(const Dataset& pred, const Dataset& gold, TriggerMatch mode) {
  std::set<std::string> gold_ids;
  for (const auto& inst : gold.instances) gold_ids.insert(inst.id);
  for (const auto& inst : pred.instances) {
    if (!gold_ids.count(inst.id))
      throw AlignmentError("score: predicted id \"" + inst.id + "\" not present in gold");
  }
  ScoreReport out;
  out.eve_i = report_from_units(units(pred, false, mode), units(gold, false, mode));
  out.tri_c = report_from_units(units(pred, true, mode), units(gold, true, mode));
  return out;
}

GoldTriggerMap extract_gold_triggers(const Dataset& gold) {
  GoldTriggerMap out;
  for (const auto& inst : gold.instances) {
    for (const auto& m : inst.mentions) {
      out[m.event_type].insert(util::normalize_trigger(m.trigger));
    }
  }
  return out;
}

HitRateReport hit_rate(const Dataset& synthetic, const GoldTriggerMap& gold_triggers,
                       bool weighted) {
  HitRateReport rep;
  // per event: distinct normalized triggers with mention counts
  std::map<std::string, std::map<std::string, std::int64_t>> by_event;
  for (const auto& inst : synthetic.instances) {
    for (const auto& m : inst.mentions) {
      by_event[m.event_type][util::normalize_trigger(m.trigger)]++;
    }
  }
  std::int64_t total = 0, total_hits = 0;
  double macro_sum = 0.0;
  std::int64_t macro_n = 0;
  for (const auto& [event, triggers] : by_event) {
    HitRateEntry entry;
    auto git = gold_triggers.find(event);
    for (const auto& [key, count] : triggers) {
      std::int64_t w = weighted ? count : 1;
      entry.synthetic_trigger_count += w;
      if (git != gold_triggers.end() && git->second.count(key)) entry.hits += w;
    }
    if (entry.synthetic_trigger_count > 0) {
      entry.hit_rate = double(entry.hits) / double(entry.synthetic_trigger_count);
      macro_sum += entry.hit_rate;
      ++macro_n;
    }
    total += entry.synthetic_trigger_count;
    total_hits += entry.hits;
    rep.per_event[event] = entry;
  }
  rep.macro_average = macro_n == 0 ? 0.0 : macro_sum / double(macro_n);
  rep.micro_average = total == 0 ? 0.0 : double(total_hits) / double(total);
  return rep;
}

namespace {
nlohmann::ordered_json prf_json(const PrfCounts& c) {
  nlohmann::ordered_json j;
  j["precision"] = c.precision();
  j["recall"] = c.recall();
  j["f1"] = c.f1();
  j["num_pred"] = c.num_pred;
  j["num_gold"] = c.num_gold;
  j["num_matched"] = c.num_matched;
  return j;
}

nlohmann::ordered_json metric_json(const MetricReport& m) {
  nlohmann::ordered_json j = prf_json(m.overall);
  j["per_event"] = nlohmann::ordered_json::object();
  for (const auto& [event, counts] : m.per_event) j["per_event"][event] = prf_json(counts);
  return j;
}
}  // namespace

std::string score_report_json(const ScoreReport& report) {
  nlohmann::ordered_json j;
  j["eve_i"] = metric_json(report.eve_i);
  j["tri_c"] = metric_json(report.tri_c);
  return j.dump(2);
}

std::string hit_rate_report_json(const HitRateReport& report) {
  nlohmann::ordered_json j;
  j["per_event"] = nlohmann::ordered_json::object();
  for (const auto& [event, e] : report.per_event) {
    j["per_event"][event] = {{"synthetic_trigger_count", e.synthetic_trigger_count},
                             {"hits", e.hits},
                             {"hit_rate", e.hit_rate}};
  }
  j["macro_average"] = report.macro_average;
  j["micro_average"] = report.micro_average;
  return j.dump(2);
}

}  // namespace snare
