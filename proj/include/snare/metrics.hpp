#ifndef SNARE_METRICS_HPP
#define SNARE_METRICS_HPP

#include <map>
#include <set>
#include <string>

#include "snare/dataset.hpp"

namespace snare {

struct PrfCounts {
  std::int64_t num_pred = 0;
  std::int64_t num_gold = 0;
  std::int64_t num_matched = 0;
  double precision() const { return num_pred == 0 ? 0.0 : double(num_matched) / double(num_pred); }
  double recall() const { return num_gold == 0 ? 0.0 : double(num_matched) / double(num_gold); }
  double f1() const {
    double p = precision(), r = recall();
    return (p + r) == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  }
};

struct MetricReport {
  PrfCounts overall;
  std::map<std::string, PrfCounts> per_event;
};

// Eve-I: match on distinct (instance, event type).
// Tri-C: match on distinct (instance, start, end, event type) — or on
// (instance, normalized trigger, event type) in string-match mode.
struct ScoreReport {
  MetricReport eve_i;
  MetricReport tri_c;
};

enum class TriggerMatch { Span, String };

ScoreReport score(const Dataset& pred, const Dataset& gold,
                  TriggerMatch mode = TriggerMatch::Span);

struct HitRateEntry {
  std::int64_t synthetic_trigger_count = 0;  // distinct normalized triggers (or tokens if weighted)
  std::int64_t hits = 0;
  double hit_rate = 0.0;
};

struct HitRateReport {
  std::map<std::string, HitRateEntry> per_event;
  double macro_average = 0.0;  // mean over events with >=1 synthetic trigger
  double micro_average = 0.0;
};

using GoldTriggerMap = std::map<std::string, std::set<std::string>>;

// Distinct normalized triggers per event type in a gold dataset.
GoldTriggerMap extract_gold_triggers(const Dataset& gold);

// weighted=false: distinct-trigger sets; weighted=true: mention-count weighted.
HitRateReport hit_rate(const Dataset& synthetic, const GoldTriggerMap& gold_triggers,
                       bool weighted = false);

std::string score_report_json(const ScoreReport& report);
std::string hit_rate_report_json(const HitRateReport& report);

}  // namespace snare

#endif  // SNARE_METRICS_HPP
