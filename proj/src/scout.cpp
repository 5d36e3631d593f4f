#include "snare/scout.hpp"

#include <algorithm>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "snare/errors.hpp"
#include "snare/util.hpp"

namespace snare {

using util::normalize_trigger;
using util::to_lower_ascii;
using util::trim;
using util::trim_punct;

SelectionStrategy strategy_from_name(const std::string& name) {
  if (name == "frequency_ranking") return SelectionStrategy::FrequencyRanking;
  if (name == "uniform_sampling") return SelectionStrategy::UniformSampling;
  if (name == "weighted_sampling") return SelectionStrategy::WeightedSampling;
  if (name == "min_count") return SelectionStrategy::MinCount;
  throw InvalidStrategyParam("unknown selection strategy: " + name);
}

std::string strategy_name(SelectionStrategy s) {
  switch (s) {
    case SelectionStrategy::FrequencyRanking: return "frequency_ranking";
    case SelectionStrategy::UniformSampling: return "uniform_sampling";
    case SelectionStrategy::WeightedSampling: return "weighted_sampling";
    case SelectionStrategy::MinCount: return "min_count";
  }
  return "frequency_ranking";
}

std::map<std::string, std::vector<TriggerStat>> aggregate(
    const std::vector<SentenceExtraction>& extractions) {
  // (event, key) -> variant counts
  std::map<std::string, std::map<std::string, std::map<std::string, std::int64_t>>> counts;
  for (const auto& ex : extractions) {
    for (const auto& [event, surface] : ex.mentions) {
      counts[event][normalize_trigger(surface)][surface]++;
    }
  }
  std::map<std::string, std::vector<TriggerStat>> out;
  for (const auto& [event, keys] : counts) {
    auto& list = out[event];
    for (const auto& [key, variants] : keys) {
      TriggerStat stat;
      stat.trigger_key = key;
      stat.variants = variants;
      for (const auto& [surface, c] : variants) stat.count += c;
      list.push_back(std::move(stat));
    }
    std::sort(list.begin(), list.end(), [](const TriggerStat& a, const TriggerStat& b) {
      if (a.count != b.count) return a.count > b.count;
      return a.trigger_key < b.trigger_key;
    });
  }
  return out;
}

TriggerLexicon filter_top_t(const std::map<std::string, std::vector<TriggerStat>>& stats,
                            int t) {
  if (t < 1) throw InvalidStrategyParam("filter_top_t: t must be >= 1");
  TriggerLexicon lex;
  lex.t = t;
  lex.strategy = "frequency_ranking";
  for (const auto& [event, list] : stats) {
    std::vector<TriggerStat> sorted = list;
    std::sort(sorted.begin(), sorted.end(), [](const TriggerStat& a, const TriggerStat& b) {
      if (a.count != b.count) return a.count > b.count;
      return a.trigger_key < b.trigger_key;
    });
    if (sorted.size() > static_cast<std::size_t>(t)) sorted.resize(static_cast<std::size_t>(t));
    lex.per_event[event] = std::move(sorted);
  }
  return lex;
}

TriggerLexicon select_triggers(const std::map<std::string, std::vector<TriggerStat>>& stats,
                               SelectionStrategy strategy, int t, std::uint64_t seed,
                               std::int64_t min_count) {
  if (t < 1) throw InvalidStrategyParam("select_triggers: t must be >= 1");
  if (strategy == SelectionStrategy::FrequencyRanking) {
    return filter_top_t(stats, t);
  }
  if (strategy == SelectionStrategy::MinCount && min_count < 1)
    throw InvalidStrategyParam("select_triggers: min_count must be >= 1");

  TriggerLexicon lex;
  lex.t = t;
  lex.strategy = strategy_name(strategy);
  util::Rng root(seed);
  // per-event substreams keyed by event name hash, so map iteration order of
  // other events never shifts a given event's sample
  for (const auto& [event, list] : stats) {
    std::vector<TriggerStat> pool = list;
    std::sort(pool.begin(), pool.end(), [](const TriggerStat& a, const TriggerStat& b) {
      if (a.count != b.count) return a.count > b.count;
      return a.trigger_key < b.trigger_key;
    });
    if (strategy == SelectionStrategy::MinCount) {
      std::erase_if(pool, [&](const TriggerStat& s) { return s.count < min_count; });
    }
    util::Rng rng(seed ^ std::stoull(util::fnv1a_hex(event).substr(0, 15), nullptr, 16));
    std::vector<TriggerStat> picked;
    auto k = std::min<std::size_t>(static_cast<std::size_t>(t), pool.size());
    if (strategy == SelectionStrategy::WeightedSampling) {
      // weighted without replacement
      std::vector<TriggerStat> remaining = pool;
      for (std::size_t i = 0; i < k; ++i) {
        std::int64_t total = 0;
        for (const auto& s : remaining) total += s.count;
        double r = rng.uniform_real() * static_cast<double>(total);
        std::size_t j = 0;
        for (; j + 1 < remaining.size(); ++j) {
          r -= static_cast<double>(remaining[j].count);
          if (r < 0) break;
        }
        picked.push_back(remaining[j]);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(j));
      }
    } else {  // UniformSampling or MinCount
      for (std::size_t idx : util::sample_without_replacement(rng, pool.size(), k))
        picked.push_back(pool[idx]);
    }
    std::sort(picked.begin(), picked.end(), [](const TriggerStat& a, const TriggerStat& b) {
      if (a.count != b.count) return a.count > b.count;
      return a.trigger_key < b.trigger_key;
    });
    lex.per_event[event] = std::move(picked);
  }
  return lex;
}

// --- Scout ------------------------------------------------------------------

Scout::Scout(LlmGateway& gateway, const Ontology& ontology, const TemplateSet& templates,
             GenerationConfig config)
    : gateway_(gateway), ontology_(ontology), templates_(templates), config_(std::move(config)) {}

std::string Scout::event_catalog() const {
  std::ostringstream ss;
  for (const auto& e : ontology_.events()) ss << "- " << e.name << ": " << e.definition << "\n";
  return ss.str();
}

LlmRequest Scout::build_stage1_request(const UnlabeledSentence& sentence) const {
  LlmRequest req;
  req.user = templates_.scout_stage1.render({{"domain", ontology_.domain_label()},
                                             {"event_catalog", event_catalog()},
                                             {"sentence", sentence.text}});
  req.config = config_;
  req.tag = "scout.stage1";
  return req;
}

LlmRequest Scout::build_stage2_request(const UnlabeledSentence& sentence,
                                       const EventType& event) const {
  LlmRequest req;
  req.user = templates_.scout_stage2.render({{"domain", ontology_.domain_label()},
                                             {"event_name", event.name},
                                             {"event_definition", event.definition},
                                             {"sentence", sentence.text}});
  req.config = config_;
  req.tag = "scout.stage2";
  return req;
}

LlmRequest Scout::build_internal_request(const EventType& event, int t) const {
  LlmRequest req;
  req.user = templates_.trigger_internal.render({{"domain", ontology_.domain_label()},
                                                 {"event_name", event.name},
                                                 {"event_definition", event.definition},
                                                 {"t", std::to_string(t)}});
  req.config = config_;
  req.tag = "scout.internal";
  return req;
}

std::vector<EventType> Scout::parse_stage1_response(const std::string& text,
                                                    RunCounters* counters) const {
  std::vector<EventType> out;
  std::set<std::string> seen;
  for (const auto& piece : util::split_list_response(text)) {
    auto resolved = ontology_.resolve(piece);
    if (!resolved) {
      if (counters) counters->bump("scout.stage1.dropped_names");
      continue;
    }
    if (seen.insert(to_lower_ascii(resolved->name)).second) out.push_back(*resolved);
  }
  return out;
}

std::optional<std::string> Scout::parse_stage2_response(const std::string& text,
                                                        const std::string& sentence_text,
                                                        RunCounters* counters) const {
  std::string candidate = trim_punct(text);
  // take the first line when the model is chatty
  if (auto nl = candidate.find('\n'); nl != std::string::npos)
    candidate = trim_punct(candidate.substr(0, nl));
  if (candidate.empty()) {
    if (counters) counters->bump("scout.stage2.empty");
    return std::nullopt;
  }
  std::string hay = to_lower_ascii(sentence_text);
  std::string needle = to_lower_ascii(candidate);
  if (hay.find(needle) == std::string::npos) {
    if (counters) counters->bump("scout.stage2.not_in_sentence");
    return std::nullopt;
  }
  return candidate;
}

std::vector<EventType> Scout::stage1_identify(const UnlabeledSentence& sentence,
                                              RunCounters* counters) {
  LlmExchange ex = gateway_.complete(build_stage1_request(sentence));
  exchanges_.push_back(ex);
  return parse_stage1_response(ex.response_text, counters);
}

std::optional<std::string> Scout::stage2_extract(const UnlabeledSentence& sentence,
                                                 const EventType& event, RunCounters* counters) {
  LlmExchange ex = gateway_.complete(build_stage2_request(sentence, event));
  exchanges_.push_back(ex);
  return parse_stage2_response(ex.response_text, sentence.text, counters);
}

std::vector<SentenceExtraction> Scout::extract_corpus(const Corpus& corpus,
                                                      RunCounters* counters) {
  std::vector<SentenceExtraction> out(corpus.sentences.size());
  for (std::size_t i = 0; i < corpus.sentences.size(); ++i)
    out[i].sentence_id = corpus.sentences[i].id;
  if (corpus.sentences.empty()) return out;

  // stage 1: one request per sentence
  std::vector<LlmRequest> stage1;
  stage1.reserve(corpus.sentences.size());
  for (const auto& s : corpus.sentences) stage1.push_back(build_stage1_request(s));
  auto stage1_results = gateway_.complete_batch(stage1);

  // stage 2: one request per surviving (sentence, event)
  std::vector<LlmRequest> stage2;
  std::vector<std::pair<std::size_t, EventType>> stage2_keys;
  for (std::size_t i = 0; i < corpus.sentences.size(); ++i) {
    const auto& res = stage1_results[i];
    if (!res.ok()) {
      if (counters) counters->bump("scout.stage1.failures");
      continue;
    }
    exchanges_.push_back(*res.exchange);
    for (const auto& event : parse_stage1_response(res.exchange->response_text, counters)) {
      stage2.push_back(build_stage2_request(corpus.sentences[i], event));
      stage2_keys.emplace_back(i, event);
    }
  }
  auto stage2_results = gateway_.complete_batch(stage2);
  for (std::size_t k = 0; k < stage2_results.size(); ++k) {
    const auto& res = stage2_results[k];
    auto [i, event] = stage2_keys[k];
    if (!res.ok()) {
      if (counters) counters->bump("scout.stage2.failures");
      continue;
    }
    exchanges_.push_back(*res.exchange);
    auto trigger =
        parse_stage2_response(res.exchange->response_text, corpus.sentences[i].text, counters);
    if (trigger) {
      out[i].mentions.emplace_back(event.name, *trigger);
      if (counters) counters->bump("scout.extracted");
    }
  }
  return out;
}

TriggerLexicon Scout::generate_triggers_internal(int t, RunCounters* counters) {
  if (t < 1) throw InvalidStrategyParam("generate_triggers_internal: t must be >= 1");
  std::vector<LlmRequest> requests;
  for (const auto& event : ontology_.events()) requests.push_back(build_internal_request(event, t));
  auto results = gateway_.complete_batch(requests);

  TriggerLexicon lex;
  lex.t = t;
  lex.strategy = "llm_internal";
  lex.provenance.source = "llm-internal";
  lex.provenance.model = config_.model;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& event = ontology_.events()[i];
    auto& list = lex.per_event[event.name];
    if (!results[i].ok()) {
      if (counters) counters->bump("scout.internal.failures");
      continue;
    }
    exchanges_.push_back(*results[i].exchange);
    std::set<std::string> seen;
    for (const auto& piece : util::split_list_response(results[i].exchange->response_text)) {
      std::string key = normalize_trigger(trim_punct(piece));
      if (key.empty() || !seen.insert(key).second) continue;
      TriggerStat stat;
      stat.trigger_key = key;
      stat.count = 1;  // no corpus evidence
      stat.variants[trim_punct(piece)] = 1;
      list.push_back(std::move(stat));
    }
    if (list.empty() && counters) counters->bump("scout.internal.empty_responses");
    std::sort(list.begin(), list.end(), [](const TriggerStat& a, const TriggerStat& b) {
      if (a.count != b.count) return a.count > b.count;
      return a.trigger_key < b.trigger_key;
    });
    if (list.size() > static_cast<std::size_t>(t)) list.resize(static_cast<std::size_t>(t));
  }
  return lex;
}

Dataset Scout::label_sentences(const Corpus& corpus, RunCounters* counters) {
  auto extractions = extract_corpus(corpus, counters);
  Dataset dataset;
  for (std::size_t i = 0; i < corpus.sentences.size(); ++i) {
    const auto& sentence = corpus.sentences[i];
    SyntheticInstance inst;
    inst.id = sentence.id;
    inst.passage = sentence.text;
    std::u32string cps = util::utf8_decode(sentence.text);
    std::u32string hay = cps;
    for (auto& c : hay)
      if (c < 0x80) c = static_cast<char32_t>(std::tolower(static_cast<int>(c)));
    for (const auto& [event, surface] : extractions[i].mentions) {
      std::u32string needle = util::utf8_decode(surface);
      for (auto& c : needle)
        if (c < 0x80) c = static_cast<char32_t>(std::tolower(static_cast<int>(c)));
      auto pos = hay.find(needle);
      if (pos == std::u32string::npos) {
        if (counters) counters->bump("label.span_not_found");
        continue;
      }
      EventMention m;
      m.event_type = event;
      m.start = pos;
      m.end = pos + needle.size();
      m.trigger = util::utf8_encode(cps.substr(m.start, needle.size()));
      m.origin = MentionOrigin::Sampled;
      // stage-2 collapses repeats, but the same span can surface twice via aliases
      bool dup = std::any_of(inst.mentions.begin(), inst.mentions.end(), [&](const auto& o) {
        return o.start == m.start && o.end == m.end && o.event_type == m.event_type;
      });
      if (!dup) inst.mentions.push_back(std::move(m));
    }
    validate_instance(inst, &ontology_);
    dataset.instances.push_back(std::move(inst));
  }
  refresh_stats(dataset);
  return dataset;
}

// --- lexicon file -------------------------------------------------------------

void write_lexicon(const TriggerLexicon& lexicon, const std::string& path) {
  nlohmann::ordered_json j;
  j["t"] = lexicon.t;
  j["strategy"] = lexicon.strategy;
  j["provenance"] = {{"corpus_digest", lexicon.provenance.corpus_digest},
                     {"model", lexicon.provenance.model},
                     {"source", lexicon.provenance.source},
                     {"created_at", lexicon.provenance.created_at}};
  j["events"] = nlohmann::ordered_json::object();
  for (const auto& [event, list] : lexicon.per_event) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& stat : list) {
      nlohmann::ordered_json sj;
      sj["trigger"] = stat.trigger_key;
      sj["count"] = stat.count;
      sj["variants"] = nlohmann::ordered_json::object();
      for (const auto& [surface, c] : stat.variants) sj["variants"][surface] = c;
      arr.push_back(std::move(sj));
    }
    j["events"][event] = std::move(arr);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("lexicon: cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

TriggerLexicon read_lexicon(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("lexicon: cannot open: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("lexicon: malformed JSON: " + std::string(e.what()));
  }
  TriggerLexicon lex;
  try {
    lex.t = j.at("t").get<int>();
    lex.strategy = j.value("strategy", std::string{"frequency_ranking"});
    if (j.contains("provenance")) {
      const auto& p = j["provenance"];
      lex.provenance.corpus_digest = p.value("corpus_digest", std::string{});
      lex.provenance.model = p.value("model", std::string{});
      lex.provenance.source = p.value("source", std::string{"corpus"});
      lex.provenance.created_at = p.value("created_at", std::string{});
    }
    for (const auto& [event, arr] : j.at("events").items()) {
      auto& list = lex.per_event[event];
      for (const auto& sj : arr) {
        TriggerStat stat;
        stat.trigger_key = sj.at("trigger").get<std::string>();
        stat.count = sj.at("count").get<std::int64_t>();
        if (sj.contains("variants")) {
          for (const auto& [surface, c] : sj["variants"].items())
            stat.variants[surface] = c.get<std::int64_t>();
        }
        list.push_back(std::move(stat));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("lexicon: schema error: " + std::string(e.what()));
  }
  return lex;
}

}  // namespace snare
