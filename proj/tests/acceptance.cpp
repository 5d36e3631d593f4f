// Acceptance suite: one line per criterion, nonzero exit when any fails.
// Every expected value is either hand-derived or recomputed by an independent
// brute-force oracle inside this file.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "anchor_oracle.hpp"
#include "replay_fixture.hpp"
#include "snare/dataset.hpp"
#include "snare/fewshot.hpp"
#include "snare/llm_gateway.hpp"
#include "snare/metrics.hpp"
#include "snare/narrator.hpp"
#include "snare/pipeline.hpp"
#include "snare/refiner.hpp"
#include "snare/scout.hpp"
#include "snare/util.hpp"

using namespace snare;
using snare::testing::anchor_oracle_rows;
using snare::testing::build_toy_replay_log;

namespace {

namespace fs = std::filesystem;

std::string fixture(const std::string& name) {
  return std::string(SNARE_FIXTURE_DIR) + "/" + name;
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("snare_accept_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "<unreadable:" + path + ">";
  return std::string((std::istreambuf_iterator<char>(in)), {});
}

// Failure collector: expect() records the first failing message per criterion.
struct Checker {
  bool ok = true;
  std::string detail;
  void expect(bool condition, const std::string& message) {
    if (!condition && ok) {
      ok = false;
      detail = message;
    }
  }
};

Ontology news_ontology() {
  return Ontology(
      {
          {"Attack", "A violent physical act such as a war, bombing or shooting.", {}},
          {"Arrest-Jail", "A person is arrested, detained or sent to jail.", {}},
          {"Demonstrate", "People gather to protest, march or demonstrate.", {}},
      },
      "news", "en");
}

Ontology covid_ontology() {
  return Ontology(
      {
          {"infect", "A person or group becomes infected with or tests positive for a disease.", {}},
          {"symptom", "A person experiences or develops symptoms of a disease.", {}},
          {"prevent", "An action taken to prevent or reduce the spread of a disease.", {}},
      },
      "epidemiology", "en");
}

// ASCII-only instance whose mentions are real word spans in its passage.
SyntheticInstance word_instance(const std::string& id,
                                const std::vector<std::pair<std::string, std::string>>& typed_words) {
  SyntheticInstance inst;
  inst.id = id;
  std::string passage;
  for (const auto& [type, word] : typed_words) {
    std::size_t start = passage.size();
    passage += word + " ";
    inst.mentions.push_back({type, word, start, start + word.size(), MentionOrigin::Sampled});
  }
  inst.passage = passage.empty() ? "empty" : passage;
  return inst;
}

RunConfig toy_config(const fs::path& out, std::uint64_t seed = 11) {
  RunConfig c;
  c.ontology_path = fixture("toy_ontology.json");
  c.corpus_path = fixture("toy_corpus.jsonl");
  c.out_dir = out.string();
  c.t = 3;
  c.n_per_event = 2;
  c.seed = seed;
  c.generation.backoff_base_ms = 1;
  return c;
}

// ---------------------------------------------------------------------------
// 1. End-to-end determinism: three generate runs over the replay fixture are
//    byte-identical (dataset + run report) and finish in under five seconds.
// ---------------------------------------------------------------------------
Checker criterion_determinism() {
  Checker c;
  auto base = fresh_dir("det");
  RunConfig config = toy_config(base / "run0");
  config.replay_log = (base / "replay.jsonl").string();
  build_toy_replay_log(config, config.replay_log);

  auto started = std::chrono::steady_clock::now();
  std::vector<std::string> datasets, reports;
  for (int run = 0; run < 3; ++run) {
    RunConfig one = config;
    one.out_dir = (base / ("run" + std::to_string(run))).string();
    RunCounters counters;
    std::string dataset_path = cmd_generate(one, counters);
    datasets.push_back(slurp(dataset_path));
    reports.push_back(slurp((fs::path(one.out_dir) / "run_report.json").string()));
  }
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  c.expect(!datasets[0].empty() && datasets[0].find("\"text\"") != std::string::npos,
           "dataset output looks empty");
  c.expect(datasets[0] == datasets[1] && datasets[1] == datasets[2],
           "dataset bytes differ between runs");
  c.expect(reports[0] == reports[1] && reports[1] == reports[2],
           "run report bytes differ between runs");
  c.expect(datasets[0].find("\"created\"") == std::string::npos &&
               datasets[0].find("timestamp") == std::string::npos,
           "dataset embeds a timestamp");
  c.expect(seconds < 5.0, "three runs took " + std::to_string(seconds) + "s (limit 5s)");

  Ontology ontology = load_ontology(config.ontology_path);
  Dataset parsed = read_dataset((base / "run0" / "dataset.jsonl").string(), ontology);
  for (const auto& e : ontology.events())
    c.expect(parsed.stats.at(e.name).instance_count == config.n_per_event,
             "per-event instance count wrong for " + e.name);
  return c;
}

// ---------------------------------------------------------------------------
// 2. Trigger mining: a 40-sentence scripted corpus aggregated and filtered to
//    t=3 matches an independent counting oracle exactly, tie-breaks included,
//    and is invariant under 100 permutations of the extraction order.
// ---------------------------------------------------------------------------
Checker criterion_scout() {
  Checker c;
  Ontology ontology = covid_ontology();
  TemplateSet templates = TemplateSet::defaults();

  // 40 sentences, one scripted (event, trigger surface) each. Counts are
  // arranged to exercise the (count desc, key asc) ordering:
  //   infect:  positive x6 (mixed case), caught x4, contracted x4, flu x2, exposed x1
  //   symptom: fever x5, cough x4, ache x4, dizzy x1
  //   prevent: mask x4, vaccination x3, quarantine x2
  std::vector<std::pair<std::string, std::string>> script;
  auto push = [&](const std::string& event, const std::string& word, int times) {
    for (int i = 0; i < times; ++i) script.emplace_back(event, word);
  };
  push("infect", "Positive", 3);
  push("infect", "positive", 3);
  push("infect", "caught", 4);
  push("infect", "contracted", 4);
  push("infect", "flu", 2);
  push("infect", "exposed", 1);
  push("symptom", "fever", 5);
  push("symptom", "cough", 4);
  push("symptom", "ache", 4);
  push("symptom", "dizzy", 1);
  push("prevent", "mask", 4);
  push("prevent", "vaccination", 3);
  push("prevent", "quarantine", 2);
  c.expect(script.size() == 40, "script is not 40 sentences");

  Corpus corpus;
  corpus.language = "en";
  for (std::size_t i = 0; i < script.size(); ++i) {
    UnlabeledSentence s;
    s.id = "c" + std::to_string(i);
    s.text = "Report " + std::to_string(i) + " says someone " + script[i].second + " this week.";
    corpus.sentences.push_back(std::move(s));
  }

  // scripted replay responses keyed through the real prompt builders
  auto replay = std::make_shared<ReplayBackend>();
  LlmGateway gateway(replay);
  GenerationConfig gen;
  gen.backoff_base_ms = 1;
  Scout scout(gateway, ontology, templates, gen);
  for (std::size_t i = 0; i < script.size(); ++i) {
    const auto& sentence = corpus.sentences[i];
    auto stage1 = scout.build_stage1_request(sentence);
    replay->add(prompt_digest(stage1.system, stage1.user), script[i].first);
    auto stage2 = scout.build_stage2_request(sentence, *ontology.resolve(script[i].first));
    replay->add(prompt_digest(stage2.system, stage2.user), script[i].second);
  }

  auto extractions = scout.extract_corpus(corpus);
  c.expect(extractions.size() == 40, "expected one extraction per sentence");
  TriggerLexicon lexicon = filter_top_t(aggregate(extractions), 3);

  // independent counting oracle (own lowercasing, own sort)
  std::map<std::string, std::map<std::string, int>> oracle_counts;
  for (const auto& [event, word] : script) {
    std::string key = word;
    for (auto& ch : key)
      if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
    oracle_counts[event][key]++;
  }
  for (const auto& [event, counts] : oracle_counts) {
    std::vector<std::pair<std::string, int>> ranked(counts.begin(), counts.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    if (ranked.size() > 3) ranked.resize(3);
    const auto& got = lexicon.per_event[event];
    c.expect(got.size() == ranked.size(), "top-t size mismatch for " + event);
    for (std::size_t i = 0; i < ranked.size() && i < got.size(); ++i) {
      c.expect(got[i].trigger_key == ranked[i].first && got[i].count == ranked[i].second,
               event + "[" + std::to_string(i) + "] is (" + got[i].trigger_key + "," +
                   std::to_string(got[i].count) + "), oracle says (" + ranked[i].first + "," +
                   std::to_string(ranked[i].second) + ")");
    }
  }
  // hand-derived tie-breaks
  c.expect(lexicon.per_event["infect"][0].trigger_key == "positive" &&
               lexicon.per_event["infect"][0].count == 6,
           "case variants of 'positive' were not merged");
  c.expect(lexicon.per_event["infect"][1].trigger_key == "caught" &&
               lexicon.per_event["infect"][2].trigger_key == "contracted",
           "tie between caught/contracted broke in the wrong order");
  c.expect(lexicon.per_event["symptom"][1].trigger_key == "ache" &&
               lexicon.per_event["symptom"][2].trigger_key == "cough",
           "tie between ache/cough broke in the wrong order");

  // permutation invariance over 100 shuffles
  auto fingerprint = [](const TriggerLexicon& lex) {
    std::ostringstream out;
    for (const auto& [event, list] : lex.per_event) {
      out << event << ":";
      for (const auto& stat : list) out << stat.trigger_key << "=" << stat.count << ",";
      out << ";";
    }
    return out.str();
  };
  std::string baseline = fingerprint(lexicon);
  std::mt19937_64 rng(404);
  auto shuffled = extractions;
  for (int round = 0; round < 100; ++round) {
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    if (fingerprint(filter_top_t(aggregate(shuffled), 3)) != baseline) {
      c.expect(false, "permutation " + std::to_string(round) + " changed the lexicon");
      break;
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// 3. Refiner merge safety: 1200 randomized merges never remove or mutate a
//    pre-existing mention, every emitted mention matches its span, and the
//    missed-fever fixture adds exactly one (symptom, "got") mention.
// ---------------------------------------------------------------------------
Checker criterion_refiner_merge() {
  Checker c;
  Ontology ontology = covid_ontology();
  TemplateSet templates = TemplateSet::defaults();
  auto unused = std::make_shared<ReplayBackend>();
  LlmGateway gateway(unused);
  GenerationConfig gen;
  gen.backoff_base_ms = 1;
  Refiner refiner(gateway, ontology, templates, gen);

  const std::vector<std::string> bank = {"alpha",  "beta",   "fever", "cough",  "mask",
                                         "tested", "Gamma",  "city",  "délta",  "omicron",
                                         "clinic", "Monday"};
  const std::vector<std::string> types = {"infect", "symptom", "prevent"};
  std::mt19937_64 rng(2024);
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };

  for (int iter = 0; iter < 1200 && c.ok; ++iter) {
    // passage of 5..10 bank words with tracked code-point offsets
    std::size_t words = 5 + pick(6);
    std::string passage;
    std::vector<std::pair<std::size_t, std::string>> positions;  // (cp offset, word)
    std::size_t cp = 0;
    for (std::size_t w = 0; w < words; ++w) {
      const std::string& word = bank[pick(bank.size())];
      positions.emplace_back(cp, word);
      passage += word;
      cp += util::utf8_length(word);
      if (w + 1 < words) {
        passage += " ";
        cp += 1;
      }
    }

    SyntheticInstance inst;
    inst.id = "r" + std::to_string(iter);
    inst.passage = passage;
    std::set<std::string> used_types;
    std::size_t existing = pick(3);  // 0..2 pre-existing mentions
    for (std::size_t m = 0; m < existing; ++m) {
      const std::string& type = types[pick(types.size())];
      if (used_types.count(type)) continue;
      const auto& [start, word] = positions[pick(positions.size())];
      inst.mentions.push_back(
          {type, word, start, start + util::utf8_length(word), MentionOrigin::Sampled});
      used_types.insert(type);
    }

    // response: 0..3 proposals, some hallucinated words, some bogus types
    std::ostringstream response;
    std::size_t proposals = pick(4);
    for (std::size_t p = 0; p < proposals; ++p) {
      std::string type = (pick(5) == 0) ? "Bogus" : types[pick(types.size())];
      std::string word = (pick(3) == 0) ? "hallucinated" : bank[pick(bank.size())];
      response << type << ": " << word << "\n";
    }
    if (proposals == 0) response << "None";

    SyntheticInstance out = refiner.merge_response(inst, response.str());

    c.expect(out.passage == inst.passage, "merge changed the passage");
    c.expect(out.mentions.size() >= inst.mentions.size(), "merge dropped mentions");
    for (const auto& original : inst.mentions) {
      bool present = std::any_of(out.mentions.begin(), out.mentions.end(),
                                 [&](const EventMention& m) { return m == original; });
      c.expect(present, "merge mutated or removed a pre-existing mention (iter " +
                            std::to_string(iter) + ")");
    }
    for (const auto& m : out.mentions) {
      c.expect(util::utf8_substr(out.passage, m.start, m.end) == m.trigger,
               "emitted mention span does not equal its trigger (iter " + std::to_string(iter) +
                   ")");
      bool was_original = std::any_of(inst.mentions.begin(), inst.mentions.end(),
                                      [&](const EventMention& o) { return o == m; });
      if (!was_original) {
        c.expect(m.origin == MentionOrigin::Refined, "added mention lacks refined origin");
        c.expect(!used_types.count(m.event_type),
                 "merge added a mention for an already present event type");
      }
    }
  }

  // the missed-symptom fixture: exactly one (symptom, "got") is added
  std::string passage = "Ok, I just got a fever... Theres a possibility Im COVID-19 Positive";
  auto anchored = anchor_trigger(passage, "Positive");
  c.expect(anchored.has_value(), "fixture trigger failed to anchor");
  if (anchored) {
    SyntheticInstance inst;
    inst.id = "fixture";
    inst.passage = passage;
    inst.mentions = {{"infect", anchored->surface, anchored->start, anchored->end,
                      MentionOrigin::Sampled}};
    auto out = refiner.merge_response(inst, "infect: Positive\nsymptom: got");
    c.expect(out.mentions.size() == 2, "fixture merge did not add exactly one mention");
    int added = 0;
    for (const auto& m : out.mentions) {
      if (m == inst.mentions[0]) continue;
      ++added;
      c.expect(m.event_type == "symptom" && m.trigger == "got" &&
                   m.origin == MentionOrigin::Refined &&
                   util::utf8_substr(passage, m.start, m.end) == "got",
               "fixture added the wrong mention");
    }
    c.expect(added == 1, "fixture added " + std::to_string(added) + " mentions, expected 1");
  }
  return c;
}

// ---------------------------------------------------------------------------
// 4. Anchor cascade: the hand-built oracle table of (passage, trigger) rows
//    passes exactly, whole-word guards included.
// ---------------------------------------------------------------------------
Checker criterion_anchor() {
  Checker c;
  const auto& rows = anchor_oracle_rows();
  c.expect(rows.size() >= 30, "oracle table has fewer than 30 rows");
  bool has_whole_word_guard = false;
  for (const auto& row : rows)
    if (row.passage == "The attacker fled" && row.trigger == "attack" && row.expected_tier == 0)
      has_whole_word_guard = true;
  c.expect(has_whole_word_guard, "oracle table is missing the attacker/attack guard row");

  for (const auto& row : rows) {
    auto result = anchor_trigger(row.passage, row.trigger);
    std::string where = "row {" + row.passage + "} / {" + row.trigger + "}";
    if (row.expected_tier == 0) {
      c.expect(!result.has_value(), where + ": expected no anchor");
      continue;
    }
    c.expect(result.has_value(), where + ": expected an anchor");
    if (!result) continue;
    c.expect(result->tier == row.expected_tier,
             where + ": tier " + std::to_string(result->tier) + " != " +
                 std::to_string(row.expected_tier));
    c.expect(result->surface == row.expected_surface,
             where + ": surface " + result->surface + " != " + row.expected_surface);
    // span recomputed with plain substring search, independent of the cascade
    std::u32string hay = util::utf8_decode(row.passage);
    std::u32string needle = util::utf8_decode(row.expected_surface);
    std::size_t pos = std::u32string::npos;
    for (int i = 0; i < row.occurrence; ++i)
      pos = hay.find(needle, pos == std::u32string::npos ? 0 : pos + 1);
    c.expect(pos != std::u32string::npos && result->start == pos &&
                 result->end == pos + needle.size(),
             where + ": span mismatch");
  }
  return c;
}

// ---------------------------------------------------------------------------
// 5. Greedy sampler: exact N per event on single-event pools, the hand-derived
//    three-instance trace, and never-worse coverage than random selection on
//    every pool up to size 5 (exhaustive) plus 300 random pools up to size 12.
// ---------------------------------------------------------------------------
Checker criterion_greedy() {
  Checker c;
  Ontology ontology = news_ontology();
  const std::vector<std::string> names = {"Attack", "Arrest-Jail", "Demonstrate"};

  // (a) single-event pools with surplus yield exactly N per event
  {
    std::vector<SyntheticInstance> pool;
    int id = 0;
    for (const auto& name : names)
      for (int i = 0; i < 7; ++i)
        pool.push_back(word_instance("s" + std::to_string(id++), {{name, "word"}}));
    Dataset d = greedy_sample(pool, ontology, 4);
    c.expect(d.instances.size() == 12, "single-event pools selected the wrong total");
    for (const auto& name : names)
      c.expect(d.stats[name].instance_count == 4 && !d.stats[name].shortfall,
               "single-event pool did not yield exactly N for " + name);
  }

  // (b) hand-derived trace: pool {A}, {B}, {A,B}, N=2 selects all three,
  //     covering Attack and Arrest-Jail twice each
  {
    std::vector<SyntheticInstance> pool = {
        word_instance("pA", {{"Attack", "raid"}}),
        word_instance("pB", {{"Arrest-Jail", "jailed"}}),
        word_instance("pAB", {{"Attack", "raid"}, {"Arrest-Jail", "jailed"}}),
    };
    Dataset d = greedy_sample(pool, ontology, 2);
    std::set<std::string> ids;
    for (const auto& inst : d.instances) ids.insert(inst.id);
    c.expect(ids == std::set<std::string>{"pA", "pB", "pAB"},
             "trace selected the wrong instance set");
    c.expect(d.stats["Attack"].instance_count == 2 &&
                 d.stats["Arrest-Jail"].instance_count == 2 &&
                 d.stats["Demonstrate"].instance_count == 0 && d.stats["Demonstrate"].shortfall,
             "trace produced the wrong per-event stats");
  }

  // (c)+(d) coverage vs random selection. Pools are event-subset bitmasks.
  auto instance_for_mask = [&](int mask, int index) {
    std::vector<std::pair<std::string, std::string>> typed;
    for (int b = 0; b < 3; ++b)
      if (mask & (1 << b)) typed.emplace_back(names[b], "w" + std::to_string(b));
    return word_instance("m" + std::to_string(index), typed);
  };
  auto capped_coverage = [&](const std::vector<int>& masks, int n) {
    int total = 0;
    for (int b = 0; b < 3; ++b) {
      int have = 0;
      for (int mask : masks)
        if (mask & (1 << b)) ++have;
      total += std::min(have, n);
    }
    return total;
  };
  std::mt19937_64 rng(515);

  auto check_pool = [&](const std::vector<int>& pool_masks, int n, const std::string& label) {
    std::vector<SyntheticInstance> pool;
    for (std::size_t i = 0; i < pool_masks.size(); ++i)
      pool.push_back(instance_for_mask(pool_masks[i], static_cast<int>(i)));
    Dataset d = greedy_sample(pool, ontology, n);  // must terminate

    std::vector<int> selected;
    for (const auto& inst : d.instances) {
      int mask = 0;
      for (const auto& m : inst.mentions)
        for (int b = 0; b < 3; ++b)
          if (m.event_type == names[b]) mask |= (1 << b);
      selected.push_back(mask);
    }
    int greedy_cov = capped_coverage(selected, n);

    // random baseline: same number of picks, averaged over 100 orders
    std::vector<int> order = pool_masks;
    double random_sum = 0.0;
    for (int round = 0; round < 100; ++round) {
      std::shuffle(order.begin(), order.end(), rng);
      std::vector<int> take(order.begin(), order.begin() + selected.size());
      random_sum += capped_coverage(take, n);
    }
    double random_avg = pool_masks.empty() ? 0.0 : random_sum / 100.0;
    c.expect(greedy_cov + 1e-9 >= random_avg,
             label + ": greedy coverage " + std::to_string(greedy_cov) +
                 " below random average " + std::to_string(random_avg));
  };

  // exhaustive: every pool of nonempty event subsets with |pool| <= 5
  for (std::size_t size = 0; size <= 5 && c.ok; ++size) {
    std::uint64_t combos = 1;
    for (std::size_t s = 0; s < size; ++s) combos *= 7;
    for (std::uint64_t code = 0; code < combos && c.ok; ++code) {
      std::vector<int> masks;
      std::uint64_t rest = code;
      for (std::size_t s = 0; s < size; ++s) {
        masks.push_back(static_cast<int>(rest % 7) + 1);
        rest /= 7;
      }
      for (int n = 1; n <= 3; ++n)
        check_pool(masks, n, "pool size " + std::to_string(size) + " code " + std::to_string(code));
    }
  }

  // randomized: 300 pools with 6 <= |pool| <= 12
  for (int round = 0; round < 300 && c.ok; ++round) {
    std::vector<int> masks(6 + rng() % 7);
    for (auto& mask : masks) mask = static_cast<int>(rng() % 7) + 1;
    for (int n = 1; n <= 3; ++n) check_pool(masks, n, "random pool " + std::to_string(round));
  }
  return c;
}

// ---------------------------------------------------------------------------
// 6. Metrics: the 2/3 and 1/2 fixture to 1e-9; identity and empty-prediction
//    conventions; 1000 random (pred, gold) pairs against a brute-force
//    set-intersection oracle, with trigger-level F1 never above instance-level.
// ---------------------------------------------------------------------------
Checker criterion_metrics() {
  Checker c;
  auto dataset_from = [](const std::vector<std::pair<std::string,
                         std::vector<std::tuple<std::string, std::size_t, std::size_t>>>>& rows) {
    Dataset d;
    for (const auto& [id, mentions] : rows) {
      SyntheticInstance inst;
      inst.id = id;
      inst.passage = "unused";
      for (const auto& [type, start, end] : mentions)
        inst.mentions.push_back({type, "t", start, end, MentionOrigin::Gold});
      d.instances.push_back(std::move(inst));
    }
    return d;
  };

  // hand-derived fixture: instance-level 2/3, trigger-level 1/2
  {
    Dataset gold = dataset_from({{"s1", {{"Attack", 10, 16}, {"Demonstrate", 40, 49}}}});
    Dataset pred = dataset_from({{"s1", {{"Attack", 10, 16}, {"Attack", 40, 49}}}});
    auto report = score(pred, gold);
    c.expect(std::fabs(report.eve_i.overall.f1() - 2.0 / 3.0) < 1e-9,
             "instance-level F1 differs from 2/3");
    c.expect(std::fabs(report.eve_i.overall.precision() - 1.0) < 1e-9 &&
                 std::fabs(report.eve_i.overall.recall() - 0.5) < 1e-9,
             "instance-level P/R differ from 1 and 1/2");
    c.expect(std::fabs(report.tri_c.overall.f1() - 0.5) < 1e-9,
             "trigger-level F1 differs from 1/2");
  }

  // conventions
  {
    Dataset gold = dataset_from({{"s1", {{"Attack", 0, 3}}}});
    auto identity = score(gold, gold);
    c.expect(identity.eve_i.overall.f1() == 1.0 && identity.tri_c.overall.f1() == 1.0,
             "identity scoring is not perfect");
    Dataset empty_pred = dataset_from({{"s1", {}}});
    auto empty = score(empty_pred, gold);
    c.expect(empty.eve_i.overall.precision() == 0.0 && empty.eve_i.overall.recall() == 0.0 &&
                 empty.eve_i.overall.f1() == 0.0,
             "empty predictions do not score zero");
  }

  // brute-force oracle over random pairs
  std::mt19937_64 rng(606);
  const std::vector<std::string> types = {"Attack", "Arrest-Jail", "Demonstrate"};
  const std::vector<std::string> ids = {"i0", "i1", "i2"};
  auto random_dataset = [&]() {
    std::vector<std::pair<std::string,
                          std::vector<std::tuple<std::string, std::size_t, std::size_t>>>> rows;
    for (const auto& id : ids) {
      std::vector<std::tuple<std::string, std::size_t, std::size_t>> mentions;
      std::size_t n = rng() % 5;
      for (std::size_t m = 0; m < n; ++m) {
        std::size_t start = rng() % 6;
        mentions.emplace_back(types[rng() % 3], start, start + 1 + rng() % 3);
      }
      rows.emplace_back(id, std::move(mentions));
    }
    return rows;
  };
  auto prf = [](std::size_t pred, std::size_t gold, std::size_t matched) {
    double p = pred == 0 ? 0.0 : double(matched) / double(pred);
    double r = gold == 0 ? 0.0 : double(matched) / double(gold);
    double f1 = (p + r) == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
    return std::tuple<double, double, double>{p, r, f1};
  };

  for (int iter = 0; iter < 1000 && c.ok; ++iter) {
    auto pred_rows = random_dataset();
    auto gold_rows = random_dataset();
    auto report = score(dataset_from(pred_rows), dataset_from(gold_rows));

    std::set<std::pair<std::string, std::string>> pred_ev, gold_ev;
    std::set<std::tuple<std::string, std::size_t, std::size_t, std::string>> pred_tr, gold_tr;
    for (const auto& [id, mentions] : pred_rows)
      for (const auto& [type, start, end] : mentions) {
        pred_ev.insert({id, type});
        pred_tr.insert({id, start, end, type});
      }
    for (const auto& [id, mentions] : gold_rows)
      for (const auto& [type, start, end] : mentions) {
        gold_ev.insert({id, type});
        gold_tr.insert({id, start, end, type});
      }
    std::size_t ev_matched = 0, tr_matched = 0;
    for (const auto& u : pred_ev) ev_matched += gold_ev.count(u);
    for (const auto& u : pred_tr) tr_matched += gold_tr.count(u);

    auto [ep, er, ef] = prf(pred_ev.size(), gold_ev.size(), ev_matched);
    auto [tp, tr_, tf] = prf(pred_tr.size(), gold_tr.size(), tr_matched);
    c.expect(std::fabs(report.eve_i.overall.precision() - ep) < 1e-12 &&
                 std::fabs(report.eve_i.overall.recall() - er) < 1e-12 &&
                 std::fabs(report.eve_i.overall.f1() - ef) < 1e-12,
             "instance-level metrics disagree with the oracle (iter " + std::to_string(iter) + ")");
    c.expect(std::fabs(report.tri_c.overall.precision() - tp) < 1e-12 &&
                 std::fabs(report.tri_c.overall.recall() - tr_) < 1e-12 &&
                 std::fabs(report.tri_c.overall.f1() - tf) < 1e-12,
             "trigger-level metrics disagree with the oracle (iter " + std::to_string(iter) + ")");
    c.expect(report.tri_c.overall.f1() <= report.eve_i.overall.f1() + 1e-12,
             "trigger-level F1 exceeds instance-level F1 (iter " + std::to_string(iter) + ")");
  }
  return c;
}

// ---------------------------------------------------------------------------
// 7. Hit rate: distinct-set semantics against a brute-force oracle on random
//    datasets, plus invariance under instance duplication.
// ---------------------------------------------------------------------------
Checker criterion_hit_rate() {
  Checker c;
  const std::vector<std::string> types = {"Attack", "Arrest-Jail", "Demonstrate"};
  const std::vector<std::string> words = {"war",   "raid",  "riot", "march", "Protest",
                                          "jailed", "siege", "WAR",  "strike"};
  std::mt19937_64 rng(707);

  for (int iter = 0; iter < 300 && c.ok; ++iter) {
    Dataset synth;
    std::size_t instances = 1 + rng() % 4;
    for (std::size_t i = 0; i < instances; ++i) {
      SyntheticInstance inst;
      inst.id = "h" + std::to_string(i);
      inst.passage = "unused";
      std::size_t n = rng() % 4;
      for (std::size_t m = 0; m < n; ++m)
        inst.mentions.push_back({types[rng() % types.size()], words[rng() % words.size()],
                                 m * 3, m * 3 + 2, MentionOrigin::Sampled});
      synth.instances.push_back(std::move(inst));
    }
    GoldTriggerMap gold;
    for (const auto& type : types) {
      std::size_t n = rng() % 4;
      for (std::size_t g = 0; g < n; ++g) {
        std::string key = words[rng() % words.size()];
        for (auto& ch : key)
          if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
        gold[type].insert(key);
      }
    }

    auto report = hit_rate(synth, gold);

    // brute force: distinct lowercased triggers per event
    std::map<std::string, std::set<std::string>> distinct;
    for (const auto& inst : synth.instances)
      for (const auto& m : inst.mentions) {
        std::string key = m.trigger;
        for (auto& ch : key)
          if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
        distinct[m.event_type].insert(key);
      }
    double macro_sum = 0.0;
    std::size_t macro_n = 0, total = 0, total_hits = 0;
    for (const auto& [event, triggers] : distinct) {
      std::size_t hits = 0;
      auto git = gold.find(event);
      for (const auto& key : triggers)
        if (git != gold.end() && git->second.count(key)) ++hits;
      double rate = triggers.empty() ? 0.0 : double(hits) / double(triggers.size());
      if (!triggers.empty()) {
        macro_sum += rate;
        ++macro_n;
      }
      total += triggers.size();
      total_hits += hits;
      auto it = report.per_event.find(event);
      c.expect(it != report.per_event.end() && std::fabs(it->second.hit_rate - rate) < 1e-12,
               "per-event hit rate disagrees with the oracle (iter " + std::to_string(iter) + ")");
    }
    double macro = macro_n == 0 ? 0.0 : macro_sum / double(macro_n);
    double micro = total == 0 ? 0.0 : double(total_hits) / double(total);
    c.expect(std::fabs(report.macro_average - macro) < 1e-12 &&
                 std::fabs(report.micro_average - micro) < 1e-12,
             "macro/micro averages disagree with the oracle (iter " + std::to_string(iter) + ")");

    // duplication invariance under distinct-set semantics
    Dataset doubled = synth;
    for (auto inst : synth.instances) {
      inst.id += "-copy";
      doubled.instances.push_back(std::move(inst));
    }
    auto doubled_report = hit_rate(doubled, gold);
    c.expect(std::fabs(doubled_report.macro_average - report.macro_average) < 1e-12 &&
                 std::fabs(doubled_report.micro_average - report.micro_average) < 1e-12,
             "duplicating instances changed the hit rate (iter " + std::to_string(iter) + ")");
  }
  return c;
}

// ---------------------------------------------------------------------------
// 8. Gateway: request-ordered batch results under reversed completion, the
//    in-flight cap, and replay record/load round-trip identity.
// ---------------------------------------------------------------------------
Checker criterion_gateway() {
  Checker c;
  GenerationConfig gen;
  gen.backoff_base_ms = 1;

  struct ReversedStub : Backend {
    std::size_t total;
    explicit ReversedStub(std::size_t n) : total(n) {}
    std::string complete(const LlmRequest& request) override {
      std::size_t idx = std::stoul(request.user);
      std::this_thread::sleep_for(std::chrono::milliseconds(4 * (total - idx)));
      return "resp-" + request.user;
    }
  };
  {
    const std::size_t n = 8;
    LlmGateway gateway(std::make_shared<ReversedStub>(n));
    GenerationConfig wide = gen;
    wide.parallelism = static_cast<int>(n);
    std::vector<LlmRequest> requests;
    for (std::size_t i = 0; i < n; ++i)
      requests.push_back({"", std::to_string(i), wide, "t"});
    auto results = gateway.complete_batch(requests);
    c.expect(results.size() == n, "batch result count mismatch");
    for (std::size_t i = 0; i < results.size(); ++i)
      c.expect(results[i].ok() && results[i].exchange->response_text == "resp-" + std::to_string(i),
               "batch result " + std::to_string(i) + " out of request order");
  }

  struct CountingStub : Backend {
    std::atomic<int> in_flight{0};
    std::atomic<int> peak{0};
    std::string complete(const LlmRequest& request) override {
      int now = ++in_flight;
      int prev = peak.load();
      while (now > prev && !peak.compare_exchange_weak(prev, now)) {}
      std::this_thread::sleep_for(std::chrono::milliseconds(3));
      --in_flight;
      return "ok:" + request.user;
    }
  };
  {
    auto stub = std::make_shared<CountingStub>();
    LlmGateway gateway(stub);
    GenerationConfig capped = gen;
    capped.parallelism = 3;
    std::vector<LlmRequest> requests;
    for (int i = 0; i < 20; ++i) requests.push_back({"", std::to_string(i), capped, "t"});
    auto results = gateway.complete_batch(requests);
    for (const auto& r : results) c.expect(r.ok(), "capped batch had a failure");
    c.expect(stub->peak.load() <= 3, "in-flight peak " + std::to_string(stub->peak.load()) +
                                         " exceeded parallelism 3");
    c.expect(stub->peak.load() >= 1, "in-flight instrumentation saw no traffic");
  }

  {
    auto dir = fresh_dir("gateway");
    std::vector<LlmExchange> exchanges;
    for (int i = 0; i < 10; ++i) {
      LlmRequest request{"sys", "prompt " + std::to_string(i), gen, "t"};
      exchanges.push_back({request, "answer " + std::to_string(i), 0, 1,
                           prompt_digest(request.system, request.user)});
    }
    auto path = (dir / "log.jsonl").string();
    record_log(exchanges, path);
    LlmGateway gateway(load_log(path));
    for (int i = 0; i < 10; ++i) {
      auto ex = gateway.complete({"sys", "prompt " + std::to_string(i), gen, "t"});
      c.expect(ex.response_text == "answer " + std::to_string(i),
               "replay round-trip lost response " + std::to_string(i));
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// 9. Serialization: 500 randomized instances, multi-byte passages included,
//    survive a JSONL write/read round-trip with structural identity and the
//    span-equals-trigger invariant intact.
// ---------------------------------------------------------------------------
Checker criterion_serialization() {
  Checker c;
  Ontology ontology = news_ontology();
  const std::vector<std::string> names = {"Attack", "Arrest-Jail", "Demonstrate"};
  const std::vector<std::string> bank = {"war",    "émeute", "fièvre", "marché", "riot",
                                         "疫情",   "jailed", "🦠",     "strike", "naïve",
                                         "протест", "siege"};
  std::mt19937_64 rng(909);

  Dataset d;
  d.ontology_digest = "feedbead00000000";
  d.meta["model"] = "fixture";
  d.meta["seed"] = "909";
  for (int i = 0; i < 500; ++i) {
    SyntheticInstance inst;
    inst.id = "u" + std::to_string(i);
    std::size_t words = 3 + rng() % 10;
    std::vector<std::pair<std::size_t, std::string>> positions;
    std::string passage;
    std::size_t cp = 0;
    for (std::size_t w = 0; w < words; ++w) {
      const std::string& word = bank[rng() % bank.size()];
      positions.emplace_back(cp, word);
      passage += word;
      cp += util::utf8_length(word);
      if (w + 1 < words) {
        passage += " ";
        ++cp;
      }
    }
    inst.passage = passage;
    std::set<std::tuple<std::size_t, std::size_t, std::string>> seen;
    std::size_t mentions = rng() % 4;
    for (std::size_t m = 0; m < mentions; ++m) {
      const auto& [start, word] = positions[rng() % positions.size()];
      const std::string& type = names[rng() % names.size()];
      if (!seen.insert({start, start + util::utf8_length(word), type}).second) continue;
      inst.mentions.push_back({type, word, start, start + util::utf8_length(word),
                               rng() % 2 ? MentionOrigin::Sampled : MentionOrigin::Refined});
    }
    validate_instance(inst, &ontology);
    d.instances.push_back(std::move(inst));
  }
  refresh_stats(d);

  auto dir = fresh_dir("serialize");
  auto path = (dir / "dataset.jsonl").string();
  write_dataset(d, path);
  Dataset back = read_dataset(path, ontology);

  c.expect(back.instances.size() == d.instances.size(), "instance count changed in round-trip");
  c.expect(back.ontology_digest == d.ontology_digest && back.meta == d.meta,
           "metadata changed in round-trip");
  for (std::size_t i = 0; i < d.instances.size() && i < back.instances.size(); ++i) {
    const auto& a = d.instances[i];
    const auto& b = back.instances[i];
    c.expect(a.id == b.id && a.passage == b.passage && a.mentions == b.mentions,
             "instance " + a.id + " changed in round-trip");
    for (const auto& m : b.mentions)
      c.expect(util::utf8_substr(b.passage, m.start, m.end) == m.trigger,
               "offset invariant broken after round-trip in " + b.id);
  }

  // a second write of the parsed dataset is byte-identical
  auto path2 = (dir / "dataset2.jsonl").string();
  write_dataset(back, path2);
  c.expect(slurp(path) == slurp(path2), "re-serialization is not byte-stable");
  return c;
}

// ---------------------------------------------------------------------------
// 10. Few-shot isolation: the mined lexicon is byte-identical with and without
//     a few-shot bank, and appended gold instance counts are exact.
// ---------------------------------------------------------------------------
Checker criterion_fewshot() {
  Checker c;
  auto base = fresh_dir("fewshot");
  Ontology ontology = load_ontology(fixture("toy_ontology.json"));

  // gold dataset over the toy ontology
  Dataset gold;
  gold.instances.push_back(word_instance("g1", {{"infect", "positive"}, {"symptom", "fever"}}));
  gold.instances.push_back(word_instance("g2", {{"infect", "caught"}}));
  gold.instances.push_back(word_instance("g3", {{"prevent", "mask"}}));
  gold.instances.push_back(word_instance("g4", {{"symptom", "cough"}}));
  for (auto& inst : gold.instances) validate_instance(inst, &ontology);
  refresh_stats(gold);
  auto gold_path = (base / "gold.jsonl").string();
  write_dataset(gold, gold_path);

  RunConfig without = toy_config(base / "without");
  without.replay_log = (base / "replay_k0.jsonl").string();
  build_toy_replay_log(without, without.replay_log);
  RunCounters counters_without;
  std::string dataset_without = cmd_generate(without, counters_without);

  RunConfig with = toy_config(base / "with");
  with.k = 2;
  with.gold_path = gold_path;
  with.replay_log = (base / "replay_k2.jsonl").string();
  build_toy_replay_log(with, with.replay_log);
  RunCounters counters_with;
  std::string dataset_with = cmd_generate(with, counters_with);

  c.expect(slurp((base / "without" / "lexicon.json").string()) ==
               slurp((base / "with" / "lexicon.json").string()),
           "few-shot bank leaked into the mined lexicon");

  Dataset a = read_dataset(dataset_without, ontology);
  Dataset b = read_dataset(dataset_with, ontology);
  FewShotBank bank = sample_few_shot(gold, with.k, with.seed);
  std::size_t expected_gold = bank_instances(bank, ontology).size();
  c.expect(expected_gold > 0, "few-shot bank is unexpectedly empty");
  c.expect(b.instances.size() == a.instances.size() + expected_gold,
           "appended gold count is " + std::to_string(b.instances.size() - a.instances.size()) +
               ", expected " + std::to_string(expected_gold));
  std::size_t gold_rows = 0;
  for (const auto& inst : b.instances)
    if (inst.id.rfind("gold-", 0) == 0) ++gold_rows;
  c.expect(gold_rows == expected_gold, "gold-prefixed row count mismatch");
  c.expect(counters_with.get("dataset.gold_appended") ==
               static_cast<std::int64_t>(expected_gold),
           "gold append counter mismatch");
  return c;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Checker()> run;
  };
  const std::vector<Criterion> criteria = {
      {"end-to-end determinism (3 byte-identical runs, <5s)", criterion_determinism},
      {"trigger mining vs counting oracle, permutation-invariant", criterion_scout},
      {"refiner merge safety over 1200 randomized cases", criterion_refiner_merge},
      {"anchor cascade oracle table", criterion_anchor},
      {"greedy sampler coverage vs exhaustive + random baselines", criterion_greedy},
      {"scoring metrics vs brute-force set intersection", criterion_metrics},
      {"hit rate semantics and duplication invariance", criterion_hit_rate},
      {"gateway ordering, parallelism cap, replay round-trip", criterion_gateway},
      {"dataset serialization round-trip on 500 instances", criterion_serialization},
      {"few-shot isolation and gold append counts", criterion_fewshot},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Checker result;
    std::string error;
    try {
      result = criteria[i].run();
    } catch (const std::exception& e) {
      result.ok = false;
      result.detail = std::string("unhandled exception: ") + e.what();
    }
    if (result.ok) {
      std::cout << "PASS  criterion " << (i + 1) << ": " << criteria[i].name << "\n";
    } else {
      ++failures;
      std::cout << "FAIL  criterion " << (i + 1) << ": " << criteria[i].name << " — "
                << result.detail << "\n";
    }
  }
  if (failures) {
    std::cout << failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all 10 criteria passed\n";
  return 0;
}
