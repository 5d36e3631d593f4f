#include "snare/narrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "snare/errors.hpp"
#include "snare/util.hpp"

namespace snare {

std::vector<LabelSpec> sample_label_specs(const TriggerLexicon& lexicon,
                                          const Ontology& ontology,
                                          const NarratorOptions& options) {
  if (options.count_per_event < 1)
    throw ValidationError("sample_label_specs: count_per_event must be >= 1");
  if (options.pair_probability < 0.0 || options.pair_probability > 1.0)
    throw ValidationError("sample_label_specs: pair_probability must be in [0,1]");

  std::vector<std::string> missing;
  for (const auto& e : ontology.events()) {
    auto it = lexicon.per_event.find(e.name);
    if (it == lexicon.per_event.end() || it->second.empty()) missing.push_back(e.name);
  }
  if (!missing.empty()) {
    std::ostringstream ss;
    ss << "sample_label_specs: empty lexicon for event(s):";
    for (const auto& m : missing) ss << " " << m;
    throw EmptyLexiconError(ss.str());
  }

  auto per_event = static_cast<int>(
      std::ceil(options.oversample_factor * static_cast<double>(options.count_per_event)));
  util::Rng rng(options.seed);

  auto sample_trigger = [&](const std::string& event) -> std::string {
    const auto& list = lexicon.per_event.at(event);
    if (options.weight_triggers_by_count) {
      std::int64_t total = 0;
      for (const auto& s : list) total += s.count;
      double r = rng.uniform_real() * static_cast<double>(total);
      for (const auto& s : list) {
        r -= static_cast<double>(s.count);
        if (r < 0) return s.trigger_key;
      }
      return list.back().trigger_key;
    }
    return list[rng.uniform_index(list.size())].trigger_key;
  };

  std::vector<LabelSpec> specs;
  const auto& events = ontology.events();
  for (std::size_t e = 0; e < events.size(); ++e) {
    for (int i = 0; i < per_event; ++i) {
      LabelSpec spec;
      spec.sample_seed = rng.next_u64();
      spec.targets.emplace_back(events[e].name, sample_trigger(events[e].name));
      bool pair = events.size() >= 2 && rng.uniform_real() < options.pair_probability;
      if (pair) {
        std::size_t other = rng.uniform_index(events.size() - 1);
        if (other >= e) ++other;
        spec.targets.emplace_back(events[other].name, sample_trigger(events[other].name));
      }
      specs.push_back(std::move(spec));
    }
  }
  return specs;
}

std::pair<std::string, std::string> render_narrator_prompt(
    const LabelSpec& spec, const Ontology& ontology, const TemplateSet& templates,
    const std::string& few_shot_block) {
  std::ostringstream blocks;
  for (const auto& [event, trigger] : spec.targets) {
    auto resolved = ontology.resolve(event);
    if (!resolved)
      throw ValidationError("render_narrator_prompt: unknown event type " + event);
    blocks << "- Event: " << resolved->name << "\n  Definition: " << resolved->definition
           << "\n  Trigger word to use verbatim: " << trigger << "\n";
  }
  std::string few_shot;
  if (!few_shot_block.empty())
    few_shot = "Here are annotated examples from this domain:\n" + few_shot_block + "\n";
  std::string user = templates.narrator.render({{"domain", ontology.domain_label()},
                                                {"few_shot", few_shot},
                                                {"event_blocks", blocks.str()},
                                                {"instructions", default_narrator_instructions()}});
  return {std::string{}, user};
}

std::string clean_passage(const std::string& raw) {
  std::string text = util::trim(raw);
  // strip markdown fences
  if (text.rfind("```", 0) == 0) {
    auto first_nl = text.find('\n');
    auto last_fence = text.rfind("```");
    if (first_nl != std::string::npos && last_fence > first_nl)
      text = util::trim(text.substr(first_nl + 1, last_fence - first_nl - 1));
  }
  // strip one layer of symmetric surrounding quotes
  if (text.size() >= 2 && (text.front() == '"' || text.front() == '\'') &&
      text.back() == text.front()) {
    text = util::trim(text.substr(1, text.size() - 2));
  }
  return text;
}

Narrator::Narrator(LlmGateway& gateway, const Ontology& ontology, const TemplateSet& templates,
                   GenerationConfig config)
    : gateway_(gateway), ontology_(ontology), templates_(templates), config_(std::move(config)) {}

std::vector<DraftInstance> Narrator::narrate(const std::vector<LabelSpec>& specs,
                                             const std::vector<std::string>& few_shot_blocks,
                                             RunCounters* counters) {
  if (!few_shot_blocks.empty() && few_shot_blocks.size() != specs.size())
    throw ValidationError("narrate: few_shot_blocks must be empty or match specs size");
  std::vector<LlmRequest> requests;
  requests.reserve(specs.size());
  for (std::size_t s = 0; s < specs.size(); ++s) {
    const auto& spec = specs[s];
    const std::string block = few_shot_blocks.empty() ? std::string{} : few_shot_blocks[s];
    auto [system, user] = render_narrator_prompt(spec, ontology_, templates_, block);
    LlmRequest req;
    req.system = system;
    req.user = user;
    req.config = config_;
    req.tag = "narrator";
    requests.push_back(std::move(req));
  }
  auto results = gateway_.complete_batch(requests);

  std::vector<DraftInstance> drafts;
  int width = specs.size() < 10000 ? 4 : 6;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i].ok()) {
      if (counters) counters->bump("narrator.generation_failures");
      continue;
    }
    exchanges_.push_back(*results[i].exchange);
    std::string passage = clean_passage(results[i].exchange->response_text);
    if (passage.empty()) {
      if (counters) counters->bump("narrator.empty_passages");
      continue;
    }
    DraftInstance draft;
    std::string idx = std::to_string(i);
    draft.id = "narr-" + std::string(static_cast<std::size_t>(width) - std::min<std::size_t>(idx.size(), width), '0') + idx;
    draft.passage = std::move(passage);
    draft.spec = specs[i];
    draft.exchange_ref = results[i].exchange->prompt_digest;
    drafts.push_back(std::move(draft));
    if (counters) counters->bump("narrator.drafts");
  }
  return drafts;
}

}  // namespace snare
