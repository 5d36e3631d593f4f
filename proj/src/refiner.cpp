#include "snare/refiner.hpp"

#include <algorithm>
#include <sstream>

#include "snare/errors.hpp"
#include "snare/util.hpp"

namespace snare {

namespace {

char32_t lower_ascii_cp(char32_t c) {
  return (c >= U'A' && c <= U'Z') ? c + 32 : c;
}

std::u32string lower_cps(const std::u32string& s) {
  std::u32string out = s;
  for (auto& c : out) c = lower_ascii_cp(c);
  return out;
}

bool word_bounded(const std::u32string& hay, std::size_t pos, std::size_t len) {
  if (pos > 0 && util::is_word_char(hay[pos - 1]) && util::is_word_char(hay[pos]))
    return false;
  std::size_t end = pos + len;
  if (end < hay.size() && util::is_word_char(hay[end - 1]) && util::is_word_char(hay[end]))
    return false;
  return true;
}

// candidate stems: the word itself plus the word minus one suffix
std::vector<std::u32string> stems(const std::u32string& word,
                                  const std::vector<std::string>& suffixes) {
  std::vector<std::u32string> out{word};
  for (const auto& s : suffixes) {
    std::u32string suf = util::utf8_decode(s);
    if (word.size() > suf.size() &&
        word.compare(word.size() - suf.size(), suf.size(), suf) == 0) {
      out.push_back(word.substr(0, word.size() - suf.size()));
    }
  }
  return out;
}

bool stem_match(const std::u32string& a, const std::u32string& b,
                const std::vector<std::string>& suffixes) {
  auto sa = stems(a, suffixes);
  auto sb = stems(b, suffixes);
  for (const auto& x : sa)
    for (const auto& y : sb)
      if (x == y) return true;
  return false;
}

struct Token {
  std::size_t start;
  std::size_t end;
};

std::vector<Token> tokenize(const std::u32string& cps) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < cps.size()) {
    if (!util::is_word_char(cps[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < cps.size() && util::is_word_char(cps[j])) ++j;
    out.push_back({i, j});
    i = j;
  }
  return out;
}

}  // namespace

std::optional<AnchoredTrigger> anchor_trigger(const std::string& passage,
                                              const std::string& trigger,
                                              const std::vector<std::string>& suffixes) {
  if (trigger.empty()) throw ValidationError("anchor_trigger: empty trigger");
  std::u32string pass = util::utf8_decode(passage);
  std::u32string trig = util::utf8_decode(util::trim(trigger));
  if (trig.empty()) throw ValidationError("anchor_trigger: empty trigger");

  auto make = [&](std::size_t pos, std::size_t len, int tier) {
    return AnchoredTrigger{util::utf8_encode(pass.substr(pos, len)), pos, pos + len, tier};
  };

  // tier 1: exact whole-word substring
  if (trig.size() <= pass.size()) {
    for (std::size_t pos = 0; pos + trig.size() <= pass.size(); ++pos) {
      if (pass.compare(pos, trig.size(), trig) == 0 && word_bounded(pass, pos, trig.size()))
        return make(pos, trig.size(), 1);
    }
  }

  // tier 2: case-insensitive whole-word substring
  std::u32string pass_lower = lower_cps(pass);
  std::u32string trig_lower = lower_cps(trig);
  if (trig.size() <= pass.size()) {
    for (std::size_t pos = 0; pos + trig.size() <= pass.size(); ++pos) {
      if (pass_lower.compare(pos, trig_lower.size(), trig_lower) == 0 &&
          word_bounded(pass, pos, trig.size()))
        return make(pos, trig.size(), 2);
    }
  }

  // tier 3: token-wise morphological-variant match; span covers the matched
  // token window, surface is the passage's actual form
  std::vector<Token> pass_tokens = tokenize(pass_lower);
  std::vector<Token> trig_tokens = tokenize(trig_lower);
  if (trig_tokens.empty()) return std::nullopt;
  for (std::size_t w = 0; w + trig_tokens.size() <= pass_tokens.size(); ++w) {
    bool all = true;
    for (std::size_t k = 0; k < trig_tokens.size(); ++k) {
      const auto& pt = pass_tokens[w + k];
      const auto& tt = trig_tokens[k];
      std::u32string pw = pass_lower.substr(pt.start, pt.end - pt.start);
      std::u32string tw = trig_lower.substr(tt.start, tt.end - tt.start);
      if (pw != tw && !stem_match(pw, tw, suffixes)) {
        all = false;
        break;
      }
    }
    if (all) {
      std::size_t start = pass_tokens[w].start;
      std::size_t end = pass_tokens[w + trig_tokens.size() - 1].end;
      return make(start, end - start, 3);
    }
  }
  return std::nullopt;
}

VerifyResult verify_and_anchor(const DraftInstance& draft) {
  SyntheticInstance inst;
  inst.id = draft.id;
  inst.passage = draft.passage;
  inst.metadata["narrator_digest"] = draft.exchange_ref;
  std::vector<std::string> missing;
  for (const auto& [event, trigger] : draft.spec.targets) {
    auto anchored = anchor_trigger(draft.passage, trigger);
    if (!anchored) {
      missing.push_back(event + ":\"" + trigger + "\"");
      continue;
    }
    EventMention m;
    m.event_type = event;
    m.trigger = anchored->surface;
    m.start = anchored->start;
    m.end = anchored->end;
    m.origin = MentionOrigin::Sampled;
    bool dup = std::any_of(inst.mentions.begin(), inst.mentions.end(), [&](const auto& o) {
      return o.start == m.start && o.end == m.end && o.event_type == m.event_type;
    });
    if (!dup) inst.mentions.push_back(std::move(m));
  }
  if (!missing.empty()) {
    std::ostringstream ss;
    ss << "sampled trigger(s) not found in passage:";
    for (const auto& m : missing) ss << " " << m;
    return Rejected{draft.id, ss.str()};
  }
  validate_instance(inst, nullptr);
  return inst;
}

std::vector<std::pair<std::string, std::string>> parse_mention_lines(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& raw_line : util::split(text, '\n')) {
    std::string line = util::trim(raw_line);
    // strip bullets and numbering
    while (!line.empty() && (line[0] == '-' || line[0] == '*')) line = util::trim(line.substr(1));
    std::size_t d = 0;
    while (d < line.size() && std::isdigit(static_cast<unsigned char>(line[d]))) ++d;
    if (d > 0 && d < line.size() && (line[d] == '.' || line[d] == ')'))
      line = util::trim(line.substr(d + 1));
    if (line.empty()) continue;

    std::size_t sep = line.find(':');
    if (sep == std::string::npos) sep = line.find(" - ");
    if (sep == std::string::npos) continue;
    std::string type = util::trim_punct(line.substr(0, sep));
    std::string trigger =
        util::trim_punct(line.substr(line[sep] == ':' ? sep + 1 : sep + 3));
    if (type.empty() || trigger.empty()) continue;
    out.emplace_back(type, trigger);
  }
  return out;
}

Refiner::Refiner(LlmGateway& gateway, const Ontology& ontology, const TemplateSet& templates,
                 GenerationConfig config)
    : gateway_(gateway), ontology_(ontology), templates_(templates), config_(std::move(config)) {}

LlmRequest Refiner::build_request(const SyntheticInstance& instance) const {
  std::ostringstream catalog;
  for (const auto& e : ontology_.events())
    catalog << "- " << e.name << ": " << e.definition << "\n";
  LlmRequest req;
  req.user = templates_.refiner.render({{"domain", ontology_.domain_label()},
                                        {"event_catalog", catalog.str()},
                                        {"passage", instance.passage}});
  req.config = config_;
  req.tag = "refiner";
  return req;
}

SyntheticInstance Refiner::merge_response(const SyntheticInstance& instance,
                                          const std::string& response_text,
                                          RunCounters* counters) const {
  SyntheticInstance out = instance;
  for (const auto& [raw_type, trigger] : parse_mention_lines(response_text)) {
    auto resolved = ontology_.resolve(raw_type);
    if (!resolved) {
      if (counters) counters->bump("refiner.unresolved_types");
      continue;
    }
    // never update already-present events
    bool type_present = std::any_of(out.mentions.begin(), out.mentions.end(), [&](const auto& m) {
      return util::iequals_ascii(m.event_type, resolved->name);
    });
    if (type_present) {
      if (counters) counters->bump("refiner.already_present");
      continue;
    }
    auto anchored = anchor_trigger(out.passage, trigger);
    if (!anchored) {
      if (counters) counters->bump("refiner.unanchored");
      continue;
    }
    bool collides = std::any_of(out.mentions.begin(), out.mentions.end(), [&](const auto& m) {
      return m.start == anchored->start && m.end == anchored->end &&
             m.event_type == resolved->name;
    });
    if (collides) continue;
    EventMention m;
    m.event_type = resolved->name;
    m.trigger = anchored->surface;
    m.start = anchored->start;
    m.end = anchored->end;
    m.origin = MentionOrigin::Refined;
    out.mentions.push_back(std::move(m));
    if (counters) counters->bump("refiner.added");
  }
  validate_instance(out, &ontology_);
  return out;
}

SyntheticInstance Refiner::refine(const SyntheticInstance& instance, RunCounters* counters) {
  if (instance.mentions.empty())
    throw ValidationError("refine: instance " + instance.id + " has no sampled mentions");
  try {
    LlmExchange ex = gateway_.complete(build_request(instance));
    exchanges_.push_back(ex);
    return merge_response(instance, ex.response_text, counters);
  } catch (const SnareError&) {
    if (counters) counters->bump("refiner.backend_failures");
    return instance;  // backend errors leave the instance unchanged
  }
}

std::vector<SyntheticInstance> Refiner::refine_batch(
    const std::vector<SyntheticInstance>& instances, RunCounters* counters) {
  std::vector<LlmRequest> requests;
  requests.reserve(instances.size());
  for (const auto& inst : instances) requests.push_back(build_request(inst));
  auto results = gateway_.complete_batch(requests);

  std::vector<SyntheticInstance> out;
  out.reserve(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (!results[i].ok()) {
      if (counters) counters->bump("refiner.backend_failures");
      out.push_back(instances[i]);
      continue;
    }
    exchanges_.push_back(*results[i].exchange);
    try {
      out.push_back(merge_response(instances[i], results[i].exchange->response_text, counters));
    } catch (const SnareError&) {
      if (counters) counters->bump("refiner.merge_failures");
      out.push_back(instances[i]);
    }
  }
  return out;
}

}  // namespace snare
