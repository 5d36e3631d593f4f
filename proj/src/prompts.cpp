#include "snare/prompts.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "snare/errors.hpp"

namespace snare {

std::string PromptTemplate::render(const std::map<std::string, std::string>& values) const {
  std::string out;
  out.reserve(text_.size());
  std::size_t i = 0;
  while (i < text_.size()) {
    std::size_t open = text_.find("{{", i);
    if (open == std::string::npos) {
      out.append(text_, i, std::string::npos);
      break;
    }
    out.append(text_, i, open - i);
    std::size_t close = text_.find("}}", open + 2);
    if (close == std::string::npos)
      throw TemplateError("template: unterminated placeholder near offset " +
                          std::to_string(open));
    std::string key = text_.substr(open + 2, close - open - 2);
    auto it = values.find(key);
    if (it == values.end())
      throw TemplateError("template: missing placeholder value for {{" + key + "}}");
    out.append(it->second);
    i = close + 2;
  }
  return out;
}

namespace {

const char* kScoutStage1 =
    "You are an event detection annotator for the {{domain}} domain.\n"
    "The event ontology is:\n"
    "{{event_catalog}}\n"
    "Read the sentence below and list the event types from the ontology that are "
    "mentioned in it. Answer with event type names only, one per line, exactly as "
    "written in the ontology. If no event from the ontology is mentioned, answer "
    "\"None\".\n"
    "Sentence: {{sentence}}\n";

const char* kScoutStage2 =
    "You are an event detection annotator for the {{domain}} domain.\n"
    "Event type: {{event_name}}\n"
    "Definition: {{event_definition}}\n"
    "Find the single word or short phrase from the sentence below that most "
    "distinctly indicates the occurrence of this event (the event trigger). The "
    "answer must be copied verbatim from the sentence. Answer with the trigger "
    "only.\n"
    "Sentence: {{sentence}}\n";

const char* kNarrator =
    "You are a {{domain}} domain writer producing realistic text.\n"
    "{{few_shot}}"
    "Write about the following events:\n"
    "{{event_blocks}}"
    "{{instructions}}\n";

const char* kNarratorInstructions =
    "Write a passage of 1-3 sentences that naturally mentions every event above, "
    "using each given trigger word verbatim. Output only the passage.";

const char* kRefiner =
    "You are an event detection annotator for the {{domain}} domain.\n"
    "The event ontology is:\n"
    "{{event_catalog}}\n"
    "List every event mention in the passage below. Answer one mention per line in "
    "the form \"EventType: trigger\", where the trigger is a word or short phrase "
    "copied verbatim from the passage. If there are no event mentions, answer "
    "\"None\".\n"
    "Passage: {{passage}}\n";

const char* kTriggerInternal =
    "You are a {{domain}} domain expert.\n"
    "Event type: {{event_name}}\n"
    "Definition: {{event_definition}}\n"
    "List {{t}} plausible trigger words or short phrases that would indicate this "
    "event in {{domain}} text. Answer with the triggers only, one per line.\n";

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ParseError("template: cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string default_narrator_instructions() { return kNarratorInstructions; }

TemplateSet TemplateSet::defaults() {
  return TemplateSet{PromptTemplate(kScoutStage1), PromptTemplate(kScoutStage2),
                     PromptTemplate(kNarrator), PromptTemplate(kRefiner),
                     PromptTemplate(kTriggerInternal)};
}

TemplateSet TemplateSet::load(const std::string& dir) {
  TemplateSet set = defaults();
  namespace fs = std::filesystem;
  auto maybe = [&](const char* name, PromptTemplate& slot) {
    fs::path p = fs::path(dir) / (std::string(name) + ".txt");
    if (fs::exists(p)) slot = PromptTemplate(read_file(p));
  };
  maybe("scout_stage1", set.scout_stage1);
  maybe("scout_stage2", set.scout_stage2);
  maybe("narrator", set.narrator);
  maybe("refiner", set.refiner);
  maybe("trigger_internal", set.trigger_internal);
  return set;
}

}  // namespace snare
