#ifndef SNARE_PROMPTS_HPP
#define SNARE_PROMPTS_HPP

#include <map>
#include <string>

namespace snare {

// Minimal {{placeholder}} substitution. Every placeholder in the template
// must be bound at render time; unknown placeholders raise TemplateError.
class PromptTemplate {
 public:
  explicit PromptTemplate(std::string text) : text_(std::move(text)) {}
  std::string render(const std::map<std::string, std::string>& values) const;
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

// The five prompt surfaces of the pipeline. Defaults are embedded; operators
// can override any of them by dropping <name>.txt files in a template dir.
struct TemplateSet {
  PromptTemplate scout_stage1;      // event-type identification per sentence
  PromptTemplate scout_stage2;      // trigger extraction per (sentence, event)
  PromptTemplate narrator;          // passage generation from a label spec
  PromptTemplate refiner;           // full mention listing for a passage
  PromptTemplate trigger_internal;  // LLM-internal trigger generation

  static TemplateSet defaults();
  // Loads defaults, then overrides from files scout_stage1.txt,
  // scout_stage2.txt, narrator.txt, refiner.txt, trigger_internal.txt
  // when present in dir.
  static TemplateSet load(const std::string& dir);
};

std::string default_narrator_instructions();

}  // namespace snare

#endif  // SNARE_PROMPTS_HPP
