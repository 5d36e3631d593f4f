#ifndef SNARE_ONTOLOGY_HPP
#define SNARE_ONTOLOGY_HPP

#include <optional>
#include <string>
#include <vector>

namespace snare {

struct EventType {
  std::string name;
  std::string definition;
  std::vector<std::string> aliases;
};

// Closed set of event types. Immutable after load; safe to share across threads.
class Ontology {
 public:
  Ontology(std::vector<EventType> events, std::string domain_label, std::string language);

  const std::vector<EventType>& events() const { return events_; }
  const std::string& domain_label() const { return domain_label_; }
  const std::string& language() const { return language_; }

  // Case-insensitive match on name or alias after trimming whitespace and
  // surrounding punctuation. nullopt when nothing matches.
  std::optional<EventType> resolve(const std::string& raw) const;

  // Position of an event name in the ontology order; npos when absent.
  std::size_t index_of(const std::string& name) const;

 private:
  std::vector<EventType> events_;
  std::string domain_label_;
  std::string language_;
};

Ontology load_ontology(const std::string& path);
Ontology parse_ontology_json(const std::string& json_text);

}  // namespace snare

#endif  // SNARE_ONTOLOGY_HPP
