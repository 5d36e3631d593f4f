#include "snare/ontology.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "snare/errors.hpp"
#include "snare/util.hpp"

namespace snare {

using util::to_lower_ascii;
using util::trim;
using util::trim_punct;

Ontology::Ontology(std::vector<EventType> events, std::string domain_label, std::string language)
    : events_(std::move(events)),
      domain_label_(std::move(domain_label)),
      language_(std::move(language)) {
  if (events_.empty()) throw ValidationError("ontology: at least one event type is required");
  std::set<std::string> seen;  // names and aliases, lowercased
  for (const auto& e : events_) {
    if (trim(e.name).empty()) throw ValidationError("ontology: event name is empty");
    if (e.name.find('\n') != std::string::npos)
      throw ValidationError("ontology: event name contains a newline: " + e.name);
    if (trim(e.definition).empty())
      throw ValidationError("ontology: definition is empty for event " + e.name);
    if (!seen.insert(to_lower_ascii(e.name)).second)
      throw ValidationError("ontology: duplicate event name (case-insensitive): " + e.name);
  }
  for (const auto& e : events_) {
    for (const auto& a : e.aliases) {
      std::string key = to_lower_ascii(a);
      if (key == to_lower_ascii(e.name)) continue;  // alias equal to own name is harmless
      if (!seen.insert(key).second)
        throw ValidationError("ontology: alias collides with another name or alias: " + a);
    }
  }
}

std::optional<EventType> Ontology::resolve(const std::string& raw) const {
  std::string key = to_lower_ascii(trim_punct(raw));
  if (key.empty()) return std::nullopt;
  for (const auto& e : events_) {
    if (to_lower_ascii(e.name) == key) return e;
    for (const auto& a : e.aliases) {
      if (to_lower_ascii(a) == key) return e;
    }
  }
  return std::nullopt;
}

std::size_t Ontology::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < events_.size(); ++i) {
    if (util::iequals_ascii(events_[i].name, name)) return i;
  }
  return static_cast<std::size_t>(-1);
}

Ontology parse_ontology_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("ontology: malformed JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("events") || !j["events"].is_array())
    throw ParseError("ontology: missing \"events\" array");
  std::vector<EventType> events;
  for (const auto& ej : j["events"]) {
    EventType e;
    if (!ej.contains("name") || !ej["name"].is_string())
      throw ParseError("ontology: event missing string field \"name\"");
    if (!ej.contains("definition") || !ej["definition"].is_string())
      throw ParseError("ontology: event missing string field \"definition\"");
    e.name = ej["name"].get<std::string>();
    e.definition = ej["definition"].get<std::string>();
    if (ej.contains("aliases")) {
      if (!ej["aliases"].is_array())
        throw ParseError("ontology: \"aliases\" must be an array for event " + e.name);
      for (const auto& a : ej["aliases"]) {
        if (!a.is_string())
          throw ParseError("ontology: non-string alias for event " + e.name);
        e.aliases.push_back(a.get<std::string>());
      }
    }
    events.push_back(std::move(e));
  }
  std::string domain = j.value("domain", std::string{});
  std::string language = j.value("language", std::string{"en"});
  return Ontology(std::move(events), std::move(domain), std::move(language));
}

Ontology load_ontology(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("ontology: cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_ontology_json(ss.str());
}

}  // namespace snare
