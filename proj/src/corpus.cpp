#include "snare/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "snare/errors.hpp"
#include "snare/util.hpp"

namespace snare {

using util::trim;

Corpus load_corpus(const std::string& path, CorpusFormat format, bool dedup) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("corpus: cannot open file: " + path);
  std::string filename = std::filesystem::path(path).filename().string();

  Corpus corpus;
  {
    std::ostringstream ss;
    ss << in.rdbuf();
    corpus.digest = util::fnv1a_hex(ss.str());
    in.clear();
    in.seekg(0);
  }

  std::set<std::string> ids;
  std::set<std::string> texts_seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;

    UnlabeledSentence s;
    if (format == CorpusFormat::Plain) {
      s.text = trim(line);
      s.id = filename + "#" + std::to_string(lineno);
    } else {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw ParseError("corpus: line " + std::to_string(lineno) + ": malformed JSON: " +
                         e.what());
      }
      if (!j.contains("text") || !j["text"].is_string())
        throw ParseError("corpus: line " + std::to_string(lineno) +
                         ": missing string field \"text\"");
      s.text = j["text"].get<std::string>();
      if (trim(s.text).empty())
        throw ParseError("corpus: line " + std::to_string(lineno) + ": empty \"text\"");
      s.id = j.value("id", std::string{});
      if (s.id.empty()) s.id = filename + "#" + std::to_string(lineno);
      s.source = j.value("source", std::string{});
    }

    if (!ids.insert(s.id).second)
      throw DuplicateIdError("corpus: duplicate id \"" + s.id + "\" at line " +
                             std::to_string(lineno));
    if (dedup && !texts_seen.insert(s.text).second) continue;
    corpus.sentences.push_back(std::move(s));
  }
  return corpus;
}

Corpus sample_corpus(const Corpus& corpus, double fraction, std::uint64_t seed) {
  if (corpus.sentences.empty()) throw EmptyCorpusError("sample_corpus: empty corpus");
  if (!(fraction > 0.0) || fraction > 1.0)
    throw ValidationError("sample_corpus: fraction must be in (0,1]");
  std::size_t n = corpus.sentences.size();
  auto k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
  util::Rng rng(seed);
  std::vector<std::size_t> picked = util::sample_without_replacement(rng, n, k);
  std::sort(picked.begin(), picked.end());
  Corpus out;
  out.language = corpus.language;
  out.digest = corpus.digest;
  out.sentences.reserve(k);
  for (std::size_t i : picked) out.sentences.push_back(corpus.sentences[i]);
  return out;
}

void write_corpus_jsonl(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("corpus: cannot open file for writing: " + path);
  for (const auto& s : corpus.sentences) {
    nlohmann::ordered_json j;
    j["id"] = s.id;
    j["text"] = s.text;
    if (!s.source.empty()) j["source"] = s.source;
    out << j.dump() << "\n";
  }
}

}  // namespace snare
