#ifndef SNARE_CORPUS_HPP
#define SNARE_CORPUS_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace snare {

struct UnlabeledSentence {
  std::string id;
  std::string text;
  std::string source;
};

// Normalized sentence store; order is the file order. Immutable after load.
struct Corpus {
  std::vector<UnlabeledSentence> sentences;
  std::string language = "en";
  std::string digest;  // content digest of the loaded file, for provenance
};

enum class CorpusFormat { Jsonl, Plain };

Corpus load_corpus(const std::string& path, CorpusFormat format, bool dedup = false);

// Deterministic pseudo-random subset of ceil(fraction*|corpus|) sentences,
// original relative order preserved.
Corpus sample_corpus(const Corpus& corpus, double fraction, std::uint64_t seed);

void write_corpus_jsonl(const Corpus& corpus, const std::string& path);

}  // namespace snare

#endif  // SNARE_CORPUS_HPP
