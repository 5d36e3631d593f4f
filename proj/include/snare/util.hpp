#ifndef SNARE_UTIL_HPP
#define SNARE_UTIL_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace snare::util {

// --- UTF-8 ---------------------------------------------------------------
// Offsets throughout the toolkit are Unicode scalar values (code points),
// end-exclusive. These helpers convert between UTF-8 byte strings and
// code-point sequences.

std::u32string utf8_decode(const std::string& s);  // throws ParseError on invalid UTF-8
std::string utf8_encode(const std::u32string& s);
std::size_t utf8_length(const std::string& s);
// Slice [start, end) in code points, returned as UTF-8.
std::string utf8_substr(const std::string& s, std::size_t start, std::size_t end);

bool is_word_char(char32_t cp);

// --- strings --------------------------------------------------------------

std::string trim(const std::string& s);
// Trim whitespace plus surrounding quotes/punctuation (used on LLM output).
std::string trim_punct(const std::string& s);
std::string to_lower_ascii(const std::string& s);
// Lowercase (ASCII) and collapse internal whitespace runs to single spaces.
std::string normalize_trigger(const std::string& s);
std::vector<std::string> split(const std::string& s, char sep);
// Split LLM list output on newlines, commas and semicolons.
std::vector<std::string> split_list_response(const std::string& s);
bool iequals_ascii(const std::string& a, const std::string& b);

// --- hashing --------------------------------------------------------------

// FNV-1a 64-bit, returned as a 16-char lowercase hex string.
std::string fnv1a_hex(const std::string& data);
std::string file_digest(const std::string& path);  // digest of file bytes

// --- RNG ------------------------------------------------------------------
// Thin seeded RNG with hand-rolled mappings so sampled output does not
// depend on the stdlib's distribution implementations.

class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  std::uint64_t next_u64();
  // Uniform in [0, n), n > 0.
  std::size_t uniform_index(std::size_t n);
  // Uniform in [0, 1).
  double uniform_real();
  // Derive a child RNG for an independent substream.
  Rng fork(std::uint64_t salt);

 private:
  std::uint64_t state_[4];
};

// k distinct indices from [0, n), order of selection; k > n returns all n.
std::vector<std::size_t> sample_without_replacement(Rng& rng, std::size_t n, std::size_t k);

}  // namespace snare::util

#endif  // SNARE_UTIL_HPP
