#ifndef SNARE_ANCHOR_ORACLE_HPP
#define SNARE_ANCHOR_ORACLE_HPP

#include <string>
#include <vector>

namespace snare::testing {

// Hand-built oracle rows for the trigger anchoring cascade. expected_tier 0
// means NotFound. The expected span is derived from expected_surface and its
// occurrence index with plain substring search, independent of the cascade.
struct AnchorRow {
  std::string passage;
  std::string trigger;
  int expected_tier;            // 0 = NotFound, else 1..3
  std::string expected_surface; // empty when NotFound
  int occurrence;               // 1-based occurrence of expected_surface
};

inline const std::vector<AnchorRow>& anchor_oracle_rows() {
  static const std::vector<AnchorRow> rows = {
      // tier 1: exact whole-word
      {"She was killed by the rapidly spreading infection.", "killed", 1, "killed", 1},
      {"He tested positive for the virus.", "tested positive", 1, "tested positive", 1},
      {"They began to march", "march", 1, "march", 1},
      {"a quiet protest here", " protest ", 1, "protest", 1},
      {"She got a fever overnight.", "got", 1, "got", 1},
      {"La fièvre monte à Paris.", "fièvre", 1, "fièvre", 1},
      {"war or war again", "war", 1, "war", 1},
      {"War war", "war", 1, "war", 1},  // exact hit wins over the capitalized one
      // tier 2: case-insensitive whole-word
      {"Arrested protesters filled the vans.", "arrested", 2, "Arrested", 1},
      {"The WAR ended.", "war", 2, "WAR", 1},
      {"The COVID-19 Positive case was isolated.", "positive", 2, "Positive", 1},
      {"Shooting erupted near the square.", "shooting", 2, "Shooting", 1},
      {"WAR and War", "war", 2, "WAR", 1},  // earliest wins within the tier
      {"Protest signs and protesting crowds", "protest", 2, "Protest", 1},
      // tier 3: one-suffix morphological variants, whole-word
      {"She was arrested yesterday", "arrest", 3, "arrested", 1},
      {"The protests continued.", "protest", 3, "protests", 1},
      {"The spreading virus alarmed everyone", "spread", 3, "spreading", 1},
      {"The infection worsened.", "infect", 3, "infection", 1},
      {"Multiple infections were reported.", "infect", 3, "infections", 1},
      {"They infect others quickly.", "infection", 3, "infect", 1},
      {"The house was razed.", "raze", 3, "razed", 1},
      {"He was jailed.", "jail", 3, "jailed", 1},
      {"The viruses mutate.", "virus", 3, "viruses", 1},
      {"They marched downtown.", "marches", 3, "marched", 1},
      {"Riots, arrests and chaos.", "riot", 3, "Riots", 1},
      {"The troops invaded villages overnight", "invade village", 3, "invaded villages", 1},
      // NotFound
      {"The attacker fled", "attack", 0, "", 0},   // "attacker" not reachable, whole-word holds
      {"The attacker fled", "attacked", 0, "", 0},
      {"A warship sailed past.", "war", 0, "", 0},  // substring inside a word
      {"positively charged ions", "positive", 0, "", 0},  // "ly" not in the suffix set
      {"FIÈVRE haute", "fièvre", 0, "", 0},  // case folding is ASCII-only
      {"Nothing to see here.", "x", 0, "", 0},
  };
  return rows;
}

}  // namespace snare::testing

#endif  // SNARE_ANCHOR_ORACLE_HPP
