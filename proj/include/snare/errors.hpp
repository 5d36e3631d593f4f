#ifndef SNARE_ERRORS_HPP
#define SNARE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace snare {

struct SnareError : std::runtime_error {
  explicit SnareError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParseError : SnareError {
  using SnareError::SnareError;
};

struct ValidationError : SnareError {
  using SnareError::SnareError;
};

struct DuplicateIdError : SnareError {
  using SnareError::SnareError;
};

struct EmptyCorpusError : SnareError {
  using SnareError::SnareError;
};

// Live backend failed after exhausting retries.
struct BackendUnavailable : SnareError {
  using SnareError::SnareError;
};

// Transient failure inside a backend; the gateway retries these.
struct TransientBackendError : SnareError {
  using SnareError::SnareError;
};

struct ReplayMiss : SnareError {
  ReplayMiss(const std::string& tag, const std::string& digest)
      : SnareError("replay miss: tag=" + tag + " digest=" + digest),
        tag(tag), digest(digest) {}
  std::string tag;
  std::string digest;
};

struct TemplateError : SnareError {
  using SnareError::SnareError;
};

struct AlignmentError : SnareError {
  using SnareError::SnareError;
};

struct InvalidStrategyParam : SnareError {
  using SnareError::SnareError;
};

struct EmptyLexiconError : SnareError {
  using SnareError::SnareError;
};

struct ConfigError : SnareError {
  using SnareError::SnareError;
};

}  // namespace snare

#endif  // SNARE_ERRORS_HPP
