#ifndef SNARE_REPORT_HPP
#define SNARE_REPORT_HPP

#include <cstdint>
#include <map>
#include <string>

namespace snare {

// Named counters accumulated across a run; serialized into the run report.
struct RunCounters {
  std::map<std::string, std::int64_t> values;
  void bump(const std::string& name, std::int64_t n = 1) { values[name] += n; }
  std::int64_t get(const std::string& name) const {
    auto it = values.find(name);
    return it == values.end() ? 0 : it->second;
  }
};

}  // namespace snare

#endif  // SNARE_REPORT_HPP
