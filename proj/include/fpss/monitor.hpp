#pragma once

// Per-thread bookkeeping for acceptance-rejection loops. Every proposal
// reports target/envelope; a ratio above 1 + tolerance is a dominance
// violation. In strict mode a violation throws. A NaN ratio always throws.

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

namespace fpss {

class SamplerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DominanceViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ArMonitor {
  static constexpr double kTolerance = 1e-10;

  std::uint64_t proposals = 0;
  std::uint64_t violations = 0;
  double max_ratio = 0.0;
  bool strict = false;
  std::string worst_site;

  void record(double ratio, const char* site) {
    if (std::isnan(ratio)) throw SamplerError(std::string("NaN acceptance ratio at ") + site);
    ++proposals;
    if (ratio > max_ratio) {
      max_ratio = ratio;
      if (ratio > 1.0 + kTolerance) worst_site = site;
    }
    if (ratio > 1.0 + kTolerance) {
      ++violations;
      if (strict) {
        std::ostringstream os;
        os << "envelope dominance violated at " << site << ": ratio " << ratio;
        throw DominanceViolation(os.str());
      }
    }
  }

  void reset() {
    const bool s = strict;
    *this = ArMonitor{};
    strict = s;
  }
};

inline ArMonitor& ar_monitor() {
  thread_local ArMonitor m;
  return m;
}

}  // namespace fpss
