#pragma once

// Self-check suite behind `cayley verify`. Mandatory checks gate the exit
// status; informational entries (published reference values that the solved
// system does not reproduce, alternate closed forms) are reported only.

#include <cstdint>
#include <string>
#include <vector>

#include "cayley/io.hpp"

namespace cayley {

struct CheckResult {
  std::string name;
  int criterion = 0;  // acceptance criterion number, 0 for none
  bool mandatory = true;
  bool pass = false;
  double value = 0.0;      // worst observed deviation or count
  double tolerance = 0.0;  // threshold applied to value
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 12345;
  std::size_t samples = 100000;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  Json informational = Json::object();

  bool pass() const;  // all mandatory checks pass
  Json to_json() const;
};

VerifyReport run_verify(const VerifyOptions& options = {});

}  // namespace cayley
