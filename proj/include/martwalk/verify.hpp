#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "martwalk/montecarlo.hpp"

namespace martwalk {

// Raised when a suite's hypotheses are not met by the requested walk; the
// CLI maps this to a configuration error rather than a VIOLATED verdict.
struct GateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CheckResult {
  std::string name;
  std::string reference;  // which closed-form claim the check probes
  Verdict verdict = Verdict::Inconclusive;
  nlohmann::json details;
  double runtime_seconds = 0.0;
};

struct VerificationReport {
  std::string suite;
  std::uint64_t seed = 0;
  nlohmann::json config;
  std::vector<CheckResult> checks;
  Verdict overall = Verdict::Consistent;
};

struct VerifyOptions {
  RunConfig run;
  long tail_n = 10'000;
  double gamma = 0.45;
  double lambda = 10.0;
  double a = 56.0, b = 1.0, c = 1.0;
  double excited_beta = 0.3;
};

// suite in {exit, thin-rect, tails, transform, lyapunov, all}.
VerificationReport run_suite(const std::string& suite,
                             const std::string& walk_name,
                             const std::vector<double>& walk_params,
                             const VerifyOptions& options);

nlohmann::json report_to_json(const VerificationReport& report,
                              bool include_timing);

std::string report_table(const VerificationReport& report);

}  // namespace martwalk
