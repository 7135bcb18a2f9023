#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "csgd/config.hpp"
#include "csgd/engine.hpp"
#include "csgd/verify.hpp"

namespace csgd::cli {

// All results from expanding a config over its seed list (one variant).
struct RunBatch {
  std::vector<RunResult> results;
  bool diverged = false;
};

RunBatch run_variant_sweep(const Problem& problem, const RunConfig& config,
                           Variant variant);

// All three variants over the config's seed list, in CSV row order.
RunBatch run_compare(const Problem& problem, const RunConfig& config);

// One human-readable line per variant: final mean loss, upload totals.
std::string compare_summary(const RunBatch& batch, const RunConfig& config);

struct VerifyOutcome {
  std::vector<std::string> lines;  // one per check: name, verdict, numbers
  int checks_run = 0;
  int violations = 0;
  int skipped = 0;  // capability skips (check not applicable to setup)
  int exit_code = 0;
};

// checks: subset of {descent, decay, sparsity, mingrad, threshold};
// callers wanting everything pass all five. Exit codes: 0 all pass,
// 1 violation, 2 nothing verified (empty set or capability skips only),
// 3 divergence.
VerifyOutcome run_verify(const RunConfig& config,
                         const std::vector<std::string>& checks);

}  // namespace csgd::cli
