#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "csgd/engine.hpp"

namespace csgd {

// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);

inline constexpr const char* kCsvHeader =
    "variant,seed,iter,loss,grad_norm,uploads,cum_uploads,cum_samples,"
    "threshold,lyapunov";

// One row per (variant, seed, iteration), sorted by variant name, then
// seed, then iteration, so identical inputs serialize byte-identically.
void write_csv(std::ostream& out, const std::vector<RunResult>& results);
void write_csv_file(const std::string& path,
                    const std::vector<RunResult>& results);

}  // namespace csgd
