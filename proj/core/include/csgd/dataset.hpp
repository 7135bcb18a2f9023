#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "csgd/vec.hpp"

namespace csgd {

// Dense binary-classification dataset. Row-major features, labels in {0,1}.
struct Dataset {
  std::size_t rows = 0;
  std::size_t dim = 0;  // feature count; the label column is not included
  std::vector<double> features;
  std::vector<double> labels;

  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * dim, dim};
  }
};

// Headerless CSV, one record per line, label in the last column.
Dataset load_csv(const std::string& path);
void save_csv(const Dataset& data, const std::string& path);

// Synthetic logistic data: standard normal features, labels drawn from a
// logistic model with a hidden weight vector. Deterministic in the seed.
Dataset synthetic_logistic(std::size_t rows, std::size_t dim,
                           std::uint64_t seed);

}  // namespace csgd
