#include "csgd/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include "csgd/csv.hpp"
#include "csgd/errors.hpp"
#include "csgd/rng.hpp"

namespace csgd {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_field(std::string_view field, std::size_t line_no) {
  field = trim(field);
  double value = 0.0;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc{} || ptr != end || field.empty()) {
    throw DataError("line " + std::to_string(line_no) +
                    ": not a number: '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file: " + path);

  Dataset data;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view rest = trim(line);
    if (rest.empty()) continue;

    std::vector<double> fields;
    while (true) {
      const std::size_t comma = rest.find(',');
      fields.push_back(parse_field(rest.substr(0, comma), line_no));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() < 2) {
      throw DataError("line " + std::to_string(line_no) +
                      ": need at least one feature and a label");
    }
    if (data.rows == 0) {
      data.dim = fields.size() - 1;
    } else if (fields.size() - 1 != data.dim) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(data.dim + 1) + " columns, got " +
                      std::to_string(fields.size()));
    }
    data.features.insert(data.features.end(), fields.begin(),
                         fields.end() - 1);
    data.labels.push_back(fields.back());
    ++data.rows;
  }
  if (data.rows == 0) throw DataError("empty dataset: " + path);
  return data;
}

void save_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write dataset file: " + path);
  std::ostringstream buf;
  for (std::size_t i = 0; i < data.rows; ++i) {
    const auto row = data.row(i);
    for (double v : row) buf << format_double(v) << ',';
    buf << format_double(data.labels[i]) << '\n';
  }
  out << buf.str();
  if (!out) throw DataError("failed writing dataset file: " + path);
}

Dataset synthetic_logistic(std::size_t rows, std::size_t dim,
                           std::uint64_t seed) {
  if (rows == 0 || dim == 0) {
    throw ParameterError("synthetic dataset needs rows >= 1 and dim >= 1");
  }
  Dataset data;
  data.rows = rows;
  data.dim = dim;
  data.features.resize(rows * dim);
  data.labels.resize(rows);

  // Hidden ground-truth weights live in their own stream so that changing
  // the row count never changes them.
  rng::Stream wstream(rng::stream_key(seed, rng::Purpose::dataset, 0, 1));
  std::vector<double> hidden(dim);
  for (auto& h : hidden) h = wstream.gaussian();

  for (std::size_t i = 0; i < rows; ++i) {
    rng::Stream row_stream(rng::stream_key(seed, rng::Purpose::dataset, i, 0));
    double logit = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      const double a = row_stream.gaussian();
      data.features[i * dim + j] = a;
      logit += a * hidden[j];
    }
    const double p = 1.0 / (1.0 + std::exp(-logit));
    data.labels[i] = row_stream.uniform() < p ? 1.0 : 0.0;
  }
  return data;
}

}  // namespace csgd
