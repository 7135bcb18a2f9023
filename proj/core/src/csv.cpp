#include "csgd/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "csgd/errors.hpp"

namespace csgd {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;  // 40 bytes always fit the shortest form
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const std::vector<RunResult>& results) {
  std::vector<const RunResult*> order;
  order.reserve(results.size());
  for (const auto& r : results) order.push_back(&r);
  std::sort(order.begin(), order.end(),
            [](const RunResult* a, const RunResult* b) {
              const auto an = variant_name(a->variant);
              const auto bn = variant_name(b->variant);
              if (an != bn) return an < bn;
              return a->seed < b->seed;
            });

  out << kCsvHeader << '\n';
  for (const RunResult* r : order) {
    const auto name = variant_name(r->variant);
    for (const auto& rec : r->rounds) {
      out << name << ',' << r->seed << ',' << rec.iteration << ','
          << format_double(rec.loss) << ',' << format_double(rec.grad_norm)
          << ',' << rec.uploads << ',' << rec.cum_uploads << ','
          << rec.cum_samples << ',' << format_double(rec.threshold) << ','
          << format_double(rec.lyapunov) << '\n';
    }
  }
}

void write_csv_file(const std::string& path,
                    const std::vector<RunResult>& results) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write csv file: " + path);
  write_csv(out, results);
  if (!out) throw Error("failed writing csv file: " + path);
}

}  // namespace csgd
