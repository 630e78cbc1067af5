#include "rnsim/csv.hpp"

#include <charconv>
#include <fstream>

#include "rnsim/errors.hpp"

namespace rnsim {

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw Error("failed to format a double");
  return std::string(buf, ptr);
}

void write_csv(const ExperimentResult& result, std::ostream& out) {
  out << "# experiment: " << result.id << "\n";
  out << "# config: " << result.config_json << "\n";
  out << "# seed: " << result.seed << "\n";
  for (size_t c = 0; c < result.columns.size(); ++c) {
    out << (c ? "," : "") << result.columns[c];
  }
  out << "\n";
  for (const auto& row : result.rows) {
    for (size_t c = 0; c < row.size(); ++c) {
      out << (c ? "," : "") << row[c];
    }
    out << "\n";
  }
}

void save_csv(const ExperimentResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot create output file: " + path);
  write_csv(result, out);
  if (!out) throw IoError("failed writing output file: " + path);
}

}  // namespace rnsim
