#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace rnsim {

/// Shortest round-trip decimal representation (deterministic, locale-free).
std::string format_double(double v);

/// One finished experiment: an id, the configuration snapshot that reproduces
/// it bit-exactly, and CSV-ready metric rows.
struct ExperimentResult {
  std::string id;
  std::string config_json;
  uint64_t seed = 0;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

/// Emits "# experiment/config/seed" metadata lines, a header, and the rows.
/// Output is byte-identical for identical results.
void write_csv(const ExperimentResult& result, std::ostream& out);
void save_csv(const ExperimentResult& result, const std::string& path);

}  // namespace rnsim
