#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <string>

// End-to-end checks of the command-line binary. The test runner exports
// RNSIM_CLI with the binary path; without it these cases are skipped.

namespace {

struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

CommandResult run_command(const std::string& args) {
  const char* cli = std::getenv("RNSIM_CLI");
  REQUIRE(cli != nullptr);
  const std::string cmd = std::string(cli) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CommandResult result;
  std::array<char, 4096> buf;
  size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
    result.output.append(buf.data(), n);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

bool cli_available() { return std::getenv("RNSIM_CLI") != nullptr; }

}  // namespace

TEST_CASE("convert round-trips a value") {
  if (!cli_available()) return;
  const CommandResult r = run_command("convert 23 --moduli 3,5,7");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("residues: 2,3,2") != std::string::npos);
  CHECK(r.output.find("reconstructed: 23") != std::string::npos);
}

TEST_CASE("convert zero") {
  if (!cli_available()) return;
  const CommandResult r = run_command("convert 0 --moduli 3,5,7");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("residues: 0,0,0") != std::string::npos);
}

TEST_CASE("convert rejects non-coprime moduli with exit 2") {
  if (!cli_available()) return;
  const CommandResult r = run_command("convert 23 --moduli 4,6");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("moduli 4 and 6 share factor 2") != std::string::npos);
}

TEST_CASE("convert rejects out-of-range values with exit 2") {
  if (!cli_available()) return;
  const CommandResult r = run_command("convert 99999 --moduli 3,5,7");
  CHECK(r.exit_code == 2);
}

TEST_CASE("convert accepts presets and negative values") {
  if (!cli_available()) return;
  const CommandResult r = run_command("convert -1 --preset rns4");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("residues: 14,13,12,10") != std::string::npos);
}

TEST_CASE("energy summary reports the headline ratio") {
  if (!cli_available()) return;
  const CommandResult r = run_command("energy --b 4 --h 128");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("ratio") != std::string::npos);
  CHECK(r.output.find("168.5") != std::string::npos);
}

TEST_CASE("every subcommand offers --help") {
  if (!cli_available()) return;
  for (const char* sub :
       {"convert", "dotprod-error", "accuracy", "rrns-perr", "energy", "infer"}) {
    const CommandResult r = run_command(std::string(sub) + " --help");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("Usage") != std::string::npos);
  }
}

TEST_CASE("unknown flags exit with code 2") {
  if (!cli_available()) return;
  const CommandResult r = run_command("energy --definitely-not-a-flag");
  CHECK(r.exit_code == 2);
}

TEST_CASE("dotprod-error writes the optional histogram file") {
  if (!cli_available()) return;
  const std::string out = "/tmp/rnsim_dp_test.csv";
  const std::string hist = "/tmp/rnsim_dp_hist_test.csv";
  const CommandResult r = run_command("dotprod-error --b 4 --trials 200 --out " +
                                      out + " --hist " + hist + " --hist-bins 8");
  CHECK(r.exit_code == 0);
  FILE* f = fopen(hist.c_str(), "r");
  REQUIRE(f != nullptr);
  char line[256];
  REQUIRE(fgets(line, sizeof(line), f) != nullptr);
  fclose(f);
  std::remove(out.c_str());
  std::remove(hist.c_str());
}

TEST_CASE("energy accepts the preset form") {
  if (!cli_available()) return;
  const CommandResult r = run_command("energy --preset rns4 --h 128");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("168.5") != std::string::npos);
}

TEST_CASE("config values compose with flags, flags winning") {
  if (!cli_available()) return;
  const std::string path = "/tmp/rnsim_energy_config.json";
  FILE* f = fopen(path.c_str(), "w");
  REQUIRE(f != nullptr);
  fputs("{\"bits\": [8], \"h\": 64}", f);
  fclose(f);
  // h comes from the config; --b overrides the config's bits.
  const CommandResult r = run_command("energy --config " + path + " --b 4");
  CHECK(r.exit_code == 0);
  // b = 4, h = 64: b_out = 13, ratio ~ 42.7; b = 8 must not appear.
  CHECK(r.output.find("b=4 ratio=42.7") != std::string::npos);
  CHECK(r.output.find("b=8") == std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("RNSIM_CONFIG provides a default config path") {
  if (!cli_available()) return;
  const std::string path = "/tmp/rnsim_env_config.json";
  FILE* f = fopen(path.c_str(), "w");
  REQUIRE(f != nullptr);
  fputs("{\"h\": 64}", f);
  fclose(f);
  const char* cli = std::getenv("RNSIM_CLI");
  const std::string cmd =
      "RNSIM_CONFIG=" + path + " " + std::string(cli) + " energy --b 4 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string output;
  std::array<char, 4096> buf;
  size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) output.append(buf.data(), n);
  const int status = pclose(pipe);
  CHECK(WEXITSTATUS(status) == 0);
  CHECK(output.find("b=4 ratio=42.7") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("unknown config keys are rejected") {
  if (!cli_available()) return;
  const std::string path = "/tmp/rnsim_bad_config.json";
  FILE* f = fopen(path.c_str(), "w");
  REQUIRE(f != nullptr);
  fputs("{\"definitely_unknown\": 1}", f);
  fclose(f);
  const CommandResult r = run_command("energy --config " + path);
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("definitely_unknown") != std::string::npos);
  std::remove(path.c_str());
}
