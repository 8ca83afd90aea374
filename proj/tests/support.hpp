#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hospsim/engine.hpp"
#include "hospsim/ingest.hpp"

namespace hospsim::test {

namespace fs = std::filesystem;

// Empty directory under the system temp dir, unique to this process.
fs::path scratch_dir(const std::string& name);

std::string read_file(const fs::path& path);
void write_file(const fs::path& path, const std::string& text);

// Synthetic bundle generated once per process and name.
fs::path synthetic_bundle(const std::string& name, const SyntheticSpec& spec);
SyntheticSpec small_spec(std::size_t agents = 4000);

// Hand-written two-county network.
//   counties 1 and 2; facilities 1 UNC (county 1), 2 LARGE (1), 3 SMALL (2), 4 LTACH (2),
//   5 NH (1), 6 NH (2).
struct TinyOptions {
  int stach_non_icu = 10;
  int stach_icu = 4;
  int stach_vent = 2;
  int ltach_beds = 5;
  int nh_beds = 10;
  int agents = 300;
  double departure = 0.01;
  bool cases = false;
  double daily_cases = 5.0;
  int case_days = 60;
  double population_scale = 1.0;
};
fs::path tiny_bundle(const std::string& name, const TinyOptions& options = {});

Bundle load(const fs::path& dir, std::uint64_t seed = 1);

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};
// Runs the hospsim binary with the given argument string (shell-quoted by the caller).
CliResult run_cli(const std::string& args, const std::string& env = "");

}  // namespace hospsim::test
