#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace svmm::cli {

// simulate, compare, frontier, trading-curve, hjb, price-option, option-mm
const std::vector<std::string>& subcommands();

struct Invocation {
  std::string subcommand;
  std::optional<std::filesystem::path> config_file;
  // "section.key" -> value, applied after the config file in order.
  std::vector<std::pair<std::string, std::string>> overrides;
};

struct RunResult {
  int exit_code = 0;  // 0 ok, 2 config error, 3 numerical failure, 1 other
  std::vector<std::filesystem::path> files;
  std::string message;
};

// Resolves defaults < config file < overrides, runs the subcommand and writes
// `<subcommand>-<timestamp>-<seed>[-part].csv` plus a `.manifest` holding the
// resolved configuration into run.out. On failure every file written by this
// run is removed.
RunResult run(const Invocation& invocation, std::ostream& log);

// Command-line front end.
int main(int argc, const char* const* argv);

}  // namespace svmm::cli
