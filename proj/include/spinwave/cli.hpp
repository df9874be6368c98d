#pragma once

// Command-line front end. Every command reads one JSON config and writes
// CSV/JSON files into an output directory.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace spinwave::cli {

using nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

inline constexpr const char* kCommands[] = {"ensemble", "coupling-map", "gamma", "dynamics",
                                             "spectrum", "cascade",      "g2"};

struct Invocation {
  std::string command;
  std::filesystem::path config;
  std::filesystem::path out = ".";
  unsigned threads = 1;
  std::vector<std::string> sweeps;  // key=v1,v2,...
};

/// Reads and validates a config file. Relative paths inside it are resolved
/// against the config file's directory.
json load_config(const std::filesystem::path& path);

/// Throws InvalidArgument on unknown keys, missing seed or bad values.
void validate_config(const json& config);

/// Sorted keys, shortest round-trip floats, no whitespace.
std::string canonical_json(const json& config);
std::uint64_t config_hash(const json& config);

struct SweepAxis {
  std::string key;  // dotted path, e.g. geometry.radius_um
  std::vector<json> values;
};
SweepAxis parse_sweep(const std::string& spec, const json& config);

/// Config for sweep point `index` (row-major over the axes). The seed is
/// replaced by derive_seed(seed, index) unless `seed` itself is swept.
json sweep_point(const json& base, const std::vector<SweepAxis>& axes, std::size_t index);

/// Runs one command on a validated config and writes its files into `out`.
/// Nothing is written unless the whole computation succeeds. Returns the
/// file names written.
std::vector<std::string> run_command(const std::string& command, const json& config,
                 const std::filesystem::path& out, unsigned threads, std::ostream& log);

/// Full invocation including sweeps and run.json; maps errors to exit codes.
int execute(const Invocation& inv, std::ostream& log);

/// argv entry point used by the `spinwave` executable.
int main(int argc, const char* const* argv);

}  // namespace spinwave::cli
