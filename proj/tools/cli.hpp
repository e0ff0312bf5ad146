#ifndef SGFL_TOOLS_CLI_HPP
#define SGFL_TOOLS_CLI_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sgfl/types.hpp"

namespace sgfl::cli {

#ifndef SGFL_VERSION
#define SGFL_VERSION "0.0.0"
#endif

inline constexpr const char* kToolName = "sgfl";
inline constexpr const char* kToolVersion = SGFL_VERSION;

/// Bad configuration or command line; maps to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Raw `key = value` pairs in file order. `#` starts a comment, blank
/// lines are skipped. Duplicate keys: the last one wins.
std::vector<std::pair<std::string, std::string>> parse_key_values(const std::string& text);

/// Fully resolved experiment configuration: every known key has a value.
struct ExperimentConfig {
  std::map<std::string, std::string> values;

  const std::string& preset() const { return values.at("preset"); }
  const std::string& str(const std::string& key) const;
  int integer(const std::string& key) const;
  double real(const std::string& key) const;
  bool boolean(const std::string& key) const;
  std::uint64_t seed() const;
  std::vector<double> reals(const std::string& key) const;
  std::vector<int> integers(const std::string& key) const;
  std::vector<std::string> words(const std::string& key) const;

  /// "key = value" lines, keys sorted.
  std::vector<std::string> lines() const;
};

/// Names of all accepted keys.
std::vector<std::string> known_keys();

/// Applies the preset defaults, then `overrides` in order, then checks
/// every value. `seed_fallback` is used when no override sets `seed`.
/// Throws ConfigError naming the offending key.
ExperimentConfig resolve_config(const std::vector<std::pair<std::string, std::string>>& overrides,
                                std::optional<std::string> seed_fallback = std::nullopt);

/// Comma-separated CSV line; fields with commas, quotes or line breaks are
/// quoted.
std::string csv_line(const std::vector<std::string>& fields);
/// %.17g
std::string fmt(double v);

/// Git blob hash: SHA-1 of "blob <size>\0" followed by the content.
std::string git_blob_sha1(const std::string& content);

/// Files produced by a preset, before writing.
struct RunOutput {
  std::vector<std::string> csv_header;
  std::vector<std::vector<std::string>> csv_rows;
  std::vector<std::string> summary;
  /// Input name -> content, hashed into meta.txt.
  std::map<std::string, std::string> inputs;
  /// Extra resolved facts (e.g. the graph seed actually used).
  std::vector<std::string> notes;
};

/// Runs the preset of `cfg` with at most `threads` Monte Carlo workers.
RunOutput execute_preset(const ExperimentConfig& cfg, int threads);

/// Writes results.csv, summary.txt and meta.txt into `dir` (created if
/// missing).
void write_run_output(const std::string& dir, const ExperimentConfig& cfg, const RunOutput& out);

/// Text of --help for the run subcommand: presets, keys and CSV columns.
std::string run_help();

/// Entry point shared by the executable and the tests.
int main(int argc, char** argv);

}  // namespace sgfl::cli

#endif  // SGFL_TOOLS_CLI_HPP
