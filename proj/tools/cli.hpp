#pragma once

#include "comac/experiments.hpp"
#include "comac/numerics.hpp"
#include "comac/rates.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace comac::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // self-test or computation failure
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

class UsageError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// --help was requested; what() holds the help text.
class HelpRequested : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class Command { Rates, Power, Partition, Experiment, Selftest };

struct RunConfig {
  Command command = Command::Rates;
  SimParams params;
  double snr_db = 10.0;
  unsigned threads = 1;

  std::vector<RateFamily> families;  // rates
  std::string out;                   // output file, empty for stdout
  std::string mu_out;                // power: per-node diagnostics
  int symbols = 1;                   // power
  std::uint64_t trial = 0;           // power: channel realization index
  std::optional<std::uint64_t> slots;  // partition: sub-carrier slots n
  bool list = false;                   // partition: enumerate combinations
  std::uint64_t cap = 1000000;         // partition: enumeration cap
  SweepSpec sweep;                     // experiment
};

/// key=value lines with '#' comments; blank lines ignored. Keys are the long
/// flag names without dashes. Throws UsageError on malformed lines.
std::map<std::string, std::string> parse_config_text(const std::string& text);

/// Parses argv (argv[0] is the program name). Values from --config FILE are
/// applied first and overridden by flags; unknown keys are rejected.
/// Throws UsageError, HelpRequested or IoError (unreadable config file).
RunConfig parse_config(int argc, const char* const* argv);

/// Executes a parsed configuration, writing results to `out` (or to the
/// configured file) and progress to `err`. Returns an exit code.
int execute(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_config + execute with every error mapped onto the exit-code contract.
int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace comac::cli
