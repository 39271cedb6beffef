#include "cli.hpp"

#include "comac/combinatorics.hpp"
#include "comac/csv.hpp"
#include "comac/power.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>

namespace comac::cli {

namespace {

const std::set<std::string> kRateKeys = {"seed", "trials", "gamma-trials", "threads", "snr-db", "power",
                                         "k",    "m",      "n",            "family",  "out"};
const std::set<std::string> kPowerKeys = {"seed", "threads", "snr-db", "power", "k",     "m",
                                          "n",    "symbols", "trial",  "out",   "mu-out"};
const std::set<std::string> kPartitionKeys = {"k", "m", "slots", "list", "cap"};
const std::set<std::string> kExperimentKeys = {"seed",   "trials",   "gamma-trials", "threads", "k-list",
                                               "m-list", "n-list",   "snr-list",     "families", "out",
                                               "max-k",  "max-trials"};
const std::set<std::string> kSelftestKeys = {"seed", "threads"};

const std::set<std::string>& keys_for(Command command) {
  switch (command) {
    case Command::Rates: return kRateKeys;
    case Command::Power: return kPowerKeys;
    case Command::Partition: return kPartitionKeys;
    case Command::Experiment: return kExperimentKeys;
    case Command::Selftest: return kSelftestKeys;
  }
  return kRateKeys;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
T to_integer(const std::string& key, const std::string& text) {
  T value{};
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size() || text.empty()) {
    throw UsageError("--" + key + ": expected an integer, got '" + text + "'");
  }
  return value;
}

double to_double(const std::string& key, const std::string& text) {
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size() || text.empty() || !std::isfinite(value)) {
    throw UsageError("--" + key + ": expected a number, got '" + text + "'");
  }
  return value;
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw UsageError("--" + key + ": expected true or false, got '" + text + "'");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
std::vector<T> to_integer_list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) out.push_back(to_integer<T>(key, item));
  if (out.empty()) throw UsageError("--" + key + ": empty list");
  return out;
}

std::vector<RateFamily> to_families(const std::string& key, const std::string& text) {
  if (text == "all") return {std::begin(kAllFamilies), std::end(kAllFamilies)};
  std::vector<RateFamily> out;
  for (const auto& item : split_list(text)) {
    const auto family = parse_family(item);
    if (!family) {
      throw UsageError("--" + key + ": unknown family '" + item +
                       "' (conventional, opportunistic, direct-ofdm, sfa-avg, sfa-opa, all)");
    }
    out.push_back(*family);
  }
  if (out.empty()) throw UsageError("--" + key + ": empty list");
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void require_divisible(int K, int M) {
  if (M < 1 || M > K) throw UsageError("need 1 <= M <= K (got K = " + std::to_string(K) + ", M = " +
                                       std::to_string(M) + ")");
  if (K % M != 0) {
    throw UsageError("M = " + std::to_string(M) + " does not divide K = " + std::to_string(K) +
                     ": sub-function allocation needs B = K/M whole sub-functions");
  }
}

// Applies the merged key/value map onto a default configuration.
RunConfig build(Command command, const std::map<std::string, std::string>& values, const std::string& figure) {
  RunConfig config;
  config.command = command;
  config.params.K = 16;
  config.params.M = 4;
  config.params.N = 4;
  config.params.trials = 10000;

  const auto& allowed = keys_for(command);
  for (const auto& [key, value] : values) {
    if (!allowed.count(key)) throw UsageError("unknown key '" + key + "' for this command");
  }
  auto has = [&](const char* key) { return values.count(key) > 0; };
  auto get = [&](const char* key) { return values.at(key); };

  if (has("seed")) config.params.seed = to_integer<std::uint64_t>("seed", get("seed"));
  if (has("trials")) config.params.trials = to_integer<std::uint64_t>("trials", get("trials"));
  if (has("gamma-trials")) config.params.gamma_trials = to_integer<std::uint64_t>("gamma-trials", get("gamma-trials"));
  if (has("threads")) config.threads = to_integer<unsigned>("threads", get("threads"));
  if (has("k")) config.params.K = to_integer<int>("k", get("k"));
  if (has("m")) config.params.M = to_integer<int>("m", get("m"));
  if (has("n")) config.params.N = to_integer<int>("n", get("n"));
  if (has("snr-db") && has("power")) throw UsageError("--snr-db and --power are mutually exclusive");
  if (has("snr-db")) config.snr_db = to_double("snr-db", get("snr-db"));
  if (has("power")) {
    const double p = to_double("power", get("power"));
    if (!(p > 0.0)) throw UsageError("--power must be positive");
    config.snr_db = linear_to_db(p);
    config.params.power = p;
  } else {
    config.params.power = db_to_linear(config.snr_db);
  }
  if (config.params.trials < 1) throw UsageError("--trials must be positive");
  if (config.params.gamma_trials < 1) throw UsageError("--gamma-trials must be positive");
  if (has("out")) config.out = get("out");

  switch (command) {
    case Command::Rates: {
      config.families = has("family") ? to_families("family", get("family")) : std::vector{RateFamily::SfaAvg};
      if (config.params.K < 1 || config.params.N < 1) throw UsageError("--k and --n must be positive");
      const bool partition = std::any_of(config.families.begin(), config.families.end(), needs_partition);
      if (partition) require_divisible(config.params.K, config.params.M);
      break;
    }
    case Command::Power:
      if (has("symbols")) config.symbols = to_integer<int>("symbols", get("symbols"));
      if (has("trial")) config.trial = to_integer<std::uint64_t>("trial", get("trial"));
      if (has("mu-out")) config.mu_out = get("mu-out");
      if (config.symbols < 1) throw UsageError("--symbols must be positive");
      if (config.params.K < 1 || config.params.N < 1) throw UsageError("--k and --n must be positive");
      if (config.params.M < 1 || config.params.M > config.params.K) throw UsageError("need 1 <= M <= K");
      break;
    case Command::Partition:
      if (has("slots")) config.slots = to_integer<std::uint64_t>("slots", get("slots"));
      if (has("list")) config.list = to_bool("list", get("list"));
      if (has("cap")) config.cap = to_integer<std::uint64_t>("cap", get("cap"));
      if (config.params.K < 1) throw UsageError("--k must be positive");
      require_divisible(config.params.K, config.params.M);
      if (config.slots && *config.slots == 0) throw UsageError("--slots must be positive");
      break;
    case Command::Experiment: {
      const auto fig = parse_figure(figure);
      if (!fig) throw UsageError("unknown figure '" + figure + "' (fig4, fig5, fig6, fig7, custom)");
      SweepSpec& spec = config.sweep;
      spec = default_sweep(*fig);
      spec.seed = config.params.seed;
      if (has("trials")) spec.trials = config.params.trials;
      if (has("gamma-trials")) spec.gamma_trials = config.params.gamma_trials;
      if (has("max-k")) spec.max_K = to_integer<int>("max-k", get("max-k"));
      if (has("max-trials")) spec.max_trials = to_integer<std::uint64_t>("max-trials", get("max-trials"));
      if (has("k-list")) spec.K_values = to_integer_list<int>("k-list", get("k-list"));
      if (has("m-list")) spec.M_values = to_integer_list<int>("m-list", get("m-list"));
      if (has("n-list")) spec.N_values = to_integer_list<int>("n-list", get("n-list"));
      if (has("snr-list")) {
        spec.snr_db.clear();
        for (const auto& item : split_list(get("snr-list"))) spec.snr_db.push_back(to_double("snr-list", item));
      }
      if (has("families")) spec.families = to_families("families", get("families"));
      spec.exec.threads = config.threads;
      try {
        spec.validate();
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      break;
    }
    case Command::Selftest: break;
  }
  return config;
}

void emit(const RunConfig& config, std::ostream& out, const std::string& text) {
  if (config.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(config.out, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open '" + config.out + "' for writing");
  file << text;
  file.flush();
  if (!file) throw IoError("write to '" + config.out + "' failed");
}

int run_rates(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const Execution exec{config.threads};
  std::vector<ResultRow> rows;
  for (RateFamily family : config.families) {
    SimParams params = config.params;
    if (uses_all_nodes(family)) params.M = params.K;
    const auto start = std::chrono::steady_clock::now();
    const RateEstimate est = estimate_rate(family, params, exec);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ResultRow row;
    row.family = std::string(family_name(family));
    row.K = params.K;
    row.M = params.M;
    row.N = params.N;
    row.snr_db = config.snr_db;
    row.rate = est.mean;
    row.std_error = est.std_error;
    row.trials = est.trials;
    row.wall_seconds = seconds;
    err << row.family << ": " << format_number(est.mean) << " +/- " << format_number(est.std_error) << " ("
        << format_number(seconds) << " s)\n";
    rows.push_back(std::move(row));
  }
  std::ostringstream text;
  write_rate_rows(text, rows);
  emit(config, out, text.str());
  return kExitOk;
}

int run_power(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const SimParams& p = config.params;
  const ChannelTensor channel = draw_channel(p, config.symbols, config.trial);
  std::vector<PowerDiagnosticRow> rows;
  std::vector<NodeDiagnosticRow> nodes;
  for (int m = 0; m < config.symbols; ++m) {
    const GainMatrix gains = channel.gains(m);
    const AssignmentMatrix omega = build_assignment(gains, p.M);
    const PowerSolution sol = sponge_squeeze(gains, omega, p);
    const auto usage = node_usage(gains, omega, sol.eta);
    for (int g = 0; g < p.N; ++g) {
      rows.push_back({m, g, sol.eta[g], sol.residuals.feasibility, sol.residuals.slackness,
                      sol.residuals.stationarity, sol.residuals.max_power_gap});
    }
    for (int i = 0; i < p.K; ++i) nodes.push_back({m, i, sol.mu[i], usage[i]});
    err << "symbol " << m << ": rate " << format_number(sol.objective) << ", sweeps " << sol.iterations
        << (sol.residuals.pass ? ", KKT ok\n" : ", KKT residuals above tolerance\n");
  }
  std::ostringstream text;
  write_power_rows(text, rows);
  emit(config, out, text.str());
  if (!config.mu_out.empty()) {
    std::ostringstream node_text;
    write_node_rows(node_text, nodes);
    std::ofstream file(config.mu_out, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open '" + config.mu_out + "' for writing");
    file << node_text.str();
    if (!file) throw IoError("write to '" + config.mu_out + "' failed");
  }
  return kExitOk;
}

int run_partition(const RunConfig& config, std::ostream& out) {
  const int K = config.params.K;
  const int M = config.params.M;
  std::ostringstream text;
  text << "K=" << K << "\nM=" << M << "\nB=" << K / M << '\n';
  text << "subfunction_sets=" << count_subfunction_sets(K, M) << '\n';
  text << "combinations=" << count_combinations(K, M) << '\n';
  if (config.slots) {
    const auto share = expected_subcarrier_share(BigInt(*config.slots), K, M);
    text << "subcarriers_per_subfunction=" << share.per_subfunction << '\n';
    text << "subcarriers_per_combination=" << share.per_combination << '\n';
  }
  if (config.list) {
    for (const auto& combination : enumerate_combinations(K, M, config.cap)) {
      for (std::size_t b = 0; b < combination.size(); ++b) {
        if (b > 0) text << " | ";
        for (std::size_t j = 0; j < combination[b].size(); ++j) {
          text << (j > 0 ? " " : "") << combination[b][j] + 1;
        }
      }
      text << '\n';
    }
  }
  emit(config, out, text.str());
  return kExitOk;
}

int run_experiment(const RunConfig& config, std::ostream& out, std::ostream& err) {
  SweepSpec spec = config.sweep;
  std::ostringstream text;
  if (spec.figure == Figure::Fig5) {
    const auto rows = run_optimal_b(spec);
    for (const auto& r : rows) {
      err << "K=" << r.K << " N=" << r.N << ": B*=" << r.B_opt << " rate " << format_number(r.rate) << '\n';
    }
    write_optimal_b_rows(text, rows);
  } else {
    spec.on_row = [&err](const ResultRow& r) {
      err << r.family << " K=" << r.K << " M=" << r.M << " N=" << r.N << " P_dB=" << format_number(r.snr_db)
          << ": ";
      if (r.status.empty()) {
        err << format_number(r.rate) << " +/- " << format_number(r.std_error);
      } else {
        err << "error: " << r.status;
      }
      err << " (" << format_number(r.wall_seconds) << " s)\n";
    };
    write_rate_rows(text, run_sweep(spec));
  }
  emit(config, out, text.str());
  return kExitOk;
}

int run_selftest_command(const RunConfig& config, std::ostream& out) {
  const auto report = run_selftest(config.params.seed, Execution{config.threads});
  for (const auto& check : report.checks) {
    out << (check.pass ? "PASS " : "FAIL ") << check.name << ": " << check.detail << '\n';
  }
  out << (report.pass() ? "selftest passed\n" : "selftest FAILED\n");
  return report.pass() ? kExitOk : kExitFailure;
}

}  // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> values;
  std::stringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(number) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw UsageError("config line " + std::to_string(number) + ": empty key");
    values[key] = value;
  }
  return values;
}

namespace {

std::string option_help(const std::string& key) {
  static const std::map<std::string, std::string> text = {
      {"seed", "master RNG seed"},
      {"trials", "Monte Carlo trials per point"},
      {"gamma-trials", "trials for the power-normalization expectation"},
      {"threads", "worker threads (results do not depend on it)"},
      {"snr-db", "transmit SNR P in dB (default 10)"},
      {"power", "transmit power P, linear (exclusive with --snr-db)"},
      {"k", "number of nodes K"},
      {"m", "nodes per sub-function M (must divide K for partition families)"},
      {"n", "number of sub-carriers N"},
      {"family", "comma list: conventional, opportunistic, direct-ofdm, sfa-avg, sfa-opa"},
      {"families", "comma list of rate families"},
      {"out", "output CSV path (default stdout)"},
      {"mu-out", "per-node multiplier CSV path"},
      {"symbols", "OFDM symbols to solve"},
      {"trial", "channel realization index"},
      {"slots", "sub-carrier slots n for the expected shares"},
      {"cap", "enumeration cap for --list"},
      {"k-list", "comma list of K"},
      {"m-list", "comma list of M (empty: best divisor)"},
      {"n-list", "comma list of N"},
      {"snr-list", "comma list of SNR values in dB"},
      {"max-k", "largest K accepted"},
      {"max-trials", "largest trial count accepted"},
  };
  const auto it = text.find(key);
  return it == text.end() ? std::string{} : it->second;
}

}  // namespace

RunConfig parse_config(int argc, const char* const* argv) {
  CLI::App app{"Wide-band over-the-air computation rates, power allocation and sweeps", "comac"};
  app.require_subcommand(1);

  struct Sub {
    Command command;
    CLI::App* app;
    std::map<std::string, std::string> values;
    std::string config_path;
    std::string figure;
    bool list = false;
  };
  std::vector<std::unique_ptr<Sub>> subs;
  auto add = [&](Command command, const char* name, const char* help) {
    auto sub = std::make_unique<Sub>();
    sub->command = command;
    sub->app = app.add_subcommand(name, help);
    sub->app->add_option("--config", sub->config_path, "key = value file; flags override it");
    for (const auto& key : keys_for(command)) {
      if (key == "list") {
        sub->app->add_flag("--list", sub->list, "enumerate every combination");
      } else {
        sub->app->add_option("--" + key, sub->values[key], option_help(key));
      }
    }
    if (command == Command::Experiment) {
      sub->app->add_option("figure", sub->figure, "fig4, fig5, fig6, fig7 or custom")->required();
    }
    subs.push_back(std::move(sub));
  };
  add(Command::Rates, "rates", "estimate average computation rates");
  add(Command::Power, "power", "optimal per-symbol power allocation with KKT diagnostics");
  add(Command::Partition, "partition", "sub-function counts and sub-carrier shares");
  add(Command::Experiment, "experiment", "run a named sweep and write CSV");
  add(Command::Selftest, "selftest", "run the invariant self-test suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    for (const auto& sub : subs) {
      if (sub->app->parsed()) throw HelpRequested(sub->app->help());
    }
    throw HelpRequested(app.help());
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested(app.help("", CLI::AppFormatMode::All));
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  for (const auto& sub : subs) {
    if (!sub->app->parsed()) continue;
    std::map<std::string, std::string> merged;
    if (!sub->config_path.empty()) merged = parse_config_text(read_file(sub->config_path));
    for (const auto& key : keys_for(sub->command)) {
      if (key == "list") {
        if (sub->app->count("--list") > 0) merged[key] = sub->list ? "true" : "false";
      } else if (sub->app->count("--" + key) > 0) {
        merged[key] = sub->values[key];
      }
    }
    return build(sub->command, merged, sub->figure);
  }
  throw UsageError("a command is required");
}

int execute(const RunConfig& config, std::ostream& out, std::ostream& err) {
  switch (config.command) {
    case Command::Rates: return run_rates(config, out, err);
    case Command::Power: return run_power(config, out, err);
    case Command::Partition: return run_partition(config, out);
    case Command::Experiment: return run_experiment(config, out, err);
    case Command::Selftest: return run_selftest_command(config, out);
  }
  return kExitUsage;
}

int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig config = parse_config(argc, argv);
    return execute(config, out, err);
  } catch (const HelpRequested& help) {
    out << help.what();
    return kExitOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const EnumerationTooLarge& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace comac::cli
