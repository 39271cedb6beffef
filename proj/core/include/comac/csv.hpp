#pragma once

#include "comac/experiments.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace comac {

/// File could not be opened, written or read.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed CSV content; `line()` is 1-based and counts the header.
class CsvParseError : public std::runtime_error {
public:
  CsvParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Decimal with 12 significant digits (printf %.12g).
std::string format_number(double value);

// Rate rows: family,K,M,N,P_dB,rate,stderr,trials,status
inline constexpr const char* kRateHeader = "family,K,M,N,P_dB,rate,stderr,trials,status";
void write_rate_rows(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_rate_rows(std::istream& in);
void write_rate_csv(const std::filesystem::path& path, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_rate_csv(const std::filesystem::path& path);

// Optimal sub-function count rows: K,N,B_opt,rate,stderr
inline constexpr const char* kOptimalBHeader = "K,N,B_opt,rate,stderr";
void write_optimal_b_rows(std::ostream& out, const std::vector<OptimalBRow>& rows);
std::vector<OptimalBRow> read_optimal_b_rows(std::istream& in);
void write_optimal_b_csv(const std::filesystem::path& path, const std::vector<OptimalBRow>& rows);
std::vector<OptimalBRow> read_optimal_b_csv(const std::filesystem::path& path);

// Power diagnostics, one row per (symbol, sub-carrier); the residual columns
// repeat the per-symbol KKT report.
struct PowerDiagnosticRow {
  int symbol = 0;
  int subcarrier = 0;
  double eta = 0.0;
  double feasibility = 0.0;
  double slackness = 0.0;
  double stationarity = 0.0;
  double max_power_gap = 0.0;
};
inline constexpr const char* kPowerHeader = "symbol,subcarrier,eta,feasibility,slackness,stationarity,max_power_gap";
void write_power_rows(std::ostream& out, const std::vector<PowerDiagnosticRow>& rows);

// Multipliers and spent power per node: symbol,node,mu,used_power
struct NodeDiagnosticRow {
  int symbol = 0;
  int node = 0;
  double mu = 0.0;
  double used_power = 0.0;
};
inline constexpr const char* kNodeHeader = "symbol,node,mu,used_power";
void write_node_rows(std::ostream& out, const std::vector<NodeDiagnosticRow>& rows);

/// Splits one CSV record, honouring double-quoted fields.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace comac
