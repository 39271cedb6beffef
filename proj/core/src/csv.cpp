#include "comac/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace comac {

namespace {

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '\n' || c == '\r') {
      out += ' ';
      continue;
    }
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string checked(double value, const char* column, bool nonnegative) {
  if (!std::isfinite(value)) throw std::invalid_argument(std::string("csv: non-finite ") + column);
  if (nonnegative && value < 0.0) throw std::invalid_argument(std::string("csv: negative ") + column);
  return format_number(value);
}

template <class T>
T parse_integer(const std::string& text, std::size_t line, const char* column) {
  T value{};
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw CsvParseError(line, std::string("invalid integer in column ") + column + ": '" + text + "'");
  }
  return value;
}

double parse_double(const std::string& text, std::size_t line, const char* column) {
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size() || !std::isfinite(value)) {
    throw CsvParseError(line, std::string("invalid number in column ") + column + ": '" + text + "'");
  }
  return value;
}

// Reads the header and the data records; every record must have `columns` fields.
std::vector<std::pair<std::size_t, std::vector<std::string>>> read_records(std::istream& in, const char* header,
                                                                          std::size_t columns) {
  std::string line;
  if (!std::getline(in, line)) throw CsvParseError(1, "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw CsvParseError(1, std::string("unexpected header, want '") + header + "'");
  std::vector<std::pair<std::size_t, std::vector<std::string>>> records;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != columns) {
      throw CsvParseError(number, "expected " + std::to_string(columns) + " fields, got " +
                                      std::to_string(fields.size()));
    }
    records.emplace_back(number, std::move(fields));
  }
  if (in.bad()) throw IoError("csv: read failure");
  return records;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace

std::string format_number(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.12g", value);
  return buffer;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back() += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw std::invalid_argument("unterminated quoted field");
  return fields;
}

void write_rate_rows(std::ostream& out, const std::vector<ResultRow>& rows) {
  // Format everything first so a bad row leaves the stream untouched.
  std::ostringstream body;
  body << kRateHeader << '\n';
  for (const auto& r : rows) {
    body << quote(r.family) << ',' << r.K << ',' << r.M << ',' << r.N << ',' << checked(r.snr_db, "P_dB", false)
         << ',' << checked(r.rate, "rate", true) << ',' << checked(r.std_error, "stderr", true) << ',' << r.trials
         << ',' << quote(r.status) << '\n';
  }
  out << body.str();
}

std::vector<ResultRow> read_rate_rows(std::istream& in) {
  std::vector<ResultRow> rows;
  for (auto& [line, f] : read_records(in, kRateHeader, 9)) {
    ResultRow r;
    r.family = f[0];
    if (r.family.empty()) throw CsvParseError(line, "empty family");
    r.K = parse_integer<int>(f[1], line, "K");
    r.M = parse_integer<int>(f[2], line, "M");
    r.N = parse_integer<int>(f[3], line, "N");
    r.snr_db = parse_double(f[4], line, "P_dB");
    r.rate = parse_double(f[5], line, "rate");
    r.std_error = parse_double(f[6], line, "stderr");
    r.trials = parse_integer<std::uint64_t>(f[7], line, "trials");
    r.status = f[8];
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_rate_csv(const std::filesystem::path& path, const std::vector<ResultRow>& rows) {
  std::ostringstream text;
  write_rate_rows(text, rows);
  auto out = open_out(path);
  out << text.str();
  finish(out, path);
}

std::vector<ResultRow> read_rate_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_rate_rows(in);
}

void write_optimal_b_rows(std::ostream& out, const std::vector<OptimalBRow>& rows) {
  std::ostringstream body;
  body << kOptimalBHeader << '\n';
  for (const auto& r : rows) {
    body << r.K << ',' << r.N << ',' << r.B_opt << ',' << checked(r.rate, "rate", true) << ','
         << checked(r.std_error, "stderr", true) << '\n';
  }
  out << body.str();
}

std::vector<OptimalBRow> read_optimal_b_rows(std::istream& in) {
  std::vector<OptimalBRow> rows;
  for (auto& [line, f] : read_records(in, kOptimalBHeader, 5)) {
    OptimalBRow r;
    r.K = parse_integer<int>(f[0], line, "K");
    r.N = parse_integer<int>(f[1], line, "N");
    r.B_opt = parse_integer<int>(f[2], line, "B_opt");
    r.rate = parse_double(f[3], line, "rate");
    r.std_error = parse_double(f[4], line, "stderr");
    rows.push_back(r);
  }
  return rows;
}

void write_optimal_b_csv(const std::filesystem::path& path, const std::vector<OptimalBRow>& rows) {
  std::ostringstream text;
  write_optimal_b_rows(text, rows);
  auto out = open_out(path);
  out << text.str();
  finish(out, path);
}

std::vector<OptimalBRow> read_optimal_b_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_optimal_b_rows(in);
}

void write_power_rows(std::ostream& out, const std::vector<PowerDiagnosticRow>& rows) {
  std::ostringstream body;
  body << kPowerHeader << '\n';
  for (const auto& r : rows) {
    body << r.symbol << ',' << r.subcarrier << ',' << checked(r.eta, "eta", true) << ','
         << checked(r.feasibility, "feasibility", false) << ',' << checked(r.slackness, "slackness", false) << ','
         << checked(r.stationarity, "stationarity", false) << ',' << checked(r.max_power_gap, "max_power_gap", true)
         << '\n';
  }
  out << body.str();
}

void write_node_rows(std::ostream& out, const std::vector<NodeDiagnosticRow>& rows) {
  std::ostringstream body;
  body << kNodeHeader << '\n';
  for (const auto& r : rows) {
    body << r.symbol << ',' << r.node << ',' << checked(r.mu, "mu", true) << ','
         << checked(r.used_power, "used_power", true) << '\n';
  }
  out << body.str();
}

}  // namespace comac
