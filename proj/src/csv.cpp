#include "subnorm/csv.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "subnorm/errors.hpp"

namespace subnorm {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

bool parse_double(const std::string& tok, double& out) {
  const char* b = tok.data();
  const char* e = tok.data() + tok.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  while (e > b && (*(e - 1) == ' ' || *(e - 1) == '\t')) --e;
  if (b == e) return false;
  auto [ptr, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && ptr == e;
}

std::vector<std::vector<double>> read_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open CSV file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto toks = split_line(line);
    std::vector<double> row(toks.size());
    bool numeric = true;
    for (size_t i = 0; i < toks.size(); ++i)
      if (!parse_double(toks[i], row[i])) {
        numeric = false;
        break;
      }
    if (!numeric) {
      if (first) {  // header row
        first = false;
        continue;
      }
      throw ArgumentError("non-numeric CSV row in " + path + ": " + line);
    }
    first = false;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

Matrix read_csv_matrix(const std::string& path) {
  auto rows = read_rows(path);
  if (rows.empty()) throw ArgumentError("empty CSV file: " + path);
  const size_t cols = rows[0].size();
  for (const auto& r : rows)
    if (r.size() != cols) throw ArgumentError("ragged CSV rows in " + path);
  Matrix m(static_cast<int>(rows.size()), static_cast<int>(cols));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < cols; ++j) m(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
  return m;
}

Vector read_csv_vector(const std::string& path) {
  auto rows = read_rows(path);
  Vector v;
  for (const auto& r : rows) v.insert(v.end(), r.begin(), r.end());
  return v;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw ArgumentError("cannot write file: " + tmp.string());
    out << content;
    if (!out.good()) throw DiagnosticError("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

void write_csv_matrix(const std::string& path, const Matrix& m,
                      const std::vector<std::string>& header) {
  std::ostringstream os;
  if (!header.empty()) {
    for (size_t j = 0; j < header.size(); ++j) os << (j ? "," : "") << header[j];
    os << "\n";
  }
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) os << (j ? "," : "") << format_double(m(i, j));
    os << "\n";
  }
  write_text_atomic(path, os.str());
}

void write_csv_vector(const std::string& path, const Vector& v, const std::string& header) {
  std::ostringstream os;
  if (!header.empty()) os << header << "\n";
  for (double x : v) os << format_double(x) << "\n";
  write_text_atomic(path, os.str());
}

}  // namespace subnorm
