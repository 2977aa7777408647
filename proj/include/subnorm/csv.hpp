#pragma once

#include <string>
#include <vector>

#include "subnorm/linalg.hpp"

namespace subnorm {

// Comma-separated values, '.' decimal point, optional header row (detected:
// first row contains a non-numeric token). Numbers are written with 17
// significant digits so read(write(x)) == x bitwise.

Matrix read_csv_matrix(const std::string& path);
Vector read_csv_vector(const std::string& path);  // any shape, flattened row-major

void write_csv_matrix(const std::string& path, const Matrix& m,
                      const std::vector<std::string>& header = {});
void write_csv_vector(const std::string& path, const Vector& v,
                      const std::string& header = "");

// Write arbitrary text atomically: temp file in the same directory + rename.
void write_text_atomic(const std::string& path, const std::string& content);

std::string format_double(double v);  // 17 significant digits, round-trip safe

}  // namespace subnorm
