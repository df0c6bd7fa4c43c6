#pragma once

#include <istream>
#include <string>
#include <vector>

#include "mprk/linalg.hpp"

namespace mprk {

/// Shortest decimal string that round-trips the double exactly (at most 17
/// significant digits). Identical inputs always produce identical bytes.
std::string format_double(double v);

/// Parses an N x N rate matrix from plain-text CSV: N rows of N
/// comma-separated decimal entries, no header. Throws ValidationError with
/// the offending location for ragged, non-square, or non-numeric input.
Matrix read_matrix_csv(std::istream& in, const std::string& source_name = "<stream>");
Matrix read_matrix_csv_file(const std::string& path);

/// Comma-separated list of doubles (used for --y0 and --dt-list flags).
std::vector<double> parse_double_list(const std::string& text, const char* what);

}  // namespace mprk
