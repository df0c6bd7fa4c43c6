#include "mprk/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace mprk {

std::string format_double(double v) {
    std::array<char, 40> buf;
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

double parse_field(std::string_view field, const std::string& where) {
    const std::string_view t = trim(field);
    double v = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
        throw ValidationError(where + ": cannot parse '" + std::string(field) +
                              "' as a decimal number");
    }
    return v;
}

}  // namespace

Matrix read_matrix_csv(std::istream& in, const std::string& source_name) {
    std::vector<std::vector<double>> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<double> row;
        size_t start = 0;
        int field_no = 0;
        while (true) {
            const size_t comma = line.find(',', start);
            const std::string_view field(line.data() + start,
                                         (comma == std::string::npos ? line.size() : comma) - start);
            ++field_no;
            std::ostringstream where;
            where << source_name << ": line " << line_no << ", field " << field_no;
            row.push_back(parse_field(field, where.str()));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ValidationError(source_name + ": empty matrix file");

    const size_t n = rows.size();
    for (size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n) {
            std::ostringstream os;
            os << source_name << ": non-square matrix, " << n << " rows but row " << (i + 1)
               << " has " << rows[i].size() << " columns";
            throw ValidationError(os.str());
        }
    }

    Matrix m(static_cast<int>(n), static_cast<int>(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) m(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
    return m;
}

Matrix read_matrix_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open matrix file '" + path + "'");
    return read_matrix_csv(in, path);
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
    std::vector<double> values;
    size_t start = 0;
    int field_no = 0;
    while (start <= text.size()) {
        const size_t comma = text.find(',', start);
        const std::string_view field(text.data() + start,
                                     (comma == std::string::npos ? text.size() : comma) - start);
        ++field_no;
        std::ostringstream where;
        where << what << ", entry " << field_no;
        values.push_back(parse_field(field, where.str()));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return values;
}

}  // namespace mprk
