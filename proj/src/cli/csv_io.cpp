#include "lwshrink/cli.hpp"

#include "lwshrink/experiments.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace lwshrink::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Rows of numbers; blank lines are skipped. Row/column numbers in errors
// are 1-based file positions.
std::vector<std::vector<double>> read_rows(std::istream& in, bool has_header) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (has_header && line_no == 1) continue;
    std::vector<double> row;
    std::size_t column = 0;
    std::string_view rest = line;
    while (true) {
      ++column;
      const auto comma = rest.find(',');
      const std::string_view cell = trim(rest.substr(0, comma));
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
        throw InputError("line " + std::to_string(line_no) + ", column " + std::to_string(column) +
                         ": not a finite number: '" + std::string(cell) + "'");
      }
      row.push_back(value);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (width == 0) {
      width = row.size();
    } else if (row.size() != width) {
      throw InputError("line " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                       " columns, found " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError("input contains no data rows");
  return rows;
}

}  // namespace

Matrix read_samples_csv(std::istream& in, bool has_header) {
  const auto rows = read_rows(in, has_header);
  const Index n = static_cast<Index>(rows.size());
  const Index p = static_cast<Index>(rows.front().size());
  Matrix x(p, n);
  for (Index k = 0; k < n; ++k) {
    for (Index i = 0; i < p; ++i) x(i, k) = rows[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
  }
  return x;
}

Matrix read_matrix_csv(std::istream& in) {
  const auto rows = read_rows(in, false);
  const Index p = static_cast<Index>(rows.size());
  if (static_cast<Index>(rows.front().size()) != p) {
    throw InputError("matrix must be square, got " + std::to_string(p) + " rows and " +
                     std::to_string(rows.front().size()) + " columns");
  }
  Matrix m(p, p);
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < p; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return m;
}

void write_matrix_csv(const Matrix& m, std::ostream& out) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

std::string format_scalar(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

}  // namespace lwshrink::cli
