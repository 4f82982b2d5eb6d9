#include "hpmetric/io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "hpmetric/errors.hpp"

namespace hpm::io {

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    out.push_back(field);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_value(const std::string& field, std::size_t line_no) {
  double value = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end) throw ParseError(line_no, "invalid number '" + field + "'");
  return value;
}

}  // namespace

std::string format_double(double v) {
  std::ostringstream ss;
  ss.precision(kPrecision);
  ss << v;
  return ss.str();
}

void write_dense_csv(std::ostream& out, const Matrix& m, const std::vector<std::string>& labels) {
  out << "label";
  for (const auto& l : labels) out << ',' << l;
  out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << labels[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << ',' << format_double(m(i, j));
    out << '\n';
  }
}

LabeledMatrix read_dense_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  LabeledMatrix result;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.front() != '#') break;
  }
  auto header = split_row(line);
  if (header.size() < 2) throw ParseError(line_no, "dense CSV needs a label header");
  result.labels.assign(header.begin() + 1, header.end());
  const auto n = static_cast<Eigen::Index>(result.labels.size());
  result.values.resize(n, n);
  Eigen::Index row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_row(line);
    if (static_cast<Eigen::Index>(fields.size()) != n + 1) throw ParseError(line_no, "wrong number of columns");
    if (row >= n) throw ParseError(line_no, "more rows than header labels");
    if (fields[0] != result.labels[static_cast<std::size_t>(row)]) {
      throw ParseError(line_no, "row label '" + fields[0] + "' does not match header order");
    }
    for (Eigen::Index j = 0; j < n; ++j) result.values(row, j) = parse_value(fields[j + 1], line_no);
    ++row;
  }
  if (row != n) throw ParseError(line_no, "expected " + std::to_string(n) + " rows");
  return result;
}

void write_vector_csv(std::ostream& out, const Vector& v, const std::vector<std::string>& labels,
                      const std::string& column) {
  out << "label," << column << '\n';
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out << labels[static_cast<std::size_t>(i)] << ',' << format_double(v(i)) << '\n';
  }
}

void write_edge_list_csv(std::ostream& out, const WeightedDigraph& g) {
  for (Eigen::Index r = 0; r < g.weights.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(g.weights, r); it; ++it) {
      out << g.labels[r] << ',' << g.labels[it.col()] << ',' << format_double(it.value()) << '\n';
    }
  }
}

}  // namespace hpm::io
