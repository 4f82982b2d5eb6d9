#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "hpmetric/graph.hpp"
#include "hpmetric/types.hpp"

namespace hpm::io {

// Values are written with 17 significant digits so a write/read cycle is exact.
inline constexpr int kPrecision = 17;

struct LabeledMatrix {
  std::vector<std::string> labels;
  Matrix values;
};

// Header row "label,<l_1>,...,<l_n>", then one row per source "<l_i>,v_i1,...".
void write_dense_csv(std::ostream& out, const Matrix& m, const std::vector<std::string>& labels);
LabeledMatrix read_dense_csv(std::istream& in);

// Header "label,<column>", then "<l_i>,v_i".
void write_vector_csv(std::ostream& out, const Vector& v, const std::vector<std::string>& labels,
                      const std::string& column);

// "src,dst,weight" lines, one per stored edge.
void write_edge_list_csv(std::ostream& out, const WeightedDigraph& g);

std::string format_double(double v);

}  // namespace hpm::io
