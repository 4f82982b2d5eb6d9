#include "hpmetric/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "hpmetric/errors.hpp"

namespace hpm {

namespace {

std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = std::to_string(i);
  return labels;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

double parse_weight(std::string_view field, std::size_t line_no) {
  double value = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(line_no, "invalid weight '" + std::string(field) + "'");
  }
  if (!std::isfinite(value)) {
    throw DomainError("line " + std::to_string(line_no) + ": non-finite weight");
  }
  if (value < 0.0) {
    throw DomainError("line " + std::to_string(line_no) + ": negative weight " + std::string(field));
  }
  return value;
}

std::size_t parse_index(std::string_view field, std::size_t line_no) {
  std::size_t value = 0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(line_no, "invalid index '" + std::string(field) + "'");
  }
  return value;
}

WeightedDigraph load_csv(std::istream& in) {
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::string> labels;
  std::vector<Eigen::Triplet<double>> edges;
  auto node = [&](std::string_view name) {
    auto [it, inserted] = index.emplace(std::string(name), labels.size());
    if (inserted) labels.emplace_back(name);
    return it->second;
  };

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split(line, ',');
    if (fields.size() < 2 || fields.size() > 3) {
      throw ParseError(line_no, "expected 'src,dst[,weight]'");
    }
    if (fields[0].empty() || fields[1].empty()) throw ParseError(line_no, "empty node identifier");
    const double w = fields.size() == 3 ? parse_weight(fields[2], line_no) : 1.0;
    const auto src = node(fields[0]);
    const auto dst = node(fields[1]);
    edges.emplace_back(static_cast<int>(src), static_cast<int>(dst), w);
  }
  const std::size_t n = labels.size();
  return WeightedDigraph::from_triplets(n, edges, std::move(labels));
}

WeightedDigraph load_matrix_market(std::istream& in) {
  std::string raw;
  std::size_t line_no = 0;
  if (!std::getline(in, raw)) throw ParseError(1, "empty Matrix Market stream");
  ++line_no;
  std::string header = raw;
  std::transform(header.begin(), header.end(), header.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  const auto tokens = split_ws(header);
  if (tokens.size() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" ||
      tokens[2] != "coordinate" || tokens[4] != "general") {
    throw ParseError(line_no, "unsupported Matrix Market header (need 'matrix coordinate real|pattern general')");
  }
  bool pattern = false;
  if (tokens[3] == "pattern") {
    pattern = true;
  } else if (tokens[3] != "real" && tokens[3] != "integer") {
    throw ParseError(line_no, "unsupported Matrix Market field '" + std::string(tokens[3]) + "'");
  }

  std::size_t rows = 0, cols = 0, nnz = 0;
  bool have_size = false;
  std::vector<Eigen::Triplet<double>> edges;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '%') continue;
    const auto fields = split_ws(line);
    if (!have_size) {
      if (fields.size() != 3) throw ParseError(line_no, "expected 'rows cols entries'");
      rows = parse_index(fields[0], line_no);
      cols = parse_index(fields[1], line_no);
      nnz = parse_index(fields[2], line_no);
      if (rows != cols) throw ParseError(line_no, "adjacency matrix must be square");
      have_size = true;
      edges.reserve(nnz);
      continue;
    }
    if (fields.size() != (pattern ? 2u : 3u)) throw ParseError(line_no, "wrong number of fields");
    const auto i = parse_index(fields[0], line_no);
    const auto j = parse_index(fields[1], line_no);
    if (i < 1 || i > rows || j < 1 || j > cols) throw ParseError(line_no, "index out of range");
    const double w = pattern ? 1.0 : parse_weight(fields[2], line_no);
    edges.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1), w);
  }
  if (!have_size) throw ParseError(line_no, "missing size line");
  if (edges.size() != nnz) {
    throw ParseError(line_no, "expected " + std::to_string(nnz) + " entries, found " + std::to_string(edges.size()));
  }
  std::vector<std::string> labels(rows);
  for (std::size_t i = 0; i < rows; ++i) labels[i] = std::to_string(i + 1);
  return WeightedDigraph::from_triplets(rows, edges, std::move(labels));
}

}  // namespace

WeightedDigraph WeightedDigraph::from_dense(const Matrix& weights, std::vector<std::string> labels) {
  if (weights.rows() != weights.cols()) throw DomainError("weight matrix must be square");
  WeightedDigraph g;
  g.labels = labels.empty() ? default_labels(static_cast<std::size_t>(weights.rows())) : std::move(labels);
  if (g.labels.size() != static_cast<std::size_t>(weights.rows())) {
    throw DomainError("label count does not match matrix size");
  }
  g.weights = weights.sparseView(0.0, 0.0);
  g.weights.makeCompressed();
  validate(g);
  return g;
}

WeightedDigraph WeightedDigraph::from_triplets(std::size_t n, const std::vector<Eigen::Triplet<double>>& edges,
                                               std::vector<std::string> labels) {
  WeightedDigraph g;
  g.labels = labels.empty() ? default_labels(n) : std::move(labels);
  if (g.labels.size() != n) throw DomainError("label count does not match node count");
  g.weights.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  g.weights.setFromTriplets(edges.begin(), edges.end());
  g.weights.prune(0.0, 0.0);
  g.weights.makeCompressed();
  validate(g);
  return g;
}

void validate(const WeightedDigraph& g) {
  if (static_cast<std::size_t>(g.weights.rows()) != g.size() ||
      static_cast<std::size_t>(g.weights.cols()) != g.size()) {
    throw DomainError("weight matrix shape does not match label count");
  }
  for (Eigen::Index r = 0; r < g.weights.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(g.weights, r); it; ++it) {
      if (!std::isfinite(it.value())) throw DomainError("non-finite weight on edge " + g.labels[r]);
      if (it.value() < 0.0) throw DomainError("negative weight on edge from " + g.labels[r]);
    }
  }
  std::unordered_set<std::string> seen;
  for (const auto& label : g.labels) {
    if (!seen.insert(label).second) throw DomainError("duplicate node label '" + label + "'");
  }
}

TransitionMatrix::TransitionMatrix(Matrix p, std::vector<std::string> labels)
    : p_(std::move(p)), labels_(std::move(labels)) {
  if (p_.rows() != p_.cols()) throw DomainError("transition matrix must be square");
  const auto n = static_cast<std::size_t>(p_.rows());
  if (n == 0) throw DomainError("transition matrix is empty");
  if (n > kMaxDenseStates) {
    throw DomainError("state space of " + std::to_string(n) + " exceeds the dense limit of " +
                      std::to_string(kMaxDenseStates));
  }
  if (labels_.empty()) labels_ = default_labels(n);
  if (labels_.size() != n) throw DomainError("label count does not match matrix size");
  for (Eigen::Index i = 0; i < p_.rows(); ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < p_.cols(); ++j) {
      const double v = p_(i, j);
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        throw DomainError("transition probability out of [0,1] in row " + labels_[i]);
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "row " << labels_[i] << " sums to " << sum << ", not 1";
      throw DomainError(msg.str());
    }
  }
  if (!is_strongly_connected(support_graph(p_))) {
    throw IrreducibilityError("transition matrix is reducible (support graph not strongly connected)");
  }
}

WeightedDigraph load_edge_list(std::istream& in, EdgeListFormat format) {
  switch (format) {
    case EdgeListFormat::csv:
      return load_csv(in);
    case EdgeListFormat::matrix_market:
      return load_matrix_market(in);
  }
  throw UsageError("unknown edge list format");
}

Adjacency support_graph(const WeightedDigraph& g) {
  Adjacency adj(g.size());
  for (Eigen::Index r = 0; r < g.weights.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(g.weights, r); it; ++it) {
      if (it.value() > 0.0) adj[r].push_back(static_cast<std::size_t>(it.col()));
    }
  }
  return adj;
}

Adjacency support_graph(const Matrix& m) {
  Adjacency adj(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) > 0.0) adj[i].push_back(static_cast<std::size_t>(j));
    }
  }
  return adj;
}

Adjacency reverse(const Adjacency& adj) {
  Adjacency rev(adj.size());
  for (std::size_t u = 0; u < adj.size(); ++u) {
    for (auto v : adj[u]) rev[v].push_back(u);
  }
  return rev;
}

std::vector<std::vector<std::size_t>> strongly_connected_components(const Adjacency& adj) {
  constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
  const std::size_t n = adj.size();
  std::vector<std::size_t> order(n, unvisited), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<std::size_t> stack;
  // (node, next edge position) frames replace the recursion
  std::vector<std::pair<std::size_t, std::size_t>> frames;
  std::vector<std::vector<std::size_t>> components;
  std::size_t counter = 0;

  for (std::size_t root = 0; root < n; ++root) {
    if (order[root] != unvisited) continue;
    frames.emplace_back(root, 0);
    order[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;

    while (!frames.empty()) {
      auto& [v, pos] = frames.back();
      if (pos < adj[v].size()) {
        const std::size_t w = adj[v][pos++];
        if (order[w] == unvisited) {
          order[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          frames.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], order[w]);
        }
        continue;
      }
      const std::size_t finished = v;
      frames.pop_back();
      if (!frames.empty()) {
        const std::size_t parent = frames.back().first;
        low[parent] = std::min(low[parent], low[finished]);
      }
      if (low[finished] == order[finished]) {
        std::vector<std::size_t> component;
        std::size_t w = 0;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          component.push_back(w);
        } while (w != finished);
        std::sort(component.begin(), component.end());
        components.push_back(std::move(component));
      }
    }
  }
  return components;
}

bool is_strongly_connected(const Adjacency& adj) {
  if (adj.empty()) return false;
  return strongly_connected_components(adj).size() == 1;
}

WeightedDigraph induced_subgraph(const WeightedDigraph& g, const std::vector<std::size_t>& nodes) {
  std::vector<std::optional<std::size_t>> map(g.size());
  std::vector<std::string> labels;
  labels.reserve(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    map[nodes[k]] = k;
    labels.push_back(g.labels[nodes[k]]);
  }
  std::vector<Eigen::Triplet<double>> edges;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    for (SparseMatrix::InnerIterator it(g.weights, static_cast<Eigen::Index>(nodes[k])); it; ++it) {
      if (auto target = map[static_cast<std::size_t>(it.col())]) {
        edges.emplace_back(static_cast<int>(k), static_cast<int>(*target), it.value());
      }
    }
  }
  return WeightedDigraph::from_triplets(nodes.size(), edges, std::move(labels));
}

SccRestriction largest_scc(const WeightedDigraph& g) {
  if (g.size() == 0) throw DomainError("graph is empty");
  const auto components = strongly_connected_components(support_graph(g));
  const std::vector<std::size_t>* best = nullptr;
  for (const auto& c : components) {
    if (best == nullptr || c.size() > best->size() || (c.size() == best->size() && c.front() < best->front())) {
      best = &c;
    }
  }
  SccRestriction out;
  out.graph = induced_subgraph(g, *best);
  out.index_map.assign(g.size(), std::nullopt);
  for (std::size_t k = 0; k < best->size(); ++k) out.index_map[(*best)[k]] = k;
  return out;
}

TransitionMatrix row_normalize(const WeightedDigraph& g) {
  validate(g);
  const std::size_t n = g.size();
  if (n == 0) throw DomainError("graph is empty");
  if (n > kMaxDenseStates) {
    throw DomainError("graph with " + std::to_string(n) + " nodes exceeds the dense limit of " +
                      std::to_string(kMaxDenseStates));
  }
  if (!is_strongly_connected(support_graph(g))) {
    throw IrreducibilityError("graph is not strongly connected; restrict to its largest SCC first");
  }
  Matrix p = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index r = 0; r < g.weights.outerSize(); ++r) {
    double sum = 0.0;
    for (SparseMatrix::InnerIterator it(g.weights, r); it; ++it) sum += it.value();
    if (!(sum > 0.0)) throw DomainError("node '" + g.labels[r] + "' has no outgoing weight");
    for (SparseMatrix::InnerIterator it(g.weights, r); it; ++it) p(r, it.col()) = it.value() / sum;
  }
  return TransitionMatrix(std::move(p), g.labels);
}

}  // namespace hpm
