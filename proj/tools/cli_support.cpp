#include "cli_support.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "hpmetric/errors.hpp"
#include "hpmetric/io.hpp"
#include "hpmetric/parallel.hpp"

namespace hpm::cli {

namespace {

bool looks_dense(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    return line.rfind("label,", 0) == 0;
  }
  return false;
}

bool rows_stochastic(const Matrix& m) {
  if (m.rows() != m.cols()) return false;
  if ((m.array() < 0.0).any() || (m.array() > 1.0).any()) return false;
  return ((m.rowwise().sum().array() - 1.0).abs() <= 1e-12).all();
}

}  // namespace

InputFormat parse_input_format(const std::string& name) {
  if (name == "auto") return InputFormat::automatic;
  if (name == "csv") return InputFormat::csv;
  if (name == "mtx") return InputFormat::mtx;
  if (name == "dense") return InputFormat::dense;
  throw UsageError("unknown input format '" + name + "'");
}

LoadedChain load_input(const InputOptions& options) {
  if (options.path.empty()) throw UsageError("no input given (--in)");
  std::ifstream file;
  std::istream* in = &std::cin;
  if (options.path != "-") {
    file.open(options.path);
    if (!file) throw IoError("cannot open '" + options.path + "'");
    in = &file;
  }
  std::stringstream buffer;
  buffer << in->rdbuf();
  const std::string text = buffer.str();

  auto format = parse_input_format(options.format);
  if (format == InputFormat::automatic) {
    const std::filesystem::path path(options.path);
    if (path.extension() == ".mtx") {
      format = InputFormat::mtx;
    } else {
      std::istringstream probe(text);
      format = looks_dense(probe) ? InputFormat::dense : InputFormat::csv;
    }
  }

  LoadedChain out;
  std::istringstream stream(text);
  if (format == InputFormat::dense) {
    auto dense = io::read_dense_csv(stream);
    if (rows_stochastic(dense.values)) out.exact_p = dense.values;
    out.graph = WeightedDigraph::from_dense(dense.values, std::move(dense.labels));
  } else {
    out.graph = load_edge_list(stream, format == InputFormat::mtx ? EdgeListFormat::matrix_market : EdgeListFormat::csv);
  }
  out.original_size = out.graph.size();

  if (options.drop_self_loops) {
    Matrix w = out.graph.dense();
    if (w.diagonal().any()) {
      w.diagonal().setZero();
      out.graph = WeightedDigraph::from_dense(w, out.graph.labels);
      out.exact_p.reset();
    }
  }
  if (options.largest_scc) {
    auto restricted = largest_scc(out.graph);
    if (restricted.graph.size() != out.graph.size()) {
      out.graph = std::move(restricted.graph);
      out.exact_p.reset();
    }
  }
  return out;
}

TransitionMatrix to_chain(const LoadedChain& loaded) {
  if (loaded.exact_p) return TransitionMatrix(*loaded.exact_p, loaded.graph.labels);
  return row_normalize(loaded.graph);
}

std::size_t resolve_node(const std::vector<std::string>& labels, const std::string& key) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == key) return i;
  }
  try {
    std::size_t used = 0;
    const auto idx = std::stoull(key, &used);
    if (used == key.size() && idx < labels.size()) return static_cast<std::size_t>(idx);
  } catch (const std::exception&) {
  }
  throw UsageError("unknown node '" + key + "'");
}

RunContext::RunContext(std::string command) : command_(std::move(command)), start_(std::chrono::steady_clock::now()) {}

void RunContext::write_file(const std::string& path, const std::function<void(std::ostream&)>& writer) {
  if (path == "-") {
    writer(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  writer(out);
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
  outputs_.emplace_back(path);
}

json RunContext::metadata() const {
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  json meta = {
      {"tool", "hpmetric"},
      {"version", HPMETRIC_VERSION},
      {"command", command_},
      {"parameters", parameters_},
      {"threads", threads_},
      {"elapsed_seconds", elapsed},
  };
  meta["seed"] = seed_ ? json(*seed_) : json(nullptr);
  if (!results_.empty()) meta["results"] = results_;
  return meta;
}

void RunContext::finish() {
  const auto meta = metadata();
  for (const auto& output : outputs_) {
    std::ofstream side(sidecar_path(output));
    if (!side) throw IoError("cannot write sidecar for '" + output.string() + "'");
    side << meta.dump(2) << '\n';
  }
}

std::filesystem::path sidecar_path(const std::filesystem::path& output) {
  auto side = output;
  side.replace_extension(".meta.json");
  return side;
}

unsigned effective_threads(unsigned flag) {
  if (const char* env = std::getenv("HPMETRIC_THREADS"); env != nullptr && *env != '\0') {
    try {
      std::size_t used = 0;
      const auto value = std::stoul(env, &used);
      if (used == std::string(env).size()) return resolve_threads(static_cast<unsigned>(value));
    } catch (const std::exception&) {
    }
    throw UsageError("HPMETRIC_THREADS must be a nonnegative integer");
  }
  return resolve_threads(flag);
}

}  // namespace hpm::cli
