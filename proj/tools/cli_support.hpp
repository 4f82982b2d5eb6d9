#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <ostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hpmetric/graph.hpp"
#include "hpmetric/types.hpp"

namespace hpm::cli {

using json = nlohmann::json;

enum class InputFormat { automatic, csv, mtx, dense };

InputFormat parse_input_format(const std::string& name);

struct InputOptions {
  std::string path;
  std::string format = "auto";
  bool largest_scc = false;
  bool drop_self_loops = false;
};

struct LoadedChain {
  WeightedDigraph graph;          // weights as read (after any restriction)
  std::optional<Matrix> exact_p;  // dense input that already was row-stochastic
  std::size_t original_size = 0;
};

LoadedChain load_input(const InputOptions& options);
TransitionMatrix to_chain(const LoadedChain& loaded);

// Resolves a node by label first, then by 0-based index.
std::size_t resolve_node(const std::vector<std::string>& labels, const std::string& key);

// Metadata written next to every output file.
class RunContext {
 public:
  explicit RunContext(std::string command);

  json& parameters() { return parameters_; }
  void set_seed(std::uint64_t seed) { seed_ = seed; }
  void set_threads(unsigned threads) { threads_ = threads; }
  void add_result(const std::string& key, json value) { results_[key] = std::move(value); }

  // Opens `path` for writing ("-" means stdout) and records it for a sidecar.
  void write_file(const std::string& path, const std::function<void(std::ostream&)>& writer);
  // Writes the sidecars of every recorded file.
  void finish();

  json metadata() const;

 private:
  std::string command_;
  json parameters_ = json::object();
  json results_ = json::object();
  std::optional<std::uint64_t> seed_;
  unsigned threads_ = 1;
  std::vector<std::filesystem::path> outputs_;
  std::chrono::steady_clock::time_point start_;
};

std::filesystem::path sidecar_path(const std::filesystem::path& output);

// Thread count after the HPMETRIC_THREADS override.
unsigned effective_threads(unsigned flag);

}  // namespace hpm::cli
