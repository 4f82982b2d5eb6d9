#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "hpmetric/generators.hpp"
#include "hpmetric/hitting.hpp"
#include "hpmetric/io.hpp"
#include "hpmetric/metric.hpp"
#include "hpmetric/stationary.hpp"

namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("hpmetric_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

Scratch& scratch() {
  static Scratch s;
  return s;
}

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + std::string(HPMETRIC_CLI) + " " + args + " >" +
                          scratch() / "stdout.txt" + " 2>" + scratch() / "stderr.txt";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST_CASE("version and usage errors") {
  CHECK(run("--version") == 0);
  CHECK(run("") == 2);
  CHECK(run("no-such-command") == 2);
  CHECK(run("metric --beta 0.5") == 2);  // no input
}

TEST_CASE("generate then verify the glued cycles") {
  const auto g = scratch() / "glued.csv";
  REQUIRE(run("generate --model glued --nb 3 --nc 4 --C 2 --out " + g) == 0);
  CHECK(fs::exists(scratch() / "glued.meta.json"));
  CHECK(run("verify --in " + g + " --levels identity,metric,quotient") == 0);
  CHECK(run("verify --model glued --nb 3 --nc 4 --C 2") == 0);
  CHECK(run("verify --in " + g + " --model glued") == 2);
}

TEST_CASE("quotient of the glued cycles has three states") {
  const auto g = scratch() / "glued_q.csv";
  REQUIRE(run("generate --model glued --out " + g) == 0);
  const auto out = scratch() / "quot.csv";
  REQUIRE(run("quotient --in " + g + " --out " + out + " --map " + (scratch() / "map.csv")) == 0);
  std::ifstream in(out);
  const auto q = hpm::io::read_dense_csv(in);
  CHECK(q.values.rows() == 3);
  CHECK(std::abs(q.values(0, 0) - 2.0 / 3.0) <= 1e-12);
  CHECK(std::abs(q.values(1, 1) - 0.75) <= 1e-12);
}

TEST_CASE("reducible input is an input error") {
  const auto path = scratch() / "reducible.csv";
  write(path, "# src,dst,weight\na,b,1\nb,c,1\nc,b,1\n");
  CHECK(run("stationary --in " + path) == 2);
  CHECK(run("stationary --in " + path + " --largest-scc") == 0);
}

TEST_CASE("parse errors and bad parameters exit with 2") {
  const auto path = scratch() / "bad.csv";
  write(path, "# src,dst,weight\na,b,1\nb,a,not-a-number\n");
  CHECK(run("stationary --in " + path) == 2);
  CHECK(slurp(scratch() / "stderr.txt").find("line 3") != std::string::npos);
  write(path, "# src,dst,weight\na,b,1\nb,a,-1\n");
  CHECK(run("stationary --in " + path) == 2);
  const auto ok = scratch() / "ok.csv";
  write(ok, "# src,dst,weight\na,b,1\nb,a,1\n");
  CHECK(run("metric --in " + ok + " --beta 0.25") == 2);
  CHECK(run("stationary --in " + (scratch() / "missing.csv")) == 2);
}

TEST_CASE("oracle level on K3") {
  const auto path = scratch() / "k3.csv";
  write(path, "# src,dst,weight\n0,1,1\n0,2,1\n1,0,1\n1,2,1\n2,0,1\n2,1,1\n");
  CHECK(run("verify --in " + path + " --levels oracle --walks 20000 --oracle-pairs 6") == 0);
}

TEST_CASE("metric output round-trips exactly") {
  const auto g = scratch() / "er.csv";
  REQUIRE(run("generate --model er-cycle --seed 3 --out " + g) == 0);
  const auto d = scratch() / "d.csv";
  REQUIRE(run("metric --in " + g + " --beta 0.75 --out " + d) == 0);
  std::ifstream in(d);
  const auto read = hpm::io::read_dense_csv(in);

  const auto p = hpm::row_normalize(hpm::gen_er_cycle({}, 3));
  const auto expected = hpm::hp_distance(
      hpm::hp_similarity(hpm::hitting_fast(p, {.threads = 1}), hpm::stationary_distribution(p), 0.75));
  // the CSV writer sorts labels by first appearance; compare by label
  REQUIRE(read.values.rows() == expected.d.rows());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < read.values.rows(); ++i) {
    const auto li = std::find(p.labels().begin(), p.labels().end(), read.labels[static_cast<std::size_t>(i)]) -
                    p.labels().begin();
    for (Eigen::Index j = 0; j < read.values.cols(); ++j) {
      const auto lj = std::find(p.labels().begin(), p.labels().end(), read.labels[static_cast<std::size_t>(j)]) -
                      p.labels().begin();
      worst = std::max(worst, std::abs(read.values(i, j) - expected.d(li, lj)));
    }
  }
  CHECK(worst <= 1e-12);

  // writing what was read reproduces the file byte for byte
  std::ostringstream again;
  hpm::io::write_dense_csv(again, read.values, read.labels);
  CHECK(again.str() == slurp(d));
}

TEST_CASE("sidecar metadata") {
  const auto g = scratch() / "side.csv";
  REQUIRE(run("generate --model planted --n 30 --k 3 --p-in 0.6 --p-out 0.1 --seed 5 --out " + g) == 0);
  const auto meta = slurp(scratch() / "side.meta.json");
  CHECK(meta.find("\"command\": \"generate\"") != std::string::npos);
  CHECK(meta.find("\"seed\": 5") != std::string::npos);
  CHECK(meta.find("\"version\"") != std::string::npos);
  CHECK(meta.find("\"elapsed_seconds\"") != std::string::npos);
}

TEST_CASE("thread count does not change results") {
  const auto g = scratch() / "threads.csv";
  REQUIRE(run("generate --model er-cycle --seed 1 --out " + g) == 0);
  const auto one = scratch() / "q1.csv";
  const auto four = scratch() / "q4.csv";
  const auto env = scratch() / "qenv.csv";
  REQUIRE(run("--threads 1 hitprob --in " + g + " --out " + one) == 0);
  REQUIRE(run("--threads 4 hitprob --in " + g + " --out " + four) == 0);
  REQUIRE(run("--threads 1 hitprob --in " + g + " --out " + env, "HPMETRIC_THREADS=3") == 0);
  CHECK(slurp(one) == slurp(four));
  CHECK(slurp(one) == slurp(env));
  CHECK(slurp(scratch() / "qenv.meta.json").find("\"threads\": 3") != std::string::npos);

  const auto mc1 = scratch() / "mc1.json";
  const auto mc4 = scratch() / "mc4.json";
  REQUIRE(run("--threads 1 hitprob --in " + g + " --mc er1 cyc1 --walks 5000 --seed 2 --out " + mc1) == 0);
  REQUIRE(run("--threads 4 hitprob --in " + g + " --mc er1 cyc1 --walks 5000 --seed 2 --out " + mc4) == 0);
  CHECK(slurp(mc1) == slurp(mc4));
}

TEST_CASE("fiedler and cluster commands") {
  const auto g = scratch() / "fied.csv";
  REQUIRE(run("generate --model glued --out " + g) == 0);
  const auto f = scratch() / "fied_out.csv";
  REQUIRE(run("fiedler --in " + g + " --method hp --beta 0.5 --out " + f) == 0);
  CHECK(slurp(f).rfind("label,value,sign", 0) == 0);

  const auto pg = scratch() / "planted.csv";
  const auto truth = scratch() / "truth.csv";
  REQUIRE(run("generate --model planted --n 60 --k 3 --p-in 0.6 --p-out 0.05 --seed 2 --out " + pg + " --truth " +
              truth) == 0);
  const auto report = scratch() / "cluster.json";
  REQUIRE(run("cluster --in " + pg + " --method kmedoids-d12 --k 3 --truth " + truth + " --trials 200 --out " +
              report) == 0);
  const auto text = slurp(report);
  CHECK(text.find("\"accuracy\": 1.0") != std::string::npos);
  CHECK(run("cluster --in " + pg + " --method spectral") == 2);
}

TEST_CASE("dense input and stdin") {
  const auto path = scratch() / "dense.csv";
  write(path, "label,x,y\nx,0.25,0.75\ny,0.5,0.5\n");
  REQUIRE(run("stationary --in " + path) == 0);
  const auto out = slurp(scratch() / "stdout.txt");
  CHECK(out.find("label,phi") == 0);
  std::istringstream rows(out);
  std::string line;
  std::getline(rows, line);
  std::getline(rows, line);
  CHECK(line.rfind("x,", 0) == 0);
  CHECK(std::abs(std::stod(line.substr(2)) - 0.4) <= 1e-15);
  REQUIRE(run("stationary --in - < " + path) == 0);
  CHECK(slurp(scratch() / "stdout.txt") == out);
}
