#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int status = -1;
  std::string out;
};

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path dir = fs::temp_directory_path() / "qfi_cli_tests";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p) << text;
  return p;
}

Outcome run(const std::string& args) {
  const std::string cmd = std::string(QFI_CLI_PATH) + " --quiet " + args + " 2>&1";
  Outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) o.out += buf;
  const int raw = pclose(pipe);
  o.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return o;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("run: minimal qubit config") {
  const auto cfg = write_config("qubit.json", R"({"model": {"id": "qubit_phase"}, "evolution": {"t": 1.0},
    "method": {"route": "generator_variance"}})");
  const auto o = run("run --config " + cfg.string());
  REQUIRE(o.status == 0);
  const auto j = nlohmann::json::parse(o.out);
  CHECK(std::abs(j.at("qfi").get<double>() - 1.0) < 5e-6);
  CHECK(j.at("schema_version") == 1);
  CHECK(j.at("model") == "qubit_phase");
  CHECK(j.at("target") == "lambda");
}

TEST_CASE("run: validation failures exit with status 2") {
  const auto qubit = write_config("qubit_sc.json", R"({"model": {"id": "qubit_phase"}, "evolution": {"t": 1.0},
    "method": {"route": "semiclassical_mc", "seed": 1}})");
  const auto a = run("run --config " + qubit.string());
  CHECK(a.status == 2);
  CHECK(a.out.find("model has no classical counterpart") != std::string::npos);

  const auto noseed = write_config("noseed.json", R"({"model": {"id": "harmonic"}, "evolution": {"t": 1.0},
    "method": {"route": "semiclassical_mc"}})");
  const auto b = run("run --config " + noseed.string());
  CHECK(b.status == 2);
  CHECK(b.out.find("method.seed") != std::string::npos);

  CHECK(run("run --config /nonexistent/config.json").status == 2);
  CHECK(run("frobnicate").status == 2);
}

TEST_CASE("run: seed override enables the stochastic route") {
  const auto noseed = write_config("noseed2.json", R"({"model": {"id": "harmonic",
    "discretization": {"half_width": 10, "points": 128}}, "parameters": {"target": "force"},
    "evolution": {"t": 1.0}, "method": {"route": "semiclassical_mc", "n_samples": 500}})");
  const auto o = run("--seed 4 run --config " + noseed.string());
  REQUIRE(o.status == 0);
  CHECK(nlohmann::json::parse(o.out).at("seed") == 4);
}

TEST_CASE("sweep: harmonic force model over time") {
  const auto cfg = write_config("sweep_t.json", R"({"model": {"id": "harmonic",
    "discretization": {"half_width": 10, "points": 128}}, "parameters": {"target": "force"},
    "evolution": {"times": [0.7853981633974483, 1.5707963267948966, 3.141592653589793]},
    "method": {"route": "generator_variance"}})");
  const auto o = run("sweep --config " + cfg.string());
  REQUIRE(o.status == 0);
  const auto rows = csv_rows(o.out);
  REQUIRE(rows.size() == 4);
  CHECK(o.out.rfind("t,lambda,method,qfi,stderr,error\n", 0) == 0);
  const double q1 = std::stod(rows[1][3]);
  const double q2 = std::stod(rows[2][3]);
  const double q3 = std::stod(rows[3][3]);
  CHECK(std::abs(q1 / q2 / 0.29289321881345254 - 1.0) < 1e-3);
  CHECK(std::abs(q3 / q2 / 2.0 - 1.0) < 1e-3);
}

TEST_CASE("sweep: empty grid exits with status 2") {
  const auto cfg = write_config("sweep_empty.json", R"({"model": {"id": "harmonic"},
    "parameters": {"sweep": {"parameter": "force", "values": []}},
    "evolution": {"t": 1.0}, "method": {"route": "generator_variance"}})");
  CHECK(run("sweep --config " + cfg.string()).status == 2);
}

TEST_CASE("sweep: per-seed scatter matches the reported standard error") {
  std::string seeds;
  for (int s = 1; s <= 20; ++s) seeds += (s > 1 ? "," : "") + std::to_string(s);
  const auto cfg = write_config("sweep_seeds.json", R"({"model": {"id": "harmonic",
    "discretization": {"half_width": 10, "points": 128}}, "parameters": {"target": "force"},
    "evolution": {"t": 3.141592653589793},
    "method": {"route": "semiclassical_mc", "n_samples": 2000, "seeds": [)" + seeds + "]}}");
  const auto o = run("--threads 2 sweep --config " + cfg.string());
  REQUIRE(o.status == 0);
  const auto rows = csv_rows(o.out);
  REQUIRE(rows.size() == 21);
  double sum = 0.0, sum2 = 0.0, se = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double v = std::stod(rows[i][3]);
    sum += v;
    sum2 += v * v;
    se += std::stod(rows[i][4]);
  }
  const double n = 20.0;
  const double sd = std::sqrt((sum2 - sum * sum / n) / (n - 1.0));
  const double ratio = sd / (se / n);
  CHECK(ratio >= 0.5);
  CHECK(ratio <= 2.0);
}

TEST_CASE("models lists the catalog") {
  const auto o = run("models");
  CHECK(o.status == 0);
  for (const char* id : {"qubit_phase", "qubit_mixed_axis", "harmonic", "quartic", "driven_oscillator", "lattice_scalar"}) {
    CHECK(o.out.find(id) != std::string::npos);
  }
}

TEST_CASE("compare prints every route") {
  const auto cfg = write_config("compare.json", R"({"model": {"id": "harmonic",
    "discretization": {"half_width": 10, "points": 128}}, "parameters": {"target": "force"},
    "evolution": {"t": 1.0}, "method": {"route": "semiclassical_mc", "n_samples": 1000, "seed": 2}})");
  const auto o = run("compare --config " + cfg.string());
  CHECK(o.status == 0);
  for (const char* m : {"overlap_fd", "generator_variance", "correlator_integral", "semiclassical_mc"}) {
    CHECK(o.out.find(m) != std::string::npos);
  }
}
