#include <doctest.h>

#include <string>

#include "qfi/errors.hpp"
#include "qfi/io/config.hpp"
#include "qfi/io/records.hpp"

using namespace qfi;
using namespace qfi::io;

namespace {

const char* kMinimal = R"({
  "model": {"id": "qubit_phase"},
  "evolution": {"t": 1.0},
  "method": {"route": "generator_variance"}
})";

std::string error_of(const std::string& text) {
  try {
    parse_config(text, "cfg.json");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("cli-io") {
  TEST_CASE("minimal config takes catalog defaults") {
    const auto c = parse_config(kMinimal);
    CHECK(c.model.id == models::ModelId::qubit_phase);
    CHECK(c.state.kind == models::StateKind::Kind::plus);
    CHECK(c.lambda[0] == 1.0);
    CHECK(c.times == std::vector<double>{1.0});
    CHECK(c.output.format == "jsonl");
  }

  TEST_CASE("full harmonic sweep config") {
    const auto c = parse_config(R"({
      "model": {"id": "harmonic", "discretization": {"half_width": 8.0, "points": 128}},
      "state": {"kind": "coherent", "alpha": [1.0, 0.5]},
      "parameters": {"values": {"omega": 1.2}, "target": "force", "sweep": {"parameter": "force", "values": [0, 1]}},
      "evolution": {"times": [0.5, 1.0]},
      "method": {"route": "semiclassical_mc", "n_samples": 500, "seed": 3, "dt": 0.01},
      "output": {"path": "out.csv"}
    })");
    CHECK(c.target == 1);
    CHECK(c.lambda[0] == 1.2);
    CHECK(c.sweep_parameter == "force");
    CHECK(c.sweep_values.size() == 2);
    CHECK(c.method.seed == 3u);
    CHECK(c.output.format == "csv");
    CHECK(c.state.alpha == std::complex<double>(1.0, 0.5));
  }

  TEST_CASE("rejections name the section, key and line") {
    const std::string bad = "{\n  \"model\": {\"id\": \"harmonic\"},\n  \"evolution\": {\"t\": 1.0},\n"
                            "  \"method\": {\"route\": \"semiclassical_mc\"}\n}";
    const auto msg = error_of(bad);
    CHECK(msg.find("cfg.json:4") != std::string::npos);
    CHECK(msg.find("method.seed") != std::string::npos);
    CHECK(msg.find("stochastic route requires a seed") != std::string::npos);

    const auto qubit = error_of(R"({"model": {"id": "qubit_phase"}, "evolution": {"t": 1},
      "method": {"route": "semiclassical_mc", "seed": 1}})");
    CHECK(qubit.find("model has no classical counterpart") != std::string::npos);

    CHECK(error_of(R"({"model": {"id": "harmonic", "colour": 1}, "evolution": {"t": 1}})").find("model.colour") !=
          std::string::npos);
    CHECK(error_of(R"({"model": {"id": "nope"}, "evolution": {"t": 1}})").find("model.id") != std::string::npos);
    CHECK(error_of(R"({"model": {"id": "harmonic"}, "evolution": {"times": []}})").find("evolution.times") !=
          std::string::npos);
    CHECK(error_of(R"({"model": {"id": "harmonic"}, "evolution": {"t": 1},
      "parameters": {"sweep": {"parameter": "force", "values": []}}})").find("empty") != std::string::npos);
    CHECK_FALSE(error_of("{ not json").empty());
  }

  TEST_CASE("records round-trip exactly") {
    QfiEstimate e;
    e.value = 0.1 + 0.2;
    e.std_error = 1.0 / 3.0;
    e.method = QfiMethod::semiclassical_mc;
    e.metadata.model = "harmonic";
    e.metadata.lambda = {1.0, 1e-17};
    e.metadata.t = 3.141592653589793;
    e.metadata.seed = 18446744073709551615ull;
    e.metadata.n_samples = 1000;
    e.metadata.dt = 0.031415926535897934;
    e.metadata.discretization = "grid(L=10,n=256)";
    e.metadata.warnings = {"a \"quoted\" warning"};
    const auto r = to_record(e, "force");
    CHECK(parse_record(serialize(r)) == r);

    QfimEstimate m;
    m.value = RealMatrix{{2.0, 0.1}, {0.1, 3.0}};
    m.std_error = RealMatrix{{0.2, 0.01}, {0.01, 0.3}};
    m.method = QfiMethod::semiclassical_mc;
    const auto rm = to_record(m);
    CHECK(rm.target == "all");
    CHECK(parse_record(serialize(rm)) == rm);

    CHECK_THROWS_AS(parse_record(R"({"schema_version": 2})"), ValidationError);
  }

  TEST_CASE("sweep CSV layout") {
    std::vector<SweepRow> rows{{0.5, 1.0, "generator_variance", 0.25, std::nullopt, ""},
                               {1.0, 1.0, "generator_variance", std::nullopt, std::nullopt, "failed, badly"}};
    const auto csv = sweep_csv(rows);
    CHECK(csv.rfind(std::string(kSweepHeader) + "\n", 0) == 0);
    CHECK(csv.find("0.5,1,generator_variance,0.25,,") != std::string::npos);
    CHECK(csv.find("\"failed, badly\"") != std::string::npos);
  }
}
