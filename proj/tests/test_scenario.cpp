#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "evorod/scenario.hpp"

using namespace evorod;
using namespace evorod::scenario;

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

std::filesystem::path fresh_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("evorod_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

constexpr const char* kCreepConfig = R"({
  "scenario": "creep",
  "seed": 0,
  "params": {"nu": 0.0, "mu": 1.0, "mu_d": 1.0, "alpha": 1.0, "alpha_d": 1.0},
  "input": {"kind": "torque", "waveform": "step", "amplitude": 1.0},
  "numerics": {"t_end": 80.0, "steps": 4000},
  "output": {"path": "trace.csv", "sample_stride": 1}
})";

std::vector<double> last_row(const std::string& csv) {
    std::istringstream lines(csv);
    std::string line, last;
    std::getline(lines, line);  // header
    while (std::getline(lines, line)) {
        if (!line.empty()) last = line;
    }
    std::vector<double> values;
    std::istringstream cells(last);
    std::string cell;
    while (std::getline(cells, cell, ',')) values.push_back(std::stod(cell));
    return values;
}

}  // namespace

TEST_CASE("creep scenario reaches the closed-form limits and writes both files") {
    const auto dir = fresh_dir("creep");
    const auto config = parse_config(kCreepConfig);
    const auto result = run_scenario(config, dir.string());
    CHECK(result.ok);
    REQUIRE(result.written_files.size() == 2);

    const auto row = last_row(slurp(dir / "trace.csv"));
    REQUIRE(row.size() == 5);
    CHECK(row[0] == doctest::Approx(80.0));        // t
    CHECK(std::abs(row[1] - 2.0) < 1e-6);          // u -> (alpha+alpha_d) m0 / (alpha alpha_d)
    CHECK(std::abs(row[2] - 1.0) < 1e-6);          // u_d -> m0 / alpha_d
    CHECK(row[4] == 0.0);                          // no impulse for a torque step

    const std::string report = slurp(dir / "report.txt");
    CHECK(report.find("status: PASS") != std::string::npos);
}

TEST_CASE("relaxation scenario reports the plateau and the impulse") {
    const auto dir = fresh_dir("relax");
    const auto config = parse_config(R"({
      "scenario": "relaxation",
      "params": {"nu": 0.0, "mu": 0.5, "mu_d": 1.0, "alpha": 2.0, "alpha_d": 1.0},
      "input": {"kind": "twist", "waveform": "step", "amplitude": 1.0},
      "numerics": {"t_end": 15.0, "steps": 1500}
    })");
    const auto result = run_scenario(config, dir.string());
    CHECK(result.ok);

    const auto row = last_row(slurp(dir / "trace.csv"));
    CHECK(std::abs(row[3] - 2.0 / 3.0) < 1e-6);  // m -> alpha alpha_d u0 / (alpha + alpha_d)
    CHECK(row[4] == doctest::Approx(0.5));       // impulse mu u0
}

TEST_CASE("counterexample scenario flags the negative pointwise rate and passes") {
    const auto dir = fresh_dir("counter");
    const auto config = parse_config(R"({
      "scenario": "counterexample",
      "numerics": {"grid_nodes": 201}
    })");
    const auto result = run_scenario(config, dir.string());
    CHECK(result.ok);
    const std::string report = slurp(dir / "report.txt");
    CHECK(report.find("pointwise_negative") != std::string::npos);
    CHECK(report.find("total_nonnegative") != std::string::npos);
    CHECK(report.find("status: PASS") != std::string::npos);
}

TEST_CASE("maximizer check scenario passes its bounds") {
    const auto dir = fresh_dir("maximizer");
    const auto config = parse_config(R"({
      "scenario": "maximizer_check",
      "seed": 3,
      "numerics": {"instances": 4, "restarts": 25, "iters": 400}
    })");
    const auto result = run_scenario(config, dir.string());
    CHECK(result.ok);
}

TEST_CASE("dynamic scenario emits the long-format table") {
    const auto dir = fresh_dir("dynamic");
    const auto config = parse_config(R"({
      "scenario": "dynamic",
      "params": {"nu": 0.01, "mu": 0.5, "mu_d": 1.0, "alpha": 1.0, "alpha_d": 1.0},
      "input": {"kind": "torque", "waveform": "smoothed_step", "amplitude": 1.0},
      "numerics": {"t_end": 0.5, "grid_nodes": 20, "samples": 5, "ramp_duration": 0.05}
    })");
    const auto result = run_scenario(config, dir.string());
    CHECK(result.ok);
    const std::string csv = slurp(dir / "trace.csv");
    CHECK(csv.rfind("s,t,phi,u_d\n", 0) == 0);
    // 6 sample times x 20 nodes data rows + header
    std::size_t lines = 0;
    for (char c : csv) lines += c == '\n';
    CHECK(lines == 1 + 6 * 20);
}

TEST_CASE("identical configs produce byte-identical output") {
    const auto dir_a = fresh_dir("determinism_a");
    const auto dir_b = fresh_dir("determinism_b");
    const auto config = parse_config(kCreepConfig);
    run_scenario(config, dir_a.string());
    run_scenario(config, dir_b.string());
    CHECK(slurp(dir_a / "trace.csv") == slurp(dir_b / "trace.csv"));
    CHECK(slurp(dir_a / "report.txt") == slurp(dir_b / "report.txt"));
}

TEST_CASE("verify mode writes the report only") {
    const auto dir = fresh_dir("verify_only");
    const auto config = parse_config(kCreepConfig);
    const auto result = run_scenario(config, dir.string(), true);
    CHECK(result.ok);
    CHECK(result.written_files.size() == 1);
    CHECK_FALSE(std::filesystem::exists(dir / "trace.csv"));
    CHECK(std::filesystem::exists(dir / "report.txt"));
}

TEST_CASE("seventeen digit floats round-trip") {
    for (double v : {1.0 / 3.0, 2.0, 1e-17, 6.02214076e23, -0.1}) {
        CHECK(std::stod(format_float(v)) == v);
    }
}

TEST_CASE("config validation rejects malformed input with key diagnostics") {
    SUBCASE("unknown keys anywhere in the tree") {
        CHECK_THROWS_WITH_AS(parse_config(R"({"scenario": "creep", "bogus": 1})"),
                             doctest::Contains("bogus"), InvalidParameterError);
        CHECK_THROWS_WITH_AS(
            parse_config(R"({
              "scenario": "creep",
              "params": {"nu": 0, "mu": 1, "mu_d": 1, "alpha": 1, "alpha_d": 1, "extra": 2},
              "input": {"kind": "torque", "waveform": "step", "amplitude": 1}
            })"),
            doctest::Contains("params.extra"), InvalidParameterError);
    }

    SUBCASE("missing required blocks") {
        CHECK_THROWS_WITH_AS(parse_config(R"({"scenario": "creep"})"),
                             doctest::Contains("params"), InvalidParameterError);
        CHECK_THROWS_WITH_AS(
            parse_config(
                R"({"scenario": "creep", "params": {"nu": 0, "mu": 1, "mu_d": 1, "alpha": 1, "alpha_d": 1}})"),
            doctest::Contains("input"), InvalidParameterError);
    }

    SUBCASE("json syntax errors carry the parser diagnostic") {
        CHECK_THROWS_WITH_AS(parse_config("{"), doctest::Contains("parse error"),
                             InvalidParameterError);
    }

    SUBCASE("bad values") {
        CHECK_THROWS_AS(parse_config(R"({"scenario": "warp"})"), InvalidParameterError);
        CHECK_THROWS_AS(parse_config(R"({
          "scenario": "creep",
          "params": {"nu": 0, "mu": 1, "mu_d": -1, "alpha": 1, "alpha_d": 1},
          "input": {"kind": "torque", "waveform": "step", "amplitude": 1}
        })"),
                        InvalidParameterError);
    }
}
