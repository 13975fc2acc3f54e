#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "evorod/energetics.hpp"
#include "evorod/torsion.hpp"

namespace evorod {
namespace scenario {

enum class Kind { Relaxation, Creep, CreepMuZero, Dynamic, MaximizerCheck, Counterexample };

// Parsed run configuration. The on-disk format is a strict JSON tree: unknown
// keys are rejected and per-scenario required blocks are enforced.
struct ScenarioConfig {
    Kind kind = Kind::Creep;
    std::uint64_t seed = 0;

    std::optional<torsion::TorsionParams> params;
    std::optional<MaterialModel> material;
    std::optional<torsion::InputHistory> input;

    std::size_t grid_nodes = 64;
    double t_end = 10.0;
    double dt_initial = 1e-6;
    double tol = 1e-8;
    double ramp_duration = 1e-3;
    std::size_t steps = 2000;
    std::size_t samples = 200;
    NaturalEvolution variant = NaturalEvolution::Local;
    int instances = 20;
    int restarts = 50;
    int iters = 500;

    std::string output_path = "trace.csv";
    std::size_t sample_stride = 1;
};

ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::string& path);

struct CheckLine {
    std::string name;
    double residual = 0.0;
    bool pass = true;
};

struct ScenarioResult {
    bool ok = true;
    std::vector<CheckLine> checks;
    std::string report_text;
    std::vector<std::string> written_files;
};

// Runs the scenario and writes trace.csv (unless verify_only) and report.txt
// under out_dir. Floats are serialized with 17 significant digits so reruns
// are byte-identical.
ScenarioResult run_scenario(const ScenarioConfig& config, const std::string& out_dir,
                            bool verify_only = false);

// 17-significant-digit round-trip-safe float formatting used for all output.
std::string format_float(double value);

}  // namespace scenario
}  // namespace evorod
