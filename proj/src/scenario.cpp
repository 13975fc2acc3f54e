#include "evorod/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "evorod/constitutive.hpp"
#include "evorod/oracle.hpp"

namespace evorod {
namespace scenario {

using nlohmann::json;

std::string format_float(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

namespace {

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
    throw InvalidParameterError("config key '" + path + "': " + what);
}

void reject_unknown_keys(const json& node, const std::string& path,
                         const std::set<std::string>& allowed) {
    for (const auto& item : node.items()) {
        if (!allowed.contains(item.key())) {
            config_error(path.empty() ? item.key() : path + "." + item.key(), "unknown key");
        }
    }
}

double require_number(const json& node, const std::string& path, const char* key) {
    if (!node.contains(key)) config_error(path + "." + key, "missing required value");
    if (!node[key].is_number()) config_error(path + "." + key, "expected a number");
    return node[key].get<double>();
}

double number_or(const json& node, const std::string& path, const char* key, double fallback) {
    if (!node.contains(key)) return fallback;
    if (!node[key].is_number()) config_error(path + "." + key, "expected a number");
    return node[key].get<double>();
}

Vec3 vec3_of(const json& node, const std::string& path) {
    if (!node.is_array() || node.size() != 3) config_error(path, "expected an array of 3 numbers");
    return Vec3(node[0].get<double>(), node[1].get<double>(), node[2].get<double>());
}

Mat3 mat3_of(const json& node, const std::string& path) {
    if (node.is_array() && node.size() == 3 && node[0].is_number()) {
        return Vec3(node[0].get<double>(), node[1].get<double>(), node[2].get<double>())
            .asDiagonal();
    }
    if (!node.is_array() || node.size() != 3) {
        config_error(path, "expected a 3-vector (diagonal) or 3x3 array");
    }
    Mat3 m;
    for (int r = 0; r < 3; ++r) {
        const json& row = node[r];
        if (!row.is_array() || row.size() != 3) config_error(path, "expected 3x3 array rows");
        for (int c = 0; c < 3; ++c) m(r, c) = row[c].get<double>();
    }
    return m;
}

torsion::TorsionParams parse_params(const json& node) {
    reject_unknown_keys(node, "params", {"nu", "mu", "mu_d", "alpha", "alpha_d"});
    torsion::TorsionParams p;
    p.nu = number_or(node, "params", "nu", 0.0);
    p.mu = number_or(node, "params", "mu", 0.0);
    p.mu_d = require_number(node, "params", "mu_d");
    p.alpha = require_number(node, "params", "alpha");
    p.alpha_d = require_number(node, "params", "alpha_d");
    p.validate();
    return p;
}

MaterialModel parse_material(const json& node) {
    reject_unknown_keys(node, "material", {"energy", "dissipation"});
    if (!node.contains("energy") || !node.contains("dissipation")) {
        config_error("material", "needs 'energy' and 'dissipation' blocks");
    }
    const json& energy = node["energy"];
    reject_unknown_keys(energy, "material.energy",
                        {"curvature", "tangent", "natural_curvature", "natural_tangent"});
    QuadraticEnergyParams params;
    params.curvature = vec3_of(energy.at("curvature"), "material.energy.curvature");
    params.tangent = vec3_of(energy.at("tangent"), "material.energy.tangent");
    params.natural_curvature =
        vec3_of(energy.at("natural_curvature"), "material.energy.natural_curvature");
    params.natural_tangent =
        vec3_of(energy.at("natural_tangent"), "material.energy.natural_tangent");
    params.validate();

    const json& diss = node["dissipation"];
    reject_unknown_keys(diss, "material.dissipation",
                        {"curvature_viscosity", "tangent_viscosity", "natural_curvature_viscosity",
                         "natural_tangent_viscosity"});
    DissipationTensors tensors{
        SpdTensor(mat3_of(diss.at("curvature_viscosity"), "material.dissipation.curvature_viscosity")),
        SpdTensor(mat3_of(diss.at("tangent_viscosity"), "material.dissipation.tangent_viscosity")),
        SpdTensor(mat3_of(diss.at("natural_curvature_viscosity"),
                          "material.dissipation.natural_curvature_viscosity")),
        SpdTensor(mat3_of(diss.at("natural_tangent_viscosity"),
                          "material.dissipation.natural_tangent_viscosity"))};
    return MaterialModel{params, tensors};
}

torsion::InputHistory parse_input(const json& node, double ramp_duration) {
    reject_unknown_keys(node, "input", {"kind", "waveform", "amplitude", "times", "values"});
    if (!node.contains("kind")) config_error("input.kind", "missing required value");
    const std::string kind_name = node["kind"].get<std::string>();
    torsion::InputHistory::Kind kind;
    if (kind_name == "twist") {
        kind = torsion::InputHistory::Kind::PrescribedTwist;
    } else if (kind_name == "torque") {
        kind = torsion::InputHistory::Kind::PrescribedTorque;
    } else {
        config_error("input.kind", "expected 'twist' or 'torque'");
    }
    if (!node.contains("waveform")) config_error("input.waveform", "missing required value");
    const std::string waveform = node["waveform"].get<std::string>();
    if (waveform == "step") {
        return torsion::InputHistory(
            kind, torsion::InputHistory::IdealStep{require_number(node, "input", "amplitude")});
    }
    if (waveform == "smoothed_step") {
        return torsion::InputHistory(
            kind, torsion::InputHistory::SmoothedStep{require_number(node, "input", "amplitude"),
                                                      ramp_duration});
    }
    if (waveform == "tabulated") {
        if (!node.contains("times") || !node.contains("values")) {
            config_error("input", "tabulated waveform needs 'times' and 'values'");
        }
        torsion::InputHistory::Tabulated table;
        table.times = node["times"].get<std::vector<double>>();
        table.values = node["values"].get<std::vector<double>>();
        return torsion::InputHistory(kind, std::move(table));
    }
    config_error("input.waveform", "expected 'step', 'smoothed_step' or 'tabulated'");
}

}  // namespace

ScenarioConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& err) {
        throw InvalidParameterError(std::string("config parse error: ") + err.what());
    }
    if (!root.is_object()) throw InvalidParameterError("config: top level must be an object");
    reject_unknown_keys(root, "",
                        {"scenario", "seed", "params", "material", "input", "numerics", "output"});

    ScenarioConfig config;
    if (!root.contains("scenario")) config_error("scenario", "missing required value");
    const std::string name = root["scenario"].get<std::string>();
    if (name == "relaxation") config.kind = Kind::Relaxation;
    else if (name == "creep") config.kind = Kind::Creep;
    else if (name == "creep_mu_zero") config.kind = Kind::CreepMuZero;
    else if (name == "dynamic") config.kind = Kind::Dynamic;
    else if (name == "maximizer_check") config.kind = Kind::MaximizerCheck;
    else if (name == "counterexample") config.kind = Kind::Counterexample;
    else config_error("scenario", "unknown scenario '" + name + "'");

    if (root.contains("seed")) {
        if (!root["seed"].is_number_unsigned()) config_error("seed", "expected a non-negative integer");
        config.seed = root["seed"].get<std::uint64_t>();
    }

    if (root.contains("numerics")) {
        const json& numerics = root["numerics"];
        reject_unknown_keys(numerics, "numerics",
                            {"grid_nodes", "t_end", "dt_initial", "tol", "ramp_duration", "steps",
                             "samples", "variant", "instances", "restarts", "iters"});
        config.grid_nodes =
            static_cast<std::size_t>(number_or(numerics, "numerics", "grid_nodes", 64));
        config.t_end = number_or(numerics, "numerics", "t_end", config.t_end);
        config.dt_initial = number_or(numerics, "numerics", "dt_initial", config.dt_initial);
        config.tol = number_or(numerics, "numerics", "tol", config.tol);
        config.ramp_duration = number_or(numerics, "numerics", "ramp_duration", config.ramp_duration);
        config.steps = static_cast<std::size_t>(number_or(numerics, "numerics", "steps", 2000));
        config.samples = static_cast<std::size_t>(number_or(numerics, "numerics", "samples", 200));
        config.instances = static_cast<int>(number_or(numerics, "numerics", "instances", 20));
        config.restarts = static_cast<int>(number_or(numerics, "numerics", "restarts", 50));
        config.iters = static_cast<int>(number_or(numerics, "numerics", "iters", 500));
        if (numerics.contains("variant")) {
            const std::string variant = numerics["variant"].get<std::string>();
            if (variant == "local") config.variant = NaturalEvolution::Local;
            else if (variant == "uniform") config.variant = NaturalEvolution::Uniform;
            else config_error("numerics.variant", "expected 'local' or 'uniform'");
        }
    }

    const bool torsion_scenario = config.kind == Kind::Relaxation || config.kind == Kind::Creep ||
                                  config.kind == Kind::CreepMuZero || config.kind == Kind::Dynamic;
    if (torsion_scenario) {
        if (!root.contains("params")) config_error("params", "missing required block");
        config.params = parse_params(root["params"]);
        if (!root.contains("input")) config_error("input", "missing required block");
        config.input = parse_input(root["input"], config.ramp_duration);
    }
    if (root.contains("material")) config.material = parse_material(root["material"]);

    if (root.contains("output")) {
        const json& output = root["output"];
        reject_unknown_keys(output, "output", {"path", "sample_stride"});
        if (output.contains("path")) config.output_path = output["path"].get<std::string>();
        config.sample_stride =
            static_cast<std::size_t>(number_or(output, "output", "sample_stride", 1));
        if (config.sample_stride == 0) config_error("output.sample_stride", "must be at least 1");
    }
    return config;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidParameterError("cannot open config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

namespace {

struct ReportBuilder {
    std::ostringstream text;
    std::vector<CheckLine> checks;
    bool ok = true;

    void line(const std::string& s) { text << s << "\n"; }

    void check(const std::string& name, double residual, double bound) {
        const bool pass = residual <= bound;
        ok = ok && pass;
        checks.push_back({name, residual, pass});
        text << "check " << name << ": residual " << format_float(residual) << " (bound "
             << format_float(bound) << ") " << (pass ? "PASS" : "FAIL") << "\n";
    }

    void check_flag(const std::string& name, bool pass, double value) {
        ok = ok && pass;
        checks.push_back({name, value, pass});
        text << "check " << name << ": value " << format_float(value) << " "
             << (pass ? "PASS" : "FAIL") << "\n";
    }
};

void write_text_file(const std::filesystem::path& path, const std::string& content,
                     std::vector<std::string>& written) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open output file '" + path.string() + "'");
    out << content;
    out.flush();
    if (!out.good()) throw Error("failed while writing '" + path.string() + "'");
    written.push_back(path.string());
}

std::string torsion_csv(const std::vector<double>& t, const std::vector<double>& u,
                        const std::vector<double>& u_d, const std::vector<double>& m,
                        double impulse, std::size_t stride) {
    std::ostringstream csv;
    csv << "t,u,u_d,m_regular,m_impulse_amplitude\n";
    for (std::size_t k = 0; k < t.size(); k += stride) {
        csv << format_float(t[k]) << ',' << format_float(u[k]) << ',' << format_float(u_d[k])
            << ',' << format_float(m[k]) << ',' << format_float(impulse) << '\n';
    }
    return csv.str();
}

std::size_t steps_for(const ScenarioConfig& config) { return std::max<std::size_t>(config.steps, 1); }

void run_relaxation(const ScenarioConfig& config, ReportBuilder& report, std::string& csv) {
    const auto& params = *config.params;
    const auto trace =
        torsion::relaxation_response(params, *config.input, config.t_end, steps_for(config));
    csv = torsion_csv(trace.t, trace.u, trace.u_d, trace.torque, trace.impulse_amplitude,
                      config.sample_stride);

    const double u0 = config.input->amplitude();
    const double plateau = params.alpha * params.alpha_d * u0 / (params.alpha + params.alpha_d);
    report.line("scenario: relaxation");
    report.line("impulse_amplitude: " + format_float(trace.impulse_amplitude));
    if (config.input->is_ideal_step()) {
        report.check("initial_torque_alpha_u0",
                     std::abs(trace.torque.front() - params.alpha * u0) /
                         std::max(1.0, std::abs(params.alpha * u0)),
                     1e-12);
    }
    report.check("final_torque_plateau",
                 std::abs(trace.torque.back() - plateau) / std::max(1.0, std::abs(plateau)), 1e-6);

    // strict decrease after the ramp, with round-off slack
    const double ramp_end = config.input->is_ideal_step() ? 0.0 : config.ramp_duration;
    double worst = 0.0;
    const double slack = 1e-12 * std::max(1.0, std::abs(params.alpha * u0));
    for (std::size_t k = 1; k < trace.t.size(); ++k) {
        if (trace.t[k - 1] < ramp_end) continue;
        worst = std::max(worst, trace.torque[k] - trace.torque[k - 1]);
    }
    report.check("monotone_decrease", std::max(worst, 0.0), slack);
}

void run_creep(const ScenarioConfig& config, ReportBuilder& report, std::string& csv,
               bool mu_zero) {
    const auto& params = *config.params;
    const auto trace = mu_zero
                           ? torsion::creep_mu_zero(params, *config.input, config.t_end, steps_for(config))
                           : torsion::creep_response(params, *config.input, config.t_end, steps_for(config));
    csv = torsion_csv(trace.t, trace.u, trace.u_d, trace.torque, 0.0, config.sample_stride);

    const double m0 = config.input->amplitude();
    const double u_limit = (params.alpha + params.alpha_d) * m0 / (params.alpha * params.alpha_d);
    const double u_d_limit = m0 / params.alpha_d;
    report.line(mu_zero ? "scenario: creep_mu_zero" : "scenario: creep");
    report.check("final_twist",
                 std::abs(trace.u.back() - u_limit) / std::max(1.0, std::abs(u_limit)), 1e-6);
    report.check("final_natural_twist",
                 std::abs(trace.u_d.back() - u_d_limit) / std::max(1.0, std::abs(u_d_limit)), 1e-6);

    double worst = 0.0;
    double most_negative = 0.0;
    for (std::size_t k = 0; k < trace.t.size(); ++k) {
        if (k > 0) {
            worst = std::max({worst, trace.u[k - 1] - trace.u[k], trace.u_d[k - 1] - trace.u_d[k]});
        }
        most_negative = std::min({most_negative, trace.u[k], trace.u_d[k]});
    }
    const double slack = 1e-12 * std::max(1.0, std::abs(u_limit));
    report.check("monotone_growth", std::max(worst, 0.0), slack);
    report.check("nonnegative_traces", std::max(-most_negative, 0.0), slack);

    if (!mu_zero) {
        const Mat2 a = params.creep_matrix();
        double expm_residual = 0.0;
        for (double t : {0.1 * config.t_end, 0.5 * config.t_end, config.t_end}) {
            const Mat2 closed = oracle::matrix_exponential_2x2(a, t);
            const Mat2 reference = oracle::matrix_exponential_reference(a, t);
            expm_residual = std::max(expm_residual, (closed - reference).cwiseAbs().maxCoeff() /
                                                        std::max(1.0, reference.cwiseAbs().maxCoeff()));
        }
        report.check("matrix_exponential_vs_reference", expm_residual, 1e-10);
    }
}

void run_dynamic(const ScenarioConfig& config, ReportBuilder& report, std::string& csv) {
    torsion::DynamicOptions options;
    options.grid_nodes = config.grid_nodes;
    options.t_end = config.t_end;
    options.samples = config.samples;
    options.variant = config.variant;
    options.time.rtol = config.tol;
    options.time.atol = config.tol * 1e-2;
    options.time.dt_initial = config.dt_initial;
    const auto trace = torsion::dynamic_pde_solve(*config.params, options, *config.input);

    std::ostringstream out;
    out << "s,t,phi,u_d\n";
    for (std::size_t s = 0; s < trace.times.size(); s += config.sample_stride) {
        for (std::size_t i = 0; i < trace.node_positions.size(); ++i) {
            out << format_float(trace.node_positions[i]) << ',' << format_float(trace.times[s])
                << ',' << format_float(trace.angle[s][i]) << ','
                << format_float(trace.natural_twist[s][i]) << '\n';
        }
    }
    csv = out.str();

    report.line("scenario: dynamic");
    report.line("boundary_twist_final: " + format_float(trace.boundary_twist.back()));
    report.line("boundary_torque_final: " + format_float(trace.boundary_torque.back()));
    report.line("steps: " + std::to_string(trace.stats.steps) +
                ", rejected: " + std::to_string(trace.stats.rejected) +
                ", factorizations: " + std::to_string(trace.stats.factorizations));
    report.check("energy_balance", trace.energy_balance_residual, 1e-6);
}

void run_maximizer_check(const ScenarioConfig& config, ReportBuilder& report) {
    report.line("scenario: maximizer_check");
    const auto samples =
        oracle::run_maximizer_checks(config.instances, config.restarts, config.iters, config.seed);
    double worst_over = 0.0;
    double worst_under = 0.0;
    double worst_rate = 0.0;
    double worst_constraint = 0.0;
    for (const auto& s : samples) {
        report.line("instance nodes=" + std::to_string(s.nodes) +
                    " space=" + (s.uniform ? "uniform" : "local") +
                    " value_gap=" + format_float(s.value_gap_rel) +
                    " rate_distance=" + format_float(s.rate_distance_rel) +
                    " constraint_residual=" + format_float(s.constraint_residual_rel));
        worst_over = std::max(worst_over, s.value_gap_rel);
        worst_under = std::max(worst_under, -s.value_gap_rel);
        worst_rate = std::max(worst_rate, s.rate_distance_rel);
        worst_constraint = std::max(worst_constraint, s.constraint_residual_rel);
    }
    report.check("optimality_upper_bound", worst_over, 1e-8);
    report.check("ascent_reaches_maximum", worst_under, 1e-6);
    report.check("argmax_matches_closed_form", worst_rate, 1e-4);
    report.check("constraint_residual", worst_constraint, 1e-10);
}

MaterialModel default_counterexample_material() {
    QuadraticEnergyParams energy;
    energy.curvature = Vec3(1.0, 1.0, 2.0);
    energy.tangent = Vec3(1.0, 1.0, 1.0);
    energy.natural_curvature = Vec3(1.0, 1.0, 1.0);
    energy.natural_tangent = Vec3(1.0, 1.0, 1.0);
    DissipationTensors tensors{SpdTensor(Mat3::Identity()), SpdTensor(Mat3::Identity()),
                               SpdTensor(Vec3(1.0, 1.0, 0.5).asDiagonal()),
                               SpdTensor(Mat3::Identity())};
    return MaterialModel{energy, tensors};
}

void run_counterexample(const ScenarioConfig& config, ReportBuilder& report, std::string& csv) {
    const MaterialModel material =
        config.material ? *config.material : default_counterexample_material();
    const EnergyModel model = EnergyModel::quadratic(material.energy);

    // Twist profile with u(0) > 0 but negative mean, frozen current strains.
    const std::size_t n = std::max<std::size_t>(config.grid_nodes, 16);
    GridStrains grid{RodGrid(1.0, n), {}};
    grid.states.reserve(n);
    std::vector<double> twist(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = grid.grid.position(i);
        twist[i] = std::cos(2.0 * std::numbers::pi * s) - 0.2;
        StrainPoint p;
        p.u_d = Vec3::Zero();
        p.v_d = Vec3::UnitZ();
        p.u = Vec3(0.0, 0.0, twist[i]);
        p.v = Vec3::UnitZ();
        grid.states.push_back(p);
    }
    const std::vector<StrainRates> rates(
        n, StrainRates{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()});

    const auto xi = pointwise_dissipation_field(model, material.tensors, grid, rates,
                                                NaturalEvolution::Uniform);
    const double total = grid.grid.integrate(xi);

    double twist_integral = 0.0;
    for (std::size_t i = 0; i < n; ++i) twist_integral += grid.grid.weight(i) * twist[i];
    const double stiffness = material.energy.curvature[2];
    const double viscosity = material.tensors.natural_curvature_viscosity.matrix()(2, 2);
    const double predicted = stiffness * stiffness / viscosity * twist[0] * twist_integral;

    std::ostringstream out;
    out << "s,xi\n";
    for (std::size_t i = 0; i < n; ++i) {
        out << format_float(grid.grid.position(i)) << ',' << format_float(xi[i]) << '\n';
    }
    csv = out.str();

    const double h = grid.grid.spacing();
    report.line("scenario: counterexample");
    report.line("xi_at_s0: " + format_float(xi.front()));
    report.line("predicted_xi_at_s0: " + format_float(predicted));
    report.line("total_dissipation: " + format_float(total));
    report.check_flag("pointwise_negative", xi.front() < 0.0, xi.front());
    report.check("matches_closed_form", std::abs(xi.front() - predicted),
                 10.0 * h * h * std::abs(predicted) + 1e-12);
    report.check("total_nonnegative", std::max(-total, 0.0), 1e-12);
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& config, const std::string& out_dir,
                            bool verify_only) {
    std::filesystem::create_directories(out_dir);

    ReportBuilder report;
    std::string csv;
    switch (config.kind) {
        case Kind::Relaxation:
            run_relaxation(config, report, csv);
            break;
        case Kind::Creep:
            run_creep(config, report, csv, false);
            break;
        case Kind::CreepMuZero:
            run_creep(config, report, csv, true);
            break;
        case Kind::Dynamic:
            run_dynamic(config, report, csv);
            break;
        case Kind::MaximizerCheck:
            run_maximizer_check(config, report);
            break;
        case Kind::Counterexample:
            run_counterexample(config, report, csv);
            break;
    }
    report.line(std::string("status: ") + (report.ok ? "PASS" : "FAIL"));

    ScenarioResult result;
    result.ok = report.ok;
    result.checks = report.checks;
    result.report_text = report.text.str();

    const std::filesystem::path dir(out_dir);
    if (!verify_only && !csv.empty()) {
        write_text_file(dir / config.output_path, csv, result.written_files);
    }
    write_text_file(dir / "report.txt", result.report_text, result.written_files);
    return result;
}

}  // namespace scenario
}  // namespace evorod
