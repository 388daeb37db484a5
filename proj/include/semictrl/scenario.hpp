#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "semictrl/core.hpp"
#include "semictrl/jsonio.hpp"
#include "semictrl/steering.hpp"
#include "semictrl/verify.hpp"

// Scenario configs (JSON), experiment dispatch and result serialization:
// the batch surface through which every module is driven.

namespace semictrl {

struct GeneratorConfig {
    enum class Kind { diagonal, dense, heat_dirichlet_modes };
    Kind kind = Kind::diagonal;
    Vec eigenvalues;
    Mat matrix;
    int modes = 0;

    int state_dim() const;
    GeneratorSpec build() const;
};

struct InputConfig {
    bool identity = true;
    Mat matrix;

    Mat build(int state_dim) const;
};

struct NonlinearityConfig {
    enum class Kind { zero, pointwise_polynomial, collocation_polynomial };
    Kind kind = Kind::zero;
    std::map<int, double> coefficients;  // degree (>= 2) -> coefficient

    NonlinearMap build(int dim) const;
};

struct SteerConfig {
    Vec target;
    SteerMode mode = SteerMode::frozen;
    double tol = 1e-9;
    int max_iterations = 25;
};

struct ProbeConfig {
    int random_directions = 0;  // sampled on the unit sphere from the seed
    std::vector<Vec> directions;
    std::vector<double> radii;
    double tol = 1e-9;
    int max_iterations = 25;
};

struct SimulateConfig {
    Vec constant_control;  // empty = zero control
    Vec initial_state;     // empty = origin
};

struct VerifyConfig {
    bool full = true;  // run the b1/b2/lemma4/frechet/theorem7 battery
    double ball_radius = 1.0;
    int n_samples = 400;
    double control_radius = 0.1;
    int lemma4_pairs = 200;
    int theorem7_pairs = 20;
    std::vector<double> frechet_scales;
    std::optional<Vec> frechet_base;       // constant control value
    std::optional<Vec> frechet_direction;  // constant control value
    int gronwall_trials = 0;
};

struct Scenario {
    std::string name;
    GeneratorConfig generator;
    InputConfig input;
    NonlinearityConfig nonlinearity;
    TimeGrid grid;
    PicardConfig picard;
    std::string experiment;  // simulate | steer | probe | verify | gramian
    std::uint64_t seed = 0;

    SteerConfig steer;
    ProbeConfig probe;
    SimulateConfig simulate;
    VerifyConfig verify;

    SemilinearSystem build_system() const;
    jsonio::Value to_json() const;

    // Both throw ConfigError with the offending field path.
    static Scenario parse_text(const std::string& json_text);
    static Scenario parse_file(const std::string& path);
};

struct RunRecord {
    Scenario scenario;
    std::string status = "success";  // success | failed
    std::string error_category;      // config | solver | hypothesis
    std::string error_message;
    int exit_code = 0;
    double duration_seconds = 0.0;  // report.txt only, keeps result.json reproducible
    std::string timestamp;          // report.txt only
    jsonio::Value outputs = jsonio::Value::object();

    // typed copies for the CSV emitters
    std::vector<double> residuals;
    std::vector<ProbeEntry> probe_entries;
    Vec gramian_spectrum;

    // human-readable key/value lines for report.txt (6 significant digits)
    std::vector<std::pair<std::string, std::string>> summary;

    jsonio::Value result_json() const;
};

struct ShippedScenario {
    const char* name;
    const char* description;
    const char* text;
};
const std::vector<ShippedScenario>& shipped_scenarios();
std::optional<std::string> shipped_scenario_text(const std::string& name);

enum class ReportFormat { table, csv, json };
ReportFormat parse_format(const std::string& s);

// Runs the configured experiment. Failures of the run (solver errors,
// failed hypotheses) are recorded in the record, not thrown.
RunRecord execute_scenario(const Scenario& s, int threads = 1);

// Writes <name>.result.json, <name>.report.txt and the experiment's CSV
// files into out_dir; returns the paths written.
std::vector<std::string> emit_report(const RunRecord& record, const std::string& out_dir,
                                     ReportFormat format);

// Resolve (shipped name or file path) + execute + emit.
RunRecord run_scenario(const std::string& config_path_or_name, const std::string& out_dir,
                       ReportFormat format,
                       std::optional<std::uint64_t> seed_override = std::nullopt,
                       int threads = 1);

}  // namespace semictrl
