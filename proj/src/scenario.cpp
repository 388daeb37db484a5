#include "semictrl/scenario.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "semictrl/linearized.hpp"
#include "semictrl/mild_solver.hpp"
#include "semictrl/rng.hpp"
#include "semictrl/semigroup.hpp"

namespace semictrl {

namespace {

using njson = nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path, what);
}

const njson& require_field(const njson& obj, const std::string& path, const char* key) {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(path + "." + key, "missing required field");
    return *it;
}

const njson* optional_field(const njson& obj, const char* key) {
    if (!obj.is_object()) return nullptr;
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double as_number(const njson& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

int as_int(const njson& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<int>();
}

std::string as_string(const njson& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
}

Vec as_vector(const njson& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array of numbers");
    Vec out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

Mat as_matrix(const njson& v, const std::string& path) {
    if (!v.is_array() || v.empty()) fail(path, "expected a nonempty array of rows");
    std::vector<Vec> rows;
    for (std::size_t i = 0; i < v.size(); ++i)
        rows.push_back(as_vector(v[i], path + "[" + std::to_string(i) + "]"));
    const std::size_t cols = rows.front().size();
    if (cols == 0) fail(path, "rows must be nonempty");
    Mat m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols) fail(path, "rows must have equal length");
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

constexpr double kPi = 3.14159265358979323846264338327950288;

}  // namespace

int GeneratorConfig::state_dim() const {
    switch (kind) {
        case Kind::diagonal: return static_cast<int>(eigenvalues.size());
        case Kind::dense: return static_cast<int>(matrix.rows());
        case Kind::heat_dirichlet_modes: return modes;
    }
    return 0;
}

GeneratorSpec GeneratorConfig::build() const {
    switch (kind) {
        case Kind::diagonal: return GeneratorSpec::diagonal(eigenvalues);
        case Kind::dense: return GeneratorSpec::dense(matrix);
        case Kind::heat_dirichlet_modes: {
            Vec eig(modes);
            for (int k = 0; k < modes; ++k)
                eig[k] = -((k + 1) * kPi) * ((k + 1) * kPi);
            return GeneratorSpec::diagonal(std::move(eig));
        }
    }
    throw ConfigError("system.generator", "unknown generator kind");
}

Mat InputConfig::build(int state_dim) const {
    if (identity) return Mat::identity(static_cast<std::size_t>(state_dim));
    return matrix;
}

NonlinearMap NonlinearityConfig::build(int dim) const {
    switch (kind) {
        case Kind::zero: return NonlinearMap::zero(dim);
        case Kind::pointwise_polynomial:
        case Kind::collocation_polynomial: {
            int max_degree = 1;
            for (const auto& [deg, _] : coefficients) max_degree = std::max(max_degree, deg);
            Vec coeffs(static_cast<std::size_t>(std::max(0, max_degree - 1)), 0.0);
            for (const auto& [deg, c] : coefficients) coeffs[deg - 2] = c;
            return kind == Kind::pointwise_polynomial
                       ? NonlinearMap::pointwise_polynomial(dim, std::move(coeffs))
                       : NonlinearMap::collocation_polynomial(dim, std::move(coeffs));
        }
    }
    throw ConfigError("system.nonlinearity", "unknown nonlinearity kind");
}

SemilinearSystem Scenario::build_system() const {
    const int n = generator.state_dim();
    return SemilinearSystem(generator.build(), input.build(n), nonlinearity.build(n));
}

namespace {

GeneratorConfig parse_generator(const njson& v, const std::string& path) {
    GeneratorConfig g;
    const std::string type = as_string(require_field(v, path, "type"), path + ".type");
    if (type == "diagonal") {
        g.kind = GeneratorConfig::Kind::diagonal;
        g.eigenvalues = as_vector(require_field(v, path, "eigenvalues"), path + ".eigenvalues");
        if (g.eigenvalues.empty()) fail(path + ".eigenvalues", "must be nonempty");
    } else if (type == "dense") {
        g.kind = GeneratorConfig::Kind::dense;
        g.matrix = as_matrix(require_field(v, path, "matrix"), path + ".matrix");
        if (g.matrix.rows() != g.matrix.cols()) fail(path + ".matrix", "must be square");
    } else if (type == "heat_dirichlet_modes") {
        g.kind = GeneratorConfig::Kind::heat_dirichlet_modes;
        g.modes = as_int(require_field(v, path, "modes"), path + ".modes");
        if (g.modes < 1) fail(path + ".modes", "must be >= 1");
    } else {
        fail(path + ".type", "must be diagonal, dense or heat_dirichlet_modes");
    }
    return g;
}

InputConfig parse_input(const njson& v, const std::string& path, int state_dim) {
    InputConfig b;
    if (v.is_string()) {
        if (v.get<std::string>() != "identity")
            fail(path, "string form must be \"identity\"");
        b.identity = true;
        return b;
    }
    b.identity = false;
    b.matrix = as_matrix(v, path);
    if (static_cast<int>(b.matrix.rows()) != state_dim)
        fail(path, "row count must equal the state dimension");
    return b;
}

NonlinearityConfig parse_nonlinearity(const njson& v, const std::string& path) {
    NonlinearityConfig f;
    const std::string type = as_string(require_field(v, path, "type"), path + ".type");
    if (type == "zero") {
        f.kind = NonlinearityConfig::Kind::zero;
        return f;
    }
    if (type == "pointwise_polynomial")
        f.kind = NonlinearityConfig::Kind::pointwise_polynomial;
    else if (type == "collocation_polynomial")
        f.kind = NonlinearityConfig::Kind::collocation_polynomial;
    else
        fail(path + ".type", "must be zero, pointwise_polynomial or collocation_polynomial");

    const njson& coeffs = require_field(v, path, "coefficients");
    if (!coeffs.is_object() || coeffs.empty())
        fail(path + ".coefficients", "expected a nonempty object of degree -> coefficient");
    for (auto it = coeffs.begin(); it != coeffs.end(); ++it) {
        int degree = 0;
        try {
            degree = std::stoi(it.key());
        } catch (...) {
            fail(path + ".coefficients", "keys must be integer degrees");
        }
        if (degree < 2)
            fail(path + ".coefficients." + it.key(),
                 "degrees below 2 would break f(0) = 0, Df(0) = 0");
        f.coefficients[degree] =
            as_number(it.value(), path + ".coefficients." + it.key());
    }
    return f;
}

}  // namespace

Scenario Scenario::parse_text(const std::string& json_text) {
    njson root;
    try {
        root = njson::parse(json_text);
    } catch (const njson::parse_error& e) {
        fail("config", std::string("invalid JSON: ") + e.what());
    }

    Scenario s;
    s.name = as_string(require_field(root, "config", "name"), "name");
    if (s.name.empty()) fail("name", "must be nonempty");

    const njson& system = require_field(root, "config", "system");
    s.generator = parse_generator(require_field(system, "system", "generator"),
                                  "system.generator");
    const int n = s.generator.state_dim();
    s.input = parse_input(require_field(system, "system", "input_matrix"),
                          "system.input_matrix", n);
    s.nonlinearity = parse_nonlinearity(require_field(system, "system", "nonlinearity"),
                                        "system.nonlinearity");

    const njson& grid = require_field(root, "config", "grid");
    const double t_end = as_number(require_field(grid, "grid", "t_end"), "grid.t_end");
    const int n_steps = as_int(require_field(grid, "grid", "n_steps"), "grid.n_steps");
    if (!(t_end > 0.0)) fail("grid.t_end", "must be > 0");
    if (n_steps < 1) fail("grid.n_steps", "must be >= 1");
    s.grid = TimeGrid(t_end, n_steps);

    if (const njson* picard = optional_field(root, "picard")) {
        if (const njson* v = optional_field(*picard, "tol"))
            s.picard.tol = as_number(*v, "picard.tol");
        if (const njson* v = optional_field(*picard, "max_iterations"))
            s.picard.max_iterations = as_int(*v, "picard.max_iterations");
        if (const njson* v = optional_field(*picard, "blowup_threshold"))
            s.picard.blowup_threshold = as_number(*v, "picard.blowup_threshold");
        if (const njson* v = optional_field(*picard, "max_subinterval_halvings"))
            s.picard.max_subinterval_halvings =
                as_int(*v, "picard.max_subinterval_halvings");
        if (!(s.picard.tol > 0.0)) fail("picard.tol", "must be > 0");
        if (s.picard.max_iterations < 1) fail("picard.max_iterations", "must be >= 1");
        if (!(s.picard.blowup_threshold > 0.0))
            fail("picard.blowup_threshold", "must be > 0");
        if (s.picard.max_subinterval_halvings < 0)
            fail("picard.max_subinterval_halvings", "must be >= 0");
    }

    s.experiment = as_string(require_field(root, "config", "experiment"), "experiment");
    if (s.experiment != "simulate" && s.experiment != "steer" && s.experiment != "probe" &&
        s.experiment != "verify" && s.experiment != "gramian")
        fail("experiment", "must be one of simulate, steer, probe, verify, gramian");

    const bool stochastic = s.experiment == "verify" ||
                            (s.experiment == "probe");
    if (const njson* v = optional_field(root, "seed")) {
        if (!v->is_number_integer()) fail("seed", "expected an integer");
        s.seed = v->get<std::uint64_t>();
    } else if (stochastic) {
        fail("seed", "required for stochastic experiments");
    }

    if (s.experiment == "steer") {
        const njson& sec = require_field(root, "config", "steer");
        s.steer.target = as_vector(require_field(sec, "steer", "target"), "steer.target");
        if (static_cast<int>(s.steer.target.size()) != n)
            fail("steer.target", "dimension must equal the state dimension");
        if (const njson* v = optional_field(sec, "mode")) {
            const std::string mode = as_string(*v, "steer.mode");
            if (mode == "frozen")
                s.steer.mode = SteerMode::frozen;
            else if (mode == "full_newton")
                s.steer.mode = SteerMode::full_newton;
            else
                fail("steer.mode", "must be frozen or full_newton");
        }
        if (const njson* v = optional_field(sec, "tol")) s.steer.tol = as_number(*v, "steer.tol");
        if (const njson* v = optional_field(sec, "max_iterations"))
            s.steer.max_iterations = as_int(*v, "steer.max_iterations");
        if (!(s.steer.tol > 0.0)) fail("steer.tol", "must be > 0");
        if (s.steer.max_iterations < 1) fail("steer.max_iterations", "must be >= 1");
    } else if (s.experiment == "probe") {
        const njson& sec = require_field(root, "config", "probe");
        if (const njson* v = optional_field(sec, "random_directions"))
            s.probe.random_directions = as_int(*v, "probe.random_directions");
        if (const njson* v = optional_field(sec, "directions")) {
            if (!v->is_array()) fail("probe.directions", "expected an array of vectors");
            for (std::size_t i = 0; i < v->size(); ++i) {
                const std::string path = "probe.directions[" + std::to_string(i) + "]";
                Vec d = as_vector((*v)[i], path);
                if (static_cast<int>(d.size()) != n)
                    fail(path, "dimension must equal the state dimension");
                const double nn = norm2(d);
                if (std::abs(nn - 1.0) > 1e-6) fail(path, "directions must be unit vectors");
                s.probe.directions.push_back(std::move(d));
            }
        }
        if (s.probe.random_directions < 0)
            fail("probe.random_directions", "must be >= 0");
        if (s.probe.random_directions == 0 && s.probe.directions.empty())
            fail("probe", "needs random_directions or an explicit direction list");
        s.probe.radii = as_vector(require_field(sec, "probe", "radii"), "probe.radii");
        if (s.probe.radii.empty()) fail("probe.radii", "must be nonempty");
        for (double r : s.probe.radii)
            if (!(r > 0.0)) fail("probe.radii", "radii must be > 0");
        if (const njson* v = optional_field(sec, "tol")) s.probe.tol = as_number(*v, "probe.tol");
        if (const njson* v = optional_field(sec, "max_iterations"))
            s.probe.max_iterations = as_int(*v, "probe.max_iterations");
    } else if (s.experiment == "simulate") {
        const njson& sec = require_field(root, "config", "simulate");
        if (const njson* v = optional_field(sec, "constant_control")) {
            s.simulate.constant_control = as_vector(*v, "simulate.constant_control");
            if (s.simulate.constant_control.size() !=
                (s.input.identity ? static_cast<std::size_t>(n) : s.input.matrix.cols()))
                fail("simulate.constant_control", "dimension must equal the input dimension");
        }
        if (const njson* v = optional_field(sec, "initial_state")) {
            s.simulate.initial_state = as_vector(*v, "simulate.initial_state");
            if (static_cast<int>(s.simulate.initial_state.size()) != n)
                fail("simulate.initial_state", "dimension must equal the state dimension");
        }
    } else if (s.experiment == "verify") {
        const njson& sec = require_field(root, "config", "verify");
        if (const njson* v = optional_field(sec, "full")) {
            if (!v->is_boolean()) fail("verify.full", "expected a boolean");
            s.verify.full = v->get<bool>();
        }
        if (const njson* v = optional_field(sec, "ball_radius"))
            s.verify.ball_radius = as_number(*v, "verify.ball_radius");
        if (const njson* v = optional_field(sec, "n_samples"))
            s.verify.n_samples = as_int(*v, "verify.n_samples");
        if (const njson* v = optional_field(sec, "control_radius"))
            s.verify.control_radius = as_number(*v, "verify.control_radius");
        if (const njson* v = optional_field(sec, "lemma4_pairs"))
            s.verify.lemma4_pairs = as_int(*v, "verify.lemma4_pairs");
        if (const njson* v = optional_field(sec, "theorem7_pairs"))
            s.verify.theorem7_pairs = as_int(*v, "verify.theorem7_pairs");
        if (const njson* v = optional_field(sec, "frechet_scales"))
            s.verify.frechet_scales = as_vector(*v, "verify.frechet_scales");
        if (const njson* v = optional_field(sec, "frechet_base"))
            s.verify.frechet_base = as_vector(*v, "verify.frechet_base");
        if (const njson* v = optional_field(sec, "frechet_direction"))
            s.verify.frechet_direction = as_vector(*v, "verify.frechet_direction");
        if (const njson* v = optional_field(sec, "gronwall_trials"))
            s.verify.gronwall_trials = as_int(*v, "verify.gronwall_trials");
        if (s.verify.gronwall_trials < 0) fail("verify.gronwall_trials", "must be >= 0");
    }

    // dimension cross-checks via construction
    s.build_system();
    return s;
}

Scenario Scenario::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("config", "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str());
}

jsonio::Value Scenario::to_json() const {
    using jsonio::Value;
    Value root = Value::object();
    root.set("name", Value::str(name));

    Value system = Value::object();
    Value gen = Value::object();
    switch (generator.kind) {
        case GeneratorConfig::Kind::diagonal:
            gen.set("type", Value::str("diagonal"));
            gen.set("eigenvalues", Value::real_array(generator.eigenvalues));
            break;
        case GeneratorConfig::Kind::dense: {
            gen.set("type", Value::str("dense"));
            Value rows = Value::array();
            for (std::size_t i = 0; i < generator.matrix.rows(); ++i) {
                Value row = Value::array();
                for (std::size_t j = 0; j < generator.matrix.cols(); ++j)
                    row.push(Value::real(generator.matrix(i, j)));
                rows.push(std::move(row));
            }
            gen.set("matrix", std::move(rows));
            break;
        }
        case GeneratorConfig::Kind::heat_dirichlet_modes:
            gen.set("type", Value::str("heat_dirichlet_modes"));
            gen.set("modes", Value::integer(generator.modes));
            break;
    }
    system.set("generator", std::move(gen));

    if (input.identity) {
        system.set("input_matrix", Value::str("identity"));
    } else {
        Value rows = Value::array();
        for (std::size_t i = 0; i < input.matrix.rows(); ++i) {
            Value row = Value::array();
            for (std::size_t j = 0; j < input.matrix.cols(); ++j)
                row.push(Value::real(input.matrix(i, j)));
            rows.push(std::move(row));
        }
        system.set("input_matrix", std::move(rows));
    }

    Value nl = Value::object();
    switch (nonlinearity.kind) {
        case NonlinearityConfig::Kind::zero:
            nl.set("type", Value::str("zero"));
            break;
        case NonlinearityConfig::Kind::pointwise_polynomial:
        case NonlinearityConfig::Kind::collocation_polynomial: {
            nl.set("type", Value::str(nonlinearity.kind ==
                                              NonlinearityConfig::Kind::pointwise_polynomial
                                          ? "pointwise_polynomial"
                                          : "collocation_polynomial"));
            Value coeffs = Value::object();
            for (const auto& [deg, c] : nonlinearity.coefficients)
                coeffs.set(std::to_string(deg), Value::real(c));
            nl.set("coefficients", std::move(coeffs));
            break;
        }
    }
    system.set("nonlinearity", std::move(nl));
    root.set("system", std::move(system));

    Value grid_v = Value::object();
    grid_v.set("t_end", Value::real(grid.t_end));
    grid_v.set("n_steps", Value::integer(grid.n_steps));
    root.set("grid", std::move(grid_v));

    Value picard_v = Value::object();
    picard_v.set("tol", Value::real(picard.tol));
    picard_v.set("max_iterations", Value::integer(picard.max_iterations));
    picard_v.set("blowup_threshold", Value::real(picard.blowup_threshold));
    picard_v.set("max_subinterval_halvings", Value::integer(picard.max_subinterval_halvings));
    root.set("picard", std::move(picard_v));

    root.set("experiment", Value::str(experiment));
    root.set("seed", Value::integer(static_cast<std::int64_t>(seed)));

    if (experiment == "steer") {
        Value sec = Value::object();
        sec.set("target", Value::real_array(steer.target));
        sec.set("mode", Value::str(steer.mode == SteerMode::frozen ? "frozen" : "full_newton"));
        sec.set("tol", Value::real(steer.tol));
        sec.set("max_iterations", Value::integer(steer.max_iterations));
        root.set("steer", std::move(sec));
    } else if (experiment == "probe") {
        Value sec = Value::object();
        if (probe.random_directions > 0)
            sec.set("random_directions", Value::integer(probe.random_directions));
        if (!probe.directions.empty()) {
            Value dirs = Value::array();
            for (const Vec& d : probe.directions) dirs.push(Value::real_array(d));
            sec.set("directions", std::move(dirs));
        }
        sec.set("radii", Value::real_array(probe.radii));
        sec.set("tol", Value::real(probe.tol));
        sec.set("max_iterations", Value::integer(probe.max_iterations));
        root.set("probe", std::move(sec));
    } else if (experiment == "simulate") {
        Value sec = Value::object();
        if (!simulate.constant_control.empty())
            sec.set("constant_control", Value::real_array(simulate.constant_control));
        if (!simulate.initial_state.empty())
            sec.set("initial_state", Value::real_array(simulate.initial_state));
        root.set("simulate", std::move(sec));
    } else if (experiment == "verify") {
        Value sec = Value::object();
        sec.set("full", Value::boolean(verify.full));
        if (verify.full) {
            sec.set("ball_radius", Value::real(verify.ball_radius));
            sec.set("n_samples", Value::integer(verify.n_samples));
            sec.set("control_radius", Value::real(verify.control_radius));
            sec.set("lemma4_pairs", Value::integer(verify.lemma4_pairs));
            sec.set("theorem7_pairs", Value::integer(verify.theorem7_pairs));
            if (!verify.frechet_scales.empty())
                sec.set("frechet_scales", Value::real_array(verify.frechet_scales));
            if (verify.frechet_base)
                sec.set("frechet_base", Value::real_array(*verify.frechet_base));
            if (verify.frechet_direction)
                sec.set("frechet_direction", Value::real_array(*verify.frechet_direction));
        }
        sec.set("gronwall_trials", Value::integer(verify.gronwall_trials));
        root.set("verify", std::move(sec));
    }
    return root;
}

jsonio::Value RunRecord::result_json() const {
    using jsonio::Value;
    Value root = Value::object();
    root.set("scenario", Value::str(scenario.name));
    root.set("toolkit_version", Value::str(kToolkitVersion));
    root.set("seed", Value::integer(static_cast<std::int64_t>(scenario.seed)));
    root.set("status", Value::str(status));
    if (status == "success") {
        root.set("error", Value::null());
    } else {
        Value err = Value::object();
        err.set("category", Value::str(error_category));
        err.set("message", Value::str(error_message));
        root.set("error", std::move(err));
    }
    root.set("config", scenario.to_json());
    root.set("outputs", outputs);
    return root;
}

namespace {

void mark_failed(RunRecord& r, const std::string& category, const std::string& message) {
    r.status = "failed";
    r.error_category = category;
    r.error_message = message;
    r.exit_code = category == "config" ? 2 : (category == "solver" ? 3 : 4);
}

void run_steer_experiment(RunRecord& record, const Scenario& s, const SemilinearSystem& sys,
                          const SemigroupModel& sg) {
    using jsonio::Value;
    SteeringResult r = steer(sys, sg, s.steer.target, s.steer.mode, s.steer.tol,
                             s.steer.max_iterations, s.picard);

    Value out = Value::object();
    out.set("success", Value::boolean(r.success));
    out.set("status", Value::str(to_string(r.status)));
    out.set("iterations", Value::integer(r.iterations));
    const double final_res = r.residual_history.empty() ? 0.0 : r.residual_history.back();
    out.set("final_residual", Value::real(final_res));
    out.set("contraction_estimate", Value::real(r.contraction_estimate));
    out.set("control_l2_norm", Value::real(l2_norm(r.control)));
    out.set("final_state", Value::real_array(r.final_state));
    out.set("residual_history", Value::real_array(r.residual_history));
    record.outputs = std::move(out);
    record.residuals = r.residual_history;

    record.summary = {{"status", to_string(r.status)},
                      {"iterations", std::to_string(r.iterations)},
                      {"final_residual", fmt6(final_res)},
                      {"contraction_estimate", fmt6(r.contraction_estimate)},
                      {"control_l2_norm", fmt6(l2_norm(r.control))}};

    if (!r.success)
        mark_failed(record, r.status == SteerStatus::stalled ? "hypothesis" : "solver",
                    std::string("steering did not converge: ") + to_string(r.status));
}

void run_probe_experiment(RunRecord& record, const Scenario& s, const SemilinearSystem& sys,
                          const SemigroupModel& sg, int threads) {
    using jsonio::Value;
    std::vector<Vec> directions = s.probe.directions;
    if (s.probe.random_directions > 0) {
        Rng rng(s.seed);
        for (int i = 0; i < s.probe.random_directions; ++i)
            directions.push_back(rng.unit_vector(static_cast<std::size_t>(sys.state_dim())));
    }

    record.probe_entries = reachable_radius_probe(sys, sg, directions, s.probe.radii,
                                                  s.probe.tol, s.probe.max_iterations,
                                                  s.picard, threads);

    Value entries = Value::array();
    bool all_success = true;
    for (const ProbeEntry& e : record.probe_entries) {
        Value row = Value::object();
        row.set("direction_index", Value::integer(e.direction_index));
        row.set("radius", Value::real(e.radius));
        row.set("success", Value::boolean(e.success));
        row.set("outcome", Value::str(e.outcome));
        row.set("iterations", Value::integer(e.iterations));
        row.set("final_residual", Value::real(e.final_residual));
        row.set("contraction_estimate", Value::real(e.contraction_estimate));
        entries.push(std::move(row));
        all_success = all_success && e.success;
    }

    Value by_radius = Value::array();
    record.summary = {{"directions", std::to_string(directions.size())},
                      {"cells", std::to_string(record.probe_entries.size())},
                      {"all_success", all_success ? "true" : "false"}};
    for (double radius : s.probe.radii) {
        double acc = 0.0;
        int count = 0;
        for (const ProbeEntry& e : record.probe_entries)
            if (e.radius == radius && e.success) {
                acc += e.contraction_estimate;
                ++count;
            }
        Value row = Value::object();
        row.set("radius", Value::real(radius));
        row.set("successes", Value::integer(count));
        row.set("mean_contraction", Value::real(count > 0 ? acc / count : 0.0));
        by_radius.push(std::move(row));
        record.summary.emplace_back("mean_contraction@" + fmt6(radius),
                                    fmt6(count > 0 ? acc / count : 0.0));
    }

    Value out = Value::object();
    out.set("all_success", Value::boolean(all_success));
    out.set("entries", std::move(entries));
    out.set("by_radius", std::move(by_radius));
    record.outputs = std::move(out);

    if (!all_success)
        mark_failed(record, "hypothesis", "one or more probe cells failed to steer");
}

void run_simulate_experiment(RunRecord& record, const Scenario& s,
                             const SemilinearSystem& sys, const SemigroupModel& sg) {
    using jsonio::Value;
    const ControlSignal u = s.simulate.constant_control.empty()
                                ? zero_control(sg.grid, sys.input_dim())
                                : constant_control(sg.grid, s.simulate.constant_control);
    Vec x0 = s.simulate.initial_state;
    if (x0.empty()) x0.assign(static_cast<std::size_t>(sys.state_dim()), 0.0);

    const Trajectory traj = solve_mild(sys, sg, u, x0, s.picard);
    Value out = Value::object();
    out.set("converged", Value::boolean(traj.converged));
    out.set("picard_iterations", Value::integer(traj.picard_iterations));
    out.set("final_state", Value::real_array(traj.final_state()));
    out.set("final_norm", Value::real(norm2(traj.final_state())));
    out.set("sup_norm", Value::real(sup_norm(traj)));
    record.outputs = std::move(out);

    record.summary = {{"picard_iterations", std::to_string(traj.picard_iterations)},
                      {"final_norm", fmt6(norm2(traj.final_state()))},
                      {"sup_norm", fmt6(sup_norm(traj))}};
}

void run_verify_experiment(RunRecord& record, const Scenario& s, const SemilinearSystem& sys,
                           const SemigroupModel& sg) {
    using jsonio::Value;
    Value out = Value::object();
    bool ok = true;

    if (s.verify.full) {
        VerifyParams params;
        params.ball_radius = s.verify.ball_radius;
        params.b_samples = s.verify.n_samples;
        params.control_radius = s.verify.control_radius;
        params.lemma4_pairs = s.verify.lemma4_pairs;
        params.theorem7_pairs = s.verify.theorem7_pairs;
        params.frechet_scales = s.verify.frechet_scales;
        if (s.verify.frechet_base) {
            params.frechet_base = constant_control(sg.grid, *s.verify.frechet_base);
            params.has_frechet_base = true;
        }
        if (s.verify.frechet_direction) {
            params.frechet_direction = constant_control(sg.grid, *s.verify.frechet_direction);
            params.has_frechet_direction = true;
        }

        const VerificationReport rep = run_full_verification(sys, sg, s.picard, params, s.seed);

        out.set("b1_alpha", Value::real(rep.b1.alpha));
        out.set("b1_gamma", Value::real(rep.b1.gamma));
        out.set("b1_fit_r2", Value::real(rep.b1.fit_r2));
        out.set("b1_degenerate", Value::boolean(rep.b1.degenerate));
        out.set("b2_lipschitz", Value::real(rep.b2_lipschitz));
        out.set("lemma4_c_empirical", Value::real(rep.lemma4.c_empirical));
        out.set("lemma4_c_theoretical", Value::real(rep.lemma4.c_theoretical));
        out.set("lemma4_pairs", Value::integer(rep.lemma4.pairs));
        out.set("lemma4_violations", Value::integer(rep.lemma4.violations));
        out.set("lemma4_visited_radius", Value::real(rep.lemma4.visited_radius));
        out.set("frechet_slope", Value::real(rep.frechet.slope));
        out.set("frechet_scales", Value::real_array(rep.frechet.scales));
        out.set("frechet_delta_norms", Value::real_array(rep.frechet.delta_norms));
        out.set("frechet_sigma_norms", Value::real_array(rep.frechet.sigma_norms));
        out.set("frechet_ratios", Value::real_array(rep.frechet.ratios));
        out.set("theorem7_ratio_max", Value::real(rep.theorem7.max_ratio));
        out.set("theorem7_max_measured", Value::real(rep.theorem7.max_measured));
        out.set("theorem7_pairs", Value::integer(rep.theorem7.pairs));

        Value constants = Value::object();
        constants.set("M", Value::real(rep.M));
        constants.set("L", Value::real(rep.L));
        constants.set("k", Value::real(rep.k));
        constants.set("c_bar", Value::real(rep.c_bar));
        constants.set("c1", Value::real(rep.c1));
        constants.set("c2", Value::real(rep.c2));
        constants.set("c4", Value::real(rep.c4));
        out.set("constants", std::move(constants));

        record.summary = {{"b1_alpha", fmt6(rep.b1.alpha)},
                          {"b1_gamma", fmt6(rep.b1.gamma)},
                          {"b1_fit_r2", fmt6(rep.b1.fit_r2)},
                          {"b2_lipschitz", fmt6(rep.b2_lipschitz)},
                          {"lemma4_c_empirical", fmt6(rep.lemma4.c_empirical)},
                          {"lemma4_c_theoretical", fmt6(rep.lemma4.c_theoretical)},
                          {"lemma4_violations", std::to_string(rep.lemma4.violations)},
                          {"frechet_slope", fmt6(rep.frechet.slope)},
                          {"theorem7_ratio_max", fmt6(rep.theorem7.max_ratio)},
                          {"M", fmt6(rep.M)},
                          {"L", fmt6(rep.L)},
                          {"k", fmt6(rep.k)},
                          {"c_bar", fmt6(rep.c_bar)},
                          {"c1", fmt6(rep.c1)},
                          {"c2", fmt6(rep.c2)},
                          {"c4", fmt6(rep.c4)}};

        ok = ok && rep.lemma4.violations == 0 && rep.theorem7.max_ratio <= 1.0;
    }

    if (s.verify.gronwall_trials > 0) {
        const GronwallSelfTest gw =
            gronwall_selftest(sg.grid, s.verify.gronwall_trials, s.seed ^ 0x47726f6eULL);
        Value gv = Value::object();
        gv.set("extremal", Value::str(to_string(gw.extremal)));
        gv.set("violating_case", Value::str(to_string(gw.violating_case)));
        gv.set("trials", Value::integer(gw.trials));
        gv.set("passes", Value::integer(gw.passes));
        Value outcomes = Value::array();
        for (GronwallOutcome o : gw.randomized) outcomes.push(Value::str(to_string(o)));
        gv.set("outcomes", std::move(outcomes));
        out.set("gronwall", std::move(gv));

        record.summary.emplace_back("gronwall_extremal", to_string(gw.extremal));
        record.summary.emplace_back("gronwall_violating_case", to_string(gw.violating_case));
        record.summary.emplace_back(
            "gronwall_passes",
            std::to_string(gw.passes) + "/" + std::to_string(gw.trials));
        ok = ok && gw.ok();
    }

    record.outputs = std::move(out);
    if (!ok) mark_failed(record, "hypothesis", "a verified bound or self-test failed");
}

void run_gramian_experiment(RunRecord& record, const SemilinearSystem& sys,
                            const SemigroupModel& sg) {
    using jsonio::Value;
    const LinearizedOperator lti = lti_controllability_map(sys, sg);
    const Gramian w = gramian(lti);
    const SymmetricEigen eig = symmetric_eigen(w.matrix);

    record.gramian_spectrum = eig.values;
    const double min_eig = eig.values.front();
    const double max_eig = eig.values.back();
    const bool controllable = min_eig > w.regularization;

    Value out = Value::object();
    out.set("eigenvalues", Value::real_array(eig.values));
    out.set("min_eigenvalue", Value::real(min_eig));
    out.set("max_eigenvalue", Value::real(max_eig));
    out.set("regularization", Value::real(w.regularization));
    out.set("controllable", Value::boolean(controllable));
    record.outputs = std::move(out);

    record.summary = {{"min_eigenvalue", fmt6(min_eig)},
                      {"max_eigenvalue", fmt6(max_eig)},
                      {"controllable", controllable ? "true" : "false"}};
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(
        std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

RunRecord execute_scenario(const Scenario& s, int threads) {
    RunRecord record;
    record.scenario = s;
    record.timestamp = utc_timestamp();
    const auto start = std::chrono::steady_clock::now();

    try {
        const SemilinearSystem sys = s.build_system();
        const SemigroupModel sg = build_semigroup(sys.generator, s.grid);

        if (s.experiment == "steer")
            run_steer_experiment(record, s, sys, sg);
        else if (s.experiment == "probe")
            run_probe_experiment(record, s, sys, sg, threads);
        else if (s.experiment == "simulate")
            run_simulate_experiment(record, s, sys, sg);
        else if (s.experiment == "verify")
            run_verify_experiment(record, s, sys, sg);
        else if (s.experiment == "gramian")
            run_gramian_experiment(record, sys, sg);
        else
            throw ConfigError("experiment", "unknown experiment " + s.experiment);
    } catch (const ConfigError& e) {
        mark_failed(record, "config", e.what());
    } catch (const SingularGramianError& e) {
        mark_failed(record, "hypothesis", e.what());
    } catch (const BlowUpError& e) {
        mark_failed(record, "solver", e.what());
    } catch (const std::exception& e) {
        mark_failed(record, "solver", e.what());
    }

    record.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return record;
}

std::vector<std::string> emit_report(const RunRecord& record, const std::string& out_dir,
                                     ReportFormat format) {
    (void)format;  // the format selects the CLI's stdout view; files are fixed
    if (record.scenario.experiment.empty()) return {};

    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::vector<std::string> written;
    const std::string base = (fs::path(out_dir) / record.scenario.name).string();

    {
        const std::string path = base + ".result.json";
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error("emit_report: cannot write " + path);
        out << record.result_json().dump() << "\n";
        written.push_back(path);
    }

    {
        const std::string path = base + ".report.txt";
        std::ofstream out(path);
        if (!out) throw Error("emit_report: cannot write " + path);
        out << "scenario:  " << record.scenario.name << "\n";
        out << "version:   " << kToolkitVersion << "\n";
        out << "timestamp: " << record.timestamp << "\n";
        out << "duration:  " << fmt6(record.duration_seconds) << " s\n";
        out << "status:    " << record.status << "\n";
        if (record.status != "success")
            out << "error:     [" << record.error_category << "] " << record.error_message
                << "\n";
        out << "\n";
        for (const auto& [key, value] : record.summary)
            out << "  " << key << " = " << value << "\n";
        written.push_back(path);
    }

    if (!record.residuals.empty()) {
        const std::string path = base + ".residuals.csv";
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error("emit_report: cannot write " + path);
        out << "iteration,residual\n";
        for (std::size_t i = 0; i < record.residuals.size(); ++i)
            out << (i + 1) << "," << fmt17(record.residuals[i]) << "\n";
        written.push_back(path);
    }

    if (!record.probe_entries.empty()) {
        const std::string path = base + ".probe.csv";
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error("emit_report: cannot write " + path);
        out << "direction_index,radius,success,outcome,iterations,final_residual,"
               "contraction_estimate\n";
        for (const ProbeEntry& e : record.probe_entries)
            out << e.direction_index << "," << fmt17(e.radius) << ","
                << (e.success ? "true" : "false") << "," << e.outcome << "," << e.iterations
                << "," << fmt17(e.final_residual) << "," << fmt17(e.contraction_estimate)
                << "\n";
        written.push_back(path);
    }

    if (!record.gramian_spectrum.empty()) {
        const std::string path = base + ".spectrum.csv";
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error("emit_report: cannot write " + path);
        out << "index,eigenvalue\n";
        for (std::size_t i = 0; i < record.gramian_spectrum.size(); ++i)
            out << i << "," << fmt17(record.gramian_spectrum[i]) << "\n";
        written.push_back(path);
    }

    return written;
}

RunRecord run_scenario(const std::string& config_path_or_name, const std::string& out_dir,
                       ReportFormat format, std::optional<std::uint64_t> seed_override,
                       int threads) {
    Scenario s;
    if (const auto text = shipped_scenario_text(config_path_or_name))
        s = Scenario::parse_text(*text);
    else
        s = Scenario::parse_file(config_path_or_name);
    if (seed_override) s.seed = *seed_override;

    RunRecord record = execute_scenario(s, threads);
    emit_report(record, out_dir, format);
    return record;
}

ReportFormat parse_format(const std::string& s) {
    if (s == "table") return ReportFormat::table;
    if (s == "csv") return ReportFormat::csv;
    if (s == "json") return ReportFormat::json;
    throw ConfigError("format", "must be table, csv or json");
}

}  // namespace semictrl
