#include "semictrl/scenario.hpp"

// The shipped scenario set, embedded so the CLI can run them from any
// working directory. The same configs live under scenarios/ for reference;
// a test keeps the two in sync.

namespace semictrl {

namespace {

const char* kScalarIntegratorLinear = R"json({
  "name": "scalar-integrator-linear",
  "system": {
    "generator": {"type": "diagonal", "eigenvalues": [0.0]},
    "input_matrix": "identity",
    "nonlinearity": {"type": "zero"}
  },
  "grid": {"t_end": 1.0, "n_steps": 1000},
  "picard": {"tol": 1e-12, "max_iterations": 80, "blowup_threshold": 1e6, "max_subinterval_halvings": 20},
  "experiment": "steer",
  "seed": 1,
  "steer": {"target": [1.0], "mode": "frozen", "tol": 1e-10, "max_iterations": 10}
}
)json";

const char* kScalarQuadraticSteer = R"json({
  "name": "scalar-quadratic-steer",
  "system": {
    "generator": {"type": "diagonal", "eigenvalues": [0.0]},
    "input_matrix": "identity",
    "nonlinearity": {"type": "pointwise_polynomial", "coefficients": {"2": 1.0}}
  },
  "grid": {"t_end": 1.0, "n_steps": 1000},
  "picard": {"tol": 1e-12, "max_iterations": 80, "blowup_threshold": 1e6, "max_subinterval_halvings": 20},
  "experiment": "steer",
  "seed": 2,
  "steer": {"target": [0.1], "mode": "frozen", "tol": 1e-9, "max_iterations": 30}
}
)json";

const char* kHeatCubicSteer = R"json({
  "name": "heat1d-cubic-steer",
  "system": {
    "generator": {"type": "heat_dirichlet_modes", "modes": 16},
    "input_matrix": "identity",
    "nonlinearity": {"type": "collocation_polynomial", "coefficients": {"3": -1.0}}
  },
  "grid": {"t_end": 0.2, "n_steps": 256},
  "picard": {"tol": 1e-12, "max_iterations": 80, "blowup_threshold": 1e6, "max_subinterval_halvings": 20},
  "experiment": "probe",
  "seed": 2024,
  "probe": {"random_directions": 8, "radii": [0.05, 0.01], "tol": 1e-9, "max_iterations": 25}
}
)json";

const char* kHeatCubicVerify = R"json({
  "name": "heat1d-cubic-verify",
  "system": {
    "generator": {"type": "heat_dirichlet_modes", "modes": 16},
    "input_matrix": "identity",
    "nonlinearity": {"type": "collocation_polynomial", "coefficients": {"3": -1.0}}
  },
  "grid": {"t_end": 0.2, "n_steps": 192},
  "picard": {"tol": 1e-12, "max_iterations": 80, "blowup_threshold": 1e6, "max_subinterval_halvings": 20},
  "experiment": "verify",
  "seed": 42,
  "verify": {
    "full": true,
    "ball_radius": 0.5,
    "n_samples": 400,
    "control_radius": 0.5,
    "lemma4_pairs": 60,
    "theorem7_pairs": 6,
    "frechet_scales": [0.125, 0.0625, 0.03125, 0.015625, 0.0078125, 0.00390625, 0.001953125, 0.0009765625],
    "frechet_base": [0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1]
  }
}
)json";

const char* kGronwallSelftest = R"json({
  "name": "gronwall-selftest",
  "system": {
    "generator": {"type": "diagonal", "eigenvalues": [0.0]},
    "input_matrix": "identity",
    "nonlinearity": {"type": "zero"}
  },
  "grid": {"t_end": 1.0, "n_steps": 200},
  "picard": {"tol": 1e-12, "max_iterations": 80, "blowup_threshold": 1e6, "max_subinterval_halvings": 20},
  "experiment": "verify",
  "seed": 7,
  "verify": {"full": false, "gronwall_trials": 10}
}
)json";

}  // namespace

const std::vector<ShippedScenario>& shipped_scenarios() {
    static const std::vector<ShippedScenario> scenarios = {
        {"scalar-integrator-linear",
         "scalar integrator, zero nonlinearity: one-shot linear steering",
         kScalarIntegratorLinear},
        {"scalar-quadratic-steer",
         "x' = u + x^2: frozen-map steering to a small target",
         kScalarQuadraticSteer},
        {"heat1d-cubic-steer",
         "16-mode heat equation with pointwise -x^3: reachable-radius probe",
         kHeatCubicSteer},
        {"heat1d-cubic-verify",
         "16-mode heat equation with pointwise -x^3: full bound certification",
         kHeatCubicVerify},
        {"gronwall-selftest",
         "Gronwall inequality battery: extremal, hypothesis-violating, randomized",
         kGronwallSelftest},
    };
    return scenarios;
}

std::optional<std::string> shipped_scenario_text(const std::string& name) {
    for (const ShippedScenario& s : shipped_scenarios())
        if (name == s.name) return std::string(s.text);
    return std::nullopt;
}

}  // namespace semictrl
