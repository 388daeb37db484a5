#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "semictrl/core.hpp"
#include "semictrl/linearized.hpp"
#include "semictrl/mild_solver.hpp"

// Numerical certification of the hypotheses and estimates the
// controllability argument rests on: the Taylor-remainder growth and
// derivative Lipschitz assumptions on f, the solution-map Lipschitz
// bound, the vanishing Frechet remainder with its rate, the derivative
// continuity bound, and the Gronwall inequality as a utility check.

namespace semictrl {

// Envelope fit of |f(x1) - f(x2) - Df(x2)(x1 - x2)| <= alpha |x1 - x2|^(1+gamma)
// over random pairs in the ball: least-squares slope on the log-log cloud,
// alpha scaled up so every sample satisfies the bound.
struct B1Result {
    double alpha = 0.0;
    double gamma = 0.0;
    double fit_r2 = 0.0;
    // all remainders below 1e-14: f is affine on the samples and no rate
    // can be fitted
    bool degenerate = false;
    int samples_used = 0;
};
B1Result check_b1(const NonlinearMap& f, double ball_radius, int n_samples,
                  std::uint64_t seed);

// Max over sampled pairs of |Df(x1) - Df(x2)| / |x1 - x2| (operator norms).
double check_b2(const NonlinearMap& f, double ball_radius, int n_samples,
                std::uint64_t seed);

struct Lemma4Result {
    double c_empirical = 0.0;
    double c_theoretical = 0.0;
    double k = 0.0;            // operator norm of the LTI map
    double M = 1.0;            // semigroup bound
    double lipschitz_L = 0.0;  // Lipschitz constant of f on the visited ball
    double visited_radius = 0.0;
    int pairs = 0;
    int violations = 0;  // pairs whose ratio exceeds the theoretical bound
};
// Samples control pairs on the L2 sphere of the given radius, measures
// the solution-map Lipschitz ratio, and checks it against k e^{M L tau}
// with every constant measured from the same data.
Lemma4Result check_lemma4(const SemilinearSystem& sys, const SemigroupModel& sg,
                          const PicardConfig& cfg, double radius, int n_pairs,
                          std::uint64_t seed);

struct FrechetResult {
    std::vector<double> scales;
    std::vector<double> delta_norms;  // |du|_L2 per scale
    std::vector<double> sigma_norms;  // |S(ubar+du) - S(ubar) - L du| at tau
    std::vector<double> ratios;       // sigma / delta
    double slope = 0.0;               // log-log slope of sigma against delta
    double c_bar = 0.0;               // sup_t |Df(S_t(ubar))|
};
FrechetResult check_frechet_limit(const SemilinearSystem& sys, const SemigroupModel& sg,
                                  const ControlSignal& ubar, const ControlSignal& direction,
                                  const std::vector<double>& scales, const PicardConfig& cfg);

struct Theorem7Result {
    double max_ratio = 0.0;     // measured / bound, must stay <= 1
    double max_measured = 0.0;  // largest |DS_tau(u1) - DS_tau(u2)|
    double M = 1.0;
    double c1 = 0.0;  // sup |Df(S_t(u))|
    double c2 = 0.0;  // sup |DS_t(u)|
    double c3 = 0.0;  // Lipschitz constant of Df on the visited ball
    double c = 0.0;   // solution-map Lipschitz constant (theoretical)
    double c4 = 0.0;  // c3 * c
    int pairs = 0;
};
Theorem7Result check_theorem7(const SemilinearSystem& sys, const SemigroupModel& sg,
                              const std::vector<std::pair<ControlSignal, ControlSignal>>& pairs,
                              const PicardConfig& cfg, std::uint64_t seed);

enum class GronwallOutcome {
    holds,
    violated,           // hypothesis held but the conclusion failed: quadrature bug
    hypothesis_failed,  // f <= g + K int f (or monotone g) fails on the grid
};
const char* to_string(GronwallOutcome o);

// Checks f(t) <= g(t) e^{K (t - t0)} for samples satisfying the integral
// inequality f <= g + K int f under trapezoid quadrature.
GronwallOutcome gronwall_check(const std::vector<double>& f_samples,
                               const std::vector<double>& g_samples, double K,
                               const TimeGrid& grid);

// Max over sampled pairs / points of the secant and derivative norms of f
// on the closed ball; used for the measured Lipschitz constants above.
double measure_lipschitz(const NonlinearMap& f, double ball_radius, int n_samples,
                         std::uint64_t seed);

struct GronwallSelfTest {
    GronwallOutcome extremal = GronwallOutcome::violated;        // f = e^{Kt}, g = 1
    GronwallOutcome violating_case = GronwallOutcome::holds;     // f = 2 e^{Kt}, g = 1
    std::vector<GronwallOutcome> randomized;                     // margin-respecting triples
    int trials = 0;
    int passes = 0;
    bool ok() const;
};

// Extremal equality case, a hypothesis-violating case (which must report
// hypothesis_failed, not a lemma violation), and randomized (f, g, K)
// triples built to satisfy the integral inequality with margin.
GronwallSelfTest gronwall_selftest(const TimeGrid& grid, int trials, std::uint64_t seed);

struct VerifyParams {
    double ball_radius = 1.0;
    int b_samples = 400;
    double control_radius = 0.1;
    int lemma4_pairs = 200;
    int theorem7_pairs = 20;
    std::vector<double> frechet_scales;
    ControlSignal frechet_base;       // defaults to the zero control
    ControlSignal frechet_direction;  // defaults to a random sphere sample
    bool has_frechet_base = false;
    bool has_frechet_direction = false;
};

struct VerificationReport {
    B1Result b1;
    double b2_lipschitz = 0.0;
    Lemma4Result lemma4;
    FrechetResult frechet;
    Theorem7Result theorem7;
    // the constants appearing across the estimates, as measured
    double M = 1.0;
    double L = 0.0;
    double k = 0.0;
    double c_bar = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double c4 = 0.0;
};

VerificationReport run_full_verification(const SemilinearSystem& sys,
                                         const SemigroupModel& sg, const PicardConfig& cfg,
                                         const VerifyParams& params, std::uint64_t seed);

}  // namespace semictrl
