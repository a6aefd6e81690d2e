#pragma once

#include <optional>
#include <string>
#include <vector>

#include "geq/hjsolver.hpp"

namespace geq {

// H-bar estimate with convergence diagnostics. `lower`/`upper` bracket the
// instantaneous front speed -v_t over the grid at the final time.
struct EffectiveHEstimate {
    Vec p{};
    double value = 0.0;
    double lower = 0.0, upper = 0.0;
    std::string method;  // large_time | discounted | exact_shear | strain_ode
    std::vector<double> history_t;      // window/schedule parameter
    std::vector<double> history_value;  // estimate per window or per lambda
    bool converged = false;
    double spread = 0.0;   // osc of the final instantaneous speed
    double end_osc = 0.0;  // osc of the final corrector field
    long steps = 0;
    double max_lambda_v = 0.0;  // discounted only: max |lambda v_lambda| seen
};

struct LargeTimeConfig {
    int n = 128;
    double t_end = 20.0;
    bool auto_extend = true;  // double t_end until converged (or max_extend)
    int max_extend = 5;
    double rel_tol = 5e-3;   // successive window agreement
    double osc_tol = 5e-2;   // spatial osc of -v_t relative to the value
    SolverConfig solver;
};

EffectiveHEstimate hbar_large_time(const GEquationSpec& spec, const Vec& p,
                                   const LargeTimeConfig& config);

struct DiscountedConfig {
    int n = 64;
    std::vector<double> lambdas = {0.2, 0.1, 0.05, 0.025};  // decreasing
    double tol = 1e-3;        // pseudo-time residual target, relative to lambda
    long max_iters = 400000;  // per lambda
    SolverConfig solver;
};

EffectiveHEstimate hbar_discounted(const GEquationSpec& spec, const Vec& p,
                                   const DiscountedConfig& config);

// 2D shear flow V = (0, f(x1)), p = (a, b): closed/implicit effective
// Hamiltonian on the unit period. When |a| <= I(M) the answer is
// M = |b| + max(b f); otherwise H solves I(H) = |a| with
// I(H) = integral_0^1 sqrt((H - b f(y))^2 - b^2) dy.
double exact_shear_hbar(const Profile& f, double a, double b);

struct StrainShearResult {
    double value = 0.0;       // E(d)
    double dvalue_dd = 0.0;   // central-difference E'(d)
    double min_attainable = 0.0;  // inf over the admissible branch of integral g
};

// Strain cell problem for the (n+1)-d shear flow reduced to one variable:
// sqrt(1+g^2) + d g f'(x)/sqrt(1+g^2) = E - f(x), constrained by
// integral_0^1 g dx = p'. Unit-period normalization.
StrainShearResult strain_shear_hbar(const Profile& f, double pprime, double d);

struct GrowthFit {
    std::vector<double> A_values;
    std::vector<double> H_values;
    std::vector<bool> converged;
    bool all_converged = true;
    std::string best_model;  // linear | loglaw | bounded
    // linear H = a A + b
    double lin_a = 0.0, lin_b = 0.0, lin_residual = 0.0;
    // loglaw H = c A pi (|p1|+|p2|) / (2 log A + C)
    double log_c = 0.0, log_C = 0.0, log_residual = 0.0;
    // bounded H = const
    double bounded_value = 0.0, bounded_residual = 0.0;
    // single-C cellular band diagnostic: H (2 ln A + C) / (A pi (|p1|+|p2|))
    double band_C = 0.0;
    std::vector<double> band_values;
};

GrowthFit growth_sweep(const GEquationSpec& spec, const Vec& p, const std::vector<double>& A_list,
                       const LargeTimeConfig& config);

struct BifurcationConfig {
    int n = 96;
    double t_end = 60.0;
    double rel_tol = 5e-3;
    double osc_tol = 5e-2;
    double spread_factor = 0.1;  // failure when spread > factor * |Hbar_nocut|
    double root_tol = 1e-3;      // |Hbar_nocut(A0)| target for the characterized root
    double cfl = 0.5;
};

struct BifurcationResult {
    Vec p{};
    std::vector<double> A_grid;
    std::vector<double> spread;         // osc(-v(.,T)/T) of the cutoff problem
    std::vector<double> hbar_cutoff;    // large-time estimates, cutoff problem
    std::vector<double> hbar_nocutoff;  // same without the ()+ correction
    std::vector<bool> cutoff_converged;
    double A0_detected = -1.0;
    double A0_characterized = -1.0;
    double agreement = -1.0;
    bool nocutoff_strictly_decreasing = false;
};

// 3D shear curvature bifurcation study on the reduced 2D problem.
// f must satisfy max f = 0 (checked); p3 must be nonzero.
BifurcationResult bifurcation_scan(const Profile2D& f, const Vec& p, double d,
                                   const std::vector<double>& A_grid,
                                   const BifurcationConfig& config);

// Reduced 3D-shear curvature solve, exposed for tests: evolves
// v_t + (1 - d div((p'+Dv)/sqrt(p3^2+|p'+Dv|^2)))[+] sqrt(p3^2+|p'+Dv|^2)
//     + A p3 f(x') = 0.
EffectiveHEstimate shear_curvature_hbar(const Profile2D& f, const Vec& p, double d, double A,
                                        bool cutoff, const BifurcationConfig& config,
                                        double t_multiplier = 1.0);

struct RateResult {
    std::vector<double> eps_list;
    std::vector<double> errors;      // sup |G_eps - Gbar| at t_fixed
    std::vector<double> corrected;   // after scheme-floor subtraction
    double floor = 0.0;
    double slope = 0.0;  // log-log least squares on corrected errors
    bool exact = false;  // all errors at round-off (V = 0)
};

RateResult homogenization_rate(const Profile& f, const Vec& p, const std::vector<double>& eps_list,
                               double t_fixed, int cells_per_wave = 128);

struct KppSpeedResult {
    Vec p{};
    double d = 0.0;
    double f0prime = 0.0;
    double lambda_star = 0.0;
    double c_T = 0.0;
    std::vector<double> lambda_samples;
    std::vector<double> hquad_samples;
    std::string warning;  // set when the minimizer sits at the lambda range edge
};

KppSpeedResult kpp_speed(const FlowSpec& flow, const Vec& p, double d, double f0prime,
                         const DiscountedConfig& config);

struct CurvatureComparison {
    std::vector<double> A_values;
    std::vector<double> h_inviscid;
    std::vector<double> h_curvature;
    std::vector<double> gaps;
    bool all_gaps_positive = false;
    bool gaps_increasing = false;
    bool all_converged = true;
};

CurvatureComparison curvature_comparison(const Vec& p, double d, const std::vector<double>& A_list,
                                         const LargeTimeConfig& config);

struct MinPrincipleCheck {
    int argmin_i = 0, argmin_j = 0;
    double min_value = 0.0;
    bool on_boundary_ring = false;  // within one cell of the core boundary
};

// Minimum-principle diagnostic for the discounted curvature corrector on the
// cellular flow: the minimum of p.x + v_lambda over the quarter-cell core
// {sin x1 sin x2 > mu} should sit on the core's boundary ring.
MinPrincipleCheck min_principle_argmin(const GEquationSpec& spec, const Vec& p, double lambda,
                                       double mu, int n);

}  // namespace geq
