#pragma once

#include <optional>
#include <vector>

#include "geq/flow.hpp"

namespace geq {

struct OrbitResult {
    Vec x0{};
    double t0 = 0.0;        // period
    Vec shift{};            // lattice displacement per period
    double residual = 0.0;  // |Phi_t0(x0) - x0 - shift|
    double speed_coeff = 0.0;  // 2*pi / t0
    bool found = false;
};

struct OrbitSearchReport {
    OrbitResult best;                 // minimum-residual orbit (found or not)
    std::vector<OrbitResult> orbits;  // accepted, deduplicated
    int seeds_tried = 0;
    int converged = 0;
};

struct GrowthBounds {
    std::vector<double> A_values;
    std::vector<double> lower;  // (2 pi / t0) A + 2 pi / (t0 ||V||_inf)
    std::vector<double> upper;  // ||V . p||_inf A + 1
    double lower_slope = 0.0, lower_icept = 0.0;
    double upper_slope = 0.0, upper_icept = 0.0;
};

// Fixed-step RK4 streamline integration of xi' = V(xi).
std::vector<Vec> integrate(const FlowSpec& flow, const Vec& x0, double T, double dt);
Vec flow_map(const FlowSpec& flow, const Vec& x0, double T, double dt);

struct ShootConfig {
    double dt = 1e-3;
    double t_min = 0.5, t_max = 25.0;  // scan window for period candidates
    int plane_seeds = 16;              // per axis on the transversal plane
    int max_newton = 50;
    double fd_step = 1e-6;
    double accept_residual = 1e-8;
    double dedupe_tol = 1e-4;
};

// Shooting for ballistic orbits X(t + t0) = X(t) + shift in 3D flows.
OrbitSearchReport shoot_ballistic(const FlowSpec& flow, const Vec& shift,
                                  const std::vector<Vec>& extra_seeds = {},
                                  const ShootConfig& config = {});

GrowthBounds growth_bounds(const OrbitResult& orbit, const FlowSpec& flow, const Vec& p,
                           const std::vector<double>& A_values);

struct LagrangianLimit {
    double value = 0.0;  // max over seeds of xi(T).p / T
    Vec best_seed{};
    int seeds = 0;
};

// Trajectory estimate of lim_{A->inf} Hbar(p, A)/A via long streamlines.
LagrangianLimit lagrangian_limit(const FlowSpec& flow, const Vec& p, double T, int seed_count,
                                 double dt = 1e-3, const std::vector<Vec>& extra_seeds = {});

}  // namespace geq
