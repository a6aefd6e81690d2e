#pragma once

#include <functional>
#include <string>
#include <vector>

#include "geq/flow.hpp"
#include "geq/grid.hpp"

namespace geq {

// Deterministic two-player game for the curvature G-equation. One move is
//   x' = x + tau sqrt(2d) b r eta + tau^2 r eta_perp - tau^2 V(x),
// player I picking direction eta (unit) and magnitude r, player II the sign b.
struct GameConfig {
    double tau = 0.02;
    double d = 0.05;
    int steps = 0;        // move count N; horizon = N tau^2
    int angles = 32;      // K directions for eta
    std::vector<double> radii = {0.0, 0.5, 1.0};
    FlowSpec flow = FlowSpec::zero(2);
    Vec p{0, 0, 0};       // linear part of the payoff g = p.x + v0

    void validate(const PeriodicGrid& grid) const;
};

ScalarField ks_value(const GameConfig& config, const ScalarField& payoff_v);

struct TrajectoryResult {
    std::vector<Vec> points;                 // positions, size steps+1
    std::vector<Vec> controls_eta;           // r*eta per move
    std::vector<int> controls_b;             // sign per move
    double payoff_at_end = 0.0;
};

using PolicyI = std::function<Vec(const Vec&, int)>;          // (position, move) -> eta (|eta|<=1)
using PolicyII = std::function<int(const Vec&, int, const Vec&)>;  // ... -> b in {-1,+1}

PolicyI parse_policy(const std::string& name);

TrajectoryResult ks_trajectory(const Vec& x0, const GameConfig& config, const PolicyI& pol1,
                               const PolicyII& pol2, const ScalarField* payoff_v = nullptr);

// Arrival-time field of the control dynamics xi' = -V(xi) + a, |a| <= 1:
// evolves the inviscid front from the ball B(source, r0) under the reversed
// flow and records first crossings. Cells never reached hold +infinity.
ScalarField reach_time_field(const FlowSpec& flow, const Vec& source, double r0,
                             const PeriodicGrid& grid, double t_max);

// 3D variant of the game (player I picks an orthonormal scaled triple, player
// II two signs). Coarse grids only.
struct Game3DConfig {
    double tau = 0.05;
    double d = 0.05;
    int steps = 0;
    int directions = 26;  // u-directions on the sphere
    std::vector<double> radii = {0.0, 0.5, 1.0};
    FlowSpec flow = FlowSpec::zero(3);
    Vec p{0, 0, 0};
    long budget = 400000000;  // cells * steps * controls guard
};

ScalarField ks3d_value(const Game3DConfig& config, const ScalarField& payoff_v);

}  // namespace geq
