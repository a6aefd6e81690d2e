#include "geq/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "geq/hjsolver.hpp"

namespace geq {

void GameConfig::validate(const PeriodicGrid& grid) const {
    if (!(tau > 0)) throw ConfigError("game tau must be positive");
    if (d < 0) throw ConfigError("game d must be nonnegative");
    if (steps < 0) throw ConfigError("game step count must be nonnegative");
    if (angles < 8) throw ConfigError("game needs at least 8 control angles");
    bool has0 = false, has1 = false;
    for (double r : radii) {
        if (r < 0 || r > 1) throw ConfigError("game radii must lie in [0,1]");
        if (r == 0.0) has0 = true;
        if (r == 1.0) has1 = true;
    }
    if (!has0 || !has1) throw ConfigError("game radii must include 0 and 1");
    // one move must stay well inside the period for the interpolation to see
    // the right neighborhood
    double move = tau * std::sqrt(2.0 * d) + tau * tau * (1.0 + max_speed(flow).vmax *
                                                                    flow.intensity());
    if (move > 0.5 * grid.period[0])
        throw ConfigError("game move length exceeds half the period");
}

namespace {

inline Vec perp(const Vec& v) { return {-v[1], v[0], 0.0}; }

struct MoveTable {
    // per (angle, radius>0, sign): offset tau sqrt(2d) b r eta + tau^2 r eta_perp
    std::vector<Vec> offsets;
    std::vector<double> pdots;  // p . offset
    bool has_zero_radius = false;
};

MoveTable build_moves(const GameConfig& cfg) {
    MoveTable t;
    const double s = cfg.tau * std::sqrt(2.0 * cfg.d);
    for (double r : cfg.radii) {
        if (r == 0.0) {
            t.has_zero_radius = true;
            continue;
        }
        for (int a = 0; a < cfg.angles; ++a) {
            double th = kTwoPi * a / cfg.angles;
            Vec eta = {r * std::cos(th), r * std::sin(th), 0.0};
            Vec drift = cfg.tau * cfg.tau * perp(eta);
            for (int b : {-1, +1}) {
                Vec off = drift + (s * b) * eta;
                t.offsets.push_back(off);
                t.pdots.push_back(dot(cfg.p, off));
            }
        }
    }
    return t;
}

// Periodic bilinear lookup on raw storage; callers guarantee the query point
// sits within one period of the cell box.
struct FastBilinear {
    const double* vv;
    int n0, n1;
    double inv_h0, inv_h1, per0, per1;

    double operator()(double x, double y) const {
        if (x < 0) x += per0;
        else if (x >= per0) x -= per0;
        if (y < 0) y += per1;
        else if (y >= per1) y -= per1;
        double sx = x * inv_h0 - 0.5, sy = y * inv_h1 - 0.5;
        double fx = std::floor(sx), fy = std::floor(sy);
        double tx = sx - fx, ty = sy - fy;
        int i0 = static_cast<int>(fx), j0 = static_cast<int>(fy);
        if (i0 < 0) i0 = n0 - 1;
        if (j0 < 0) j0 = n1 - 1;
        int i1 = i0 + 1 == n0 ? 0 : i0 + 1;
        int j1 = j0 + 1 == n1 ? 0 : j0 + 1;
        const double* r0 = vv + static_cast<std::size_t>(j0) * n0;
        const double* r1 = vv + static_cast<std::size_t>(j1) * n0;
        double a = r0[i0] + tx * (r0[i1] - r0[i0]);
        double b = r1[i0] + tx * (r1[i1] - r1[i0]);
        return a + ty * (b - a);
    }
};

}  // namespace

ScalarField ks_value(const GameConfig& config, const ScalarField& payoff_v) {
    const PeriodicGrid& grid = payoff_v.grid;
    if (grid.dim != 2) throw DimensionError("ks_value runs on 2D grids");
    config.validate(grid);
    MoveTable moves = build_moves(config);

    // flow drift per cell: -tau^2 V(x), and its payoff contribution
    const int n0 = grid.n[0], n1 = grid.n[1];
    std::vector<Vec> drift(grid.cells());
    std::vector<double> pdrift(grid.cells());
    for (int j = 0; j < n1; ++j)
        for (int i = 0; i < n0; ++i) {
            Vec x = grid.center(i, j, 0);
            Vec dr = (-config.tau * config.tau) * config.flow.velocity(x);
            drift[grid.index(i, j)] = dr;
            pdrift[grid.index(i, j)] = dot(config.p, dr);
        }

    ScalarField v = payoff_v, next(grid);
    const std::size_t pairs = moves.offsets.size() / 2;
    const double h0 = grid.h(0), h1 = grid.h(1);
    for (int step = 0; step < config.steps; ++step) {
        FastBilinear interp{v.values.data(), n0,       n1,
                            1.0 / h0,        1.0 / h1, grid.period[0], grid.period[1]};
        for (int j = 0; j < n1; ++j) {
            const double yc = (j + 0.5) * h1;
            for (int i = 0; i < n0; ++i) {
                const std::size_t c = grid.index(i, j);
                const double xd = (i + 0.5) * h0 + drift[c][0];
                const double yd = yc + drift[c][1];
                double best = 1e300;
                if (moves.has_zero_radius) best = interp(xd, yd);
                for (std::size_t m = 0; m < pairs; ++m) {
                    // player II maximizes over the sign pair, player I minimizes
                    const Vec& o1 = moves.offsets[2 * m];
                    const Vec& o2 = moves.offsets[2 * m + 1];
                    double val1 = moves.pdots[2 * m] + interp(xd + o1[0], yd + o1[1]);
                    double val2 = moves.pdots[2 * m + 1] + interp(xd + o2[0], yd + o2[1]);
                    double worst = std::max(val1, val2);
                    if (worst < best) best = worst;
                }
                next.values[c] = pdrift[c] + best;
            }
        }
        std::swap(v.values, next.values);
    }
    return v;
}

PolicyI parse_policy(const std::string& name) {
    if (name == "null") return [](const Vec&, int) { return Vec{0, 0, 0}; };
    if (name.rfind("radial_out:", 0) == 0) {
        double cx, cy;
        if (std::sscanf(name.c_str() + 11, "%lf,%lf", &cx, &cy) != 2)
            throw ConfigError("radial_out policy needs cx,cy");
        return [cx, cy](const Vec& x, int) {
            Vec r = {x[0] - cx, x[1] - cy, 0.0};
            double nr = norm(r);
            if (nr < 1e-12) r = {1.0, 0.0, 0.0};
            else r = (1.0 / nr) * r;
            // eta whose perp points outward
            return Vec{r[1], -r[0], 0.0};
        };
    }
    if (name.rfind("toward:", 0) == 0) {
        double cx, cy;
        if (std::sscanf(name.c_str() + 7, "%lf,%lf", &cx, &cy) != 2)
            throw ConfigError("toward policy needs x,y");
        return [cx, cy](const Vec& x, int) {
            Vec r = {cx - x[0], cy - x[1], 0.0};
            double nr = norm(r);
            if (nr < 1e-12) return Vec{0, 0, 0};
            r = (1.0 / nr) * r;
            return Vec{r[1], -r[0], 0.0};
        };
    }
    throw ConfigError("unknown policy: " + name);
}

TrajectoryResult ks_trajectory(const Vec& x0, const GameConfig& config, const PolicyI& pol1,
                               const PolicyII& pol2, const ScalarField* payoff_v) {
    TrajectoryResult out;
    Vec x = x0;
    out.points.push_back(x);
    const double s = config.tau * std::sqrt(2.0 * config.d);
    for (int k = 0; k < config.steps; ++k) {
        Vec eta = pol1(x, k);
        if (norm(eta) > 1.0 + 1e-12)
            throw ConfigError("policy violated |eta| <= 1 at move " + std::to_string(k));
        int b = pol2(x, k, eta);
        if (b != 1 && b != -1) throw ConfigError("player II sign must be +-1");
        Vec move = (s * b) * eta + config.tau * config.tau * perp(eta) -
                   config.tau * config.tau * config.flow.velocity(x);
        x = x + move;
        out.points.push_back(x);
        out.controls_eta.push_back(eta);
        out.controls_b.push_back(b);
    }
    if (payoff_v) out.payoff_at_end = dot(config.p, x) + interpolate(*payoff_v, x);
    return out;
}

ScalarField reach_time_field(const FlowSpec& flow, const Vec& source, double r0,
                             const PeriodicGrid& grid, double t_max) {
    GEquationSpec spec;
    spec.variant = GVariant::Inviscid;
    spec.flow = flow.time_reversed();
    SolverConfig cfg;
    cfg.t_end = t_max;

    // signed distance to the ball, by the nearest torus image
    ScalarField v(grid);
    v.fill_with([&](const Vec& x) {
        double d2 = 0.0;
        for (int a = 0; a < grid.dim; ++a) {
            double dd = std::abs(x[a] - source[a]);
            dd = std::min(dd, grid.period[a] - dd);
            d2 += dd * dd;
        }
        return std::sqrt(d2) - r0;
    });

    ScalarField tau(grid);
    const double inf = std::numeric_limits<double>::infinity();
    for (double& t : tau.values) t = inf;
    for (std::size_t c = 0; c < v.values.size(); ++c)
        if (v.values[c] <= 0.0) tau.values[c] = 0.0;

    Stepper st(grid, spec, Vec{0, 0, 0}, cfg);
    ScalarField prev = v;
    double t = 0.0;
    while (t < t_max - 1e-14) {
        double dt = std::min(st.stable_dt(), t_max - t);
        prev.values = v.values;
        st.step(v, dt);
        t += dt;
        for (std::size_t c = 0; c < v.values.size(); ++c) {
            if (tau.values[c] == inf && v.values[c] <= 0.0) {
                double a = prev.values[c], b = v.values[c];
                double frac = (a > b) ? a / (a - b) : 1.0;  // linear first-crossing estimate
                tau.values[c] = t - dt + frac * dt;
            }
        }
    }
    return tau;
}

ScalarField ks3d_value(const Game3DConfig& config, const ScalarField& payoff_v) {
    const PeriodicGrid& grid = payoff_v.grid;
    if (grid.dim != 3) throw DimensionError("ks3d_value runs on 3D grids");
    if (grid.n[0] > 48 || grid.n[1] > 48 || grid.n[2] > 48)
        throw ConfigError("ks3d_value is limited to coarse grids (n <= 48)");

    // orthonormal frames: u from a deterministic sphere covering, v = u x a, w = u x v
    std::vector<Vec> us;
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j)
            for (int k = -1; k <= 1; ++k) {
                if (!i && !j && !k) continue;
                Vec u = {double(i), double(j), double(k)};
                us.push_back((1.0 / norm(u)) * u);
            }
    if (config.directions < static_cast<int>(us.size()))
        us.resize(config.directions);

    struct Frame {
        Vec u, v, w;
    };
    std::vector<Frame> frames;
    for (const Vec& u : us) {
        Vec a = std::abs(u[0]) < 0.9 ? Vec{1, 0, 0} : Vec{0, 1, 0};
        Vec v = {u[1] * a[2] - u[2] * a[1], u[2] * a[0] - u[0] * a[2], u[0] * a[1] - u[1] * a[0]};
        v = (1.0 / norm(v)) * v;
        Vec w = {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
        frames.push_back({u, v, w});
    }

    long controls = static_cast<long>(frames.size()) * config.radii.size() * 4;
    long work = static_cast<long>(grid.cells()) * config.steps * controls;
    if (work > config.budget)
        throw BudgetError("ks3d_value work " + std::to_string(work) + " exceeds budget " +
                          std::to_string(config.budget));

    const double s = config.tau * std::sqrt(2.0 * config.d);
    const double t2 = config.tau * config.tau;
    std::vector<Vec> drift(grid.cells());
    std::vector<double> pdrift(grid.cells());
    const int n0 = grid.n[0], n1 = grid.n[1], n2 = grid.n[2];
    for (int k = 0; k < n2; ++k)
        for (int j = 0; j < n1; ++j)
            for (int i = 0; i < n0; ++i) {
                Vec x = grid.center(i, j, k);
                Vec dr = (-t2) * config.flow.velocity(x);
                drift[grid.index(i, j, k)] = dr;
                pdrift[grid.index(i, j, k)] = dot(config.p, dr);
            }

    bool has_zero = false;
    std::vector<double> rpos;
    for (double r : config.radii) {
        if (r == 0.0)
            has_zero = true;
        else
            rpos.push_back(r);
    }

    ScalarField v = payoff_v, next(grid);
    for (int step = 0; step < config.steps; ++step) {
        for (int k = 0; k < n2; ++k)
            for (int j = 0; j < n1; ++j)
                for (int i = 0; i < n0; ++i) {
                    const std::size_t c = grid.index(i, j, k);
                    Vec x = grid.center(i, j, k);
                    Vec xd = x + drift[c];
                    double best = 1e300;
                    if (has_zero) best = interpolate(v, xd);  // all controls collapse
                    for (const Frame& fr : frames)
                        for (double r : rpos) {
                            Vec adv = xd + (t2 * r) * fr.u;
                            double padv = dot(config.p, (t2 * r) * fr.u);
                            double worst = -1e300;
                            for (int b : {-1, +1})
                                for (int cs : {-1, +1}) {
                                    Vec kick = (s * r * b) * fr.v + (s * r * cs) * fr.w;
                                    double val =
                                        padv + dot(config.p, kick) + interpolate(v, adv + kick);
                                    worst = std::max(worst, val);
                                }
                            best = std::min(best, worst);
                        }
                    next.values[c] = pdrift[c] + best;
                }
        std::swap(v.values, next.values);
    }
    return v;
}

}  // namespace geq
