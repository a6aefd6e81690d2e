#include "geq/orbits.hpp"

#include <algorithm>
#include <cmath>

namespace geq {

namespace {

inline Vec rk4_step(const FlowSpec& flow, const Vec& x, double dt) {
    Vec k1 = flow.velocity(x);
    Vec k2 = flow.velocity(x + (0.5 * dt) * k1);
    Vec k3 = flow.velocity(x + (0.5 * dt) * k2);
    Vec k4 = flow.velocity(x + dt * k3);
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

std::vector<Vec> integrate(const FlowSpec& flow, const Vec& x0, double T, double dt) {
    if (!(dt > 0)) throw ConfigError("integrate needs dt > 0");
    std::vector<Vec> path;
    long steps = static_cast<long>(std::floor(T / dt));
    path.reserve(steps + 2);
    Vec x = x0;
    path.push_back(x);
    for (long s = 0; s < steps; ++s) {
        x = rk4_step(flow, x, dt);
        path.push_back(x);
    }
    double rem = T - steps * dt;
    if (rem > 1e-14) {
        x = rk4_step(flow, x, rem);
        path.push_back(x);
    }
    return path;
}

Vec flow_map(const FlowSpec& flow, const Vec& x0, double T, double dt) {
    long steps = static_cast<long>(std::floor(T / dt));
    Vec x = x0;
    for (long s = 0; s < steps; ++s) x = rk4_step(flow, x, dt);
    double rem = T - steps * dt;
    if (rem > 1e-14) x = rk4_step(flow, x, rem);
    return x;
}

namespace {

// residual F(x0, t0) = Phi_t0(x0) - x0 - shift, restricted to unknowns
// (two plane coordinates, t0); the plane axis is the dominant shift axis.
struct ShootProblem {
    const FlowSpec& flow;
    Vec shift;
    int plane_axis;
    double plane_coord;
    double dt;

    Vec unpack(const std::array<double, 3>& u) const {
        Vec x{};
        int slot = 0;
        for (int a = 0; a < 3; ++a)
            x[a] = (a == plane_axis) ? plane_coord : u[slot++];
        return x;
    }

    std::array<double, 3> residual(const std::array<double, 3>& u) const {
        Vec x0 = unpack(u);
        Vec xe = flow_map(flow, x0, u[2], dt);
        Vec r = xe - x0 - shift;
        return {r[0], r[1], r[2]};
    }
};

double nrm3(const std::array<double, 3>& r) {
    return std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
}

bool solve3(double J[3][3], double b[3], double out[3]) {
    int piv[3] = {0, 1, 2};
    for (int c = 0; c < 3; ++c) {
        int best = c;
        for (int r = c + 1; r < 3; ++r)
            if (std::abs(J[piv[r]][c]) > std::abs(J[piv[best]][c])) best = r;
        std::swap(piv[c], piv[best]);
        double d = J[piv[c]][c];
        if (std::abs(d) < 1e-14) return false;
        for (int r = c + 1; r < 3; ++r) {
            double f = J[piv[r]][c] / d;
            for (int cc = c; cc < 3; ++cc) J[piv[r]][cc] -= f * J[piv[c]][cc];
            b[piv[r]] -= f * b[piv[c]];
        }
    }
    for (int c = 2; c >= 0; --c) {
        double acc = b[piv[c]];
        for (int cc = c + 1; cc < 3; ++cc) acc -= J[piv[c]][cc] * out[cc];
        out[c] = acc / J[piv[c]][c];
    }
    return true;
}

}  // namespace

OrbitSearchReport shoot_ballistic(const FlowSpec& flow, const Vec& shift,
                                  const std::vector<Vec>& extra_seeds,
                                  const ShootConfig& config) {
    if (flow.dim() != 3) throw DimensionError("shoot_ballistic requires a 3D flow");
    int axis = 0;
    for (int a = 1; a < 3; ++a)
        if (std::abs(shift[a]) > std::abs(shift[axis])) axis = a;
    if (shift[axis] == 0.0) throw ConfigError("shift must be nonzero");

    OrbitSearchReport report;
    report.best.residual = 1e300;

    std::vector<Vec> seeds = extra_seeds;
    const int m = config.plane_seeds;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            Vec x{};
            int slot = 0;
            for (int a = 0; a < 3; ++a) {
                if (a == axis) {
                    x[a] = 0.0;
                } else {
                    x[a] = (slot == 0 ? i : j) * kTwoPi / m;
                    ++slot;
                }
            }
            seeds.push_back(x);
        }
    // symmetry hints: diagonal points of the fundamental cell
    for (double c : {0.25, 0.5, 0.75}) {
        Vec x = {c * kTwoPi, c * kTwoPi, c * kTwoPi};
        x[axis] = 0.0;
        seeds.push_back(x);
    }

    ShootProblem prob{flow, shift, axis, 0.0, config.dt};

    for (const Vec& seed : seeds) {
        ++report.seeds_tried;
        // coarse time scan: sign changes of the dominant displacement defect
        std::vector<double> t_candidates;
        {
            Vec x = seed;
            double t = 0.0;
            double prev = -shift[axis];
            const double scan_dt = std::max(config.dt, 1e-2);
            while (t < config.t_max) {
                x = rk4_step(flow, x, scan_dt);
                t += scan_dt;
                double cur = (x[axis] - seed[axis]) - shift[axis];
                if (t >= config.t_min && prev * cur <= 0.0 && cur != prev)
                    t_candidates.push_back(t);
                prev = cur;
                if (t_candidates.size() >= 4) break;
            }
        }
        for (double tc : t_candidates) {
            std::array<double, 3> u{};
            int slot = 0;
            for (int a = 0; a < 3; ++a)
                if (a != axis) u[slot++] = seed[a];
            u[2] = tc;

            bool ok = true;
            std::array<double, 3> r = prob.residual(u);
            for (int it = 0; it < config.max_newton; ++it) {
                if (nrm3(r) < config.accept_residual) break;
                double J[3][3];
                for (int c = 0; c < 3; ++c) {
                    std::array<double, 3> up = u;
                    up[c] += config.fd_step;
                    std::array<double, 3> rp = prob.residual(up);
                    for (int rr = 0; rr < 3; ++rr)
                        J[rr][c] = (rp[rr] - r[rr]) / config.fd_step;
                }
                double b[3] = {-r[0], -r[1], -r[2]};
                double du[3];
                if (!solve3(J, b, du)) {
                    ok = false;
                    break;
                }
                double damp = 1.0;
                for (int ls = 0; ls < 8; ++ls) {
                    std::array<double, 3> ut = {u[0] + damp * du[0], u[1] + damp * du[1],
                                                u[2] + damp * du[2]};
                    if (ut[2] < 0.05) {
                        damp *= 0.5;
                        continue;
                    }
                    std::array<double, 3> rt = prob.residual(ut);
                    if (nrm3(rt) < nrm3(r)) {
                        u = ut;
                        r = rt;
                        break;
                    }
                    damp *= 0.5;
                    if (ls == 7) ok = false;
                }
                if (!ok) break;
            }
            double res = nrm3(r);
            OrbitResult orb;
            orb.x0 = prob.unpack(u);
            orb.t0 = u[2];
            orb.shift = shift;
            orb.residual = res;
            orb.speed_coeff = kTwoPi / orb.t0;
            orb.found = ok && res < config.accept_residual && orb.t0 > 0;
            if (res < report.best.residual) report.best = orb;
            if (!orb.found) continue;

            bool dup = false;
            for (const OrbitResult& prev : report.orbits) {
                if (std::abs(prev.t0 - orb.t0) > 1e-3) continue;
                // compare against points along the stored orbit, modulo lattice
                std::vector<Vec> path = integrate(flow, prev.x0, prev.t0, config.dt * 10);
                for (const Vec& q : path) {
                    double d2 = 0.0;
                    for (int a = 0; a < 3; ++a) {
                        double dd = std::abs(wrap(orb.x0[a] - q[a], kTwoPi));
                        dd = std::min(dd, kTwoPi - dd);
                        d2 += dd * dd;
                    }
                    if (std::sqrt(d2) < config.dedupe_tol) {
                        dup = true;
                        break;
                    }
                }
                if (dup) break;
            }
            if (!dup) {
                report.orbits.push_back(orb);
                ++report.converged;
            }
        }
    }
    std::sort(report.orbits.begin(), report.orbits.end(),
              [](const OrbitResult& a, const OrbitResult& b) {
                  if (a.t0 != b.t0) return a.t0 < b.t0;
                  return a.x0 < b.x0;
              });
    if (!report.orbits.empty()) report.best = report.orbits.front();
    return report;
}

GrowthBounds growth_bounds(const OrbitResult& orbit, const FlowSpec& flow, const Vec& p,
                           const std::vector<double>& A_values) {
    if (!orbit.found) throw ConfigError("growth_bounds needs a converged orbit");
    double sp = dot(orbit.shift, p);
    double cross = 0.0;
    for (int a = 0; a < 3; ++a) {
        double other = orbit.shift[a] - p[a] * sp / std::max(dot(p, p), 1e-300);
        cross += other * other;
    }
    if (std::abs(sp) < 1e-12)
        throw ConfigError("growth_bounds: orbit shift is orthogonal to p");
    if (std::sqrt(cross) > 1e-9 * std::abs(sp))
        throw ConfigError("growth_bounds: orbit shift must be parallel to p");

    SpeedInfo sp_info = max_speed(flow, &p);
    GrowthBounds gb;
    gb.lower_slope = orbit.speed_coeff;
    gb.lower_icept = orbit.speed_coeff / sp_info.vmax;
    gb.upper_slope = *sp_info.vdotp_max;
    gb.upper_icept = 1.0;
    for (double A : A_values) {
        gb.A_values.push_back(A);
        gb.lower.push_back(gb.lower_slope * A + gb.lower_icept);
        gb.upper.push_back(gb.upper_slope * A + gb.upper_icept);
    }
    return gb;
}

LagrangianLimit lagrangian_limit(const FlowSpec& flow, const Vec& p, double T, int seed_count,
                                 double dt, const std::vector<Vec>& extra_seeds) {
    LagrangianLimit out;
    std::vector<Vec> seeds = extra_seeds;
    // Halton-style quasi-random seeds over the period cell
    auto halton = [](int index, int base) {
        double f = 1.0, r = 0.0;
        while (index > 0) {
            f /= base;
            r += f * (index % base);
            index /= base;
        }
        return r;
    };
    for (int s = 1; s <= seed_count; ++s) {
        Vec x = {kTwoPi * halton(s, 2), kTwoPi * halton(s, 3),
                 flow.dim() == 3 ? kTwoPi * halton(s, 5) : 0.0};
        seeds.push_back(x);
    }
    out.seeds = static_cast<int>(seeds.size());
    out.value = -1e300;
    for (const Vec& x0 : seeds) {
        Vec xe = flow_map(flow, x0, T, dt);
        double rate = dot(xe - x0, p) / T;
        if (rate > out.value) {
            out.value = rate;
            out.best_seed = x0;
        }
    }
    return out;
}

}  // namespace geq
