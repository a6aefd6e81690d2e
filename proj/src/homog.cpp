#include "geq/homog.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace geq {

namespace {

double series_value_at(const std::vector<double>& ts, const std::vector<double>& ms, double t) {
    auto it = std::lower_bound(ts.begin(), ts.end(), t - 1e-12);
    std::size_t i = std::min<std::size_t>(it - ts.begin(), ts.size() - 1);
    return ms[i];
}

struct WindowAssessment {
    double value = 0.0, w1 = 0.0, w2 = 0.0;
    bool window_ok = false;
};

WindowAssessment assess_windows(const std::vector<double>& ts, const std::vector<double>& ms,
                                double T, double rel_tol) {
    WindowAssessment a;
    const double mT = series_value_at(ts, ms, T);
    const double mH = series_value_at(ts, ms, 0.5 * T);
    const double mQ = series_value_at(ts, ms, 0.75 * T);
    a.value = -(mT - mH) / (0.5 * T);
    a.w1 = -(mQ - mH) / (0.25 * T);
    a.w2 = -(mT - mQ) / (0.25 * T);
    a.window_ok = std::abs(a.w1 - a.w2) <= rel_tol * std::max(std::abs(a.value), 1e-12);
    return a;
}

}  // namespace

EffectiveHEstimate hbar_large_time(const GEquationSpec& spec, const Vec& p,
                                   const LargeTimeConfig& config) {
    PeriodicGrid grid(spec.flow.dim(), config.n);
    SolverConfig scfg = config.solver;
    scfg.t_end = config.t_end;  // horizon managed here
    Stepper st(grid, spec, p, scfg);

    ScalarField v(grid), hfield(grid);
    std::vector<double> ts{0.0}, ms{mean(v)};
    double t = 0.0, T = config.t_end;
    long steps = 0;

    EffectiveHEstimate out;
    out.p = p;
    out.method = "large_time";
    int extends = 0;
    while (true) {
        while (t < T - 1e-14) {
            double dt = std::min(st.stable_dt(), T - t);
            st.step(v, dt);
            t += dt;
            ++steps;
            ms.push_back(mean(v));
            ts.push_back(t);
            if (!std::isfinite(ms.back()))
                throw DivergenceError("large-time run diverged at step " + std::to_string(steps) +
                                      " (t=" + format_double(t) + ")");
        }
        st.hamiltonian(v, hfield);
        WindowAssessment a = assess_windows(ts, ms, T, config.rel_tol);
        out.value = a.value;
        out.lower = field_min(hfield);
        out.upper = field_max(hfield);
        out.spread = out.upper - out.lower;
        out.end_osc = osc(v);
        out.history_t.push_back(T);
        out.history_value.push_back(a.value);
        const double slack = 1e-12 * std::max(1.0, std::abs(a.value));
        bool osc_ok = out.spread <= config.osc_tol * std::abs(a.value) + 1e-14;
        bool env_ok = out.lower - slack <= a.value && a.value <= out.upper + slack;
        out.converged = a.window_ok && osc_ok && env_ok;
        if (out.converged || !config.auto_extend || extends >= config.max_extend) break;
        T *= 2.0;
        ++extends;
    }
    out.steps = steps;
    return out;
}

EffectiveHEstimate hbar_discounted(const GEquationSpec& spec, const Vec& p,
                                   const DiscountedConfig& config) {
    for (std::size_t i = 1; i < config.lambdas.size(); ++i)
        if (!(config.lambdas[i] < config.lambdas[i - 1]) || config.lambdas[i] <= 0)
            throw ConfigError("lambda schedule must be positive and decreasing");
    PeriodicGrid grid(spec.flow.dim(), config.n);
    Stepper st(grid, spec, p, config.solver);

    ScalarField v(grid), h(grid);
    EffectiveHEstimate out;
    out.p = p;
    out.method = "discounted";

    double prev_lambda = 0.0;
    for (double lambda : config.lambdas) {
        if (prev_lambda > 0.0) {
            const double scale = prev_lambda / lambda;  // -H/lambda mode carries over
            for (double& x : v.values) x *= scale;
        }
        long it = 0;
        double maxres = 0.0;
        while (true) {
            st.hamiltonian(v, h);
            maxres = 0.0;
            double meanres = 0.0;
            const double* vv = v.values.data();
            const double* hh = h.values.data();
            const std::size_t cells = v.values.size();
            for (std::size_t c = 0; c < cells; ++c) {
                double r = lambda * vv[c] + hh[c];
                meanres += r;
                maxres = std::max(maxres, std::abs(r));
            }
            meanres /= static_cast<double>(cells);
            if (!std::isfinite(maxres))
                throw DivergenceError("discounted relaxation diverged at lambda=" +
                                      format_double(lambda));
            if (maxres < config.tol * lambda) break;
            if (++it > config.max_iters)
                throw NonConvergenceError(
                    "discounted relaxation stalled at lambda=" + format_double(lambda) +
                    " with residual " + format_double(maxres));
            const double dtau = std::min(st.stable_dt(), 0.4 / lambda);
            // exact Newton update of the uniform mode removes the slow constant drift
            const double shift = meanres * (1.0 - dtau * lambda) / lambda;
            double* vm = v.values.data();
            for (std::size_t c = 0; c < cells; ++c)
                vm[c] -= dtau * (lambda * vm[c] + hh[c]) + shift;
            out.steps += 1;
        }
        double lam_v_min = 1e300, lam_v_max = -1e300;
        for (double x : v.values) {
            lam_v_min = std::min(lam_v_min, lambda * x);
            lam_v_max = std::max(lam_v_max, lambda * x);
        }
        out.max_lambda_v = std::max(out.max_lambda_v,
                                    std::max(std::abs(lam_v_min), std::abs(lam_v_max)));
        out.history_t.push_back(lambda);
        out.history_value.push_back(-lambda * mean(v));
        out.lower = -lam_v_max;
        out.upper = -lam_v_min;
        out.spread = lam_v_max - lam_v_min;
        prev_lambda = lambda;
    }
    // Richardson extrapolation in lambda from the last pair of the schedule
    const std::size_t m = config.lambdas.size();
    if (m >= 2) {
        double l1 = config.lambdas[m - 2], l2 = config.lambdas[m - 1];
        double e1 = out.history_value[m - 2], e2 = out.history_value[m - 1];
        out.value = (e2 * l1 - e1 * l2) / (l1 - l2);
    } else {
        out.value = out.history_value.back();
    }
    const double slack = 1e-9 * std::max(1.0, std::abs(out.value));
    out.converged = out.lower - slack <= out.value && out.value <= out.upper + slack;
    out.end_osc = out.spread;
    return out;
}

namespace {

// Simpson quadrature of fn over [0,1] with panel doubling.
template <typename F>
double adaptive_simpson(F&& fn, int start_panels, double tol) {
    int n = start_panels;
    double prev = 0.0;
    for (int round = 0;; ++round) {
        double acc = fn(0.0) + fn(1.0);
        for (int i = 1; i < n; ++i) acc += fn(static_cast<double>(i) / n) * (i % 2 ? 4.0 : 2.0);
        double val = acc / (3.0 * n);
        if (round > 0 && std::abs(val - prev) < tol) return val;
        prev = val;
        if (n >= (1 << 21)) return val;
        n *= 2;
    }
}

}  // namespace

double exact_shear_hbar(const Profile& f, double a, double b) {
    if (!std::isfinite(f.max_value()) || !std::isfinite(f.min_value()))
        throw ConfigError("exact_shear_hbar: profile must be finite");
    if (b == 0.0) return std::abs(a);  // pure transverse propagation

    // M = |b| + max(b f), scanned densely on the unit period
    double maxbf = -1e300;
    const int scan = 1 << 16;
    for (int i = 0; i < scan; ++i)
        maxbf = std::max(maxbf, b * f.value(static_cast<double>(i) / scan));
    const double M = std::abs(b) + maxbf;

    auto integral = [&](double H) {
        return adaptive_simpson(
            [&](double y) {
                double s = H - b * f.value(y);
                double under = s * s - b * b;
                return std::sqrt(std::max(under, 0.0));
            },
            4096, 1e-8);
    };

    if (std::abs(a) <= integral(M)) return M;

    double lo = M, hi = M + std::abs(a) + 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
        double mid = 0.5 * (lo + hi);
        (integral(mid) < std::abs(a) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

// Strain shear machinery: H(g, x) = sqrt(1+g^2) + d g f'(x) / sqrt(1+g^2).
struct StrainSolver {
    std::vector<double> fv, fp;  // node values of f and f'
    int nodes;
    double d;

    StrainSolver(const Profile& f, double d_, int n = 4096) : nodes(n), d(d_) {
        fv.resize(n + 1);
        fp.resize(n + 1);
        for (int i = 0; i <= n; ++i) {
            double y = static_cast<double>(i) / n;
            fv[i] = f.value(y);
            fp[i] = f.deriv(y);
        }
    }

    static double ham(double g, double dfp) {
        double r = std::sqrt(1.0 + g * g);
        return r + dfp * g / r;
    }
    static double ham_p(double g, double dfp) {
        double r2 = 1.0 + g * g;
        return (g * r2 + dfp) / (r2 * std::sqrt(r2));
    }

    // branch floor: the zero of H_p, i.e. root of g(1+g^2) = -d f'
    static double branch_floor(double dfp) {
        double p = 0.0;
        for (int it = 0; it < 60; ++it) {
            double fval = p * (1.0 + p * p) + dfp;
            double fder = 1.0 + 3.0 * p * p;
            double step = fval / fder;
            p -= step;
            if (std::abs(step) < 1e-15 * (1.0 + std::abs(p))) break;
        }
        return std::max(0.0, p);
    }

    double solve_g(double rhs, double dfp) const {
        double gmin = branch_floor(dfp);
        double lo = gmin;
        double hi = std::max(gmin + 1.0, std::sqrt(std::max(rhs * rhs - 1.0, 0.0)) + 1.0);
        while (ham(hi, dfp) < rhs) hi *= 2.0;
        double g = std::sqrt(std::max(rhs * rhs - 1.0, 1e-12));
        g = std::clamp(g, lo, hi);
        for (int it = 0; it < 80; ++it) {
            double val = ham(g, dfp) - rhs;
            if (val > 0)
                hi = g;
            else
                lo = g;
            double der = ham_p(g, dfp);
            double gn = (der > 1e-14) ? g - val / der : 0.5 * (lo + hi);
            if (!(gn > lo && gn < hi)) gn = 0.5 * (lo + hi);
            if (std::abs(gn - g) < 1e-14 * (1.0 + std::abs(g))) {
                g = gn;
                break;
            }
            g = gn;
        }
        return g;
    }

    // integral_0^1 g dx at level E (Simpson over the precomputed nodes)
    double mean_slope(double E) const {
        double acc = 0.0;
        for (int i = 0; i <= nodes; ++i) {
            double g = solve_g(E - fv[i], d * fp[i]);
            double w = (i == 0 || i == nodes) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            acc += w * g;
        }
        return acc / (3.0 * nodes);
    }

    double solve_E(double pprime, double fmax, double* min_attainable) const {
        const double E_lo = 1.0 + fmax + 1e-9;
        double I_lo = mean_slope(E_lo);
        if (min_attainable) *min_attainable = I_lo;
        if (pprime <= I_lo)
            throw ConfigError("strain_shear_hbar: p' = " + format_double(pprime) +
                              " is below the admissible branch (needs > " + format_double(I_lo) +
                              "; E would hit " + format_double(1.0 + fmax) + ")");
        double lo = E_lo, hi = E_lo + 1.0;
        while (mean_slope(hi) < pprime) hi = E_lo + 2.0 * (hi - E_lo);
        for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
            double mid = 0.5 * (lo + hi);
            (mean_slope(mid) < pprime ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }
};

}  // namespace

StrainShearResult strain_shear_hbar(const Profile& f, double pprime, double d) {
    if (d < 0) throw ConfigError("strain_shear_hbar: d must be nonnegative");
    const double fmax = f.max_value();
    StrainShearResult out;
    {
        StrainSolver s(f, d);
        out.value = s.solve_E(pprime, fmax, &out.min_attainable);
    }
    double delta = std::max(1e-4, 0.05 * d);
    if (d > 0 && d - delta < 0) delta = 0.5 * d;
    if (d == 0.0) {
        StrainSolver sp(f, delta);
        out.dvalue_dd = (sp.solve_E(pprime, fmax, nullptr) - out.value) / delta;
    } else {
        StrainSolver sp(f, d + delta), sm(f, d - delta);
        out.dvalue_dd =
            (sp.solve_E(pprime, fmax, nullptr) - sm.solve_E(pprime, fmax, nullptr)) / (2 * delta);
    }
    return out;
}

GrowthFit growth_sweep(const GEquationSpec& spec, const Vec& p, const std::vector<double>& A_list,
                       const LargeTimeConfig& config) {
    for (std::size_t i = 1; i < A_list.size(); ++i)
        if (!(A_list[i] > A_list[i - 1])) throw ConfigError("A_list must be strictly increasing");
    GrowthFit fit;
    fit.A_values = A_list;
    for (double A : A_list) {
        GEquationSpec s = spec;
        s.flow = spec.flow.with_intensity(A);
        EffectiveHEstimate est = hbar_large_time(s, p, config);
        fit.H_values.push_back(est.value);
        fit.converged.push_back(est.converged);
        fit.all_converged = fit.all_converged && est.converged;
    }
    const std::size_t m = A_list.size();
    const double ps = std::abs(p[0]) + std::abs(p[1]);

    auto rel_rms = [&](const std::vector<double>& model) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            num += (model[i] - fit.H_values[i]) * (model[i] - fit.H_values[i]);
            den += fit.H_values[i] * fit.H_values[i];
        }
        return std::sqrt(num / std::max(den, 1e-300));
    };

    {  // linear a A + b
        double sA = 0, sH = 0, sAA = 0, sAH = 0;
        for (std::size_t i = 0; i < m; ++i) {
            sA += A_list[i];
            sH += fit.H_values[i];
            sAA += A_list[i] * A_list[i];
            sAH += A_list[i] * fit.H_values[i];
        }
        double den = m * sAA - sA * sA;
        fit.lin_a = den != 0 ? (m * sAH - sA * sH) / den : 0.0;
        fit.lin_b = (sH - fit.lin_a * sA) / m;
        std::vector<double> model(m);
        for (std::size_t i = 0; i < m; ++i) model[i] = fit.lin_a * A_list[i] + fit.lin_b;
        fit.lin_residual = rel_rms(model);
    }
    {  // loglaw c A pi s / (2 ln A + C), golden section over C
        auto residual_for = [&](double C, double* c_out) {
            double sxH = 0, sxx = 0;
            std::vector<double> x(m);
            for (std::size_t i = 0; i < m; ++i) {
                x[i] = A_list[i] * M_PI * ps / (2.0 * std::log(A_list[i]) + C);
                sxH += x[i] * fit.H_values[i];
                sxx += x[i] * x[i];
            }
            double c = sxx > 0 ? sxH / sxx : 0.0;
            if (c_out) *c_out = c;
            std::vector<double> model(m);
            for (std::size_t i = 0; i < m; ++i) model[i] = c * x[i];
            return rel_rms(model);
        };
        double lo = -2.0 * std::log(A_list.front()) + 0.5, hi = 60.0;
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double c1 = hi - gr * (hi - lo), c2 = lo + gr * (hi - lo);
        double f1 = residual_for(c1, nullptr), f2 = residual_for(c2, nullptr);
        for (int it = 0; it < 80; ++it) {
            if (f1 < f2) {
                hi = c2;
                c2 = c1;
                f2 = f1;
                c1 = hi - gr * (hi - lo);
                f1 = residual_for(c1, nullptr);
            } else {
                lo = c1;
                c1 = c2;
                f1 = f2;
                c2 = lo + gr * (hi - lo);
                f2 = residual_for(c2, nullptr);
            }
        }
        fit.log_C = 0.5 * (lo + hi);
        fit.log_residual = residual_for(fit.log_C, &fit.log_c);
    }
    {  // bounded: constant fit
        double s = 0;
        for (double h : fit.H_values) s += h;
        fit.bounded_value = s / m;
        std::vector<double> model(m, fit.bounded_value);
        fit.bounded_residual = rel_rms(model);
    }
    fit.best_model = "linear";
    double best = fit.lin_residual;
    if (fit.log_residual < best) {
        best = fit.log_residual;
        fit.best_model = "loglaw";
    }
    if (fit.bounded_residual < best) fit.best_model = "bounded";

    if (ps > 0) {  // single-C band diagnostic (unit coefficient)
        double sr = 0, sr2 = 0, sr2log = 0;
        std::vector<double> r(m);
        for (std::size_t i = 0; i < m; ++i) {
            r[i] = fit.H_values[i] / (A_list[i] * M_PI * ps);
            sr += r[i];
            sr2 += r[i] * r[i];
            sr2log += r[i] * r[i] * 2.0 * std::log(A_list[i]);
        }
        fit.band_C = (sr - sr2log) / sr2;
        for (std::size_t i = 0; i < m; ++i)
            fit.band_values.push_back(r[i] * (2.0 * std::log(A_list[i]) + fit.band_C));
    }
    return fit;
}

// ---------------------------------------------------------------------------
// Reduced 3D-shear curvature problem on a 2D periodic grid.

namespace {

struct ShearCurvatureRun {
    EffectiveHEstimate est;
    double spread_T = 0.0;   // osc(-v/T) at the probe time
    double spread_2T = 0.0;  // and at double the probe time
};

ShearCurvatureRun run_shear_curvature(const Profile2D& f, const Vec& p, double d, double A,
                                      bool cutoff, const BifurcationConfig& config,
                                      double t_multiplier, bool probe_spread) {
    if (p[2] == 0.0) throw ConfigError("shear curvature reduction needs p3 != 0");
    PeriodicGrid grid(2, config.n);
    const int n0 = grid.n[0], n1 = grid.n[1];
    const double h0 = grid.h(0), h1 = grid.h(1);
    const double p3 = p[2];
    const std::size_t cells = grid.cells();

    std::vector<double> src(cells);
    for (int j = 0; j < n1; ++j)
        for (int i = 0; i < n0; ++i) {
            Vec x = grid.center(i, j, 0);
            src[grid.index(i, j)] = A * p3 * f.value(x[0] / kTwoPi, x[1] / kTwoPi);
        }
    std::vector<int> im0(n0), ip0(n0), im1(n1), ip1(n1);
    for (int i = 0; i < n0; ++i) {
        im0[i] = (i + n0 - 1) % n0;
        ip0[i] = (i + 1) % n0;
    }
    for (int j = 0; j < n1; ++j) {
        im1[j] = (j + n1 - 1) % n1;
        ip1[j] = (j + 1) % n1;
    }

    ScalarField v(grid);
    std::vector<double> w0(cells), w1(cells), kap(cells), ham(cells);
    std::vector<double> ts{0.0}, ms{0.0};
    double alpha = 1.0;  // max |laminar factor|, refreshed each step
    const double p32 = p3 * p3;

    auto compute_kappa = [&](const std::vector<double>& vv) {
        for (int j = 0; j < n1; ++j) {
            const std::size_t b = grid.index(0, j), bm = grid.index(0, im1[j]),
                              bp = grid.index(0, ip1[j]);
            for (int i = 0; i < n0; ++i) {
                double q0 = p[0] + (vv[b + ip0[i]] - vv[b + im0[i]]) / (2 * h0);
                double q1 = p[1] + (vv[bp + i] - vv[bm + i]) / (2 * h1);
                double mag = std::sqrt(p32 + q0 * q0 + q1 * q1);
                w0[b + i] = q0 / mag;
                w1[b + i] = q1 / mag;
            }
        }
        double amax = 1.0;
        for (int j = 0; j < n1; ++j) {
            const std::size_t b = grid.index(0, j), bm = grid.index(0, im1[j]),
                              bp = grid.index(0, ip1[j]);
            for (int i = 0; i < n0; ++i) {
                double div = (w0[b + ip0[i]] - w0[b + im0[i]]) / (2 * h0) +
                             (w1[bp + i] - w1[bm + i]) / (2 * h1);
                kap[b + i] = div;
                amax = std::max(amax, std::abs(1.0 - d * div));
            }
        }
        return amax;
    };

    auto flux_pass = [&](const std::vector<double>& vv) {
        for (int j = 0; j < n1; ++j) {
            const std::size_t b = grid.index(0, j), bm = grid.index(0, im1[j]),
                              bp = grid.index(0, ip1[j]);
            for (int i = 0; i < n0; ++i) {
                const std::size_t c = b + i;
                double vc = vv[c];
                double dm0 = (vc - vv[b + im0[i]]) / h0, dp0 = (vv[b + ip0[i]] - vc) / h0;
                double dm1 = (vc - vv[bm + i]) / h1, dp1 = (vv[bp + i] - vc) / h1;
                double q0 = p[0] + 0.5 * (dm0 + dp0), q1 = p[1] + 0.5 * (dm1 + dp1);
                double speed = std::sqrt(p32 + q0 * q0 + q1 * q1);
                double factor = 1.0 - d * kap[c];
                if (cutoff) factor = std::max(factor, 0.0);
                ham[c] = factor * speed + src[c] -
                         0.5 * alpha * ((dp0 - dm0) + (dp1 - dm1));
            }
        }
    };

    const double T_probe = config.t_end * t_multiplier;
    const double T_final = probe_spread ? 2.0 * T_probe : T_probe;
    double t = 0.0;
    long steps = 0;
    ShearCurvatureRun out;
    bool got_probe = false;
    while (t < T_final - 1e-14) {
        alpha = compute_kappa(v.values);
        double rate = alpha / h0 + alpha / h1;
        double dt = config.cfl / rate;
        if (d > 0) dt = std::min(dt, config.cfl / (2.0 * d * (1.0 / (h0 * h0) + 1.0 / (h1 * h1))));
        dt = std::min(dt, T_final - t);
        if (!got_probe && t + dt > T_probe - 1e-14 && probe_spread) {
            dt = std::min(dt, std::max(T_probe - t, 1e-12));
        }
        flux_pass(v.values);
        double* vm = v.values.data();
        for (std::size_t c = 0; c < cells; ++c) vm[c] -= dt * ham[c];
        t += dt;
        ++steps;
        double m = 0.0;
        for (std::size_t c = 0; c < cells; ++c) m += vm[c];
        m /= static_cast<double>(cells);
        if (!std::isfinite(m))
            throw DivergenceError("shear-curvature run diverged at step " + std::to_string(steps));
        ts.push_back(t);
        ms.push_back(m);
        if (probe_spread && !got_probe && t >= T_probe - 1e-12) {
            out.spread_T = osc(v) / t;
            got_probe = true;
        }
    }
    if (probe_spread) out.spread_2T = osc(v) / t;

    compute_kappa(v.values);
    flux_pass(v.values);
    ScalarField hf(grid);
    hf.values = ham;
    WindowAssessment a = assess_windows(ts, ms, T_final, config.rel_tol);
    out.est.p = p;
    out.est.method = "large_time";
    out.est.value = a.value;
    out.est.lower = field_min(hf);
    out.est.upper = field_max(hf);
    out.est.spread = out.est.upper - out.est.lower;
    out.est.end_osc = osc(v);
    out.est.steps = steps;
    out.est.history_t = {T_final};
    out.est.history_value = {a.value};
    const double scale = std::max(std::abs(a.value), 1e-12);
    out.est.converged = a.window_ok && out.est.spread <= config.osc_tol * scale + 1e-14 &&
                        out.est.lower - 1e-9 <= a.value && a.value <= out.est.upper + 1e-9;
    if (!probe_spread) {
        out.spread_T = out.est.end_osc / t;
        out.spread_2T = out.spread_T;
    }
    return out;
}

}  // namespace

EffectiveHEstimate shear_curvature_hbar(const Profile2D& f, const Vec& p, double d, double A,
                                        bool cutoff, const BifurcationConfig& config,
                                        double t_multiplier) {
    return run_shear_curvature(f, p, d, A, cutoff, config, t_multiplier, false).est;
}

BifurcationResult bifurcation_scan(const Profile2D& f, const Vec& p, double d,
                                   const std::vector<double>& A_grid,
                                   const BifurcationConfig& config) {
    if (std::abs(f.max_value()) > 1e-6)
        throw ConfigError("bifurcation_scan expects a profile normalized to max f = 0");
    if (p[2] <= 0) throw ConfigError("bifurcation_scan expects p3 > 0");
    for (std::size_t i = 1; i < A_grid.size(); ++i)
        if (!(A_grid[i] > A_grid[i - 1])) throw ConfigError("A_grid must be strictly increasing");

    BifurcationResult out;
    out.p = p;
    const double pscale = std::sqrt(p[2] * p[2] + p[0] * p[0] + p[1] * p[1]);

    int first_failed = -1;
    int sign_change_at = -1;
    for (std::size_t idx = 0; idx < A_grid.size(); ++idx) {
        const double A = A_grid[idx];
        EffectiveHEstimate nocut =
            run_shear_curvature(f, p, d, A, false, config, 1.0, false).est;
        ShearCurvatureRun cut = run_shear_curvature(f, p, d, A, true, config, 1.0, true);
        out.A_grid.push_back(A);
        out.hbar_nocutoff.push_back(nocut.value);
        out.hbar_cutoff.push_back(cut.est.value);
        out.spread.push_back(cut.spread_2T);
        out.cutoff_converged.push_back(cut.est.converged);
        const double threshold =
            config.spread_factor * std::max(std::abs(nocut.value), 0.1 * pscale);
        bool failed = cut.spread_T > threshold && cut.spread_2T > threshold;
        if (failed && first_failed < 0) first_failed = static_cast<int>(idx);
        if (sign_change_at < 0 && idx > 0 && out.hbar_nocutoff[idx - 1] > 0 &&
            out.hbar_nocutoff[idx] <= 0)
            sign_change_at = static_cast<int>(idx);
    }
    out.nocutoff_strictly_decreasing = true;
    for (std::size_t i = 1; i < out.hbar_nocutoff.size(); ++i)
        if (!(out.hbar_nocutoff[i] < out.hbar_nocutoff[i - 1]))
            out.nocutoff_strictly_decreasing = false;

    if (sign_change_at < 0)
        throw ConfigError("bifurcation_scan: A_grid does not bracket the root of the "
                          "no-cutoff effective Hamiltonian");
    double lo = A_grid[sign_change_at - 1], hi = A_grid[sign_change_at];
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 40; ++it) {
        mid = 0.5 * (lo + hi);
        double val = run_shear_curvature(f, p, d, mid, false, config, 1.0, false).est.value;
        if (std::abs(val) <= config.root_tol) break;
        (val > 0 ? lo : hi) = mid;
        if (hi - lo < 1e-4) {
            mid = 0.5 * (lo + hi);
            break;
        }
    }
    out.A0_characterized = mid;
    if (first_failed >= 0) out.A0_detected = A_grid[first_failed];
    if (out.A0_detected >= 0)
        out.agreement = std::abs(out.A0_detected - out.A0_characterized);
    return out;
}

RateResult homogenization_rate(const Profile& f, const Vec& p, const std::vector<double>& eps_list,
                               double t_fixed, int cells_per_wave) {
    RateResult out;
    out.eps_list = eps_list;

    auto one_error = [&](double eps, int cpw) {
        double minv = 1.0 / eps;
        int m = static_cast<int>(std::lround(minv));
        if (std::abs(minv - m) > 1e-9)
            throw ConfigError("homogenization_rate: 1/eps must be an integer");
        int n1 = cpw * m;
        PeriodicGrid grid(2, {n1, 8, 1});
        GEquationSpec spec;
        spec.variant = GVariant::Inviscid;
        spec.flow = FlowSpec::shear2d(f.replicated(m));
        SolverConfig cfg;
        cfg.t_end = t_fixed;
        EvolutionResult ev = evolve(spec, p, grid, cfg);
        const double hbar = exact_shear_hbar(f, p[0], p[1]);
        const ScalarField& vT = ev.fields.back();
        double err = 0.0;
        for (double val : vT.values) err = std::max(err, std::abs(val + t_fixed * hbar));
        return err;
    };

    for (double eps : eps_list) out.errors.push_back(one_error(eps, cells_per_wave));

    double emax = *std::max_element(out.errors.begin(), out.errors.end());
    if (emax < 1e-9) {
        out.exact = true;
        out.corrected = out.errors;
        return out;
    }

    double eps_min = *std::min_element(eps_list.begin(), eps_list.end());
    std::size_t imin = std::min_element(eps_list.begin(), eps_list.end()) - eps_list.begin();
    double e_fine = one_error(eps_min, 2 * cells_per_wave);
    out.floor = std::max(0.0, 2.0 * (out.errors[imin] - e_fine));
    for (double e : out.errors) out.corrected.push_back(std::max(e - out.floor, 1e-12));

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(eps_list.size());
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        double x = std::log(eps_list[i]), y = std::log(out.corrected[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return out;
}

KppSpeedResult kpp_speed(const FlowSpec& flow, const Vec& p, double d, double f0prime,
                         const DiscountedConfig& config) {
    if (!(d > 0)) throw ConfigError("kpp_speed needs d > 0");
    if (!(f0prime > 0)) throw ConfigError("kpp_speed needs f'(0) > 0");
    KppSpeedResult out;
    out.p = p;
    out.d = d;
    out.f0prime = f0prime;

    GEquationSpec spec;
    spec.variant = GVariant::Quadratic;
    spec.d = d;
    spec.flow = flow;

    auto phi = [&](double lambda) {
        Vec q = lambda * p;
        double h = hbar_discounted(spec, q, config).value;
        out.lambda_samples.push_back(lambda);
        out.hquad_samples.push_back(h);
        return (f0prime + h) / lambda;
    };

    double lo = std::log(1e-2), hi = std::log(1e2);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double t1 = hi - gr * (hi - lo), t2 = lo + gr * (hi - lo);
    double f1 = phi(std::exp(t1)), f2 = phi(std::exp(t2));
    while (hi - lo > 2e-3) {
        if (f1 < f2) {
            hi = t2;
            t2 = t1;
            f2 = f1;
            t1 = hi - gr * (hi - lo);
            f1 = phi(std::exp(t1));
        } else {
            lo = t1;
            t1 = t2;
            f1 = f2;
            t2 = lo + gr * (hi - lo);
            f2 = phi(std::exp(t2));
        }
    }
    out.lambda_star = std::exp(0.5 * (lo + hi));
    out.c_T = phi(out.lambda_star);
    if (out.lambda_star < 1.1e-2 || out.lambda_star > 0.9e2)
        out.warning = "kpp minimizer sits at the lambda range boundary";
    return out;
}

CurvatureComparison curvature_comparison(const Vec& p, double d, const std::vector<double>& A_list,
                                         const LargeTimeConfig& config) {
    for (std::size_t i = 1; i < A_list.size(); ++i)
        if (!(A_list[i] > A_list[i - 1])) throw ConfigError("A_list must be strictly increasing");
    CurvatureComparison out;
    out.A_values = A_list;
    for (double A : A_list) {
        GEquationSpec inv;
        inv.variant = GVariant::Inviscid;
        inv.flow = FlowSpec::cellular(A);
        EffectiveHEstimate hi = hbar_large_time(inv, p, config);

        GEquationSpec cur;
        cur.variant = GVariant::Curvature;
        cur.d = d;
        cur.cutoff = true;
        cur.flow = FlowSpec::cellular(A);
        EffectiveHEstimate hc = hbar_large_time(cur, p, config);

        out.h_inviscid.push_back(hi.value);
        out.h_curvature.push_back(hc.value);
        out.gaps.push_back(hi.value - hc.value);
        out.all_converged = out.all_converged && hi.converged && hc.converged;
    }
    out.all_gaps_positive = true;
    out.gaps_increasing = true;
    for (std::size_t i = 0; i < out.gaps.size(); ++i) {
        if (!(out.gaps[i] > 0)) out.all_gaps_positive = false;
        if (i > 0 && !(out.gaps[i] > out.gaps[i - 1])) out.gaps_increasing = false;
    }
    return out;
}

MinPrincipleCheck min_principle_argmin(const GEquationSpec& spec, const Vec& p, double lambda,
                                       double mu, int n) {
    DiscountedConfig cfg;
    cfg.n = n;
    cfg.lambdas = {lambda};
    PeriodicGrid grid(2, n);
    Stepper st(grid, spec, p, cfg.solver);
    ScalarField v(grid), h(grid);
    long it = 0;
    while (true) {
        st.hamiltonian(v, h);
        double maxres = 0.0, meanres = 0.0;
        for (std::size_t c = 0; c < v.values.size(); ++c) {
            double r = lambda * v.values[c] + h.values[c];
            meanres += r;
            maxres = std::max(maxres, std::abs(r));
        }
        meanres /= static_cast<double>(v.values.size());
        if (maxres < cfg.tol * lambda) break;
        if (++it > cfg.max_iters)
            throw NonConvergenceError("min-principle relaxation stalled, residual " +
                                      format_double(maxres));
        double dtau = std::min(st.stable_dt(), 0.4 / lambda);
        double shift = meanres * (1.0 - dtau * lambda) / lambda;
        for (std::size_t c = 0; c < v.values.size(); ++c)
            v.values[c] -= dtau * (lambda * v.values[c] + h.values[c]) + shift;
    }

    // quarter cell [0,pi]^2, core { sin x1 sin x2 > mu }
    auto in_core = [&](int i, int j) {
        Vec x = grid.center(i, j, 0);
        if (x[0] > M_PI || x[1] > M_PI) return false;
        return std::sin(x[0]) * std::sin(x[1]) > mu;
    };
    MinPrincipleCheck out;
    double best = 1e300;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            if (!in_core(i, j)) continue;
            Vec x = grid.center(i, j, 0);
            double u = dot(p, x) + v.at(i, j);
            if (u < best) {
                best = u;
                out.argmin_i = i;
                out.argmin_j = j;
            }
        }
    out.min_value = best;
    auto on_ring = [&](int i, int j) {
        if (!in_core(i, j)) return false;
        return !in_core(i + 1, j) || !in_core(i - 1, j) || !in_core(i, j + 1) ||
               !in_core(i, j - 1);
    };
    for (int dj = -1; dj <= 1 && !out.on_boundary_ring; ++dj)
        for (int di = -1; di <= 1; ++di)
            if (on_ring(out.argmin_i + di, out.argmin_j + dj)) {
                out.on_boundary_ring = true;
                break;
            }
    return out;
}

}  // namespace geq
