#include "geq/hjsolver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace geq {

GVariant parse_variant(const std::string& s) {
    if (s == "inviscid") return GVariant::Inviscid;
    if (s == "viscous") return GVariant::Viscous;
    if (s == "curvature") return GVariant::Curvature;
    if (s == "strain") return GVariant::Strain;
    if (s == "quadratic") return GVariant::Quadratic;
    throw ConfigError("unknown G-equation variant: " + s);
}

std::string variant_name(GVariant v) {
    switch (v) {
        case GVariant::Inviscid: return "inviscid";
        case GVariant::Viscous: return "viscous";
        case GVariant::Curvature: return "curvature";
        case GVariant::Strain: return "strain";
        case GVariant::Quadratic: return "quadratic";
    }
    return "?";
}

void GEquationSpec::validate() const {
    if (d < 0) throw ConfigError("spec.d must be nonnegative");
    if (laminar) {
        // sampled positivity floor
        const int n = 16;
        for (int k = 0; k < (flow.dim() == 3 ? n : 1); ++k)
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    Vec x = {(i + 0.3) * kTwoPi / n, (j + 0.3) * kTwoPi / n,
                             (k + 0.3) * kTwoPi / n};
                    if (laminar(x) < 1e-8)
                        throw ConfigError("laminar speed must stay above a positive floor");
                }
    }
}

void SolverConfig::validate() const {
    if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("cfl must lie in (0, 1]");
    if (!(t_end > 0.0)) throw ConfigError("t_end must be positive");
    if (snapshot_stride < 0) throw ConfigError("snapshot_stride must be >= 0");
}

Stepper::Stepper(const PeriodicGrid& grid, const GEquationSpec& spec, const Vec& p,
                 const SolverConfig& config)
    : grid_(grid), spec_(spec), p_(p), config_(config) {
    spec_.validate();
    config_.validate();
    if (spec_.flow.kind() != FlowKind::Zero && grid_.dim != spec_.flow.dim())
        throw DimensionError("grid and flow dimension mismatch");

    eps_ = config_.eps_curv > 0 ? config_.eps_curv : 1e-6 * std::max(1.0, norm(p_));

    const std::size_t cells = grid_.cells();
    for (int a = 0; a < grid_.dim; ++a) vel_[a].assign(cells, 0.0);
    lam_.assign(cells, 1.0);
    const int nk = grid_.dim == 3 ? grid_.n[2] : 1;
    smax_ = 0.0;
    for (int k = 0; k < nk; ++k)
        for (int j = 0; j < grid_.n[1]; ++j)
            for (int i = 0; i < grid_.n[0]; ++i) {
                const std::size_t c = grid_.index(i, j, k);
                Vec x = grid_.center(i, j, k);
                Vec w = spec_.flow.velocity(x);
                for (int a = 0; a < grid_.dim; ++a) vel_[a][c] = w[a];
                if (spec_.laminar) lam_[c] = spec_.laminar(x);
                smax_ = std::max(smax_, lam_[c]);
            }

    if (spec_.variant == GVariant::Strain) {
        for (int s = 0; s < 6; ++s) strain_[s].assign(cells, 0.0);
        snorm_max_ = 0.0;
        for (int k = 0; k < nk; ++k)
            for (int j = 0; j < grid_.n[1]; ++j)
                for (int i = 0; i < grid_.n[0]; ++i) {
                    const std::size_t c = grid_.index(i, j, k);
                    StrainTensor st = spec_.flow.strain(grid_.center(i, j, k));
                    strain_[0][c] = st(0, 0);
                    strain_[1][c] = st(0, 1);
                    strain_[2][c] = st(1, 1);
                    strain_[3][c] = st(0, 2);
                    strain_[4][c] = st(1, 2);
                    strain_[5][c] = st(2, 2);
                    snorm_max_ = std::max(snorm_max_, st.norm_inf());
                }
    }

    const double a_int = spec_.flow.intensity();
    for (int a = 0; a < grid_.dim; ++a) {
        double vb = a_int * spec_.flow.component_bound(a);
        switch (spec_.variant) {
            case GVariant::Quadratic:
                alpha_base_[a] = vb;
                break;
            case GVariant::Strain:
                alpha_base_[a] = smax_ + vb + 3.0 * spec_.d * snorm_max_;
                break;
            default:
                alpha_base_[a] = smax_ + vb;
        }
    }

    for (int a = 0; a < grid_.dim; ++a) {
        im_[a].resize(grid_.n[a]);
        ip_[a].resize(grid_.n[a]);
        for (int i = 0; i < grid_.n[a]; ++i) {
            im_[a][i] = grid_.wrap_idx(i - 1, a);
            ip_[a][i] = grid_.wrap_idx(i + 1, a);
        }
    }

    stage_ = ScalarField(grid_);
    stage2_ = ScalarField(grid_);
    if (spec_.variant == GVariant::Curvature) {
        curv_ = ScalarField(grid_);
        for (int a = 0; a < grid_.dim; ++a) wdir_[a] = ScalarField(grid_);
    }
}

double Stepper::alpha(int axis) const {
    double a = alpha_base_[axis];
    if (spec_.variant == GVariant::Quadratic)
        a += 2.0 * spec_.d * (norm(p_) + grad_bound_);
    return a;
}

double Stepper::stable_dt() const {
    double rate = 0.0;
    for (int a = 0; a < grid_.dim; ++a) rate += alpha(a) / grid_.h(a);
    double dt = rate > 0 ? config_.cfl / rate : 1e300;
    if ((spec_.variant == GVariant::Viscous || spec_.variant == GVariant::Curvature) &&
        spec_.d > 0) {
        double prate = 0.0;
        for (int a = 0; a < grid_.dim; ++a) prate += 1.0 / (grid_.h(a) * grid_.h(a));
        dt = std::min(dt, config_.cfl / (2.0 * spec_.d * prate));
    }
    return dt;
}

void Stepper::compute_curvature(const ScalarField& v) {
    const int n0 = grid_.n[0], n1 = grid_.n[1], nk = grid_.dim == 3 ? grid_.n[2] : 1;
    const double* vv = v.values.data();
    const double e2 = eps_ * eps_;
    for (int k = 0; k < nk; ++k) {
        const int km = im_[2].empty() ? 0 : im_[2][k], kp = ip_[2].empty() ? 0 : ip_[2][k];
        for (int j = 0; j < n1; ++j) {
            const int jm = im_[1][j], jp = ip_[1][j];
            const std::size_t base = grid_.index(0, j, k);
            const std::size_t bjm = grid_.index(0, jm, k), bjp = grid_.index(0, jp, k);
            const std::size_t bkm = grid_.index(0, j, km), bkp = grid_.index(0, j, kp);
            for (int i = 0; i < n0; ++i) {
                const std::size_t c = base + i;
                double q[3] = {p_[0], p_[1], p_[2]};
                q[0] += (vv[base + ip_[0][i]] - vv[base + im_[0][i]]) / (2 * grid_.h(0));
                q[1] += (vv[bjp + i] - vv[bjm + i]) / (2 * grid_.h(1));
                if (grid_.dim == 3) q[2] += (vv[bkp + i] - vv[bkm + i]) / (2 * grid_.h(2));
                double mag = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + e2);
                for (int a = 0; a < grid_.dim; ++a) wdir_[a].values[c] = q[a] / mag;
            }
        }
    }
    for (int k = 0; k < nk; ++k) {
        const int km = im_[2].empty() ? 0 : im_[2][k], kp = ip_[2].empty() ? 0 : ip_[2][k];
        for (int j = 0; j < n1; ++j) {
            const int jm = im_[1][j], jp = ip_[1][j];
            const std::size_t base = grid_.index(0, j, k);
            const std::size_t bjm = grid_.index(0, jm, k), bjp = grid_.index(0, jp, k);
            const std::size_t bkm = grid_.index(0, j, km), bkp = grid_.index(0, j, kp);
            const double* w0 = wdir_[0].values.data();
            const double* w1 = wdir_[1].values.data();
            for (int i = 0; i < n0; ++i) {
                double div = (w0[base + ip_[0][i]] - w0[base + im_[0][i]]) / (2 * grid_.h(0)) +
                             (w1[bjp + i] - w1[bjm + i]) / (2 * grid_.h(1));
                if (grid_.dim == 3) {
                    const double* w2 = wdir_[2].values.data();
                    div += (w2[bkp + i] - w2[bkm + i]) / (2 * grid_.h(2));
                }
                curv_.values[base + i] = div;
            }
        }
    }
}

template <GVariant V>
void Stepper::ham_impl(const ScalarField& v, ScalarField& out) {
    const int n0 = grid_.n[0], n1 = grid_.n[1], nk = grid_.dim == 3 ? grid_.n[2] : 1;
    const int dim = grid_.dim;
    const double* vv = v.values.data();
    double* oo = out.values.data();
    const double h0 = grid_.h(0), h1 = grid_.h(1), h2 = dim == 3 ? grid_.h(2) : 1.0;
    const double al0 = alpha(0), al1 = alpha(1), al2 = dim == 3 ? alpha(2) : 0.0;
    const double d = spec_.d;
    const double e2 = eps_ * eps_;
    double gb = 0.0;

    for (int k = 0; k < nk; ++k) {
        const int km = dim == 3 ? im_[2][k] : 0, kp = dim == 3 ? ip_[2][k] : 0;
        for (int j = 0; j < n1; ++j) {
            const int jm = im_[1][j], jp = ip_[1][j];
            const std::size_t base = grid_.index(0, j, k);
            const std::size_t bjm = grid_.index(0, jm, k), bjp = grid_.index(0, jp, k);
            const std::size_t bkm = grid_.index(0, j, km), bkp = grid_.index(0, j, kp);
            for (int i = 0; i < n0; ++i) {
                const std::size_t c = base + i;
                const double vc = vv[c];
                const double vxm = vv[base + im_[0][i]], vxp = vv[base + ip_[0][i]];
                const double vym = vv[bjm + i], vyp = vv[bjp + i];
                const double dm0 = (vc - vxm) / h0, dp0 = (vxp - vc) / h0;
                const double dm1 = (vc - vym) / h1, dp1 = (vyp - vc) / h1;
                double dm2 = 0.0, dp2 = 0.0, vzm = 0.0, vzp = 0.0;
                if (dim == 3) {
                    vzm = vv[bkm + i];
                    vzp = vv[bkp + i];
                    dm2 = (vc - vzm) / h2;
                    dp2 = (vzp - vc) / h2;
                }
                const double q0 = p_[0] + 0.5 * (dm0 + dp0);
                const double q1 = p_[1] + 0.5 * (dm1 + dp1);
                const double q2 = dim == 3 ? p_[2] + 0.5 * (dm2 + dp2) : 0.0;
                const double q2norm = q0 * q0 + q1 * q1 + q2 * q2;
                const double qn = std::sqrt(q2norm);

                double adv = vel_[0][c] * q0 + vel_[1][c] * q1;
                if (dim == 3) adv += vel_[2][c] * q2;

                double ham;
                if constexpr (V == GVariant::Inviscid) {
                    ham = lam_[c] * qn + adv;
                } else if constexpr (V == GVariant::Viscous) {
                    double lap = (vxp - 2 * vc + vxm) / (h0 * h0) +
                                 (vyp - 2 * vc + vym) / (h1 * h1);
                    if (dim == 3) lap += (vzp - 2 * vc + vzm) / (h2 * h2);
                    ham = lam_[c] * qn + adv - d * lap;
                } else if constexpr (V == GVariant::Curvature) {
                    double factor = lam_[c] * (1.0 - d * curv_.values[c]);
                    if (spec_.cutoff) factor = std::max(factor, 0.0);
                    ham = factor * qn + adv;
                } else if constexpr (V == GVariant::Strain) {
                    double qsq = strain_[0][c] * q0 * q0 + 2 * strain_[1][c] * q0 * q1 +
                                 strain_[2][c] * q1 * q1;
                    if (dim == 3)
                        qsq += 2 * strain_[3][c] * q0 * q2 + 2 * strain_[4][c] * q1 * q2 +
                               strain_[5][c] * q2 * q2;
                    double factor = lam_[c] + d * qsq / (q2norm + e2);
                    if (spec_.cutoff) factor = std::max(factor, 0.0);
                    ham = factor * qn + adv;
                } else {  // Quadratic
                    ham = d * q2norm + adv;
                }

                double diss = al0 * (dp0 - dm0) + al1 * (dp1 - dm1);
                if (dim == 3) diss += al2 * (dp2 - dm2);
                oo[c] = ham - 0.5 * diss;

                if constexpr (V == GVariant::Quadratic) {
                    double m = std::max(std::abs(0.5 * (dm0 + dp0)), std::abs(0.5 * (dm1 + dp1)));
                    if (dim == 3) m = std::max(m, std::abs(0.5 * (dm2 + dp2)));
                    gb = std::max(gb, m);
                }
            }
        }
    }
    if constexpr (V == GVariant::Quadratic) grad_bound_ = gb;
}

void Stepper::hamiltonian(const ScalarField& v, ScalarField& out) {
    if (out.grid.cells() != grid_.cells()) out = ScalarField(grid_);
    switch (spec_.variant) {
        case GVariant::Inviscid: ham_impl<GVariant::Inviscid>(v, out); break;
        case GVariant::Viscous: ham_impl<GVariant::Viscous>(v, out); break;
        case GVariant::Curvature:
            compute_curvature(v);
            ham_impl<GVariant::Curvature>(v, out);
            break;
        case GVariant::Strain: ham_impl<GVariant::Strain>(v, out); break;
        case GVariant::Quadratic: ham_impl<GVariant::Quadratic>(v, out); break;
    }
}

void Stepper::euler_step(const ScalarField& v, double dt, ScalarField& out) {
    hamiltonian(v, stage_);
    if (out.values.size() != v.values.size()) out = ScalarField(grid_);
    const double* vv = v.values.data();
    const double* hh = stage_.values.data();
    double* oo = out.values.data();
    const std::size_t cells = v.values.size();
    for (std::size_t c = 0; c < cells; ++c) oo[c] = vv[c] - dt * hh[c];
}

void Stepper::step(ScalarField& v, double dt) {
    if (dt > stable_dt() * (1.0 + 1e-12))
        throw StabilityError("time step " + format_double(dt) + " exceeds stability bound " +
                             format_double(stable_dt()));
    if (config_.integrator == SolverConfig::Integrator::Euler) {
        euler_step(v, dt, stage2_);
        std::swap(v.values, stage2_.values);
        return;
    }
    // TVD-RK2: average of two Euler stages
    if (rk_.values.size() != v.values.size()) rk_ = ScalarField(grid_);
    euler_step(v, dt, stage2_);
    euler_step(stage2_, dt, rk_);
    double* vv = v.values.data();
    const double* rr = rk_.values.data();
    for (std::size_t c = 0; c < v.values.size(); ++c) vv[c] = 0.5 * (vv[c] + rr[c]);
}

EvolutionResult Stepper::evolve(const ScalarField* v0) {
    ScalarField v = v0 ? *v0 : ScalarField(grid_);
    if (v0 && !(v0->grid == grid_)) throw ConfigError("initial field grid mismatch");

    EvolutionResult res;
    res.times.push_back(0.0);
    res.fields.push_back(v);
    res.mean_times.push_back(0.0);
    res.mean_series.push_back(mean(v));

    double t = 0.0;
    long step_count = 0;
    while (t < config_.t_end - 1e-14) {
        double dt = std::min(stable_dt(), config_.t_end - t);
        step(v, dt);
        t += dt;
        ++step_count;
        res.mean_times.push_back(t);
        res.mean_series.push_back(mean(v));

        const bool at_end = t >= config_.t_end - 1e-14;
        if ((config_.snapshot_stride > 0 && step_count % config_.snapshot_stride == 0) || at_end) {
            if (!std::isfinite(res.mean_series.back()))
                throw DivergenceError("solution diverged at step " + std::to_string(step_count) +
                                      " (t=" + format_double(t) + ")");
            res.times.push_back(t);
            res.fields.push_back(v);
        }
    }
    res.steps = step_count;
    for (std::size_t s = 0; s + 1 < res.times.size(); ++s) {
        double m1 = mean(res.fields[s]), m2 = mean(res.fields[s + 1]);
        res.front_speed_series.push_back((m1 - m2) / (res.times[s + 1] - res.times[s]));
    }
    hamiltonian(v, res.final_speed.values.empty() ? (res.final_speed = ScalarField(grid_))
                                                  : res.final_speed);
    for (double h : res.final_speed.values)
        if (!std::isfinite(h))
            throw DivergenceError("non-finite Hamiltonian at final time");
    return res;
}

double numerical_hamiltonian(const GEquationSpec& spec, const Vec& p, const Vec& x,
                             const Vec& dminus, const Vec& dplus, double curvature_term) {
    spec.validate();
    const int dim = spec.flow.dim();
    for (int a = 0; a < dim; ++a)
        if (!std::isfinite(dminus[a]) || !std::isfinite(dplus[a]))
            throw ConfigError("numerical_hamiltonian: gradients must be finite");
    const double eps = 1e-6 * std::max(1.0, norm(p));
    Vec q = p;
    for (int a = 0; a < dim; ++a) q[a] += 0.5 * (dminus[a] + dplus[a]);
    double q2 = 0.0;
    for (int a = 0; a < dim; ++a) q2 += q[a] * q[a];
    const double qn = std::sqrt(q2);
    const Vec w = spec.flow.velocity(x);
    double adv = 0.0;
    for (int a = 0; a < dim; ++a) adv += w[a] * q[a];
    const double lam = spec.laminar ? spec.laminar(x) : 1.0;

    double ham = 0.0;
    double smax = 1.0;
    if (spec.laminar) {
        smax = 0.0;
        const int n = 32;
        for (int k = 0; k < (dim == 3 ? n : 1); ++k)
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i)
                    smax = std::max(smax, spec.laminar({i * kTwoPi / n, j * kTwoPi / n,
                                                        k * kTwoPi / n}));
    }
    switch (spec.variant) {
        case GVariant::Inviscid:
            ham = lam * qn + adv;
            break;
        case GVariant::Viscous:
            ham = lam * qn + adv - spec.d * curvature_term;  // caller passes the Laplacian
            break;
        case GVariant::Curvature: {
            double factor = lam * (1.0 - spec.d * curvature_term);
            if (spec.cutoff) factor = std::max(factor, 0.0);
            ham = factor * qn + adv;
            break;
        }
        case GVariant::Strain: {
            StrainTensor st = spec.flow.strain(x);
            double qsq = quad_form(q, st.s, dim);
            double factor = lam + spec.d * qsq / (q2 + eps * eps);
            if (spec.cutoff) factor = std::max(factor, 0.0);
            ham = factor * qn + adv;
            break;
        }
        case GVariant::Quadratic:
            ham = spec.d * q2 + adv;
            break;
    }

    double maxdbar = 0.0;
    for (int a = 0; a < dim; ++a) maxdbar = std::max(maxdbar, std::abs(0.5 * (dminus[a] + dplus[a])));
    double snorm = 0.0;
    if (spec.variant == GVariant::Strain) {
        const int n = 32;
        FlowSpec unit = spec.flow;
        for (int k = 0; k < (dim == 3 ? n : 1); ++k)
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i)
                    snorm = std::max(snorm, unit.strain({i * kTwoPi / n, j * kTwoPi / n,
                                                         k * kTwoPi / n}).norm_inf());
    }
    double diss = 0.0;
    const double a_int = spec.flow.intensity();
    for (int a = 0; a < dim; ++a) {
        double alpha;
        if (spec.variant == GVariant::Quadratic)
            alpha = a_int * spec.flow.component_bound(a) + 2.0 * spec.d * (norm(p) + maxdbar);
        else if (spec.variant == GVariant::Strain)
            alpha = smax + a_int * spec.flow.component_bound(a) + 3.0 * spec.d * snorm;
        else
            alpha = smax + a_int * spec.flow.component_bound(a);
        diss += alpha * (dplus[a] - dminus[a]);
    }
    return ham - 0.5 * diss;
}

EvolutionResult evolve(const GEquationSpec& spec, const Vec& p, const PeriodicGrid& grid,
                       const SolverConfig& config, const ScalarField* v0) {
    Stepper st(grid, spec, p, config);
    return st.evolve(v0);
}

VolumeAvgResult turbulent_speed_volume_avg(const EvolutionResult& history,
                                           const GEquationSpec& spec, const Vec& p) {
    VolumeAvgResult out;
    if (history.fields.empty()) return out;
    const PeriodicGrid& g = history.fields.front().grid;
    const int nk = g.dim == 3 ? g.n[2] : 1;

    // hypothesis check: the identity needs a mean-zero incompressible flow
    double msum[3] = {0, 0, 0};
    for (int k = 0; k < nk; ++k)
        for (int j = 0; j < g.n[1]; ++j)
            for (int i = 0; i < g.n[0]; ++i) {
                Vec w = spec.flow.velocity(g.center(i, j, k));
                for (int a = 0; a < g.dim; ++a) msum[a] += w[a];
            }
    double mnorm = 0.0;
    for (int a = 0; a < g.dim; ++a) {
        msum[a] /= static_cast<double>(g.cells());
        mnorm += msum[a] * msum[a];
    }
    if (std::sqrt(mnorm) > 1e-8 * std::max(1.0, spec.flow.intensity()))
        out.warning = "flow is not mean zero; the volume average need not match -d<G>/dt";

    for (std::size_t s = 0; s < history.fields.size(); ++s) {
        const ScalarField& v = history.fields[s];
        double acc = 0.0;
        for (int k = 0; k < nk; ++k)
            for (int j = 0; j < g.n[1]; ++j)
                for (int i = 0; i < g.n[0]; ++i) {
                    double q[3] = {p[0], p[1], p[2]};
                    const int idx[3] = {i, j, k};
                    for (int a = 0; a < g.dim; ++a) {
                        int lo[3] = {i, j, k}, hi[3] = {i, j, k};
                        lo[a] = g.wrap_idx(idx[a] - 1, a);
                        hi[a] = g.wrap_idx(idx[a] + 1, a);
                        q[a] += (v.at(hi[0], hi[1], hi[2]) - v.at(lo[0], lo[1], lo[2])) /
                                (2 * g.h(a));
                    }
                    double qn = 0.0;
                    for (int a = 0; a < g.dim; ++a) qn += q[a] * q[a];
                    double lam = spec.laminar ? spec.laminar(g.center(i, j, k)) : 1.0;
                    acc += lam * std::sqrt(qn);
                }
        out.times.push_back(history.times[s]);
        out.u_t.push_back(acc / static_cast<double>(g.cells()));
    }
    // running time average by the trapezoid rule
    double integral = 0.0;
    out.running_avg.push_back(out.u_t.front());
    for (std::size_t s = 1; s < out.u_t.size(); ++s) {
        integral += 0.5 * (out.u_t[s] + out.u_t[s - 1]) * (out.times[s] - out.times[s - 1]);
        out.running_avg.push_back(integral / out.times[s]);
    }
    return out;
}

}  // namespace geq
