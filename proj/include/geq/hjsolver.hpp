#pragma once

#include <functional>
#include <string>
#include <vector>

#include "geq/flow.hpp"
#include "geq/grid.hpp"

namespace geq {

enum class GVariant { Inviscid, Viscous, Curvature, Strain, Quadratic };

GVariant parse_variant(const std::string& s);
std::string variant_name(GVariant v);

// Which G-equation to evolve, in corrector form v_t + H(x, p + Dv, .) = 0
// with G = p.x + v and v periodic on the torus.
struct GEquationSpec {
    GVariant variant = GVariant::Inviscid;
    double d = 0.0;      // Markstein length / diffusivity / quadratic coefficient
    bool cutoff = true;  // apply ()_+ to the laminar factor
    std::function<double(const Vec&)> laminar;  // empty: constant 1
    FlowSpec flow = FlowSpec::zero(2);

    void validate() const;
};

struct SolverConfig {
    double cfl = 0.5;        // in (0, 1]
    double eps_curv = -1.0;  // <= 0 selects 1e-6 * max(1, |p|)
    double t_end = 1.0;
    int snapshot_stride = 0;  // steps between stored snapshots; 0 keeps ends only
    enum class Integrator { Euler, TvdRk2 } integrator = Integrator::TvdRk2;

    void validate() const;
};

struct EvolutionResult {
    std::vector<double> times;        // snapshot times, strictly increasing
    std::vector<ScalarField> fields;  // corrector snapshots
    std::vector<double> front_speed_series;  // -d<v>/dt between snapshots
    std::vector<double> mean_times;   // per-step time stamps
    std::vector<double> mean_series;  // <v>(t) per step
    ScalarField final_speed;          // instantaneous front speed -v_t at t_end
    long steps = 0;
};

// Explicit local Lax-Friedrichs stepper over a periodic grid. Velocity,
// laminar speed and strain tables are frozen at construction; a step is a
// pure map from the previous snapshot.
class Stepper {
  public:
    Stepper(const PeriodicGrid& grid, const GEquationSpec& spec, const Vec& p,
            const SolverConfig& config);

    double stable_dt() const;
    double eps() const { return eps_; }
    // local LF flux H^ written into `out`; also refreshes the gradient bound
    // used by the quadratic variant's dissipation
    void hamiltonian(const ScalarField& v, ScalarField& out);
    void euler_step(const ScalarField& v, double dt, ScalarField& out);
    void step(ScalarField& v, double dt);  // configured integrator, checks dt
    EvolutionResult evolve(const ScalarField* v0 = nullptr);

    const PeriodicGrid& grid() const { return grid_; }

  private:
    PeriodicGrid grid_;
    GEquationSpec spec_;
    Vec p_;
    SolverConfig config_;
    double eps_ = 1e-6;
    double smax_ = 1.0;
    double snorm_max_ = 0.0;  // sup ||S|| at the flow's intensity
    double grad_bound_ = 0.0; // running max |p + Dbar v| (quadratic dissipation)
    std::array<double, 3> alpha_base_{};  // per-axis |dH/dq| bound, gradient-free part
    std::vector<double> vel_[3];
    std::vector<double> lam_;
    std::vector<double> strain_[6];      // sxx sxy syy sxz syz szz
    std::vector<int> im_[3], ip_[3];     // wrapped neighbor index tables
    // workspaces
    ScalarField stage_, stage2_, rk_, curv_, wdir_[3];

    template <GVariant V>
    void ham_impl(const ScalarField& v, ScalarField& out);
    void compute_curvature(const ScalarField& v);
    double alpha(int axis) const;
};

// Test-facing single-point flux evaluation mirrored on the stepper formula.
double numerical_hamiltonian(const GEquationSpec& spec, const Vec& p, const Vec& x,
                             const Vec& dminus, const Vec& dplus, double curvature_term);

EvolutionResult evolve(const GEquationSpec& spec, const Vec& p, const PeriodicGrid& grid,
                       const SolverConfig& config, const ScalarField* v0 = nullptr);

struct VolumeAvgResult {
    std::vector<double> times;
    std::vector<double> u_t;          // grid integral of s_l |p + Dv| per snapshot
    std::vector<double> running_avg;  // time average of u_t up to each snapshot
    std::string warning;              // set when the flow is not mean zero
};

VolumeAvgResult turbulent_speed_volume_avg(const EvolutionResult& history,
                                           const GEquationSpec& spec, const Vec& p);

}  // namespace geq
