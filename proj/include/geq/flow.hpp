#pragma once

#include <optional>
#include <string>

#include "geq/common.hpp"
#include "geq/profile.hpp"

namespace geq {

enum class FlowKind { Zero, Shear2D, Shear3D, Cellular, ABC, Kolmogorov, Stream2D };

// Symmetric strain rate tensor S = (DV + DV^T)/2 at a point.
struct StrainTensor {
    Mat3 s;
    int dim = 2;
    double operator()(int i, int j) const { return s(i, j); }
    double norm_inf() const;  // max row sum (subordinate infinity norm)
};

// A prescribed periodic incompressible velocity field with analytic Jacobian.
// Immutable after construction; evaluation is a pure function of (flow, x).
// The torus has side 2*pi per axis; `intensity` scales velocity as A*V.
class FlowSpec {
  public:
    static FlowSpec zero(int dim = 2);
    static FlowSpec shear2d(Profile f, double intensity = 1.0);
    static FlowSpec shear3d(Profile2D f, double intensity = 1.0);
    static FlowSpec cellular(double intensity = 1.0);
    static FlowSpec abc(double a, double b, double c, double intensity = 1.0);
    static FlowSpec kolmogorov(double intensity = 1.0);
    static FlowSpec stream2d(std::vector<double> stream_samples, int n, double intensity = 1.0);
    // Catalog ids: "zero", "shear2d:<profile>", "shear3d:<profile2d>",
    // "cellular", "abc:a,b,c", "kolmogorov", "stream2d:<csv-path>"
    static FlowSpec parse(const std::string& id, double intensity = 1.0);

    FlowKind kind() const { return kind_; }
    int dim() const { return dim_; }
    double intensity() const { return intensity_; }
    double period() const { return kTwoPi; }
    bool reversed() const { return reversed_; }
    const std::string& id() const { return id_; }
    const Profile& shear_profile() const { return profile_; }
    const Profile2D& shear_profile2d() const { return profile2d_; }

    FlowSpec with_intensity(double a) const;
    FlowSpec time_reversed() const;  // control dynamics run against -V

    Vec velocity(const Vec& x) const;     // includes intensity (and reversal)
    Mat3 jacobian(const Vec& x) const;    // D V, includes intensity
    StrainTensor strain(const Vec& x) const;
    double divergence(const Vec& x) const;
    double component_bound(int axis) const;  // sup |V_axis| at intensity 1

  private:
    FlowKind kind_ = FlowKind::Zero;
    int dim_ = 2;
    double intensity_ = 1.0;
    bool reversed_ = false;
    double ca_ = 1.0, cb_ = 1.0, cc_ = 1.0;  // ABC coefficients
    Profile profile_;
    Profile2D profile2d_;  // shear3d profile, or the sampled stream function
    int n_ = 0;
    std::array<double, 3> stream_bound_{};  // cached for sampled stream flows
    std::string id_ = "zero";

    Vec unit_velocity(const Vec& x) const;  // intensity 1, unreversed
    Mat3 unit_jacobian(const Vec& x) const;
    double stream_value(double x1, double x2) const;
};

struct SpeedInfo {
    double vmax = 0.0;                    // sup |V| at intensity 1
    std::optional<double> vdotp_max;      // sup |V . p| at intensity 1, if p given
};

Vec eval_velocity(const FlowSpec& flow, const Vec& x);
StrainTensor eval_strain(const FlowSpec& flow, const Vec& x);
SpeedInfo max_speed(const FlowSpec& flow, const Vec* p = nullptr);
double beltrami_residual(const FlowSpec& flow);  // 3D only: max |curl V - V|

}  // namespace geq
