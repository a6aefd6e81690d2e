#include "geq/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace geq {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    // trim to the shortest representation that round-trips
    for (int prec = 1; prec < 17; ++prec) {
        char s[40];
        std::snprintf(s, sizeof(s), "%.*g", prec, v);
        if (std::strtod(s, nullptr) == v) return s;
    }
    return buf;
}

double StrainTensor::norm_inf() const {
    double best = 0.0;
    for (int i = 0; i < dim; ++i) {
        double row = 0.0;
        for (int j = 0; j < dim; ++j) row += std::abs(s(i, j));
        best = std::max(best, row);
    }
    return best;
}

FlowSpec FlowSpec::zero(int dim) {
    FlowSpec f;
    f.kind_ = FlowKind::Zero;
    f.dim_ = dim;
    f.id_ = "zero";
    return f;
}

FlowSpec FlowSpec::shear2d(Profile p, double intensity) {
    FlowSpec f;
    f.kind_ = FlowKind::Shear2D;
    f.dim_ = 2;
    f.intensity_ = intensity;
    f.profile_ = std::move(p);
    f.id_ = "shear2d:" + f.profile_.id();
    return f;
}

FlowSpec FlowSpec::shear3d(Profile2D p, double intensity) {
    FlowSpec f;
    f.kind_ = FlowKind::Shear3D;
    f.dim_ = 3;
    f.intensity_ = intensity;
    f.profile2d_ = std::move(p);
    f.id_ = "shear3d:" + f.profile2d_.id();
    return f;
}

FlowSpec FlowSpec::cellular(double intensity) {
    FlowSpec f;
    f.kind_ = FlowKind::Cellular;
    f.dim_ = 2;
    f.intensity_ = intensity;
    f.id_ = "cellular";
    return f;
}

FlowSpec FlowSpec::abc(double a, double b, double c, double intensity) {
    FlowSpec f;
    f.kind_ = FlowKind::ABC;
    f.dim_ = 3;
    f.intensity_ = intensity;
    f.ca_ = a;
    f.cb_ = b;
    f.cc_ = c;
    if (a < 0 || b < 0 || c < 0) throw ConfigError("abc coefficients must be nonnegative");
    f.id_ = "abc:" + format_double(a) + "," + format_double(b) + "," + format_double(c);
    return f;
}

FlowSpec FlowSpec::kolmogorov(double intensity) {
    FlowSpec f;
    f.kind_ = FlowKind::Kolmogorov;
    f.dim_ = 3;
    f.intensity_ = intensity;
    f.id_ = "kolmogorov";
    return f;
}

FlowSpec FlowSpec::stream2d(std::vector<double> samples, int n, double intensity) {
    if (n < 4 || static_cast<int>(samples.size()) != n * n)
        throw ConfigError("stream2d needs an n x n sample grid with n >= 4");
    for (double v : samples)
        if (!std::isfinite(v)) throw ConfigError("stream2d samples must be finite");
    FlowSpec f;
    f.kind_ = FlowKind::Stream2D;
    f.dim_ = 2;
    f.intensity_ = intensity;
    f.n_ = n;
    f.profile2d_ = Profile2D::from_samples(std::move(samples), n);
    f.id_ = "stream2d:" + std::to_string(n);
    const int m = 8 * n;
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
            Vec w = f.unit_velocity(vec2(i * kTwoPi / m, j * kTwoPi / m));
            f.stream_bound_[0] = std::max(f.stream_bound_[0], std::abs(w[0]));
            f.stream_bound_[1] = std::max(f.stream_bound_[1], std::abs(w[1]));
        }
    return f;
}

FlowSpec FlowSpec::parse(const std::string& id, double intensity) {
    if (intensity < 0) throw ConfigError("flow intensity must be nonnegative");
    if (id == "zero") {
        FlowSpec f = zero(2);
        f.intensity_ = intensity;
        return f;
    }
    if (id == "zero3d") {
        FlowSpec f = zero(3);
        f.intensity_ = intensity;
        return f;
    }
    if (id == "cellular") return cellular(intensity);
    if (id == "kolmogorov") return kolmogorov(intensity);
    if (id.rfind("shear2d:", 0) == 0) return shear2d(Profile::parse(id.substr(8)), intensity);
    if (id.rfind("shear3d:", 0) == 0) return shear3d(Profile2D::parse(id.substr(8)), intensity);
    if (id.rfind("abc:", 0) == 0) {
        double a, b, c;
        if (std::sscanf(id.c_str() + 4, "%lf,%lf,%lf", &a, &b, &c) != 3)
            throw ConfigError("abc id must be abc:a,b,c");
        return abc(a, b, c, intensity);
    }
    if (id.rfind("stream2d:", 0) == 0) {
        std::string path = id.substr(9);
        std::vector<double> vals;
        std::FILE* fp = std::fopen(path.c_str(), "r");
        if (!fp) throw ConfigError("cannot open stream csv: " + path);
        double v;
        while (std::fscanf(fp, "%lf", &v) == 1) vals.push_back(v);
        std::fclose(fp);
        int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(vals.size()))));
        if (n < 4 || n * n != static_cast<int>(vals.size()))
            throw ConfigError("stream2d csv must hold a square sample grid");
        FlowSpec f = stream2d(std::move(vals), n, intensity);
        f.id_ = id;
        return f;
    }
    throw ConfigError("unknown flow id: " + id);
}

FlowSpec FlowSpec::with_intensity(double a) const {
    if (a < 0) throw ConfigError("flow intensity must be nonnegative");
    FlowSpec f = *this;
    f.intensity_ = a;
    return f;
}

FlowSpec FlowSpec::time_reversed() const {
    FlowSpec f = *this;
    f.reversed_ = !f.reversed_;
    return f;
}

double FlowSpec::stream_value(double x1, double x2) const {
    return profile2d_.value(x1 / kTwoPi, x2 / kTwoPi);
}

Vec FlowSpec::unit_velocity(const Vec& x) const {
    switch (kind_) {
        case FlowKind::Zero:
            return {0, 0, 0};
        case FlowKind::Shear2D:
            return {0.0, profile_.value(x[0] / kTwoPi), 0.0};
        case FlowKind::Shear3D:
            return {0.0, 0.0, profile2d_.value(x[0] / kTwoPi, x[1] / kTwoPi)};
        case FlowKind::Cellular:
            // stream function H = sin x1 sin x2, V = (-H_x2, H_x1)
            return {-std::sin(x[0]) * std::cos(x[1]), std::cos(x[0]) * std::sin(x[1]), 0.0};
        case FlowKind::ABC:
            return {ca_ * std::sin(x[2]) + cc_ * std::cos(x[1]),
                    cb_ * std::sin(x[0]) + ca_ * std::cos(x[2]),
                    cc_ * std::sin(x[1]) + cb_ * std::cos(x[0])};
        case FlowKind::Kolmogorov:
            return {std::sin(x[2]), std::sin(x[0]), std::sin(x[1])};
        case FlowKind::Stream2D: {
            // V = (-H_x2, H_x1) by central differences of the interpolant
            const double d = kTwoPi / (8.0 * n_);
            double h_x1 = (stream_value(x[0] + d, x[1]) - stream_value(x[0] - d, x[1])) / (2 * d);
            double h_x2 = (stream_value(x[0], x[1] + d) - stream_value(x[0], x[1] - d)) / (2 * d);
            return {-h_x2, h_x1, 0.0};
        }
    }
    return {0, 0, 0};
}

Mat3 FlowSpec::unit_jacobian(const Vec& x) const {
    Mat3 j;
    switch (kind_) {
        case FlowKind::Zero:
            break;
        case FlowKind::Shear2D:
            j(1, 0) = profile_.deriv(x[0] / kTwoPi) / kTwoPi;
            break;
        case FlowKind::Shear3D: {
            Vec g = profile2d_.gradient(x[0] / kTwoPi, x[1] / kTwoPi);
            j(2, 0) = g[0] / kTwoPi;
            j(2, 1) = g[1] / kTwoPi;
            break;
        }
        case FlowKind::Cellular: {
            double phi = std::cos(x[0]) * std::cos(x[1]);
            j(0, 0) = -phi;
            j(0, 1) = std::sin(x[0]) * std::sin(x[1]);
            j(1, 0) = -std::sin(x[0]) * std::sin(x[1]);
            j(1, 1) = phi;
            break;
        }
        case FlowKind::ABC:
            j(0, 1) = -cc_ * std::sin(x[1]);
            j(0, 2) = ca_ * std::cos(x[2]);
            j(1, 0) = cb_ * std::cos(x[0]);
            j(1, 2) = -ca_ * std::sin(x[2]);
            j(2, 0) = -cb_ * std::sin(x[0]);
            j(2, 1) = cc_ * std::cos(x[1]);
            break;
        case FlowKind::Kolmogorov:
            j(0, 2) = std::cos(x[2]);
            j(1, 0) = std::cos(x[0]);
            j(2, 1) = std::cos(x[1]);
            break;
        case FlowKind::Stream2D: {
            const double d = kTwoPi / (8.0 * n_);
            for (int c = 0; c < 2; ++c) {
                Vec xp = x, xm = x;
                xp[c] += d;
                xm[c] -= d;
                Vec vp = unit_velocity(xp), vm = unit_velocity(xm);
                for (int r = 0; r < 2; ++r) j(r, c) = (vp[r] - vm[r]) / (2 * d);
            }
            break;
        }
    }
    return j;
}

Vec FlowSpec::velocity(const Vec& x) const {
    double s = reversed_ ? -intensity_ : intensity_;
    return s * unit_velocity(x);
}

Mat3 FlowSpec::jacobian(const Vec& x) const {
    double s = reversed_ ? -intensity_ : intensity_;
    Mat3 j = unit_jacobian(x);
    for (double& v : j.m) v *= s;
    return j;
}

StrainTensor FlowSpec::strain(const Vec& x) const {
    Mat3 j = jacobian(x);
    StrainTensor st;
    st.dim = dim_;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) st.s(i, k) = 0.5 * (j(i, k) + j(k, i));
    return st;
}

double FlowSpec::divergence(const Vec& x) const {
    Mat3 j = jacobian(x);
    return j(0, 0) + j(1, 1) + j(2, 2);
}

double FlowSpec::component_bound(int axis) const {
    auto abs_range = [](double lo, double hi) { return std::max(std::abs(lo), std::abs(hi)); };
    switch (kind_) {
        case FlowKind::Zero:
            return 0.0;
        case FlowKind::Shear2D:
            return axis == 1 ? abs_range(profile_.min_value(), profile_.max_value()) : 0.0;
        case FlowKind::Shear3D: {
            if (axis != 2) return 0.0;
            // max |f| over a dense scan (the analytic kinds are cheap)
            double m = 0.0;
            const int n = 256;
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i)
                    m = std::max(m, std::abs(profile2d_.value(static_cast<double>(i) / n,
                                                              static_cast<double>(j) / n)));
            return m;
        }
        case FlowKind::Cellular:
            return axis < 2 ? 1.0 : 0.0;
        case FlowKind::ABC:
            if (axis == 0) return ca_ + cc_;
            if (axis == 1) return cb_ + ca_;
            return cc_ + cb_;
        case FlowKind::Kolmogorov:
            return 1.0;
        case FlowKind::Stream2D:
            return stream_bound_[axis];
    }
    return 0.0;
}

Vec eval_velocity(const FlowSpec& flow, const Vec& x) {
    for (int i = 0; i < flow.dim(); ++i)
        if (!std::isfinite(x[i])) throw ConfigError("eval_velocity: point must be finite");
    return flow.velocity(x);
}

StrainTensor eval_strain(const FlowSpec& flow, const Vec& x) { return flow.strain(x); }

namespace {

template <typename F>
double refine_max(F&& value, Vec x0, double step0) {
    double best = value(x0);
    double step = step0;
    while (step > 1e-10) {
        bool improved = false;
        for (int axis = 0; axis < 3; ++axis) {
            for (double s : {step, -step}) {
                Vec xt = x0;
                xt[axis] += s;
                double v = value(xt);
                if (v > best) {
                    best = v;
                    x0 = xt;
                    improved = true;
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    return best;
}

template <typename F>
double grid_ascent_max(const FlowSpec& flow, F&& value) {
    const int n = flow.dim() == 2 ? 160 : 48;
    const double h = kTwoPi / n;
    // keep the best 8 coarse points, then coordinate-ascend from each
    std::vector<std::pair<double, Vec>> best;
    auto consider = [&](double v, const Vec& x) {
        best.emplace_back(v, x);
        std::sort(best.begin(), best.end(),
                  [](const auto& a, const auto& b) { return a.first > b.first; });
        if (best.size() > 8) best.pop_back();
    };
    if (flow.dim() == 2) {
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                Vec x = vec2(i * h, j * h);
                consider(value(x), x);
            }
    } else {
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    Vec x = vec3(i * h, j * h, k * h);
                    consider(value(x), x);
                }
    }
    double out = 0.0;
    for (auto& [v, x] : best) out = std::max(out, refine_max(value, x, h));
    return out;
}

}  // namespace

SpeedInfo max_speed(const FlowSpec& flow, const Vec* p) {
    FlowSpec unit = flow.with_intensity(1.0);
    SpeedInfo info;
    info.vmax = grid_ascent_max(unit, [&](const Vec& x) { return norm(unit.velocity(x)); });
    if (p) {
        Vec pp = *p;
        info.vdotp_max =
            grid_ascent_max(unit, [&](const Vec& x) { return std::abs(dot(unit.velocity(x), pp)); });
    }
    return info;
}

double beltrami_residual(const FlowSpec& flow) {
    if (flow.dim() != 3) throw DimensionError("beltrami_residual requires a 3D flow");
    const int n = 48;
    const double h = kTwoPi / n;
    double worst = 0.0;
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                Vec x = vec3(i * h, j * h, k * h);
                Mat3 jm = flow.jacobian(x);
                Vec curl = {jm(2, 1) - jm(1, 2), jm(0, 2) - jm(2, 0), jm(1, 0) - jm(0, 1)};
                worst = std::max(worst, norm(curl - flow.velocity(x)));
            }
    return worst;
}

}  // namespace geq
