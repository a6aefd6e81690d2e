#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace geq {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Spatial point / vector. Always 3 slots; 2D flows and grids leave z = 0.
using Vec = std::array<double, 3>;

inline Vec vec2(double x, double y) { return {x, y, 0.0}; }
inline Vec vec3(double x, double y, double z) { return {x, y, z}; }

inline Vec operator+(const Vec& a, const Vec& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec operator-(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec operator*(double s, const Vec& a) { return {s * a[0], s * a[1], s * a[2]}; }

inline double dot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

// Symmetric matrix, row-major full storage for simplicity.
struct Mat3 {
    std::array<double, 9> m{};
    double& operator()(int i, int j) { return m[3 * i + j]; }
    double operator()(int i, int j) const { return m[3 * i + j]; }
};

inline double quad_form(const Vec& q, const Mat3& s, int dim) {
    double acc = 0.0;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) acc += q[i] * s(i, j) * q[j];
    return acc;
}

// Wrap x into [0, period).
inline double wrap(double x, double period) {
    double r = std::fmod(x, period);
    return r < 0 ? r + period : r;
}

// Error taxonomy: configuration problems exit 1 from the CLI, numerical
// non-convergence exits 2 with partial results written.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DimensionError : ConfigError {
    using ConfigError::ConfigError;
};
struct StabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BudgetError : ConfigError {
    using ConfigError::ConfigError;
};

std::string format_double(double v);  // shortest exact round-trip text

}  // namespace geq
