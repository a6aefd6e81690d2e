#pragma once

#include <array>
#include <string>
#include <vector>

#include "geq/common.hpp"

namespace geq {

// Uniform periodic cell-centered Cartesian grid, 2D or 3D, side 2*pi per axis.
// h*n = period is kept exact by storing (period, n) and deriving h.
struct PeriodicGrid {
    int dim = 2;
    std::array<int, 3> n{8, 8, 1};
    std::array<double, 3> period{kTwoPi, kTwoPi, kTwoPi};

    PeriodicGrid() = default;
    PeriodicGrid(int dim_, int n_per_axis);
    PeriodicGrid(int dim_, std::array<int, 3> n_);

    double h(int axis) const { return period[axis] / n[axis]; }
    std::size_t cells() const {
        std::size_t c = 1;
        for (int a = 0; a < dim; ++a) c *= static_cast<std::size_t>(n[a]);
        return c;
    }
    // flat index, x fastest
    std::size_t index(int i, int j, int k = 0) const {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(n[0]) * (static_cast<std::size_t>(j) +
                                                 static_cast<std::size_t>(n[1]) * k);
    }
    int wrap_idx(int i, int axis) const {
        int m = n[axis];
        int r = i % m;
        return r < 0 ? r + m : r;
    }
    Vec center(int i, int j, int k = 0) const {
        return {(i + 0.5) * h(0), (j + 0.5) * h(1), dim == 3 ? (k + 0.5) * h(2) : 0.0};
    }
    bool operator==(const PeriodicGrid& o) const {
        return dim == o.dim && n == o.n && period == o.period;
    }
};

struct ScalarField {
    PeriodicGrid grid;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(const PeriodicGrid& g, double fill = 0.0)
        : grid(g), values(g.cells(), fill) {}

    double& at(int i, int j, int k = 0) { return values[grid.index(i, j, k)]; }
    double at(int i, int j, int k = 0) const { return values[grid.index(i, j, k)]; }

    template <typename F>
    void fill_with(F&& f) {
        const int nk = grid.dim == 3 ? grid.n[2] : 1;
        for (int k = 0; k < nk; ++k)
            for (int j = 0; j < grid.n[1]; ++j)
                for (int i = 0; i < grid.n[0]; ++i)
                    values[grid.index(i, j, k)] = f(grid.center(i, j, k));
    }
};

// One-sided difference quotients per axis with periodic wrap.
struct GradientPair {
    std::vector<ScalarField> minus;  // D-_i
    std::vector<ScalarField> plus;   // D+_i
};

GradientPair one_sided_gradients(const ScalarField& f);
ScalarField mean_curvature(const ScalarField& f, const Vec& p, double eps);
double interpolate(const ScalarField& f, const Vec& x);  // multilinear, periodic
double mean(const ScalarField& f);
double osc(const ScalarField& f);     // max - min
double field_min(const ScalarField& f);
double field_max(const ScalarField& f);

// Snapshot serialization: flat CSV (x fastest) and JSON-header + binary payload.
// Both round-trip exactly.
void write_csv(const ScalarField& f, const std::string& path);
ScalarField read_csv(const PeriodicGrid& grid, const std::string& path);
void write_snapshot(const ScalarField& f, const std::string& path);
ScalarField read_snapshot(const std::string& path);

}  // namespace geq
