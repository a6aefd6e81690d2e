#include "geq/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "json.hpp"

namespace geq {

PeriodicGrid::PeriodicGrid(int dim_, int n_per_axis) : dim(dim_) {
    if (dim != 2 && dim != 3) throw DimensionError("grid dim must be 2 or 3");
    if (n_per_axis < 8) throw ConfigError("grid needs n >= 8 per axis");
    n = {n_per_axis, n_per_axis, dim == 3 ? n_per_axis : 1};
}

PeriodicGrid::PeriodicGrid(int dim_, std::array<int, 3> n_) : dim(dim_), n(n_) {
    if (dim != 2 && dim != 3) throw DimensionError("grid dim must be 2 or 3");
    if (dim == 2) n[2] = 1;
    for (int a = 0; a < dim; ++a)
        if (n[a] < 8) throw ConfigError("grid needs n >= 8 per axis");
}

GradientPair one_sided_gradients(const ScalarField& f) {
    const PeriodicGrid& g = f.grid;
    GradientPair out;
    out.minus.assign(g.dim, ScalarField(g));
    out.plus.assign(g.dim, ScalarField(g));
    const int nk = g.dim == 3 ? g.n[2] : 1;
    for (int k = 0; k < nk; ++k)
        for (int j = 0; j < g.n[1]; ++j)
            for (int i = 0; i < g.n[0]; ++i) {
                const std::size_t c = g.index(i, j, k);
                const int idx[3] = {i, j, k};
                for (int a = 0; a < g.dim; ++a) {
                    int lo[3] = {i, j, k}, hi[3] = {i, j, k};
                    lo[a] = g.wrap_idx(idx[a] - 1, a);
                    hi[a] = g.wrap_idx(idx[a] + 1, a);
                    const double h = g.h(a);
                    out.minus[a].values[c] = (f.values[c] - f.at(lo[0], lo[1], lo[2])) / h;
                    out.plus[a].values[c] = (f.at(hi[0], hi[1], hi[2]) - f.values[c]) / h;
                }
            }
    return out;
}

ScalarField mean_curvature(const ScalarField& f, const Vec& p, double eps) {
    if (eps <= 0) throw ConfigError("mean_curvature needs eps > 0");
    const PeriodicGrid& g = f.grid;
    const int nk = g.dim == 3 ? g.n[2] : 1;
    // pass 1: normalized gradient direction w = (p + Dc f)/|p + Dc f|_eps
    std::vector<ScalarField> w(g.dim, ScalarField(g));
    for (int k = 0; k < nk; ++k)
        for (int j = 0; j < g.n[1]; ++j)
            for (int i = 0; i < g.n[0]; ++i) {
                double q[3] = {p[0], p[1], p[2]};
                const int idx[3] = {i, j, k};
                for (int a = 0; a < g.dim; ++a) {
                    int lo[3] = {i, j, k}, hi[3] = {i, j, k};
                    lo[a] = g.wrap_idx(idx[a] - 1, a);
                    hi[a] = g.wrap_idx(idx[a] + 1, a);
                    q[a] += (f.at(hi[0], hi[1], hi[2]) - f.at(lo[0], lo[1], lo[2])) / (2 * g.h(a));
                }
                double mag = eps * eps;
                for (int a = 0; a < g.dim; ++a) mag += q[a] * q[a];
                mag = std::sqrt(mag);
                const std::size_t c = g.index(i, j, k);
                for (int a = 0; a < g.dim; ++a) w[a].values[c] = q[a] / mag;
            }
    // pass 2: divergence of w by central differences
    ScalarField kappa(g);
    for (int k = 0; k < nk; ++k)
        for (int j = 0; j < g.n[1]; ++j)
            for (int i = 0; i < g.n[0]; ++i) {
                double div = 0.0;
                const int idx[3] = {i, j, k};
                for (int a = 0; a < g.dim; ++a) {
                    int lo[3] = {i, j, k}, hi[3] = {i, j, k};
                    lo[a] = g.wrap_idx(idx[a] - 1, a);
                    hi[a] = g.wrap_idx(idx[a] + 1, a);
                    div += (w[a].at(hi[0], hi[1], hi[2]) - w[a].at(lo[0], lo[1], lo[2])) /
                           (2 * g.h(a));
                }
                kappa.values[g.index(i, j, k)] = div;
            }
    return kappa;
}

double interpolate(const ScalarField& f, const Vec& x) {
    const PeriodicGrid& g = f.grid;
    int base[3] = {0, 0, 0};
    double t[3] = {0, 0, 0};
    for (int a = 0; a < g.dim; ++a) {
        double s = wrap(x[a], g.period[a]) / g.h(a) - 0.5;  // cell-centered
        double fl = std::floor(s);
        base[a] = g.wrap_idx(static_cast<int>(fl), a);
        t[a] = s - fl;
    }
    if (g.dim == 2) {
        int i0 = base[0], j0 = base[1];
        int i1 = g.wrap_idx(i0 + 1, 0), j1 = g.wrap_idx(j0 + 1, 1);
        double a00 = f.at(i0, j0), a10 = f.at(i1, j0), a01 = f.at(i0, j1), a11 = f.at(i1, j1);
        return (1 - t[0]) * ((1 - t[1]) * a00 + t[1] * a01) +
               t[0] * ((1 - t[1]) * a10 + t[1] * a11);
    }
    int i0 = base[0], j0 = base[1], k0 = base[2];
    int i1 = g.wrap_idx(i0 + 1, 0), j1 = g.wrap_idx(j0 + 1, 1), k1 = g.wrap_idx(k0 + 1, 2);
    double c00 = (1 - t[0]) * f.at(i0, j0, k0) + t[0] * f.at(i1, j0, k0);
    double c10 = (1 - t[0]) * f.at(i0, j1, k0) + t[0] * f.at(i1, j1, k0);
    double c01 = (1 - t[0]) * f.at(i0, j0, k1) + t[0] * f.at(i1, j0, k1);
    double c11 = (1 - t[0]) * f.at(i0, j1, k1) + t[0] * f.at(i1, j1, k1);
    return (1 - t[1]) * ((1 - t[2]) * c00 + t[2] * c01) + t[1] * ((1 - t[2]) * c10 + t[2] * c11);
}

// Reductions run in flat index order so results are bit-reproducible.
double mean(const ScalarField& f) {
    double acc = 0.0;
    for (double v : f.values) acc += v;
    return acc / static_cast<double>(f.values.size());
}

double field_min(const ScalarField& f) {
    double m = f.values[0];
    for (double v : f.values) m = std::min(m, v);
    return m;
}

double field_max(const ScalarField& f) {
    double m = f.values[0];
    for (double v : f.values) m = std::max(m, v);
    return m;
}

double osc(const ScalarField& f) { return field_max(f) - field_min(f); }

void write_csv(const ScalarField& f, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw ConfigError("cannot write csv: " + path);
    for (double v : f.values) std::fprintf(fp, "%.17g\n", v);
    std::fclose(fp);
}

ScalarField read_csv(const PeriodicGrid& grid, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "r");
    if (!fp) throw ConfigError("cannot read csv: " + path);
    ScalarField f(grid);
    for (std::size_t c = 0; c < f.values.size(); ++c) {
        if (std::fscanf(fp, "%lf", &f.values[c]) != 1) {
            std::fclose(fp);
            throw ConfigError("csv too short for grid: " + path);
        }
    }
    std::fclose(fp);
    return f;
}

void write_snapshot(const ScalarField& f, const std::string& path) {
    nlohmann::json hdr;
    hdr["dim"] = f.grid.dim;
    hdr["n"] = {f.grid.n[0], f.grid.n[1], f.grid.n[2]};
    hdr["period"] = {f.grid.period[0], f.grid.period[1], f.grid.period[2]};
    hdr["count"] = f.values.size();
    hdr["dtype"] = "float64_le";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write snapshot: " + path);
    std::string h = hdr.dump();
    out << h << '\n';
    out.write(reinterpret_cast<const char*>(f.values.data()),
              static_cast<std::streamsize>(f.values.size() * sizeof(double)));
}

ScalarField read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read snapshot: " + path);
    std::string line;
    std::getline(in, line);
    nlohmann::json hdr = nlohmann::json::parse(line);
    PeriodicGrid g;
    g.dim = hdr["dim"].get<int>();
    for (int a = 0; a < 3; ++a) {
        g.n[a] = hdr["n"][a].get<int>();
        g.period[a] = hdr["period"][a].get<double>();
    }
    ScalarField f(g);
    if (hdr["count"].get<std::size_t>() != f.values.size())
        throw ConfigError("snapshot header count mismatch: " + path);
    in.read(reinterpret_cast<char*>(f.values.data()),
            static_cast<std::streamsize>(f.values.size() * sizeof(double)));
    if (!in) throw ConfigError("snapshot payload truncated: " + path);
    return f;
}

}  // namespace geq
