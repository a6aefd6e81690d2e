#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <random>

#include "doctest.h"
#include "geq/grid.hpp"

using namespace geq;

namespace {

ScalarField random_field(const PeriodicGrid& g, unsigned seed, double amp = 1.0) {
    ScalarField f(g);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-amp, amp);
    for (double& v : f.values) v = u(rng);
    return f;
}

}  // namespace

TEST_CASE("grid bookkeeping") {
    PeriodicGrid g(2, 16);
    CHECK(g.cells() == 256);
    CHECK(g.h(0) == doctest::Approx(kTwoPi / 16));
    CHECK(g.h(0) * g.n[0] == doctest::Approx(g.period[0]));
    CHECK_THROWS_AS(PeriodicGrid(2, 4), ConfigError);
    CHECK_THROWS_AS(PeriodicGrid(4, 16), DimensionError);

    PeriodicGrid aniso(2, {64, 8, 1});
    CHECK(aniso.cells() == 512);
    CHECK(aniso.h(1) == doctest::Approx(kTwoPi / 8));
}

TEST_CASE("one-sided gradients") {
    PeriodicGrid g(2, 32);
    ScalarField c(g, 3.25);
    GradientPair gp = one_sided_gradients(c);
    for (int a = 0; a < 2; ++a) {
        CHECK(osc(gp.minus[a]) == 0.0);
        CHECK(field_max(gp.plus[a]) == 0.0);
    }

    // f = sin(x1) on n=256: D+ approx cos(x1), max error <= 0.51 h
    PeriodicGrid g2(2, 256);
    ScalarField s(g2);
    s.fill_with([](const Vec& x) { return std::sin(x[0]); });
    GradientPair gs = one_sided_gradients(s);
    double h = g2.h(0), worst = 0.0;
    for (int j = 0; j < g2.n[1]; ++j)
        for (int i = 0; i < g2.n[0]; ++i) {
            Vec x = g2.center(i, j, 0);
            worst = std::max(worst, std::abs(gs.plus[0].at(i, j) - std::cos(x[0])));
        }
    CHECK(worst <= 0.51 * h);

    // periodic sawtooth: exact slope away from the wrap seam
    PeriodicGrid g3(2, 16);
    ScalarField saw(g3);
    for (int j = 0; j < 16; ++j)
        for (int i = 0; i < 16; ++i) saw.at(i, j) = i * g3.h(0);
    GradientPair gw = one_sided_gradients(saw);
    for (int i = 0; i + 1 < 16; ++i) CHECK(gw.plus[0].at(i, 3) == doctest::Approx(1.0));
    CHECK(gw.plus[0].at(15, 3) == doctest::Approx(-15.0));
}

TEST_CASE("summation by parts: plus-gradients telescope to zero mean") {
    for (int dim : {2, 3}) {
        PeriodicGrid g(dim, dim == 2 ? 32 : 12);
        ScalarField f = random_field(g, 42);
        GradientPair gp = one_sided_gradients(f);
        for (int a = 0; a < dim; ++a) CHECK(std::abs(mean(gp.plus[a])) < 1e-12);
    }
}

TEST_CASE("interpolation") {
    PeriodicGrid g(2, 16);
    ScalarField f = random_field(g, 9);

    // cell-center query returns the stored value
    CHECK(interpolate(f, g.center(5, 7, 0)) == doctest::Approx(f.at(5, 7)).epsilon(1e-14));

    // midpoint of two neighbors: arithmetic mean
    Vec mid = 0.5 * (g.center(5, 7, 0) + g.center(6, 7, 0));
    CHECK(interpolate(f, mid) == doctest::Approx(0.5 * (f.at(5, 7) + f.at(6, 7))));

    // linear data (periodic sawtooth) exact at quarter-cell offsets off-seam
    ScalarField saw(g);
    for (int j = 0; j < 16; ++j)
        for (int i = 0; i < 16; ++i) saw.at(i, j) = i * g.h(0);
    Vec q = g.center(4, 3, 0);
    q[0] += 0.25 * g.h(0);
    CHECK(interpolate(saw, q) == doctest::Approx(4.25 * g.h(0)));

    // bounds: min <= interpolate <= max
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(0.0, kTwoPi);
    double lo = field_min(f), hi = field_max(f);
    for (int t = 0; t < 200; ++t) {
        double v = interpolate(f, vec2(u(rng), u(rng)));
        CHECK(v >= lo - 1e-14);
        CHECK(v <= hi + 1e-14);
    }

    // periodic: shifting the query by a period changes nothing
    Vec x = vec2(0.3, 5.9);
    CHECK(interpolate(f, x) ==
          doctest::Approx(interpolate(f, vec2(x[0] + kTwoPi, x[1] - kTwoPi))).epsilon(1e-13));

    // 3D trilinear sanity
    PeriodicGrid g3(3, 8);
    ScalarField f3 = random_field(g3, 21);
    CHECK(interpolate(f3, g3.center(2, 3, 4)) == doctest::Approx(f3.at(2, 3, 4)));
}

TEST_CASE("mean and osc") {
    PeriodicGrid g(2, 128);
    ScalarField c(g, 4.0);
    CHECK(mean(c) == 4.0);
    CHECK(osc(c) == 0.0);

    ScalarField s(g);
    s.fill_with([](const Vec& x) { return std::sin(x[0]); });
    CHECK(std::abs(mean(s)) < 1e-12);
    CHECK(osc(s) == doctest::Approx(2.0).epsilon(5e-3));

    ScalarField cb(g);
    for (int j = 0; j < 128; ++j)
        for (int i = 0; i < 128; ++i) cb.at(i, j) = (i + j) % 2;
    CHECK(mean(cb) == doctest::Approx(0.5));
    CHECK(osc(cb) == 1.0);
}

TEST_CASE("mean curvature") {
    PeriodicGrid g(2, 256);

    // constant direction field: zero curvature
    ScalarField flat(g, 0.0);
    ScalarField k0 = mean_curvature(flat, vec2(1.0, 0.0), 1e-6);
    CHECK(std::abs(field_max(k0)) < 1e-12);
    CHECK(std::abs(field_min(k0)) < 1e-12);

    // circle of radius 1: kappa approx 1/R near the level set
    const double R = 1.0;
    Vec c = vec2(M_PI, M_PI);
    Vec p = vec2(1.0, 0.0);
    ScalarField v(g);
    v.fill_with([&](const Vec& x) {
        double r = std::hypot(x[0] - c[0], x[1] - c[1]);
        return (r - R) - (p[0] * x[0] + p[1] * x[1]);  // v = G - p.x
    });
    ScalarField kap = mean_curvature(v, p, 1e-6);
    double worst = 0.0;
    int checked = 0;
    for (int j = 0; j < g.n[1]; ++j)
        for (int i = 0; i < g.n[0]; ++i) {
            Vec x = g.center(i, j, 0);
            double r = std::hypot(x[0] - c[0], x[1] - c[1]);
            if (std::abs(r - R) < g.h(0)) {
                worst = std::max(worst, std::abs(kap.at(i, j) - 1.0 / R));
                ++checked;
            }
        }
    CHECK(checked > 100);
    CHECK(worst < 0.05);

    // degenerate gradient: regularization keeps the output finite
    ScalarField deg(g);
    deg.fill_with([](const Vec& x) { return std::cos(x[0]); });  // p + Dv = 0 at cos' = 0 lines
    ScalarField kd = mean_curvature(deg, vec2(0.0, 0.0), 1e-6);
    for (double val : kd.values) CHECK(std::isfinite(val));
    CHECK_THROWS_AS(mean_curvature(deg, vec2(0, 0), 0.0), ConfigError);
}

TEST_CASE("curvature magnitude stays within the grid bound") {
    PeriodicGrid g(2, 64);
    ScalarField f = random_field(g, 33, 2.0);
    ScalarField k = mean_curvature(f, vec2(0.2, -0.4), 1e-6);
    double bound = 2.0 / g.h(0);  // |w| <= 1 and central differences over 2h
    CHECK(field_max(k) <= bound + 1e-9);
    CHECK(field_min(k) >= -bound - 1e-9);
}

TEST_CASE("csv and snapshot round trips are exact") {
    PeriodicGrid g(3, 8);
    ScalarField f = random_field(g, 77, 3.0);
    f.values[5] = 1.0 / 3.0;
    f.values[9] = -0.1;

    std::string csv = "/tmp/geq_test_field.csv";
    write_csv(f, csv);
    ScalarField fc = read_csv(g, csv);
    CHECK(fc.values == f.values);

    std::string snap = "/tmp/geq_test_field.bin";
    write_snapshot(f, snap);
    ScalarField fs = read_snapshot(snap);
    CHECK(fs.values == f.values);
    CHECK(fs.grid == g);
    std::remove(csv.c_str());
    std::remove(snap.c_str());
}
