#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "geq/flow.hpp"

using namespace geq;

namespace {

Mat3 central_diff_jacobian(const FlowSpec& f, const Vec& x, double h) {
    Mat3 j;
    for (int c = 0; c < f.dim(); ++c) {
        Vec xp = x, xm = x;
        xp[c] += h;
        xm[c] -= h;
        Vec vp = f.velocity(xp), vm = f.velocity(xm);
        for (int r = 0; r < f.dim(); ++r) j(r, c) = (vp[r] - vm[r]) / (2 * h);
    }
    return j;
}

std::vector<FlowSpec> analytic_catalog() {
    return {FlowSpec::zero(2),
            FlowSpec::shear2d(Profile::parse("sin")),
            FlowSpec::shear3d(Profile2D::parse("coscos")),
            FlowSpec::cellular(2.0),
            FlowSpec::abc(1.0, 1.0, 1.0),
            FlowSpec::abc(1.0, 0.7, 0.4, 3.0),
            FlowSpec::kolmogorov(1.5)};
}

}  // namespace

TEST_CASE("velocity catalog values") {
    CHECK(norm(eval_velocity(FlowSpec::kolmogorov(), vec3(0, 0, 0))) == 0.0);

    Vec v = eval_velocity(FlowSpec::abc(1, 1, 1), vec3(0, 0, 0));
    CHECK(v[0] == doctest::Approx(1.0));  // A sin 0 + C cos 0
    CHECK(v[1] == doctest::Approx(1.0));
    CHECK(v[2] == doctest::Approx(1.0));

    Vec c = eval_velocity(FlowSpec::cellular(2.0), vec2(M_PI / 2, 0.0));
    CHECK(c[0] == doctest::Approx(-2.0));
    CHECK(c[1] == doctest::Approx(0.0).epsilon(1e-14));

    // shear2d velocity takes the profile along x1
    FlowSpec sh = FlowSpec::shear2d(Profile::parse("sin"));
    Vec s = eval_velocity(sh, vec2(M_PI / 2, 1.0));
    CHECK(s[0] == 0.0);
    CHECK(s[1] == doctest::Approx(1.0));
}

TEST_CASE("periodicity and intensity linearity") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, kTwoPi);
    for (const FlowSpec& f : analytic_catalog()) {
        FlowSpec f1 = f.with_intensity(1.0);
        for (int t = 0; t < 20; ++t) {
            Vec x = {u(rng), u(rng), f.dim() == 3 ? u(rng) : 0.0};
            Vec vx = f.velocity(x);
            for (int a = 0; a < f.dim(); ++a) {
                Vec xs = x;
                xs[a] += kTwoPi;
                Vec vs = f.velocity(xs);
                for (int r = 0; r < f.dim(); ++r)
                    CHECK(vs[r] == doctest::Approx(vx[r]).epsilon(1e-12));
            }
            // velocity(x; A) = A * velocity(x; 1) exactly for the analytic kinds
            Vec v1 = f1.velocity(x);
            for (int r = 0; r < f.dim(); ++r) CHECK(vx[r] == f.intensity() * v1[r]);
        }
    }
}

TEST_CASE("incompressibility at sampled points") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.0, kTwoPi);
    for (const FlowSpec& f : analytic_catalog()) {
        double worst = 0.0;
        for (int t = 0; t < 200; ++t) {
            Vec x = {u(rng), u(rng), f.dim() == 3 ? u(rng) : 0.0};
            worst = std::max(worst, std::abs(f.divergence(x)));
        }
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("stream2d reproduces the cellular field from samples") {
    const int n = 64;
    std::vector<double> h(n * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            h[i + n * j] = std::sin(i * kTwoPi / n) * std::sin(j * kTwoPi / n);
    FlowSpec fs = FlowSpec::stream2d(h, n);
    FlowSpec cell = FlowSpec::cellular();
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.0, kTwoPi);
    double verr = 0.0, derr = 0.0;
    for (int t = 0; t < 100; ++t) {
        Vec x = vec2(u(rng), u(rng));
        Vec a = fs.velocity(x), b = cell.velocity(x);
        verr = std::max(verr, norm(a - b));
        derr = std::max(derr, std::abs(fs.divergence(x)));
    }
    CHECK(verr < 5e-3);
    CHECK(derr < 1e-2);
}

TEST_CASE("strain tensors") {
    StrainTensor z = eval_strain(FlowSpec::zero(2), vec2(1.0, 2.0));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(z(i, j) == 0.0);

    // cellular at the origin: diag(-A Phi, A Phi) with Phi(0,0) = 1
    StrainTensor s = eval_strain(FlowSpec::cellular(1.0), vec2(0, 0));
    CHECK(s(0, 0) == doctest::Approx(-1.0));
    CHECK(s(1, 1) == doctest::Approx(1.0));
    CHECK(s(0, 1) == doctest::Approx(0.0).epsilon(1e-14));

    // shear2d: off-diagonal f'(x1)/2
    FlowSpec sh = FlowSpec::shear2d(Profile::parse("sin"));
    Vec x = vec2(1.1, 0.4);
    StrainTensor t = eval_strain(sh, x);
    CHECK(t(0, 1) == doctest::Approx(0.5 * std::cos(1.1)));
    CHECK(t(1, 0) == doctest::Approx(0.5 * std::cos(1.1)));
    CHECK(t(0, 0) == 0.0);
    CHECK(t(1, 1) == 0.0);
}

TEST_CASE("strain agrees with central differences and stays trace free") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0.0, kTwoPi);
    const double h = 1e-4;
    for (const FlowSpec& f : analytic_catalog()) {
        for (int t = 0; t < 30; ++t) {
            Vec x = {u(rng), u(rng), f.dim() == 3 ? u(rng) : 0.0};
            Mat3 jfd = central_diff_jacobian(f, x, h);
            StrainTensor s = f.strain(x);
            double tr = 0.0;
            for (int i = 0; i < f.dim(); ++i) {
                tr += s(i, i);
                for (int j = 0; j < f.dim(); ++j) {
                    double fd = 0.5 * (jfd(i, j) + jfd(j, i));
                    CHECK(s(i, j) == doctest::Approx(fd).epsilon(1e-6));
                    CHECK(s(i, j) == doctest::Approx(s(j, i)));  // symmetry
                }
            }
            CHECK(std::abs(tr) < 1e-8);
        }
    }
}

TEST_CASE("cellular flow is mean zero on the period cell") {
    FlowSpec f = FlowSpec::cellular(3.0);
    const int n = 64;
    double m0 = 0.0, m1 = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            Vec v = f.velocity(vec2((i + 0.5) * kTwoPi / n, (j + 0.5) * kTwoPi / n));
            m0 += v[0];
            m1 += v[1];
        }
    CHECK(std::abs(m0 / (n * n)) < 1e-10);
    CHECK(std::abs(m1 / (n * n)) < 1e-10);
}

TEST_CASE("max_speed") {
    CHECK(max_speed(FlowSpec::zero(2)).vmax == 0.0);
    CHECK(max_speed(FlowSpec::abc(1, 1, 1)).vmax == doctest::Approx(std::sqrt(6.0)).epsilon(1e-6));
    CHECK(max_speed(FlowSpec::kolmogorov()).vmax ==
          doctest::Approx(std::sqrt(3.0)).epsilon(1e-6));

    // component bound along p for the linear-growth upper bound
    Vec e1 = vec3(1, 0, 0);
    SpeedInfo abc = max_speed(FlowSpec::abc(1, 1, 1), &e1);
    CHECK(*abc.vdotp_max == doctest::Approx(2.0).epsilon(1e-6));
    SpeedInfo kol = max_speed(FlowSpec::kolmogorov(), &e1);
    CHECK(*kol.vdotp_max == doctest::Approx(1.0).epsilon(1e-6));

    // max_speed reports the intensity-1 value no matter the stored intensity
    CHECK(max_speed(FlowSpec::cellular(8.0)).vmax ==
          doctest::Approx(max_speed(FlowSpec::cellular(1.0)).vmax));
}

TEST_CASE("beltrami residual") {
    CHECK(beltrami_residual(FlowSpec::abc(1, 1, 1)) < 1e-8);
    CHECK(beltrami_residual(FlowSpec::abc(0.9, 0.6, 0.3)) < 1e-8);
    CHECK(beltrami_residual(FlowSpec::zero(3)) == 0.0);
    // curl of (sin z, sin x, sin y) is (cos y, cos z, cos x) != V
    CHECK(beltrami_residual(FlowSpec::kolmogorov()) > 1.0);
    CHECK_THROWS_AS(beltrami_residual(FlowSpec::cellular()), DimensionError);
}

TEST_CASE("catalog parsing") {
    CHECK(FlowSpec::parse("cellular").kind() == FlowKind::Cellular);
    CHECK(FlowSpec::parse("kolmogorov").dim() == 3);
    CHECK(FlowSpec::parse("abc:1,0.5,0.25").kind() == FlowKind::ABC);
    CHECK(FlowSpec::parse("shear2d:sin", 2.0).intensity() == 2.0);
    CHECK(FlowSpec::parse("shear3d:coscos").dim() == 3);
    CHECK_THROWS_AS(FlowSpec::parse("vortex"), ConfigError);
    CHECK_THROWS_AS(FlowSpec::parse("abc:1,2"), ConfigError);
    CHECK_THROWS_AS(FlowSpec::parse("stream2d:/nonexistent.csv"), ConfigError);
    CHECK_THROWS_AS(FlowSpec::parse("cellular", -1.0), ConfigError);
}

TEST_CASE("time reversal flips the field") {
    FlowSpec f = FlowSpec::cellular(2.0);
    FlowSpec r = f.time_reversed();
    Vec x = vec2(0.7, 1.9);
    Vec a = f.velocity(x), b = r.velocity(x);
    for (int i = 0; i < 2; ++i) CHECK(a[i] == -b[i]);
}

TEST_CASE("profile values, derivatives and replication") {
    Profile s = Profile::parse("sin:0.3");
    CHECK(s.value(0.25) == doctest::Approx(0.3));
    CHECK(s.deriv(0.0) == doctest::Approx(0.3 * kTwoPi));
    CHECK(s.max_value() == doctest::Approx(0.3));
    CHECK(s.min_value() == doctest::Approx(-0.3));

    Profile c = Profile::parse("const:2.5");
    CHECK(c.value(0.9) == 2.5);
    CHECK(c.deriv(0.1) == 0.0);

    // sampled profile: spectral derivative close to the analytic one
    const int n = 128;
    std::vector<double> sm(n);
    for (int i = 0; i < n; ++i) {
        double u = static_cast<double>(i) / n;
        sm[i] = std::sin(kTwoPi * u) + 0.2 * std::cos(2 * kTwoPi * u);
    }
    Profile ps = Profile::from_samples(sm);
    for (double u : {0.03, 0.37, 0.71}) {
        double dref = kTwoPi * std::cos(kTwoPi * u) - 0.4 * kTwoPi * std::sin(2 * kTwoPi * u);
        CHECK(ps.deriv(u) == doctest::Approx(dref).epsilon(2e-3));
        CHECK(ps.value(u) == doctest::Approx(std::sin(kTwoPi * u) +
                                             0.2 * std::cos(2 * kTwoPi * u)).epsilon(1e-4));
    }

    Profile rep = s.replicated(4);
    CHECK(rep.value(0.25 / 4) == doctest::Approx(s.value(0.25)));
    CHECK(rep.deriv(0.1) == doctest::Approx(4.0 * s.deriv(0.4)));
}
