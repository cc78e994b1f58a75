#include <cmath>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "nonlocal/fraclap.hpp"

using namespace nonlocal;

namespace {

constexpr double kPi = std::numbers::pi;

QuadSpec spec(double tol = 1e-8) {
    QuadSpec q;
    q.abs_tol = tol;
    q.rel_tol = tol;
    return q;
}

Point pt(int n, double x1, double x2 = 0, double x3 = 0) {
    Point p(n);
    p[0] = x1;
    if (n > 1) p[1] = x2;
    if (n > 2) p[2] = x3;
    return p;
}

ScalarField odd_poly_1d() {
    ScalarField u;
    u.dim = 1;
    u.antisymmetric = true;
    u.support_radius = 1;
    u.eval = [](const Point& x) {
        double t = x[0];
        return std::fabs(t) < 1 ? t * (1 - t * t) * (1 - t * t) : 0.0;
    };
    return u;
}

// Compactly supported antisymmetric fields x_1 (1 - |x|^2)^k_+ in R^n.
ScalarField odd_bump(int n, int k) {
    ScalarField u;
    u.dim = n;
    u.antisymmetric = true;
    u.support_radius = 1;
    u.eval = [k](const Point& x) {
        double t = 1 - x.norm2();
        return t > 0 ? x[0] * std::pow(t, k) : 0.0;
    };
    return u;
}

}  // namespace

TEST_CASE("frac_lap_pv: constants are annihilated") {
    for (int n : {1, 2}) {
        ScalarField u;
        u.dim = n;
        u.eval = [](const Point&) { return 3.5; };
        auto r = frac_lap_pv(u, pt(n, 0.3, -0.2), {n, 0.4}, spec());
        CHECK(std::fabs(r.value) < 1e-10);
    }
}

TEST_CASE("frac_lap_pv: half-Laplacian of sqrt(1-x^2) at 0.3 is 1") {
    FracParams p{1, 0.5};
    auto u = torsion_profile(p, pt(1, 0), 1.0);
    CHECK(u(pt(1, 0.0)) == doctest::Approx(1.0));  // gamma_{1,1/2} = 1
    auto r = frac_lap_pv(u, pt(1, 0.3), p, spec());
    CHECK(r.converged);
    CHECK(std::fabs(r.value - 1.0) < 1e-6);
}

TEST_CASE("frac_lap_pv: torsion identity at 10 interior points, n = 1, 2") {
    for (int n : {1, 2}) {
        for (double s : {0.3, 0.5, 0.7}) {
            FracParams p{n, s};
            auto u = torsion_profile(p, Point(n), 1.0);
            for (int k = 0; k < 10; ++k) {
                double r = 0.05 + 0.09 * k;
                auto res = frac_lap_pv(u, pt(n, 0.8 * r, 0.6 * r), p, spec());
                CHECK(res.converged);
                CHECK(std::fabs(res.value - 1.0) <= 1e-3);
            }
        }
    }
}

TEST_CASE("frac_lap_pv: outside the support equals minus the direct kernel integral") {
    // u = (1-|y|^2)^3_+ in R^2, x = (2, 0.5); oracle in polar coordinates about the origin
    FracParams p{2, 0.4};
    ScalarField u;
    u.dim = 2;
    u.support_radius = 1;
    u.eval = [](const Point& y) {
        double t = 1 - y.norm2();
        return t > 0 ? t * t * t : 0.0;
    };
    Point x = pt(2, 2.0, 0.5);
    auto r = frac_lap_pv(u, x, p, spec());
    QuadSpec q = spec(1e-11);
    auto outer = [&](double rr) {
        auto inner = [&](double th) {
            Point y{rr * std::cos(th), rr * std::sin(th)};
            return std::pow((x - y).norm2(), -0.5 * (2 + 2 * p.s));
        };
        return rr * std::pow(1 - rr * rr, 3) * integrate_adaptive(inner, 0, 2 * kPi, q).value;
    };
    double direct = -c_frac(2, p.s) * integrate_adaptive(outer, 0, 1, q).value;
    CHECK(r.value < 0);
    CHECK(std::fabs(r.value - direct) < 1e-7 * std::fabs(direct));
}

TEST_CASE("frac_lap_antisym: zero field and domain errors") {
    ScalarField z;
    z.dim = 2;
    z.antisymmetric = true;
    z.eval = [](const Point&) { return 0.0; };
    CHECK(frac_lap_antisym(z, pt(2, 0.5, 0.1), {2, 0.5}, spec()).value == 0.0);
    CHECK_THROWS_AS(frac_lap_antisym(z, pt(2, 0.0, 0.1), {2, 0.5}, spec()), std::domain_error);
    CHECK_THROWS_AS(frac_lap_antisym(z, pt(2, -0.2, 0.1), {2, 0.5}, spec()), std::domain_error);
}

TEST_CASE("frac_lap_antisym agrees with frac_lap_pv: Gaussian times x_1, n = 2") {
    FracParams p{2, 0.5};
    ScalarField u;
    u.dim = 2;
    u.antisymmetric = true;
    u.eval = [](const Point& x) { return x[0] * std::exp(-x.norm2()); };
    CHECK(antisymmetry_defect(u, 100, 1) < 1e-12);
    Point x = pt(2, 0.7, 0.2);
    auto a = frac_lap_antisym(u, x, p, spec()), b = frac_lap_pv(u, x, p, spec());
    CHECK(a.converged);
    CHECK(b.converged);
    CHECK(std::fabs(a.value - b.value) <= 2 * (a.err_estimate + b.err_estimate));
}

TEST_CASE("frac_lap_antisym agrees with frac_lap_pv: odd polynomial bump, n = 1") {
    for (double s : {0.3, 0.7}) {
        FracParams p{1, s};
        auto u = odd_poly_1d();
        auto a = frac_lap_antisym(u, pt(1, 0.4), p, spec()), b = frac_lap_pv(u, pt(1, 0.4), p, spec());
        CHECK(a.converged);
        CHECK(std::fabs(a.value - b.value) <= 2 * (a.err_estimate + b.err_estimate));
    }
}

TEST_CASE("frac_lap_antisym = frac_lap_pv on a 20-point sample (property)") {
    SeededStream rng(2024, 0);
    int done = 0;
    while (done < 20) {
        int n = 1 + done % 2;
        int k = 2 + done % 3;
        double s = rng.uniform(0.2, 0.8);
        Point x(n);
        x[0] = rng.uniform(0.1, 0.9);
        if (n == 2) x[1] = rng.uniform(-0.9, 0.9);
        if (x.norm() > 0.9) continue;  // stay off the support boundary
        FracParams p{n, s};
        auto u = odd_bump(n, k);
        auto a = frac_lap_antisym(u, x, p, spec()), b = frac_lap_pv(u, x, p, spec());
        CHECK(a.converged);
        CHECK(b.converged);
        CHECK(std::fabs(a.value - b.value) <= 2 * (a.err_estimate + b.err_estimate));
        ++done;
    }
}

TEST_CASE("torsion_closed_form: interior values") {
    SolidHarmonic one{0, [](const Point&) { return 1.0; }};
    SolidHarmonic lin{1, [](const Point& y) { return y[0]; }};
    for (int n : {1, 2, 3}) {
        for (double s : {0.25, 0.5, 0.75}) {
            FracParams p{n, s};
            Point x = pt(n, 0.3, -0.2, 0.1);
            CHECK(torsion_closed_form(one, 1.0, x, p).value == doctest::Approx(1.0).epsilon(1e-14));
            CHECK(torsion_closed_form(lin, 1.0, x, p).value == doctest::Approx((n + 2 * s) / n * 0.3).epsilon(1e-13));
            // radius scaling leaves the interior value unchanged
            CHECK(torsion_closed_form(one, 2.5, 2.5 * x, p).value == doctest::Approx(1.0).epsilon(1e-14));
        }
    }
}

TEST_CASE("torsion_closed_form: exterior value matches PV quadrature") {
    SolidHarmonic one{0, [](const Point&) { return 1.0; }};
    FracParams p{1, 0.5};
    auto u = torsion_profile(p, pt(1, 0), 1.0);
    auto r = frac_lap_pv(u, pt(1, 2.0), p, spec());
    double cf = torsion_closed_form(one, 1.0, pt(1, 2.0), p).value;
    CHECK(std::fabs(r.value - cf) < 1e-4);
    // n = 1, s = 1/2: (-Delta)^{1/2} sqrt(1-x^2)_+ = 1 - |x|/sqrt(x^2-1) outside
    CHECK(std::fabs(cf - (1 - 2 / std::sqrt(3.0))) < 1e-12);
}

TEST_CASE("torsion_closed_form: degree-2 harmonic in R^2 against quadrature") {
    FracParams p{2, 0.4};
    SolidHarmonic h{2, [](const Point& y) { return y[0] * y[1]; }};
    ScalarField u;
    u.dim = 2;
    u.support_radius = 1;
    double g = gamma_torsion(2, p.s);
    u.eval = [&](const Point& y) {
        double t = 1 - y.norm2();
        return t > 0 ? g * y[0] * y[1] * std::pow(t, p.s) : 0.0;
    };
    for (Point x : {pt(2, 0.3, 0.4), pt(2, 1.2, 0.9)}) {
        auto r = frac_lap_pv(u, x, p, spec());
        double cf = torsion_closed_form(h, 1.0, x, p).value;
        CHECK(std::fabs(r.value - cf) < 1e-6 * (1 + std::fabs(cf)));
    }
}

TEST_CASE("torsion_closed_form: boundary sentinel and blow-up") {
    SolidHarmonic one{0, [](const Point&) { return 1.0; }};
    for (int n : {1, 2}) {
        FracParams p{n, 0.5};
        CHECK(torsion_closed_form(one, 1.0, pt(n, 1.0), p).neg_inf);
        double prev = 0;
        for (int k = 2; k <= 6; ++k) {
            double v = std::fabs(torsion_closed_form(one, 1.0, pt(n, 1 + std::pow(10.0, -k)), p).value);
            CHECK(v > prev);
            prev = v;
        }
    }
}

TEST_CASE("torsion_closed_form: non-harmonic polynomial is rejected") {
    SolidHarmonic bad{2, [](const Point& y) { return y[0] * y[0]; }};
    CHECK_THROWS_AS(torsion_closed_form(bad, 1.0, pt(2, 0.1, 0.1), {2, 0.5}), std::invalid_argument);
    SolidHarmonic good{2, [](const Point& y) { return y[0] * y[0] - y[1] * y[1]; }};
    CHECK_NOTHROW(validate_solid_harmonic(good, 2));
}

TEST_CASE("barrier_eval: zero on the hyperplane and outside, antisymmetric") {
    BarrierSpec b{pt(2, 0.6, 0.1), 1.0, {2, 0.5}};
    CHECK(barrier_eval(b, pt(2, 0.0, 0.3)) == 0.0);
    CHECK(barrier_eval(b, pt(2, 3.0, 0.3)) == 0.0);
    SeededStream rng(5, 0);
    for (int i = 0; i < 200; ++i) {
        Point x = pt(2, rng.uniform(-2, 2), rng.uniform(-2, 2));
        CHECK(barrier_eval(b, x.reflected()) == -barrier_eval(b, x));
    }
    CHECK(antisymmetry_defect(barrier_field(b), 200, 9) == 0.0);
}

TEST_CASE("barrier_frac_lap: lens identity is exact") {
    for (int n : {1, 2, 3}) {
        FracParams p{n, 0.3};
        BarrierSpec b{pt(n, 0.4), 1.0, p};
        Point x = pt(n, 0.25, 0.1);
        auto v = barrier_frac_lap(b, x);
        CHECK(v.region == BarrierRegion::lens);
        CHECK(v.value == 2 * (n + 2 * p.s) * x[0] / n);
    }
}

TEST_CASE("barrier_frac_lap: inequality on 200 sampled exterior points") {
    SeededStream rng(17, 0);
    for (int n : {1, 2, 3}) {
        for (double s : {0.25, 0.5, 0.75}) {
            BarrierSpec b{pt(n, 0.5, 0.2), 0.9, {n, s}};
            StabilityTable table(b.params);
            int count = 0;
            while (count < 200) {
                Point x(n);
                for (int i = 0; i < n; ++i) x[i] = b.a[i] + rng.uniform(-b.rho, b.rho);
                if (!(x[0] > 0) || (x - b.a).norm() >= b.rho || (x - b.a_star()).norm() <= b.rho) continue;
                auto v = barrier_frac_lap(b, x, &table);
                CHECK(v.region == BarrierRegion::outside_reflected);
                CHECK(v.value - (n + 2 * s) * x[0] / n <= 1e-10);
                ++count;
            }
        }
    }
}

TEST_CASE("barrier_frac_lap: agrees with the torsion assembly and with antisymmetric quadrature") {
    for (int n : {1, 2}) {
        FracParams p{n, 0.5};
        BarrierSpec b{pt(n, 0.6), 1.0, p};
        auto u = barrier_field(b);
        for (double x1 : {0.1, 0.3, 0.5, 0.9, 1.3}) {
            Point x = pt(n, x1, 0.2);
            double cf = barrier_frac_lap(b, x).value;
            CHECK(std::fabs(cf - barrier_frac_lap_from_torsion(b, x)) < 1e-11 * (1 + std::fabs(cf)));
            auto r = frac_lap_antisym(u, x, p, spec());
            CHECK(std::fabs(r.value - cf) <= 1e-3 * std::fabs(cf));
        }
    }
}

TEST_CASE("barrier_frac_lap: singular locus and domain") {
    BarrierSpec b{pt(2, 0.5), 1.0, {2, 0.5}};
    CHECK_THROWS_AS(barrier_frac_lap(b, pt(2, 0.5, 0.0)), std::domain_error);  // |x - a*| = 1
    CHECK_THROWS_AS(barrier_frac_lap(b, pt(2, -0.1, 0.0)), std::domain_error);
    CHECK_THROWS_AS(barrier_frac_lap(b, pt(2, 1.6, 0.0)), std::domain_error);
    BarrierSpec bad{pt(2, -0.5), 1.0, {2, 0.5}};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("stability_functions: limits, bounds and signs") {
    for (int n : {1, 2, 3}) {
        for (double s : {0.25, 0.5, 0.75}) {
            FracParams p{n, s};
            auto v0 = stability_functions(1e-30, p);
            CHECK(std::fabs(v0.f - 1) < 1e-12);
            CHECK(std::fabs(v0.g + 1) < 1e-12);
            for (int i = 1; i <= 100; ++i) {
                double tau = i / 101.0;
                auto v = stability_functions(tau, p);
                CHECK(v.K > 0);
                CHECK(v.F >= 1);
                CHECK(v.f <= 1);
                CHECK(v.g <= 0);
            }
            CHECK(std::fabs(extrapolate_F_at_one(p) - (n + 2 * s) / (2 * s)) < 1e-4);
        }
    }
    CHECK_THROWS_AS(stability_functions(0.0, {1, 0.5}), std::domain_error);
    CHECK_THROWS_AS(stability_functions(1.0, {1, 0.5}), std::domain_error);
}

TEST_CASE("StabilityTable reproduces direct evaluation") {
    for (int n : {1, 3}) {
        FracParams p{n, 0.4};
        StabilityTable t(p);
        for (int i = 1; i < 500; ++i) {
            double tau = 0.999 * i / 500;
            auto a = t(tau), b = stability_functions(tau, p);
            CHECK(std::fabs(a.F - b.F) < 1e-10);
            CHECK(std::fabs(a.g - b.g) < 1e-10);
        }
    }
}
