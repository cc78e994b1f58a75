#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "nonlocal/bochner.hpp"

using namespace nonlocal;

namespace {

constexpr double kPi = std::numbers::pi;

QuadSpec spec() {
    QuadSpec q;
    q.abs_tol = 1e-8;
    q.rel_tol = 1e-8;
    return q;
}

KinkSurface unit_sphere(int n) {
    KinkSurface k{Point(n), Point(n)};
    for (int i = 0; i < n; ++i) k.semi_axes[i] = 1;
    return k;
}

std::vector<SymmetricProfile> profiles(int n) {
    std::vector<SymmetricProfile> out;
    SymmetricProfile p;
    p.n = n;

    p.f = [](const Point& x) { return std::exp(-x.norm2()); };
    out.push_back(p);

    SymmetricProfile b = p;
    b.f = [](const Point& x) {
        double t = 1 - x.norm2();
        return t > 0 ? t * t : 0.0;
    };
    b.support_radius = 1;
    b.kinks = {unit_sphere(n)};
    b.decay_class = "compact, C^1";
    out.push_back(b);

    p.f = [](const Point& x) {
        double t = x.norm2();
        return std::isfinite(t) ? std::exp(-t) * (1 + x[0] * x[0]) : 0.0;
    };
    out.push_back(p);

    SymmetricProfile r = p;
    r.f = [](const Point& x) { return std::pow(1 + x.norm2(), -2); };
    r.decay_class = "algebraic |x|^-4";
    out.push_back(r);

    p.f = [](const Point& x) { return std::cos(x[0]) * std::exp(-x.norm2()); };
    out.push_back(p);
    return out;
}

std::vector<Point> suite_points(int n) {
    std::vector<Point> pts;
    for (int k = 0; k < 10; ++k) {
        Point x(n);
        x[0] = 0.07 + 0.13 * k;
        if (n == 2) x[1] = 0.4 * std::sin(1.7 * k);
        pts.push_back(x);
    }
    return pts;
}

}  // namespace

TEST_CASE("lift_3isotropic: radial profile, rotations, restriction") {
    SymmetricProfile g;
    g.n = 2;
    g.f = [](const Point& x) { return std::exp(-x.norm2()) * (1 + x[1]); };
    auto lifted = lift_3isotropic(g);
    CHECK(lifted.dim == 4);
    SeededStream rng(3, 0);
    for (int i = 0; i < 50; ++i) {
        Point z{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        // rotation of (z_1, z_2, z_3) about the z_3 axis and then about the z_1 axis
        double a = rng.uniform(0, 2 * kPi), b = rng.uniform(0, 2 * kPi);
        Point w = z;
        w[0] = std::cos(a) * z[0] - std::sin(a) * z[1];
        w[1] = std::sin(a) * z[0] + std::cos(a) * z[1];
        double t1 = w[1], t2 = w[2];
        w[1] = std::cos(b) * t1 - std::sin(b) * t2;
        w[2] = std::sin(b) * t1 + std::cos(b) * t2;
        CHECK(lifted(w) == doctest::Approx(lifted(z)).epsilon(1e-13));
        double t = rng.uniform(-2, 2), xp = rng.uniform(-2, 2);
        CHECK(lifted(Point{t, 0.0, 0.0, xp}) == g.f(Point{t, xp}));
    }
    SymmetricProfile rad;
    rad.n = 1;
    rad.f = [](const Point& x) { return std::exp(-x.norm2()); };
    auto l3 = lift_3isotropic(rad);
    Point z{0.3, -0.4, 0.5};
    CHECK(l3(z) == doctest::Approx(std::exp(-z.norm2())).epsilon(1e-15));
}

TEST_CASE("SymmetricProfile validation rejects odd profiles") {
    SymmetricProfile bad;
    bad.n = 2;
    bad.f = [](const Point& x) { return x[0] + x[1]; };
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK_THROWS_AS(lift_3isotropic(bad), std::invalid_argument);
}

TEST_CASE("bochner_residual: radial Gaussian at (0.5, 0), n = 2, s = 0.5") {
    auto r = bochner_residual(profiles(2)[0], Point{0.5, 0.0}, {2, 0.5}, spec());
    CHECK(r.converged);
    CHECK(std::fabs(r.residual) <= 2 * r.err_sum);
}

TEST_CASE("bochner_residual: compact profile at (0.3, 0.1), n = 2, s = 0.3") {
    auto r = bochner_residual(profiles(2)[1], Point{0.3, 0.1}, {2, 0.3}, spec());
    CHECK(r.converged);
    CHECK(std::fabs(r.residual) <= 2 * r.err_sum);
}

TEST_CASE("bochner_residual: both sides vanish as x_1 -> 0") {
    for (int n : {1, 2}) {
        Point x(n);
        x[0] = 1e-5;
        if (n == 2) x[1] = 0.2;
        auto r = bochner_residual(profiles(n)[0], x, {n, 0.5}, spec());
        CHECK(std::fabs(r.lhs.value) < 1e-4);
        CHECK(std::fabs(r.rhs.value) < 1e-4);
        CHECK(std::fabs(r.residual) <= 2 * r.err_sum + 1e-9);
        x[0] = 0;
        CHECK(lifted_frac_lap_times_x1(profiles(n)[0], x, {n, 0.5}, spec()).value == 0.0);
    }
}

TEST_CASE("bochner_residual: 5 profiles x 10 points, n in {1,2}, s in {0.3,0.5,0.7}") {
    for (int n : {1, 2}) {
        auto fs = profiles(n);
        for (double s : {0.3, 0.5, 0.7}) {
            for (std::size_t i = 0; i < fs.size(); ++i) {
                for (const Point& x : suite_points(n)) {
                    auto r = bochner_residual(fs[i], x, {n, s}, spec());
                    INFO("n=" << n << " s=" << s << " profile=" << i << " x1=" << x[0]);
                    CHECK(r.converged);
                    CHECK(std::fabs(r.residual) <= 2 * r.err_sum);
                }
            }
        }
    }
}

TEST_CASE("kernel_lift: Gaussian, power and exponentially damped profiles") {
    LevyKernel g;
    g.n = 1;
    g.j = [](double r) { return std::exp(-r * r); };
    auto g3 = kernel_lift(g);
    CHECK(g3.n == 3);
    for (double r : {0.1, 0.5, 1.0, 2.0}) CHECK(g3.j(r) == doctest::Approx(std::exp(-r * r) / kPi).epsilon(1e-9));
    g.dj = [](double r) { return -2 * r * std::exp(-r * r); };
    for (double r : {0.1, 0.5, 1.0, 2.0}) CHECK(kernel_lift(g).j(r) == doctest::Approx(std::exp(-r * r) / kPi).epsilon(1e-14));

    for (int n : {1, 2}) {
        double s = 0.4;
        LevyKernel f;
        f.n = n;
        f.j = [n, s](double r) { return std::pow(r, -n - 2 * s); };
        auto f2 = kernel_lift(f);
        for (double r : {0.5, 1.0, 2.0})
            CHECK(f2.j(r) == doctest::Approx((n + 2 * s) / (2 * kPi) * std::pow(r, -n - 2 * s - 2)).epsilon(1e-9));

        LevyKernel e;
        e.n = n;
        e.j = [n, s](double r) { return std::pow(r, -n - s) * std::exp(-r); };
        auto e2 = kernel_lift(e);
        for (double r : {0.5, 1.0, 2.0}) {
            auto rec = kernel_reconstruction(e2, r, spec());
            CHECK(rec.converged);
            CHECK(rec.value == doctest::Approx(e.j(r)).epsilon(1e-6));
        }
    }
}

TEST_CASE("kernel_lift: increasing or non-integrable profiles are rejected") {
    LevyKernel up;
    up.n = 1;
    up.j = [](double r) { return r; };
    CHECK_THROWS_AS(kernel_lift(up), std::invalid_argument);
    LevyKernel heavy;
    heavy.n = 1;
    heavy.j = [](double r) { return std::pow(r, -3.5); };  // not integrable against min(1, r^2)
    CHECK_THROWS_AS(heavy.validate(), std::invalid_argument);
}

TEST_CASE("levy_symbol: Gaussian closed form for n = 1 and small-tau limit") {
    LevyKernel g;
    g.n = 1;
    g.j = [](double r) { return std::exp(-r * r); };
    for (double tau : {1e-3, 0.3, 1.0, 2.5}) {
        // 2 int_0^inf (1 - cos(r tau)) e^{-r^2} dr
        double exact = std::sqrt(kPi) * (1 - std::exp(-0.25 * tau * tau));
        CHECK(levy_symbol(g, tau, spec()).value == doctest::Approx(exact).epsilon(1e-9));
    }
    for (int n : {1, 2, 3}) {
        LevyKernel k;
        k.n = n;
        k.j = [](double r) { return std::exp(-r * r); };
        double v = levy_symbol(k, 1e-3, spec()).value;
        CHECK(v >= 0);
        CHECK(v < 1e-5);
    }
    CHECK_THROWS_AS(levy_symbol(g, 0.0, spec()), std::domain_error);
}

TEST_CASE("levy_symbol: invariance under the kernel lift") {
    for (int n : {1, 2}) {
        LevyKernel g;
        g.n = n;
        g.j = [](double r) { return std::exp(-r * r); };
        auto g2 = kernel_lift(g);
        for (double tau : {0.5, 1.0, 2.0}) {
            double a = levy_symbol(g, tau, spec()).value, b = levy_symbol(g2, tau, spec()).value;
            CHECK(std::fabs(a - b) <= 1e-5 * (1 + a));
        }
    }
}

TEST_CASE("levy_symbol: Gaussian symbol increases on [0.1, 3]") {
    for (int n : {1, 2, 3}) {
        LevyKernel g;
        g.n = n;
        g.j = [](double r) { return std::exp(-r * r); };
        double prev = -1;
        for (int i = 0; i <= 58; ++i) {
            double v = levy_symbol(g, 0.1 + 0.05 * i, spec()).value;
            CHECK(v > prev);
            prev = v;
        }
    }
}
