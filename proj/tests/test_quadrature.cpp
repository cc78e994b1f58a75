#include <cmath>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "nonlocal/quadrature.hpp"
#include "nonlocal/specfun.hpp"

using namespace nonlocal;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("integrate_adaptive: polynomial") {
    QuadSpec q;
    auto r = integrate_adaptive([](double x) { return x; }, 0, 1, q);
    CHECK(r.converged);
    CHECK(std::fabs(r.value - 0.5) < 1e-14);
    CHECK(r.err_estimate >= 0);
}

TEST_CASE("integrate_adaptive: endpoint singular sine power") {
    QuadSpec q;
    double s = 0.5;
    // sin(pi - d) loses relative accuracy for tiny d, so fold onto [0, pi/2]
    auto r = integrate_adaptive([s](double t) { return 2 * std::pow(std::sin(t), s - 1); }, 0, kPi / 2, q);
    double ref = std::sqrt(kPi) * std::tgamma(0.25) / std::tgamma(0.75);
    CHECK(r.converged);
    CHECK(std::fabs(r.value - ref) < 1e-8 * ref);
}

TEST_CASE("integrate_adaptive: radial weight with (1-r^2) factor") {
    QuadSpec q;
    int n = 3;
    double s = 0.5;
    auto r = integrate_adaptive([&](double x) { return std::pow(x, -s) * std::pow(1 - x * x, 0.5 * (n - 1)); }, 0, 1, q);
    double ref = std::tgamma(2.0) * std::tgamma(0.25) / (2 * std::tgamma(2.25));
    CHECK(std::fabs(r.value - ref) < 1e-8 * ref);
}

TEST_CASE("integrate_adaptive: infinite ranges and breaks") {
    QuadSpec q;
    auto r = integrate_adaptive([](double x) { return std::exp(-x * x); }, -kInf, kInf, q);
    CHECK(std::fabs(r.value - std::sqrt(kPi)) < 1e-10);
    auto r2 = integrate_adaptive([](double x) { return 1 / (1 + x * x); }, 0, kInf, q);
    CHECK(std::fabs(r2.value - kPi / 2) < 1e-10);
    auto r3 = integrate_adaptive([](double x) { return std::fabs(x - 0.3); }, 0, 1, {0.3}, q);
    CHECK(std::fabs(r3.value - (0.045 + 0.245)) < 1e-14);
    auto r4 = integrate_adaptive([](double x) { return x; }, 1, 0, q);
    CHECK(std::fabs(r4.value + 0.5) < 1e-14);
}

TEST_CASE("integrate_adaptive: exhausted budget is flagged, not thrown") {
    QuadSpec q;
    q.max_refinements = 2;
    auto r = integrate_adaptive([](double x) { return std::sin(200 * x); }, 0, 10, q);
    CHECK_FALSE(r.converged);
}

TEST_CASE("integrate_box: unit square and cube") {
    QuadSpec q;
    q.abs_tol = 1e-9;
    auto r = integrate_box([](const Point& x) { return x[0] * x[1]; }, Point{0.0, 0.0}, Point{1.0, 2.0}, q);
    CHECK(std::fabs(r.value - 1.0) < 1e-10);
    auto r3 = integrate_box([](const Point& x) { return x[0] + x[1] + x[2]; }, Point{0.0, 0.0, 0.0},
                            Point{1.0, 1.0, 1.0}, q);
    CHECK(std::fabs(r3.value - 1.5) < 1e-9);
}

TEST_CASE("integrate_pv: odd integrands vanish") {
    QuadSpec q;
    auto r = integrate_pv([](double x) { return 1 / x; }, 0.0, -1, 1, q);
    CHECK(std::fabs(r.value) <= q.abs_tol);
    double s = 0.5;
    auto r2 = integrate_pv([s](double y) { return (0.0 - y) / std::pow(std::fabs(y), 1 + 2 * s); }, 0.0, -1, 1, q);
    CHECK(std::fabs(r2.value) <= q.abs_tol);
}

TEST_CASE("integrate_pv: odd integrands about random centres vanish (property)") {
    SeededStream rng(3, 0);
    QuadSpec q;
    for (int t = 0; t < 20; ++t) {
        double x0 = rng.uniform(-0.5, 0.5);
        double c1 = rng.uniform(-2, 2), c3 = rng.uniform(-2, 2);
        auto f = [&](double y) {
            double d = y - x0;
            return (c1 * d + c3 * d * d * d) / std::pow(std::fabs(d), 2.5);
        };
        double h = std::min(x0 + 1, 1 - x0);
        auto r = integrate_pv(f, x0, x0 - h, x0 + h, q);
        CHECK(std::fabs(r.value) <= q.abs_tol);
    }
}

TEST_CASE("integrate_pv: half-Laplacian of sqrt(1-x^2) at 0 is 1") {
    QuadSpec q;
    q.abs_tol = 1e-9;
    q.rel_tol = 1e-9;
    auto u = [](double y) { return std::fabs(y) < 1 ? std::sqrt(1 - y * y) : 0.0; };
    PvProblem pb;
    pb.n = 1;
    pb.x0 = Point{0.0};
    pb.integrand = [&](const Point& y) { return (u(0) - u(y[0])) / (y[0] * y[0]); };
    pb.ray_breaks = [](const Point&, std::vector<double>& b) { b.push_back(1.0); };
    pb.leading_exponent = 1.0;
    auto r = integrate_pv(pb, q);
    CHECK(r.converged);
    CHECK(std::fabs(r.value / kPi - 1.0) < 1e-6);
}

TEST_CASE("integrate_pv: 2-D Gaussian PV against radial oracle") {
    // PV of (u(0)-u(y))|y|^{-3} for u = exp(-|y|^2): 2 pi int_0^inf (1-e^{-r^2}) r^{-2} dr = 2 pi sqrt(pi)
    QuadSpec q;
    q.abs_tol = 1e-8;
    q.rel_tol = 1e-8;
    PvProblem pb;
    pb.n = 2;
    pb.x0 = Point{0.0, 0.0};
    pb.integrand = [](const Point& y) {
        double r2 = y.norm2();
        return (1 - std::exp(-r2)) / std::pow(r2, 1.5);
    };
    auto r = integrate_pv(pb, q);
    CHECK(std::fabs(r.value - 2 * kPi * std::sqrt(kPi)) < 1e-6);
}

TEST_CASE("integrate_mc: ball volume and fourth moment in R^3") {
    QuadSpec q;
    McRegion reg{Point{-1.0, -1.0, -1.0}, Point{1.0, 1.0, 1.0}, [](const Point& x) { return x.norm2() < 1; }};
    auto v = integrate_mc([](const Point&) { return 1.0; }, reg, q);
    CHECK(std::fabs(v.value - 4 * kPi / 3) < 3 * v.err_estimate);
    auto m = integrate_mc([](const Point& x) { return std::pow(x[0], 4); }, reg, q);
    CHECK(std::fabs(m.value - 4 * kPi / 35) < 3 * m.err_estimate);
}

TEST_CASE("integrate_mc: determinism and seed sensitivity") {
    QuadSpec q;
    q.mc_samples = 50000;
    McRegion reg{Point{-1.0, -1.0}, Point{1.0, 1.0}, [](const Point& x) { return x.norm2() < 1; }};
    auto f = [](const Point& x) { return std::exp(x[0]); };
    auto a = integrate_mc(f, reg, q), b = integrate_mc(f, reg, q);
    CHECK(a.value == b.value);
    CHECK(a.err_estimate == b.err_estimate);
    q.rng_seed = 43;
    auto c = integrate_mc(f, reg, q);
    CHECK(c.value != a.value);
}

TEST_CASE("integrate_mc: standard error halves when samples quadruple") {
    QuadSpec q;
    McRegion reg{Point{-1.0, -1.0, -1.0}, Point{1.0, 1.0, 1.0}, [](const Point& x) { return x.norm2() < 1; }};
    q.mc_samples = 40000;
    auto a = integrate_mc([](const Point&) { return 1.0; }, reg, q);
    q.mc_samples = 160000;
    auto b = integrate_mc([](const Point&) { return 1.0; }, reg, q);
    double ratio = a.err_estimate / b.err_estimate;
    CHECK(ratio > 2.0 / 1.5);
    CHECK(ratio < 2.0 * 1.5);
}

TEST_CASE("integrate_mc and QuadSpec validation") {
    QuadSpec q;
    q.mc_samples = 0;
    McRegion reg{Point{0.0}, Point{1.0}, {}};
    CHECK_THROWS_AS(integrate_mc([](const Point&) { return 1.0; }, reg, q), std::domain_error);
    QuadSpec p;
    p.pv_cutoffs = {0.1, 0.2};
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
