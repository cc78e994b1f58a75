#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "nonlocal/geometry.hpp"

using namespace nonlocal;

namespace {

constexpr double kPi = std::numbers::pi;

// distance from p to the ellipse boundary by 1D minimization over the angle (n = 2)
double ellipse_distance_oracle(double a, const Point& p) {
    double best = kInf;
    for (int k = 0; k < 64; ++k) {
        double lo = 2 * kPi * k / 64, hi = 2 * kPi * (k + 1) / 64;
        auto f = [&](double t) { return std::hypot(a * std::cos(t) - p[0], std::sin(t) - p[1]); };
        auto r = boost::math::tools::brent_find_minima(f, lo, hi, 52);
        best = std::min(best, r.second);
    }
    return best;
}

}  // namespace

TEST_CASE("ellipsoid_gamma reduces to gamma_{n,s} at eps = 0") {
    for (int n : {2, 3, 4})
        for (double s : {0.2, 0.5, 0.8})
            CHECK(ellipsoid_gamma({0, 2, {n, s}}) == doctest::Approx(gamma_torsion(n, s)).epsilon(1e-13));
    CHECK_THROWS_AS(ellipsoid_gamma({0.3, 2, {2, 0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(ellipsoid_gamma({0.1, 2, {1, 0.5}}), std::invalid_argument);
}

TEST_CASE("ellipsoid torsion solves (-Delta)^s u = 1 inside the ellipse") {
    FamilyParams fp{0.05, 2, {2, 0.5}};
    ScalarField u = ellipsoid_torsion_field(fp);
    QuadSpec q;
    q.abs_tol = 1e-6;
    q.rel_tol = 1e-6;
    for (Point x : {Point{0.0, 0.0}, Point{0.5, 0.2}, Point{-0.3, 0.6}, Point{0.9, 0.1}, Point{0.1, -0.8}}) {
        auto r = frac_lap_pv(u, x, fp.params, q);
        INFO("x = (" << x[0] << ", " << x[1] << ")");
        CHECK(r.value == doctest::Approx(1.0).epsilon(1e-3));
    }
}

TEST_CASE("parallel_param lies at distance 1/2 from the ellipse boundary") {
    for (double eps : {0.0, 0.1, 0.2}) {
        FamilyParams fp{eps, 2, {2, 0.5}};
        ShapeDescriptor el = make_ellipsoid(2, eps);
        for (int k = 0; k < 20; ++k) {
            double r = -0.95 + 1.9 * k / 19;
            Point x = parallel_param(fp, Point{r});
            CHECK(ellipse_distance_oracle(1 + eps, x) == doctest::Approx(0.5).epsilon(1e-8));
            CHECK(boundary_distance(el, x) == doctest::Approx(0.5).epsilon(1e-10));
            CHECK(el.contains(x));
        }
    }
    CHECK_THROWS_AS(parallel_param({0.1, 2, {2, 0.5}}, Point{1.0}), std::domain_error);
    CHECK_THROWS_AS(parallel_param({0.1, 2, {3, 0.5}}, Point{0.1}), std::invalid_argument);
}

TEST_CASE("inner parallel chart in n = 3 stays at distance 1/2") {
    FamilyParams fp{0.1, 2, {3, 0.5}};
    ShapeDescriptor el = make_ellipsoid(3, 0.1);
    Chart c = parallel_chart(fp);
    for (const Point& r : c.sample_params(9)) CHECK(boundary_distance(el, c.map(r)) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("boundary_seminorm: 4|x'|^2 on the round chart has quotient 2 at |r| = 1/sqrt 2") {
    FamilyParams f0{0, 2, {2, 0.5}};
    auto sn = boundary_seminorm([](const Point& x) { return 4 * x[1] * x[1]; }, parallel_chart(f0), 128);
    CHECK(sn.value == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(sn.value >= sn.grid_value);
    CHECK(std::fabs(std::fabs(sn.r_best[0]) - 1 / std::sqrt(2.0)) < 1e-2);
    CHECK(sn.label == "lower bound, refined");
}

TEST_CASE("boundary_seminorm: constant data gives 0") {
    auto sn = boundary_seminorm([](const Point&) { return 3.0; }, parallel_chart({0.1, 2, {2, 0.5}}), 64);
    CHECK(sn.value == 0);
}

TEST_CASE("boundary_seminorm: grid refinement is monotone and input is checked") {
    FamilyParams fp{0.02, 2, {2, 0.5}};
    auto u = [&](const Point& x) { return ellipsoid_torsion(fp, x); };
    double prev = 0;
    for (int g : {64, 128, 256}) {
        auto sn = boundary_seminorm(u, parallel_chart(fp), g, false);
        CHECK(sn.grid_value >= prev);
        prev = sn.grid_value;
    }
    CHECK_THROWS_AS(boundary_seminorm(u, parallel_chart(fp), 32), std::invalid_argument);
    Chart flat;
    flat.lo = Point{0.0};
    flat.hi = Point{1.0};
    flat.map = [](const Point&) { return Point{0.0, 0.0}; };
    CHECK_THROWS_AS(boundary_seminorm(u, flat, 64), std::invalid_argument);
}

TEST_CASE("seminorm ratio approaches s gamma (3/4)^{s-1}") {
    const FracParams p{2, 0.5};
    const double pred = 2 / (std::sqrt(3.0) * kPi);
    FamilyParams fp{0.01, 2, p};
    auto sn = boundary_seminorm([&](const Point& x) { return ellipsoid_torsion(fp, x); }, parallel_chart(fp), 256);
    CHECK(sn.value / 0.01 == doctest::Approx(pred).epsilon(0.05));

    auto lr = limit_ratio_experiment({0.04, 0.02, 0.01}, p, 256);
    CHECK(lr.predicted == doctest::Approx(pred).epsilon(1e-12));
    CHECK(lr.extrapolated == doctest::Approx(pred).epsilon(0.02));
    CHECK(lr.monotone);
    CHECK(lr.converging);
    CHECK_THROWS_AS(limit_ratio_experiment({0.01, 0.02, 0.04}, p), std::invalid_argument);
    CHECK_THROWS_AS(limit_ratio_experiment({0.04, 0.02}, p), std::invalid_argument);
    CHECK_THROWS_AS(limit_ratio_experiment({0.3, 0.02, 0.01}, p), std::invalid_argument);
}

TEST_CASE("extrapolate_to_zero is exact for polynomials") {
    std::vector<double> x{0.4, 0.2, 0.1}, y;
    for (double t : x) y.push_back(3 - 2 * t + 5 * t * t);
    auto [v, err] = extrapolate_to_zero(x, y);
    CHECK(v == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(err > 0);
}

TEST_CASE("rho deficit and radial bounds") {
    for (double e : {0.0, 0.1, 0.2}) CHECK(rho_deficit(make_ellipsoid(3, e)) == e);
    CHECK(rho_deficit(make_ball(2)) == 0);
    ShapeDescriptor d = make_perturbed_disk(0.01, 2);
    RadialBounds b = radial_bounds(d);
    CHECK(b.r_in < 1);
    CHECK(b.r_out > 1);
    CHECK(rho_deficit(d) == doctest::Approx(b.r_out - b.r_in).epsilon(1e-15));
}

TEST_CASE("bump_eta: odd, bounded, 2t near 0, supported in [-1/2, 1/2]") {
    for (int k = 0; k <= 400; ++k) {
        double t = -1 + 2.0 * k / 400;
        CHECK(bump_eta(-t) == doctest::Approx(-bump_eta(t)).epsilon(1e-15));
        CHECK(std::fabs(bump_eta(t)) <= 1);
        if (std::fabs(t) >= 0.5) CHECK(bump_eta(t) == 0);
        if (std::fabs(t) <= 0.25) CHECK(bump_eta(t) == doctest::Approx(2 * t).epsilon(1e-15));
    }
}

TEST_CASE("critical planes: symmetric shapes give 0") {
    for (const ShapeDescriptor& s : {make_ball(2), make_ball(3), make_ellipsoid(2, 0.1), make_ellipsoid(3, 0.2)}) {
        Point e(s.n);
        e[0] = 1;
        auto cp = critical_plane(s, e);
        CHECK(std::fabs(cp.lambda) < 1e-6);
    }
    Point e{1.0, 1.0};
    CHECK(std::fabs(critical_plane(make_ball(2), e).lambda) < 1e-6);
    CHECK_THROWS_AS(critical_plane(make_halfspace(2), Point{1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(critical_plane(make_ball(2), Point{0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("critical plane of the perturbed disk scales like eps^{1-1/alpha}") {
    std::vector<double> es{1e-4, 4e-4, 1.6e-3}, lam;
    for (double e : es) {
        auto cp = critical_plane(make_perturbed_disk(e, 2), Point{1.0, 0.0});
        CHECK(cp.lambda >= std::sqrt(e));
        CHECK(cp.lambda <= 3 * std::sqrt(e));
        lam.push_back(cp.lambda);
    }
    CHECK(fit_power_law(es, lam).exponent == doctest::Approx(0.5).epsilon(0.05 / 0.5));
    auto cp3 = critical_plane(make_perturbed_disk(1e-3, 3), Point{1.0, 0.0});
    CHECK(cp3.lambda >= std::pow(1e-3, 2.0 / 3));
}

TEST_CASE("slab measure: zero for symmetric shapes") {
    QuadSpec q;
    CHECK(slab_measure(make_ball(2), 0, 0.25, Point{1.0, 0.0}, q).value == 0);
    CHECK(slab_measure(make_ellipsoid(2, 0.1), 0, 0.25, Point{1.0, 0.0}, q).value == 0);
    CHECK(slab_measure(make_ellipsoid(2, 0.1), 0, 0.25, Point{0.0, 1.0}, q).value == 0);
    auto a = slab_measure(make_perturbed_disk(1e-3, 2), 0.03, 0.25, Point{1.0, 0.0}, q);
    auto b = slab_measure(make_perturbed_disk(1e-3, 2), 0.03, 0.25, Point{1.0, 0.0}, q);
    CHECK(a.value == b.value);
    CHECK_THROWS_AS(slab_measure(make_ball(2), 0, 0.3, Point{1.0, 0.0}, q), std::domain_error);
    CHECK_THROWS_AS(slab_measure(make_ball(3), 0, 0.1, Point{1.0, 0.0, 0.0}, q), std::invalid_argument);
}

TEST_CASE("slab measure: ellipse annulus bound C gamma (R - r + gamma |lambda|)") {
    QuadSpec q;
    const Point e{1.0, 1.0};
    for (double eps : {0.05, 0.1, 0.2}) {
        ShapeDescriptor el = make_ellipsoid(2, eps);
        double lam = critical_plane(el, e).lambda;
        CHECK(lam > 0);
        std::vector<double> gs{0.05, 0.1, 0.25}, vs;
        for (double g : gs) {
            auto r = slab_measure(el, lam, g, e, q);
            CHECK(r.converged);
            CHECK(r.value > 0);
            CHECK(r.value <= 2 * g * (eps + g * std::fabs(lam)));
            vs.push_back(r.value);
        }
        MESSAGE("eps=" << eps << " log-log slope in gamma " << fit_power_law(gs, vs).exponent);
    }
}

TEST_CASE("slab measure of the perturbed disk: eps^{1/2} scaling and bounded upper-bound ratio") {
    QuadSpec q;
    std::vector<double> es{1e-4, 4e-4, 1.6e-3}, m;
    for (double e : es) {
        ShapeDescriptor d = make_perturbed_disk(e, 2);
        double lam = critical_plane(d, Point{1.0, 0.0}).lambda;
        RadialBounds rb = radial_bounds(d);
        for (double g : {0.05, 0.1, 0.25}) {
            auto r = slab_measure(d, lam, g, Point{1.0, 0.0}, q);
            CHECK(r.converged);
            CHECK(r.err_estimate <= 0.02 * r.value);
            CHECK(r.value / (g * std::sqrt(rb.r_out - rb.r_in)) < 5);
            if (g == 0.1) {
                CHECK(r.value >= 0.1 * std::sqrt(e) * 0.1);
                m.push_back(r.value);
            }
        }
    }
    CHECK(std::fabs(fit_power_law(es, m).exponent - 0.5) < 0.05);
}

TEST_CASE("inner parallel sets: Minkowski sum recovers the base") {
    for (const ShapeDescriptor& base : {make_ball(2), make_ellipsoid(2, 0.1), make_ellipsoid(3, 0.2)}) {
        auto mk = minkowski_check(make_inner_parallel(base, 0.5), 2000, 11);
        CHECK(mk.failures_inner == 0);
        CHECK(mk.failures_outer == 0);
    }
    CHECK_THROWS_AS(make_inner_parallel(make_ellipsoid(2, 0.2), 0.9), std::domain_error);
    CHECK_THROWS_AS(make_inner_parallel(make_halfspace(2), 0.1), std::invalid_argument);
}

TEST_CASE("perturbed disk lies between B_{1 - C eps} and B_{1 + C eps} with C <= 10") {
    for (double e : {1e-4, 1e-3}) {
        ShapeDescriptor d = make_perturbed_disk(e, 2);
        RadialBounds b = radial_bounds(d);
        double C = std::max(1 - b.r_in, b.r_out - 1) / e;
        CHECK(C > 0);
        CHECK(C <= 10);
        SeededStream rng(5, 0);
        for (int i = 0; i < 4000; ++i) {
            Point x{rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2)};
            if (x.norm() < 1 - C * e * (1 + 1e-6)) CHECK(d.contains(x));
            if (x.norm() > 1 + C * e * (1 + 1e-6)) CHECK(!d.contains(x));
        }
    }
    CHECK_THROWS_AS(make_perturbed_disk(0.3, 2), std::invalid_argument);
    CHECK_THROWS_AS(make_perturbed_disk(0.1, 1), std::invalid_argument);
}

TEST_CASE("inner parallel set of the ellipse matches the parallel_param image") {
    const double eps = 0.1;
    FamilyParams fp{eps, 2, {2, 0.5}};
    ShapeDescriptor inner = make_inner_parallel(make_ellipsoid(2, eps), 0.5);
    for (int k = 0; k < 41; ++k) {
        Point x = parallel_param(fp, Point{-0.98 + 1.96 * k / 40});
        CHECK(std::fabs(inner.level(x)) < 1e-6);
    }
    for (const Chart& c : inner.charts())
        for (const Point& r : c.sample_params(200)) {
            Point x = c.map(r);
            if (!(x[0] > 0.05)) continue;
            auto f = [&](double t) { return distance(parallel_param(fp, Point{t}), x); };
            auto best = boost::math::tools::brent_find_minima(f, -0.999, 0.999, 52);
            CHECK(best.second < 1e-6);
        }
}

TEST_CASE("shape JSON round trip and rejection of bad input") {
    std::vector<ShapeDescriptor> shapes{make_ball(3, 2.0, Point{0.1, 0.2, 0.3}), make_halfspace(2, 0.5),
                                        make_ellipsoid(2, 0.1), make_inner_parallel(make_ellipsoid(3, 0.1), 0.5),
                                        make_perturbed_disk(0.01, 2.5)};
    for (const auto& s : shapes) {
        std::string j = shape_to_json(s);
        ShapeDescriptor r = shape_from_json(j);
        CHECK(shape_to_json(r) == j);
        CHECK(r.kind == s.kind);
    }
    CHECK_THROWS_AS(shape_from_json("{"), std::invalid_argument);
    CHECK_THROWS_AS(shape_from_json(R"({"schema":"nonlocal.shape.v1","kind":"torus","n":3})"), std::invalid_argument);
    CHECK_THROWS_AS(shape_from_json(R"({"kind":"ball","n":2,"radius":1,"center":[0,0]})"), std::invalid_argument);
    CHECK_THROWS_AS(shape_from_json(R"({"schema":"nonlocal.shape.v1","kind":"ball","n":2,"radius":-1,"center":[0,0]})"),
                    std::invalid_argument);
}

TEST_CASE("validate catches charts that leave the boundary") {
    ShapeDescriptor s = make_ball(2);
    s.radius = 2;
    s.center = Point(2);
    CHECK_NOTHROW(s.validate());
    s.kind = ShapeKind::Ellipsoid;
    s.eps = 0.1;
    CHECK_NOTHROW(s.validate());
    ShapeDescriptor bad = make_ellipsoid(2, 0.1);
    bad.n = 7;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
