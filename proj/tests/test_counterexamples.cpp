#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "nonlocal/counterexamples.hpp"
#include "nonlocal/quadrature.hpp"

using namespace nonlocal;

namespace {
Rational Q(long p, long q) { return Rational(p) / q; }
}  // namespace

TEST_CASE("smp polynomial: f(2) = 1 and f(3) = 5 exactly") {
    OddPolynomial f = smp_polynomial();
    CHECK(f(Rational(2)) == Rational(1));
    CHECK(f(Rational(3)) == Rational(5));
    CHECK(f(Rational(0)) == Rational(0));
    CHECK(smp_counterexample_eval(2.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(smp_counterexample_eval(3.0) == doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("smp polynomial: f >= 3x on [0,1] and f >= 1 on [1,3]") {
    OddPolynomial f = smp_polynomial();
    for (int i = 0; i <= 1000; ++i) {
        double x = i / 1000.0;
        CHECK(f(x) >= 3 * x - 1e-15);
        double y = 1 + 2.0 * i / 1000;
        CHECK(f(y) >= 1 - 1e-12);
        // exact check on the rational grid
        CHECK(f(Q(i, 1000)) >= 3 * Q(i, 1000));
        CHECK(f(Q(1000 + 2 * i, 1000)) >= Rational(1));
    }
}

TEST_CASE("both families are odd in exact arithmetic") {
    std::vector<OddPolynomial> fs{smp_polynomial(), harnack_family(0.2).polynomial(), harnack_family(0.5).polynomial()};
    for (const auto& f : fs)
        for (int p = -12; p <= 12; ++p) {
            Rational x(p, 7);
            CHECK(f(-x) == -f(x));
        }
}

TEST_CASE("Harnack family coefficients and evaluation agree") {
    HarnackFamily h = harnack_family(0.2);
    CHECK(h.eps == Q(1, 5));
    OddPolynomial f = h.polynomial();
    CHECK(f.coeffs[0] == Q(5, 54) * (64 + 5 * Q(1, 5)));
    CHECK(f.coeffs[3] == Q(1, 216) * (16 - 19 * Q(1, 5)));
    SeededStream rng(9, 0);
    for (int i = 0; i < 200; ++i) {
        double x = rng.uniform(-3, 3);
        CHECK(harnack_family_eval(0.2, x) == doctest::Approx(f(x)).epsilon(1e-13));
    }
    CHECK(harnack_family_eval(0.3, 0.0) == 0);
    CHECK_THROWS_AS(harnack_family(0.0), std::domain_error);
    CHECK_THROWS_AS(harnack_family_eval(1.0, 0.5), std::domain_error);
}

TEST_CASE("Harnack family: sup over (1,2) is 4, inf over (1/2,5/2) is 2 eps") {
    for (double eps : {0.2, 0.5}) {
        HarnackCheck h = harnack_check(eps);
        CHECK(std::fabs(h.sup_outer.value - 4) < 1e-6);
        CHECK(std::fabs(h.inf_inner.value - 2 * eps) < 1e-6);
        CHECK(h.inf_inner.x == doctest::Approx(2.0).epsilon(1e-4));
        // exact values at the extremal points
        OddPolynomial f = harnack_family(eps).polynomial();
        CHECK(f(Rational(1)) == Rational(4));
        CHECK(f(Rational(2)) == 2 * harnack_family(eps).eps);
    }
}

TEST_CASE("indicative Harnack ratio exceeds 10 below eps = 0.13") {
    for (double eps : {0.01, 0.05, 0.1, 0.12, 0.129}) CHECK(harnack_check(eps).indicative_ratio > 10);
    CHECK(harnack_check(0.2).indicative_ratio < 10);
    double prev = 0;
    for (double eps : {0.5, 0.2, 0.1, 0.01, 0.001}) {
        double r = harnack_check(eps).indicative_ratio;
        CHECK(r > prev);
        prev = r;
    }
}

TEST_CASE("CSV: row count, determinism and round trip") {
    std::vector<double> eps{0.2, 0.4, 0.6, 0.8};
    CsvGrid grid;
    std::string a = family_csv("harnack", eps, grid), b = family_csv("harnack", eps, grid);
    CHECK(a == b);
    CHECK(a.find('\r') == std::string::npos);
    std::istringstream in(a);
    std::string line;
    std::getline(in, line);
    CHECK(line == "family,eps,x,f");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        char fam[16];
        double e, x, f;
        REQUIRE(std::sscanf(line.c_str(), "%15[^,],%lf,%lf,%lf", fam, &e, &x, &f) == 4);
        CHECK(std::string(fam) == "harnack");
        CHECK(f == harnack_family(e).polynomial()(x));
    }
    CHECK(rows == 4 * 601);

    std::string s = family_csv("smp", {}, grid);
    CHECK(s.substr(0, 15) == "family,eps,x,f\n");
    CHECK(s.find("\nsmp,,") != std::string::npos);
    CHECK_THROWS_AS(family_csv("nope", eps, grid), std::invalid_argument);
    CHECK_THROWS_AS(family_csv("harnack", {}, grid), std::invalid_argument);
}

TEST_CASE("CSV file output and I/O failure") {
    const std::string path = "counterexamples_test.csv";
    emit_family_csv("harnack", {0.2}, {}, path);
    std::ifstream is(path, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    CHECK(ss.str() == family_csv("harnack", {0.2}, {}));
    std::remove(path.c_str());
    CHECK_THROWS_AS(emit_family_csv("smp", {}, {}, "/nonexistent-dir/x.csv"), std::runtime_error);
}
