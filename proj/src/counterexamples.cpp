#include "nonlocal/counterexamples.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace nonlocal {

namespace {

Rational R(std::int64_t p, std::int64_t q = 1) { return Rational(p) / q; }

double to_double(const Rational& r) { return r.convert_to<double>(); }

template <class Better>
Extremum extremum(const OddPolynomial& f, double a, double b, int grid, Better better) {
    if (!(b > a) || grid < 2) throw std::invalid_argument("extremum: need a < b and grid >= 2");
    Extremum best{a, f(a)};
    int ib = 0;
    for (int i = 1; i <= grid; ++i) {
        double x = a + (b - a) * i / grid, v = f(x);
        if (better(v, best.value)) {
            best = {x, v};
            ib = i;
        }
    }
    // golden section on the two cells around the best node
    double lo = a + (b - a) * std::max(0, ib - 1) / grid, hi = a + (b - a) * std::min(grid, ib + 1) / grid;
    const double g = 0.5 * (std::sqrt(5.0) - 1);
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200 && hi - lo > 1e-15 * (1 + std::fabs(lo)); ++it) {
        if (better(f1, f2)) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    for (double x : {x1, x2})
        if (better(f(x), best.value)) best = {x, f(x)};
    return best;
}

}  // namespace

double OddPolynomial::operator()(double x) const {
    const double x2 = x * x;
    double acc = 0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x2 + to_double(*it);
    return acc * x;
}

Rational OddPolynomial::operator()(const Rational& x) const {
    const Rational x2 = x * x;
    Rational acc(0);
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x2 + *it;
    return acc * x;
}

OddPolynomial HarnackFamily::polynomial() const {
    if (!(eps > 0 && eps < 1)) throw std::domain_error("HarnackFamily: eps must lie in (0,1)");
    return {{R(5, 54) * (64 + 5 * eps), -R(1, 72) * (128 + 73 * eps), R(1, 36) * (-8 + 23 * eps),
             R(1, 216) * (16 - 19 * eps)}};
}

HarnackFamily harnack_family(double eps) {
    if (!(eps > 0 && eps < 1)) throw std::domain_error("harnack_family: eps must lie in (0,1)");
    return {Rational(static_cast<std::int64_t>(std::llround(eps * 1e9))) / 1000000000};
}

double harnack_family_eval(double eps, double x) {
    if (!(eps > 0 && eps < 1)) throw std::domain_error("harnack_family_eval: eps must lie in (0,1)");
    // coefficients are affine in eps, so evaluate in double directly
    const double a = 5.0 / 54 * (64 + 5 * eps), b = -1.0 / 72 * (128 + 73 * eps), c = 1.0 / 36 * (-8 + 23 * eps),
                 d = 1.0 / 216 * (16 - 19 * eps);
    const double x2 = x * x;
    return x * (a + x2 * (b + x2 * (c + x2 * d)));
}

OddPolynomial smp_polynomial() {
    return {{R(301, 50), -R(4193, 2160), -R(2681, 14400), R(167, 1440), -R(371, 43200)}};
}

double smp_counterexample_eval(double x) { return smp_polynomial()(x); }

Extremum sup_on(const OddPolynomial& f, double a, double b, int grid) {
    return extremum(f, a, b, grid, [](double u, double v) { return u > v; });
}

Extremum inf_on(const OddPolynomial& f, double a, double b, int grid) {
    return extremum(f, a, b, grid, [](double u, double v) { return u < v; });
}

HarnackCheck harnack_check(double eps) {
    OddPolynomial f = harnack_family(eps).polynomial();
    HarnackCheck h;
    h.eps = eps;
    h.sup_outer = sup_on(f, 1, 2);
    h.inf_inner = inf_on(f, 0.5, 2.5);
    h.indicative_ratio = (4 - eps) / (3 * eps);
    return h;
}

std::string family_csv(const std::string& family, const std::vector<double>& eps, const CsvGrid& grid) {
    if (grid.steps < 1 || !(grid.x_max > grid.x_min)) throw std::invalid_argument("family_csv: bad grid");
    std::string out = "family,eps,x,f\n";
    char buf[128];
    auto rows = [&](const char* name, const std::string& eps_field, auto&& f) {
        for (int i = 0; i <= grid.steps; ++i) {
            double x = grid.x_min + (grid.x_max - grid.x_min) * i / grid.steps;
            std::snprintf(buf, sizeof buf, "%s,%s,%.17g,%.17g\n", name, eps_field.c_str(), x, f(x));
            out += buf;
        }
    };
    if (family == "harnack") {
        if (eps.empty()) throw std::invalid_argument("family_csv: harnack family needs eps values");
        for (double e : eps) {
            OddPolynomial f = harnack_family(e).polynomial();
            std::snprintf(buf, sizeof buf, "%.17g", e);
            rows("harnack", buf, f);
        }
    } else if (family == "smp") {
        OddPolynomial f = smp_polynomial();
        rows("smp", "", f);
    } else {
        throw std::invalid_argument("family_csv: unknown family '" + family + "'");
    }
    return out;
}

void emit_family_csv(const std::string& family, const std::vector<double>& eps, const CsvGrid& grid,
                     const std::string& path) {
    std::string text = family_csv(family, eps, grid);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("emit_family_csv: cannot open '" + path + "'");
    os << text;
    os.close();
    if (!os) throw std::runtime_error("emit_family_csv: write failed for '" + path + "'");
}

}  // namespace nonlocal
