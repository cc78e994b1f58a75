#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace nonlocal {

using Rational = boost::multiprecision::cpp_rational;

// Odd polynomial sum_k coeffs[k] x^{2k+1}, coefficients exact.
struct OddPolynomial {
    std::vector<Rational> coeffs;

    double operator()(double x) const;  // Horner in x^2
    Rational operator()(const Rational& x) const;
};

// f(x) = a x + b x^3 + c x^5 + d x^7 with
// a = 5/54 (64+5 eps), b = -1/72 (128+73 eps), c = 1/36 (-8+23 eps), d = 1/216 (16-19 eps).
struct HarnackFamily {
    Rational eps;

    OddPolynomial polynomial() const;  // throws std::domain_error unless 0 < eps < 1
};

HarnackFamily harnack_family(double eps);  // eps rounded to the nearest multiple of 1e-9
double harnack_family_eval(double eps, double x);

// -371/43200 x^9 + 167/1440 x^7 - 2681/14400 x^5 - 4193/2160 x^3 + 301/50 x
OddPolynomial smp_polynomial();
double smp_counterexample_eval(double x);

struct Extremum {
    double x = 0;
    double value = 0;
};
// Max / min of f over [a, b]: grid of `grid` intervals, then golden-section refinement around the
// best grid point (endpoints included, so the result is the sup / inf over the open interval).
Extremum sup_on(const OddPolynomial& f, double a, double b, int grid = 2000);
Extremum inf_on(const OddPolynomial& f, double a, double b, int grid = 2000);

struct HarnackCheck {
    double eps = 0;
    Extremum sup_outer;  // sup over (1, 2)
    Extremum inf_inner;  // inf over (1/2, 5/2)
    double indicative_ratio = 0;  // (4 - eps) / (3 eps)
};
HarnackCheck harnack_check(double eps);

// CSV with header family,eps,x,f; LF endings; %.17g. Throws std::runtime_error on I/O failure.
// family: "harnack" (one block per eps) or "smp" (eps list ignored, eps column empty).
// Grid: x = x_min + i (x_max - x_min)/steps, i = 0..steps.
struct CsvGrid {
    double x_min = -3;
    double x_max = 3;
    int steps = 600;
};
std::string family_csv(const std::string& family, const std::vector<double>& eps, const CsvGrid& grid);
void emit_family_csv(const std::string& family, const std::vector<double>& eps, const CsvGrid& grid,
                     const std::string& path);

}  // namespace nonlocal
