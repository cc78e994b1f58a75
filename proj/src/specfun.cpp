#include "nonlocal/specfun.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace nonlocal {

namespace {

constexpr double kPi = std::numbers::pi;

constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
constexpr double kLanczosG = 7.0;

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

// sin(pi x) with argument reduction so that integers give exact zeros.
double sin_pi(double x) {
    double r = std::fmod(x, 2.0);
    if (r < 0) r += 2.0;
    if (r == 0.0 || r == 1.0) return 0.0;
    if (r == 0.5) return 1.0;
    if (r == 1.5) return -1.0;
    return std::sin(kPi * r);
}

double lanczos_sum(double xm1) {
    double a = kLanczos[0];
    for (int i = 1; i < 9; ++i) a += kLanczos[i] / (xm1 + i);
    return a;
}

double gamma_pos(double x) {
    // x >= 0.5
    if (x == std::floor(x) && x <= 21) {
        double f = 1;
        for (int k = 2; k < static_cast<int>(x); ++k) f *= k;
        return f;
    }
    double xm1 = x - 1.0;
    double t = xm1 + kLanczosG + 0.5;
    double half = std::pow(t, 0.5 * (xm1 + 0.5));
    return std::sqrt(2 * kPi) * half * std::exp(-t) * half * lanczos_sum(xm1);
}

bool near_integer(double v, double tol, double* nearest = nullptr) {
    double r = std::round(v);
    if (nearest) *nearest = r;
    return std::fabs(v - r) < tol;
}

double hyp2f1_connection(double a, double b, double c, double z) {
    // DLMF 15.8.4, valid when c-a-b is not an integer.
    double w = 1.0 - z;
    double m = c - a - b;
    double t1 = gamma_fn(c) * gamma_fn(m) * rgamma(c - a) * rgamma(c - b);
    double t2 = gamma_fn(c) * gamma_fn(-m) * rgamma(a) * rgamma(b);
    double v = 0;
    if (t1 != 0) v += t1 * hyp2f1_series(a, b, 1.0 - m, w);
    if (t2 != 0) v += t2 * std::pow(w, m) * hyp2f1_series(c - a, c - b, 1.0 + m, w);
    return v;
}

double hyp2f1_near_one(double a, double b, double c, double z) {
    double m = c - a - b;
    double nearest;
    if (!near_integer(m, 5e-4, &nearest)) return hyp2f1_connection(a, b, c, z);
    // the log case is avoided: geometric series is still affordable this far from 1
    if (z <= 0.9999) return hyp2f1_series(a, b, c, z);
    // Analytic in c: symmetric shifts plus one Richardson step remove O(delta^2).
    const double d = 2e-3;
    double s1 = 0.5 * (hyp2f1_connection(a, b, c + d, z) + hyp2f1_connection(a, b, c - d, z));
    double s2 = 0.5 * (hyp2f1_connection(a, b, c + 2 * d, z) + hyp2f1_connection(a, b, c - 2 * d, z));
    return (4.0 * s1 - s2) / 3.0;
}

}  // namespace

void FracParams::validate() const {
    if (n < 1) throw std::invalid_argument("FracParams: n must be >= 1");
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("FracParams: s must lie in (0,1)");
}

double gamma_fn(double x) {
    if (std::isnan(x)) throw std::domain_error("gamma_fn: NaN argument");
    if (is_nonpositive_integer(x)) throw std::domain_error("gamma_fn: pole at non-positive integer");
    if (x < 0.5) return kPi / (sin_pi(x) * gamma_pos(1.0 - x));
    return gamma_pos(x);
}

double log_gamma(double x) {
    if (!(x > 0)) throw std::domain_error("log_gamma: argument must be positive");
    if (x < 0.5) return std::log(kPi / sin_pi(x)) - log_gamma(1.0 - x);
    double xm1 = x - 1.0;
    double t = xm1 + kLanczosG + 0.5;
    return 0.5 * std::log(2 * kPi) + (xm1 + 0.5) * std::log(t) - t + std::log(lanczos_sum(xm1));
}

double rgamma(double x) {
    if (is_nonpositive_integer(x)) return 0.0;
    return 1.0 / gamma_fn(x);
}

double beta_fn(double a, double b) {
    if (a + b > 150) return std::exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b));
    return gamma_fn(a) * gamma_fn(b) / gamma_fn(a + b);
}

double hyp2f1_series(double a, double b, double c, double z, long max_terms) {
    if (is_nonpositive_integer(c)) throw std::domain_error("hyp2f1: c is a non-positive integer");
    double sum = 1.0, comp = 0.0, term = 1.0;
    int small_streak = 0;
    for (long k = 0; k < max_terms; ++k) {
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        if (term == 0.0) return sum + comp;
        double t = sum + term;
        if (std::fabs(sum) >= std::fabs(term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
        double ratio = std::fabs((a + k + 1) * (b + k + 1) / ((c + k + 1) * (k + 2.0)) * z);
        if (std::fabs(term) <= 1e-17 * std::fabs(sum + comp) && ratio < 1.0) {
            if (++small_streak >= 2) return sum + comp;
        } else {
            small_streak = 0;
        }
    }
    throw std::runtime_error("hyp2f1: series did not converge");
}

double hyp2f1(double a, double b, double c, double z) {
    if (std::isnan(z)) throw std::domain_error("hyp2f1: NaN argument");
    if (z >= 1.0) throw std::domain_error("hyp2f1: z must be < 1");
    if (is_nonpositive_integer(c)) throw std::domain_error("hyp2f1: c is a non-positive integer");
    if (z == 0.0) return 1.0;
    if (z < 0.0) {
        // Pfaff: F(a,b;c;z) = (1-z)^{-a} F(a, c-b; c; z/(z-1))
        if (z >= -0.5) return hyp2f1_series(a, b, c, z);
        return std::pow(1.0 - z, -a) * hyp2f1(a, c - b, c, z / (z - 1.0));
    }
    if (z <= 0.75) return hyp2f1_series(a, b, c, z);
    // terminating series need no transformation
    if (is_nonpositive_integer(a) || is_nonpositive_integer(b)) return hyp2f1_series(a, b, c, z);
    return hyp2f1_near_one(a, b, c, z);
}

double bessel_j(double nu, double x) {
    if (!(nu >= 0.0 && nu <= 10.0)) throw std::domain_error("bessel_j: order outside [0,10]");
    if (!(x >= 0.0 && x <= 100.0)) throw std::domain_error("bessel_j: argument outside [0,100]");
    if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
    return std::cyl_bessel_j(nu, x);
}

double unit_ball_volume(int n) { return std::pow(kPi, 0.5 * n) / gamma_fn(0.5 * n + 1.0); }

double unit_sphere_area(int n) { return 2.0 * std::pow(kPi, 0.5 * n) / gamma_fn(0.5 * n); }

double c_frac(int n, double s) {
    return s * std::pow(4.0, s) * gamma_fn(0.5 * n + s) / (std::pow(kPi, 0.5 * n) * gamma_fn(1.0 - s));
}

double gamma_torsion(int n, double s) {
    return std::pow(4.0, -s) * gamma_fn(0.5 * n) / (gamma_fn(0.5 * n + s) * gamma_fn(1.0 + s));
}

double gamma_poisson(int n, double s) {
    return sin_pi(s) * gamma_fn(0.5 * n) / std::pow(kPi, 0.5 * n + 1.0);
}

double a_hyp(int n, double s) {
    return s * gamma_fn(0.5 * n) / (gamma_fn(0.5 * n + s + 1.0) * gamma_fn(1.0 - s));
}

double kappa_fk(int n, double s) {
    return n / std::pow(2.0, 1.0 - 2.0 * s) * std::pow(unit_ball_volume(n), 1.0 + 2.0 * s / n) *
           (1.0 - s) * std::pow(kPi, -0.5 * n) * gamma_fn(0.5 * n + s) / gamma_fn(2.0 + s);
}

double c_tilde(double s) { return c_frac(1, s) / (2.0 * s); }

double a_ext(int n, double s) { return gamma_fn(0.5 * (n + s)) / (std::pow(kPi, 0.5 * n) * gamma_fn(0.5 * s)); }

double a_tilde_ext(int /*n*/, double s) {
    return 2.0 * gamma_fn(0.5 * (s + 1.0)) / (std::sqrt(kPi) * gamma_fn(0.5 * s));
}

double phi_halfspace(int n, double s) {
    return 2.0 * std::pow(kPi, 0.5 * n - 1.0) * gamma_fn(0.5 * (s + 1.0)) * gamma_fn(0.5 * (1.0 - s)) /
           (gamma_fn(0.5 * s) * gamma_fn(0.5 * (n - s) + 1.0));
}

ConstantSet constants(const FracParams& p) {
    p.validate();
    ConstantSet k;
    k.c_frac = c_frac(p.n, p.s);
    k.gamma_torsion = gamma_torsion(p.n, p.s);
    k.gamma_poisson = gamma_poisson(p.n, p.s);
    k.a_hyp = a_hyp(p.n, p.s);
    k.kappa_fk = kappa_fk(p.n, p.s);
    k.c_tilde = c_tilde(p.s);
    k.a_ext = a_ext(p.n, p.s);
    k.a_tilde_ext = a_tilde_ext(p.n, p.s);
    k.phi_halfspace = phi_halfspace(p.n, p.s);
    return k;
}

double lambda1_lower_bound(const FracParams& p, double volume) {
    p.validate();
    if (!(volume > 0.0)) throw std::domain_error("lambda1_lower_bound: volume must be positive");
    const double n = p.n, s = p.s;
    return n / (2.0 * s) * std::pow(unit_ball_volume(p.n), 1.0 + 2.0 * s / n) * c_frac(p.n, p.s) *
           std::pow(volume, -2.0 * s / n);
}

std::string c_frac_normalization_note() {
    return "c_{n,s} = s 4^s Gamma((n+2s)/2) / (pi^{n/2} Gamma(1-s)); the variant without pi^{-n/2} is not used";
}

}  // namespace nonlocal
