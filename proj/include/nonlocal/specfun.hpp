#pragma once

#include <string>

namespace nonlocal {

struct FracParams {
    int n = 1;
    double s = 0.5;

    void validate() const;  // throws std::invalid_argument unless n >= 1 and 0 < s < 1
};

struct ConstantSet {
    double c_frac = 0;         // c_{n,s}
    double gamma_torsion = 0;  // gamma_{n,s} of the torsion profile
    double gamma_poisson = 0;  // gamma_{n,s} of the Poisson kernel
    double a_hyp = 0;          // a_{n,s}, exterior torsion coefficient
    double kappa_fk = 0;       // Faber-Krahn constant kappa_{n,s}
    double c_tilde = 0;        // c_{1,s}/(2s)
    double a_ext = 0;          // extension kernel constant a(n,s)
    double a_tilde_ext = 0;    // a~(n,s)
    double phi_halfspace = 0;  // half-space extension energy
};

// Gamma via Lanczos (g = 7, 9 terms) with reflection below 1/2.
double gamma_fn(double x);
double log_gamma(double x);  // x > 0
// 1/Gamma(x), zero at the poles.
double rgamma(double x);
double beta_fn(double a, double b);

// Gauss 2F1 for real z < 1. Direct series for |z| <= 0.75, Pfaff for z < 0,
// (1-z) connection formula for z > 0.75.
double hyp2f1(double a, double b, double c, double z);
// Raw Gauss series, no transformations; throws if it fails to converge in max_terms.
double hyp2f1_series(double a, double b, double c, double z, long max_terms = 2000000);

// J_nu(x) for nu in [0,10], x in [0,100].
double bessel_j(double nu, double x);

double unit_ball_volume(int n);   // |B_1| in R^n
double unit_sphere_area(int n);   // H^{n-1}(S^{n-1})

double c_frac(int n, double s);
double gamma_torsion(int n, double s);
double gamma_poisson(int n, double s);
double a_hyp(int n, double s);
double kappa_fk(int n, double s);
double c_tilde(double s);
double a_ext(int n, double s);
double a_tilde_ext(int n, double s);
double phi_halfspace(int n, double s);

ConstantSet constants(const FracParams& p);

// (n/2s) |B_1|^{1+2s/n} c_{n,s} volume^{-2s/n}
double lambda1_lower_bound(const FracParams& p, double volume);

// Note attached to every report that depends on c_{n,s}.
std::string c_frac_normalization_note();

}  // namespace nonlocal
