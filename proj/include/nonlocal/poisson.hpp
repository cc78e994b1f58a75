#pragma once

#include <functional>
#include <vector>

#include "nonlocal/point.hpp"
#include "nonlocal/quadrature.hpp"
#include "nonlocal/specfun.hpp"

namespace nonlocal {

// Exterior data g on R^n \ B_r for the ball Poisson problem.
struct ExteriorData {
    std::function<double(const Point&)> g;
    FracParams params;
    double r = 1;
    bool antisymmetric = false;
    double decay_exponent = 0;          // claimed |g(y)| = O(|y|^{-decay_exponent})
    double support_radius = kInf;       // g = 0 beyond this radius
    std::vector<double> radial_breaks;  // radii where g is not smooth
    std::vector<double> angle_breaks;   // n = 2: polar angles in (-pi, pi] where g is not smooth

    // Throws std::invalid_argument for non-integrable decay or inconsistent fields.
    void validate() const;
};

// Largest |g(y*) + g(y)| over seeded exterior samples.
double exterior_antisymmetry_defect(const ExteriorData& d, int samples, std::uint64_t seed);

// int_{|y|>r} F(y) (|y|^2 - r^2)^{-sigma} dy in polar coordinates, n <= 3.
// half = true restricts to y_1 > 0. The (rho - r)^{-sigma} endpoint is removed by substitution.
struct ExteriorIntegral {
    int n = 1;
    double r = 1;
    double sigma = 0;
    bool half = false;
    double outer_radius = kInf;
    std::vector<double> radial_breaks;
    std::vector<double> angle_breaks;
};
IntegralResult integrate_exterior(const ExteriorIntegral& e, const FnN& F, const QuadSpec& q);
// Same with F(omega, rho, rho - r); the last argument is exact, not rounded through rho.
using RadialFn = std::function<double(const Point& omega, double rho, double excess)>;
IntegralResult integrate_exterior(const ExteriorIntegral& e, const RadialFn& F, const QuadSpec& q);

// gamma_{n,s} int_{R^n \ B_r} ((r^2-|x|^2)/(|y|^2-r^2))^s g(y) |x-y|^{-n} dy, x in B_r.
IntegralResult poisson_extend(const ExteriorData& d, const Point& x, const QuadSpec& q);

// g outside B_r, the Poisson extension inside.
double poisson_solution(const ExteriorData& d, const Point& x, const QuadSpec& q);

// Half-space folded kernel form for antisymmetric data, x in B_r^+.
IntegralResult antisym_representation(const ExteriorData& d, const Point& x, const QuadSpec& q);

// 2n gamma_{n,s} int_{R^n_+ \ B_rr^+} rr^{2s} y_1 u(y) (|y|^2 - rr^2)^{-s} |y|^{-n-2} dy
// for u the Poisson solution of d (outer radius d.r = 1), 0 < rr <= 1.
IntegralResult meanvalue_derivative(const ExteriorData& d, double rr, const QuadSpec& q);

// n(n+2) gamma_{n,s} int_0^{min(1/|y|,1)} t^{2s+n+1} (1-t^2)^{-s} dt
double psi_s_weight(const FracParams& p, const Point& y);
double psi_s_weight_radial(const FracParams& p, double rho);

// max over radii of max(psi (1+rho^{n+2s+2}), 1/(psi (1+rho^{n+2s+2}))) on a log grid in [0, rho_max].
double psi_sandwich_constant(const FracParams& p, int samples, double rho_max = 1e4);

// int_{R^n_+} x_1 |u(x)| / (1 + |x|^{n+2s+2}) dx
IntegralResult a_norm(const FnN& u, const FracParams& p, const std::vector<double>& radial_breaks, const QuadSpec& q);

struct HarnackInstance {
    double sup_ratio = 0;  // sup over B_{1/2}^+ of u/x_1 on the grid
    double inf_ratio = 0;
    double a_norm = 0;
    double sup_factor = 0;  // sup_ratio / a_norm
    double inf_factor = 0;  // inf_ratio / a_norm
    bool converged = true;
};

// Grid of `per_axis` points per coordinate in B_{1/2}^+ (n <= 2).
HarnackInstance harnack_instance(const ExteriorData& d, int per_axis, const QuadSpec& q);

// zeta_R(x) = R zeta_1(x/R), zeta_1(x) = 2 a_s x (1-x^2)^s int_1^inf dt / ((t^2-x^2)(t^2-1)^s), a_s = sin(pi s)/pi.
IntegralResult zeta_interval(double R, double s, double x, const QuadSpec& q);
double zeta_weight_a(double s);
// 2 a_s int_1^inf dt / (t^2 (t^2-1)^s) in closed form
double c0_limit(double s);
IntegralResult c0_limit_quadrature(double s, const QuadSpec& q);

}  // namespace nonlocal
