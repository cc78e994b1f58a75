#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nonlocal/point.hpp"
#include "nonlocal/quadrature.hpp"
#include "nonlocal/specfun.hpp"

namespace nonlocal {

// Axis-aligned ellipsoid {sum ((y_i - center_i)/semi_axes_i)^2 = 1} across which a field is not smooth.
struct KinkSurface {
    Point center;
    Point semi_axes;
};

struct ScalarField {
    std::function<double(const Point&)> eval;
    int dim = 1;
    bool antisymmetric = false;
    double support_radius = kInf;  // eval vanishes outside B_{support_radius}(0)
    std::vector<KinkSurface> kinks;
    std::string smoothness_note;

    double operator()(const Point& x) const { return eval(x); }
};

// Checks u(x*) = -u(x) on `samples` seeded points of [-R,R]^n; returns the largest defect.
double antisymmetry_defect(const ScalarField& u, int samples, std::uint64_t seed, double R = 2.0);

// Torsion profile gamma_{n,s}(rho^2 - |x - center|^2)^s_+ as a ScalarField.
ScalarField torsion_profile(const FracParams& p, const Point& center, double rho);

// c_{n,s} PV int (u(x) - u(y)) |x - y|^{-n-2s} dy, n <= 3.
IntegralResult frac_lap_pv(const ScalarField& u, const Point& x, const FracParams& p, const QuadSpec& q);

// Half-space form for antisymmetric u, x_1 > 0:
// c_{n,s} PV int_{y_1>0} (u(x)-u(y)) (|x-y|^{-n-2s} - |x*-y|^{-n-2s}) dy + (c_{1,s}/s) u(x) x_1^{-2s}.
IntegralResult frac_lap_antisym(const ScalarField& u, const Point& x, const FracParams& p, const QuadSpec& q);

// PV int_{y_1>0} y_1^k (u(x)-u(y)) (|x-y|^{-e} - |x*-y|^{-e}) dy for x_1 > 0, k = weight_power, e in (n, n+2).
IntegralResult half_space_difference_pv(const ScalarField& u, const Point& x, double e, int weight_power,
                                        const QuadSpec& q);

// Real number or the value -infinity, kept apart from floating arithmetic.
struct ExtendedReal {
    double value = 0;
    bool neg_inf = false;

    static ExtendedReal minus_infinity() { return {0.0, true}; }
    bool finite() const { return !neg_inf; }
};

// Homogeneous polynomial of degree `degree` given as a callable.
struct SolidHarmonic {
    int degree = 0;
    std::function<double(const Point&)> P;
};

// Throws std::invalid_argument unless |Delta P| <= 1e-8 scale(P) at 20 seeded points (5-point stencil).
void validate_solid_harmonic(const SolidHarmonic& h, int n);

// (-Delta)^s [P(x) gamma_{n,s}(rho^2 - |x|^2)^s_+] in closed form.
ExtendedReal torsion_closed_form(const SolidHarmonic& h, double rho, const Point& x, const FracParams& p);

struct BarrierSpec {
    Point a;
    double rho = 1;
    FracParams params;

    void validate() const;
    Point a_star() const { return a.reflected(); }  // a - 2 a_1 e_1
};

// x_1 (psi_{B_rho(a)}(x) + psi_{B_rho(a*)}(x))
double barrier_eval(const BarrierSpec& b, const Point& x);
ScalarField barrier_field(const BarrierSpec& b);

struct StabilityValues {
    double K = 0, F = 0, f = 0, g = 0;
};

StabilityValues stability_functions(double tau, const FracParams& p);

// F(1-) from samples at tau = 1 - 1e-6, 1 - 1e-8, eliminating the (1 - tau)^s term of the expansion at 1.
double extrapolate_F_at_one(const FracParams& p);

// Cubic-spline table of F on [0, tau_max]; built once, then read-only.
class StabilityTable {
public:
    StabilityTable(const FracParams& p, int intervals = 4096, double tau_max = 0.95);
    StabilityValues operator()(double tau) const;
    double tau_max() const { return tau_max_; }

private:
    FracParams p_;
    double tau_max_, h_;
    std::vector<double> F_, M_;  // values and second derivatives
};

enum class BarrierRegion { lens, outside_reflected };

struct BarrierLaplacian {
    double value = 0;
    BarrierRegion region = BarrierRegion::lens;
    double tau = 0;  // |(x - a*)/rho|^{-2} in the outside region
};

// Closed-form (-Delta)^s phi at x in B_rho^+(a) off the reflected sphere.
// Throws std::domain_error on the sphere |x - a*| = rho and outside B_rho^+(a).
BarrierLaplacian barrier_frac_lap(const BarrierSpec& b, const Point& x, const StabilityTable* table = nullptr);

// Same quantity assembled from the two torsion closed forms of x_1 psi_{B(a)} and x_1 psi_{B(a*)}.
double barrier_frac_lap_from_torsion(const BarrierSpec& b, const Point& x);

}  // namespace nonlocal
