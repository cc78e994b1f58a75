#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nonlocal/fraclap.hpp"

namespace nonlocal {

// f on R^n with f(-x_1, x') = f(x_1, x').
struct SymmetricProfile {
    std::function<double(const Point&)> f;
    int n = 1;
    double support_radius = kInf;
    std::vector<KinkSurface> kinks;
    std::string decay_class = "gaussian";

    // Throws std::invalid_argument if the symmetry defect exceeds 1e-12 on seeded samples.
    void validate() const;
};

// f~(z) = f(|(z_1, z_2, z_3)|, z_4, ..., z_{n+2}) on R^{n+2}
ScalarField lift_3isotropic(const SymmetricProfile& f);

// x_1 f as an antisymmetric field on R^n
ScalarField odd_extension(const SymmetricProfile& f);

// x_1 (-Delta)^s f~ at ((x_1,0,0), x') through the 3-isotropic reduction
// c_{n+2,s} (2 pi / (n+2s)) PV int_{y_1>0} y_1 (f(x)-f(y)) (|x-y|^{-n-2s} - |x*-y|^{-n-2s}) dy.
IntegralResult lifted_frac_lap_times_x1(const SymmetricProfile& f, const Point& x, const FracParams& p,
                                        const QuadSpec& q);

struct BochnerResidual {
    IntegralResult lhs;  // (-Delta)^s [x_1 f](x) in R^n
    IntegralResult rhs;  // x_1 (-Delta)^s f~ in R^{n+2}
    double residual = 0;
    double err_sum = 0;
    bool converged = true;
};

BochnerResidual bochner_residual(const SymmetricProfile& f, const Point& x, const FracParams& p, const QuadSpec& q);

// Radial jump profile r -> j_n(r) in dimension n. dj is optional; without it the derivative is
// taken by a Richardson-extrapolated central difference.
struct LevyKernel {
    std::function<double(double)> j;
    std::function<double(double)> dj;
    int n = 1;

    double derivative(double r) const;
    // Throws std::invalid_argument if j increases on a log grid of (1e-3, 1e2)
    // or if int min(1,|x|^2) j(|x|) dx does not converge.
    void validate() const;
};

// j_{n+2}(r) = -j_n'(r) / (2 pi r)
LevyKernel kernel_lift(const LevyKernel& k);

// 2 pi int_r^inf t j_{n+2}(t) dt
IntegralResult kernel_reconstruction(const LevyKernel& lifted, double r, const QuadSpec& q);

// (2 pi)^{n/2} int_0^inf (1/(2^{n/2-1} Gamma(n/2)) - (r tau)^{1-n/2} J_{n/2-1}(r tau)) r^{n-1} j_n(r) dr
IntegralResult levy_symbol(const LevyKernel& k, double tau, const QuadSpec& q);

}  // namespace nonlocal
