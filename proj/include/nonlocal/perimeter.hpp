#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "nonlocal/geometry.hpp"
#include "nonlocal/quadrature.hpp"
#include "nonlocal/specfun.hpp"

namespace nonlocal {

// Order sigma in (0,1) of the perimeter kernel |x-y|^{-n-sigma}. The kernel power is carried
// explicitly so it is never confused with the n+2s convention of the fractional Laplacian.
struct PerimeterKernel {
    int n = 2;
    double sigma = 0.5;

    double power() const { return n + sigma; }
    void validate() const;  // 1 <= n <= 6, 0 < sigma < 1
};

// Intersection of shapes and shape complements; no parts = the whole space.
struct Region {
    struct Part {
        ShapeDescriptor shape;
        bool complement = false;
    };
    int n = 2;
    std::vector<Part> parts;

    bool contains(const Point& x) const;
    // Some part is a bounded shape taken without complement.
    bool bounded() const;
};

Region region_of(const ShapeDescriptor& s);
Region complement_of(const ShapeDescriptor& s);
Region intersect(const Region& a, const Region& b);

// Sorted disjoint open intervals in the line parameter; endpoints may be +-inf.
using IntervalList = std::vector<std::pair<double, double>>;

// {t : x0 + t*omega in s}, |omega| = 1. Ball, half-space and ellipsoid only.
IntervalList shape_chord(const ShapeDescriptor& s, const Point& x0, const Point& omega);
IntervalList region_chord(const Region& r, const Point& x0, const Point& omega);

// int_I int_J |t - u|^{-1-sigma} du dt for intervals I entirely before J.
// Infinite when I starts at -inf and J ends at +inf.
double interval_pair_kernel(std::pair<double, double> I, std::pair<double, double> J, double sigma);
// Sum of interval_pair_kernel over all pairs, each pair ordered along the line.
double line_interaction(const IntervalList& a, const IntervalList& b, double sigma);

struct SetPair {
    Region A, B;
    PerimeterKernel kernel;

    // Throws std::invalid_argument if a seeded sample of `samples` points finds a point in both,
    // or if neither set is bounded.
    void validate(int samples = 20000, std::uint64_t seed = 7) const;
};

// I(A,B) = int_A int_B |x-y|^{-n-sigma} dy dx, written over lines:
// I = int_{S^{n-1}/+-} dw int_{w-perp} dz sum over chord pairs. Planar sets use nested adaptive
// quadrature in (angle, offset), n = 1 is exact, n >= 3 samples (w, z) by Monte Carlo.
IntegralResult interaction(const SetPair& pair, const QuadSpec& q);

struct PerimeterResult {
    IntegralResult total;
    IntegralResult inside;        // I(E cap Omega, E^c cap Omega)
    IntegralResult cross_in_out;  // I(E cap Omega, E^c minus Omega)
    IntegralResult cross_out_in;  // I(E minus Omega, E^c cap Omega)
};

// Per_s(E; Omega) as the sum of the three interaction terms; Omega must be bounded.
PerimeterResult frac_perimeter(const ShapeDescriptor& E, const ShapeDescriptor& Omega, const PerimeterKernel& k,
                               const QuadSpec& q);

// Classical perimeter of E inside the ball B_rho(0): ball E (entirely inside or outside B_rho)
// or half-space {x_1 < a}.
double classical_perimeter_in_ball(const ShapeDescriptor& E, double rho);

struct InterpolationResult {
    IntegralResult lhs;  // Per_s(E; B_R)
    double rhs = 0;      // eps^{-(1-s)/s} R^{1-s}/(1-s) Per(E; B_{(1+eps^{-1/s})R}) + eps R^{n-s}/s
    double tail = 0;     // the second summand alone
    double ratio = 0;
};
// eps must lie in (0, 3^{-1/s}); domain_error otherwise.
InterpolationResult interpolation_check(const ShapeDescriptor& E, double R, double eps, const PerimeterKernel& k,
                                        const QuadSpec& q);

struct HalfspaceEnergy {
    double closed_form = 0;
    IntegralResult radial;   // int_0^1 r^{-s} (1-r^2)^{(n-1)/2} dr
    IntegralResult angular;  // int_0^pi sin^{s-1} theta d theta
    double product = 0;      // a~(n,s)^2 omega_{n-1} radial angular
};
HalfspaceEnergy halfspace_energy(const FracParams& p, const QuadSpec& q);

struct MomentResult {
    int n = 3;
    double ball_exact = 0;    // 3 |S^{n-1}| / (n (n+2) (n+4))
    double sphere_exact = 0;  // 3 |S^{n-1}| / (n (n+2))
    IntegralResult ball_quad, sphere_quad;
    IntegralResult ball_mc, sphere_mc;  // err_estimate = standard error
};
// int_{B_1} x_1^4 dx and int_{S^{n-1}} theta_1^4 dH^{n-1}.
MomentResult moment_integrals(int n, const QuadSpec& q);

}  // namespace nonlocal
