#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "nonlocal/fraclap.hpp"
#include "nonlocal/point.hpp"
#include "nonlocal/quadrature.hpp"
#include "nonlocal/specfun.hpp"

namespace nonlocal {

// Parametrized piece of a boundary: map from an open parameter box (optionally cut down by in_domain).
struct Chart {
    int param_dim = 1;
    Point lo, hi;
    std::function<bool(const Point&)> in_domain;  // empty = whole box
    std::function<Point(const Point&)> map;

    bool contains_param(const Point& r) const;
    // Cell-centred grid with `per_axis` points per parameter direction, filtered by in_domain.
    std::vector<Point> sample_params(int per_axis) const;
};

enum class ShapeKind { Ball, HalfSpace, Ellipsoid, InnerParallel, PerturbedDisk };

std::string to_string(ShapeKind k);

struct ShapeDescriptor {
    ShapeKind kind = ShapeKind::Ball;
    int n = 2;
    Point center;        // Ball
    double radius = 1;   // Ball radius
    double offset = 0;   // HalfSpace {x_1 < offset}
    double eps = 0;      // Ellipsoid {x_1^2/(1+eps)^2 + |x'|^2 < 1}, PerturbedDisk
    double alpha = 2;    // PerturbedDisk
    double rho = 0;      // InnerParallel distance
    std::shared_ptr<const ShapeDescriptor> base;  // InnerParallel

    bool contains(const Point& x) const;
    // Negative inside, zero on the boundary, positive outside; comparable to a distance near the boundary.
    double level(const Point& x) const;
    bool bounded() const;
    // Axis-aligned box containing the closure; throws for unbounded shapes.
    std::pair<Point, Point> bounding_box() const;
    std::vector<Chart> charts() const;
    // Throws std::invalid_argument for inconsistent fields or if chart points miss the boundary by > 1e-9.
    void validate() const;
};

ShapeDescriptor make_ball(int n, double radius, const Point& center);
ShapeDescriptor make_ball(int n, double radius = 1);
ShapeDescriptor make_halfspace(int n, double offset = 0);
ShapeDescriptor make_ellipsoid(int n, double eps);
// Omega^rho = {x in base : dist(x, boundary) > rho}; rho must be below the interior-ball radius.
ShapeDescriptor make_inner_parallel(const ShapeDescriptor& base, double rho);
ShapeDescriptor make_perturbed_disk(double eps, double alpha);

std::string shape_to_json(const ShapeDescriptor& s);
ShapeDescriptor shape_from_json(const std::string& text);

// Radius of the uniform interior ball condition (ball, ellipsoid).
double interior_ball_radius(const ShapeDescriptor& s);
// Distance from x to the boundary of a ball or ellipsoid, with the nearest boundary point.
double boundary_distance(const ShapeDescriptor& s, const Point& x, Point* nearest = nullptr);
// Outward unit normal at a boundary point of a ball or ellipsoid.
Point outward_normal(const ShapeDescriptor& s, const Point& p);

// Smallest and largest |x| over the boundary (sampled for the perturbed disk).
struct RadialBounds {
    double r_in = 0;
    double r_out = 0;
};
RadialBounds radial_bounds(const ShapeDescriptor& s, int samples = 20000);
// Circumradius minus inradius about the origin; exactly eps for the ellipsoid family.
double rho_deficit(const ShapeDescriptor& s, int samples = 20000);

// Odd C-infinity profile: 2t on (-1/4,1/4), |eta| <= 1, support in [-1/2,1/2].
double bump_eta(double t);
// eps * eta((t - eps^{1-1/alpha}) / eps^{1/alpha})
double bump_eta_scaled(double t, double eps, double alpha);

struct FamilyParams {
    double eps = 0;
    double alpha = 2;
    FracParams params{2, 0.5};

    void validate_ellipsoid() const;  // eps in [0, 1/4), n >= 2
    void validate_disk() const;       // eps in (0, 1/4), alpha > 1
};

// gamma_{n,s} / ((1+eps) 2F1((n+2s)/2, 1/2; n/2; 1-(1+eps)^2))
double ellipsoid_gamma(const FamilyParams& fp);
// gamma_{n,s,eps} (1 - x_1^2/(1+eps)^2 - |x'|^2)^s_+
double ellipsoid_torsion(const FamilyParams& fp, const Point& x);
ScalarField ellipsoid_torsion_field(const FamilyParams& fp);

// phi_eps(r) = (a_eps(|r|) sqrt(1-|r|^2), b_eps(|r|) r), r in B_1^{n-1}
Point parallel_param(const FamilyParams& fp, const Point& r);
// phi_eps as a chart of the x_1 > 0 half of the inner parallel boundary at distance 1/2
Chart parallel_chart(const FamilyParams& fp);

struct SeminormResult {
    double value = 0;       // best difference quotient found, a lower bound of the supremum
    double grid_value = 0;  // best over grid pairs only
    Point r_best, r2_best;
    std::string label = "lower bound, refined";
};
// sup over chart parameters r != r~ of |u(phi(r)) - u(phi(r~))| / |phi(r) - phi(r~)|:
// all grid pairs (grid intervals per axis, >= 64) then a compass search around the best pair.
SeminormResult boundary_seminorm(const std::function<double(const Point&)>& u, const Chart& chart, int grid,
                                 bool refine = true);

struct LimitRatioResult {
    std::vector<double> eps;
    std::vector<double> seminorms;
    std::vector<double> ratios;  // seminorm / rho(Omega_eps), rho = eps
    double extrapolated = 0;
    double extrapolation_error = 0;  // difference between the last two orders
    double predicted = 0;            // s gamma_{n,s} (3/4)^{s-1}
    bool monotone = true;            // ratios monotone in eps
    bool converging = true;          // |ratio - extrapolated| decreasing along the list
};
LimitRatioResult limit_ratio_experiment(const std::vector<double>& eps, const FracParams& p, int grid = 256);

// Value at 0 of the interpolating polynomial through (x_i, y_i) (Neville), with the change from the
// previous order as error estimate.
std::pair<double, double> extrapolate_to_zero(const std::vector<double>& x, const std::vector<double>& y);

struct CriticalPlane {
    double lambda = 0;
    double Lambda = 0;    // sup of x.e over the shape
    int bisections = 0;
};
// lambda_e: scan mu downward from Lambda, then bisect the first change of
// "reflected cap inside Omega", tested on `samples` boundary points per chart with margin 1e-9.
CriticalPlane critical_plane(const ShapeDescriptor& s, const Point& e, double tol = 1e-10, int samples = 1000);

// |{x in Omega triangle Omega' : |x.e - lambda| <= gamma}|, Omega' the reflection of Omega across x.e = lambda.
// Two-dimensional shapes only; Monte Carlo over the annuli that can contain the symmetric difference,
// doubled until the standard error is <= rel_se of the value (or below abs_floor).
IntegralResult slab_measure(const ShapeDescriptor& s, double lambda, double gamma, const Point& e, const QuadSpec& q,
                            double rel_se = 0.02, double abs_floor = 1e-9);

struct MinkowskiCheck {
    int samples = 0;
    int failures_inner = 0;  // x in Omega without a witness in Omega^rho + B_rho
    int failures_outer = 0;  // y + z (y in Omega^rho, |z| < rho) outside Omega
};
// Seeded check of Omega^rho + B_rho = Omega for an inner parallel set of a ball or ellipsoid.
MinkowskiCheck minkowski_check(const ShapeDescriptor& inner, int samples, std::uint64_t seed);

struct PowerFit {
    double exponent = 0;
    double prefactor = 0;
};
// Least-squares fit of log y = log C + p log x.
PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace nonlocal
