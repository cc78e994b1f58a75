#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "nonlocal/point.hpp"

namespace nonlocal {

struct QuadSpec {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_refinements = 4000;       // subinterval budget of one adaptive 1-D integral
    std::vector<double> pv_cutoffs;   // strictly decreasing; empty = automatic schedule
    long mc_samples = 200000;
    std::uint64_t rng_seed = 42;

    void validate() const;
};

struct IntegralResult {
    double value = 0;
    double err_estimate = 0;
    long evaluations = 0;
    bool converged = true;

    IntegralResult& operator+=(const IntegralResult& o) {
        value += o.value;
        err_estimate += o.err_estimate;
        evaluations += o.evaluations;
        converged = converged && o.converged;
        return *this;
    }
};

// Neumaier compensated summation.
class CompensatedSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0, comp_ = 0;
};

using Fn1 = std::function<double(double)>;
using FnN = std::function<double(const Point&)>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Globally adaptive Gauss-Kronrod (G10/K21). Either limit may be infinite.
IntegralResult integrate_adaptive(const Fn1& f, double a, double b, const QuadSpec& q);

// Same, with interior break points (sorted or not; points outside (a,b) are ignored).
IntegralResult integrate_adaptive(const Fn1& f, double a, double b, std::vector<double> breaks,
                                  const QuadSpec& q);

// Iterated adaptive quadrature over an axis-aligned box, n <= 3.
IntegralResult integrate_box(const FnN& f, const Point& lo, const Point& hi, const QuadSpec& q);

// Principal value lim_{eps->0} of the integral over {|y - x0| > eps} of a kernel-type
// integrand. Pairs y = x0 +- rho*omega are summed before integrating in rho, the
// cutoff sequence is extrapolated with Richardson steps of orders p, p+2, p+4, ...
struct PvProblem {
    int n = 1;
    Point x0;
    FnN integrand;
    // Break points in rho along x0 + rho*omega, rho > 0. Called for omega and -omega.
    std::function<void(const Point& omega, std::vector<double>& rho_breaks)> ray_breaks;
    std::vector<double> angle_breaks;  // n = 2 only: angles in (0, pi)
    double outer_radius = kInf;        // rho is integrated up to here
    double leading_exponent = 1.0;     // I(eps) - I ~ eps^p
    std::vector<double> extra_exponents;  // further powers of eps in the expansion besides p, p+2, ...
    FnN regular;                          // optional integrable part, integrated without exclusion
    double first_cutoff = 0.1;         // used when QuadSpec::pv_cutoffs is empty
    int n_cutoffs = 5;
};

IntegralResult integrate_pv(const PvProblem& pb, const QuadSpec& q);

// One-dimensional convenience form: PV over [a,b] of f with singular point x0.
IntegralResult integrate_pv(const Fn1& f, double x0, double a, double b, const QuadSpec& q,
                            double leading_exponent = 1.0);

// Deterministic, seed-partitioned random stream.
class SeededStream {
public:
    SeededStream(std::uint64_t seed, std::uint64_t stream);
    double uniform();              // [0,1)
    double uniform(double a, double b);
    double normal();
    std::uint64_t next_u64() { return eng_(); }

private:
    std::mt19937_64 eng_;
    std::normal_distribution<double> nd_{0.0, 1.0};
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

struct McRegion {
    Point lo, hi;                                  // bounding box
    std::function<bool(const Point&)> contains;    // empty = whole box
};

// Hit-or-miss Monte Carlo; err_estimate is the sample standard error.
IntegralResult integrate_mc(const FnN& f, const McRegion& region, const QuadSpec& q);

}  // namespace nonlocal
