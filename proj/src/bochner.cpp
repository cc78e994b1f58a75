#include "nonlocal/bochner.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nonlocal {

namespace {

constexpr double kPi = std::numbers::pi;

// z^{-nu} J_nu(z) and B(z) = 1/(2^nu Gamma(nu+1)) - z^{-nu} J_nu(z), nu = n/2 - 1
double bessel_b(int n, double z) {
    const double nu = 0.5 * n - 1;
    if (z < 1.0) {
        // alternating series without the constant term
        double term = 1 / (std::pow(2.0, nu) * gamma_fn(nu + 1));
        double sum = 0;
        for (int k = 1; k < 40; ++k) {
            term *= -z * z / (4.0 * k * (k + nu));
            sum += term;
            if (std::fabs(term) < 1e-17 * std::fabs(sum)) break;
        }
        return -sum;
    }
    double ratio;
    if (n == 1)
        ratio = std::sqrt(2 / kPi) * std::cos(z);
    else if (n == 3)
        ratio = std::sqrt(2 / kPi) * std::sin(z) / z;
    else
        ratio = std::pow(z, -nu) * (z <= 100 ? bessel_j(nu, z) : std::cyl_bessel_j(nu, z));
    return 1 / (std::pow(2.0, nu) * gamma_fn(nu + 1)) - ratio;
}

}  // namespace

void SymmetricProfile::validate() const {
    if (!f) throw std::invalid_argument("SymmetricProfile: missing f");
    if (n < 1 || n > 4) throw std::invalid_argument("SymmetricProfile: dimension must be 1..4");
    SeededStream rng(0xB0C, static_cast<std::uint64_t>(n));
    for (int i = 0; i < 64; ++i) {
        Point x(n);
        for (int k = 0; k < n; ++k) x[k] = rng.uniform(-2, 2);
        double a = f(x), b = f(x.reflected());
        if (std::fabs(a - b) > 1e-12 * std::max(1.0, std::fabs(a)))
            throw std::invalid_argument("SymmetricProfile: f is not even in x_1");
    }
}

ScalarField lift_3isotropic(const SymmetricProfile& f) {
    f.validate();
    ScalarField u;
    u.dim = f.n + 2;
    u.support_radius = f.support_radius;
    auto fn = f.f;
    const int n = f.n;
    u.eval = [fn, n](const Point& z) {
        Point x(n);
        x[0] = std::sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]);
        for (int i = 1; i < n; ++i) x[i] = z[i + 2];
        return fn(x);
    };
    u.smoothness_note = "3-isotropic lift";
    return u;
}

ScalarField odd_extension(const SymmetricProfile& f) {
    ScalarField u;
    u.dim = f.n;
    u.antisymmetric = true;
    u.support_radius = f.support_radius;
    u.kinks = f.kinks;
    auto fn = f.f;
    u.eval = [fn](const Point& x) { return x[0] * fn(x); };
    return u;
}

IntegralResult lifted_frac_lap_times_x1(const SymmetricProfile& f, const Point& x, const FracParams& p,
                                        const QuadSpec& q) {
    p.validate();
    if (x.n != f.n || p.n != f.n) throw std::invalid_argument("lifted_frac_lap_times_x1: dimension mismatch");
    if (x[0] == 0) return {};
    if (x[0] < 0) {
        // x_1 (-Delta)^s f~ is odd in x_1
        IntegralResult r = lifted_frac_lap_times_x1(f, x.reflected(), p, q);
        r.value = -r.value;
        return r;
    }
    ScalarField u;
    u.dim = f.n;
    u.support_radius = f.support_radius;
    u.kinks = f.kinks;
    u.eval = f.f;
    IntegralResult r = half_space_difference_pv(u, x, f.n + 2 * p.s, 1, q);
    const double c = c_frac(f.n + 2, p.s) * 2 * kPi / (f.n + 2 * p.s);
    r.value *= c;
    r.err_estimate *= c;
    return r;
}

BochnerResidual bochner_residual(const SymmetricProfile& f, const Point& x, const FracParams& p, const QuadSpec& q) {
    f.validate();
    BochnerResidual b;
    b.lhs = frac_lap_pv(odd_extension(f), x, p, q);
    b.rhs = lifted_frac_lap_times_x1(f, x, p, q);
    b.residual = b.lhs.value - b.rhs.value;
    b.err_sum = b.lhs.err_estimate + b.rhs.err_estimate;
    b.converged = b.lhs.converged && b.rhs.converged;
    return b;
}

double LevyKernel::derivative(double r) const {
    if (dj) return dj(r);
    double h = 1e-3 * r;
    auto D = [&](double step) { return (j(r + step) - j(r - step)) / (2 * step); };
    return (4 * D(0.5 * h) - D(h)) / 3;
}

void LevyKernel::validate() const {
    if (!j) throw std::invalid_argument("LevyKernel: missing profile");
    if (n < 1 || n > 8) throw std::invalid_argument("LevyKernel: dimension must be 1..8");
    double prev = j(1e-3);
    for (int k = 1; k <= 200; ++k) {
        double cur = j(std::pow(10.0, -3 + 5.0 * k / 200));
        if (cur > prev + 1e-14 * std::fabs(prev)) throw std::invalid_argument("LevyKernel: profile is increasing");
        prev = cur;
    }
    QuadSpec q;
    q.abs_tol = 1e-10;
    q.rel_tol = 1e-8;
    auto f = [&](double r) { return std::min(1.0, r * r) * j(r) * std::pow(r, n - 1); };
    IntegralResult m = integrate_adaptive(f, 0.0, kInf, {1.0}, q);
    if (!m.converged || !std::isfinite(m.value))
        throw std::invalid_argument("LevyKernel: int min(1,|x|^2) j dx does not converge");
}

LevyKernel kernel_lift(const LevyKernel& k) {
    k.validate();
    LevyKernel out;
    out.n = k.n + 2;
    out.j = [k](double r) { return -k.derivative(r) / (2 * kPi * r); };
    return out;
}

IntegralResult kernel_reconstruction(const LevyKernel& lifted, double r, const QuadSpec& q) {
    if (!(r > 0)) throw std::domain_error("kernel_reconstruction: r must be positive");
    IntegralResult res = integrate_adaptive([&](double t) { return t * lifted.j(t); }, r, kInf, q);
    res.value *= 2 * kPi;
    res.err_estimate *= 2 * kPi;
    return res;
}

IntegralResult levy_symbol(const LevyKernel& k, double tau, const QuadSpec& q) {
    if (!(tau > 0)) throw std::domain_error("levy_symbol: tau must be positive");
    if (!k.j) throw std::invalid_argument("LevyKernel: missing profile");
    const int n = k.n;
    auto f = [&](double r) {
        if (r == 0) return 0.0;
        return bessel_b(n, r * tau) * std::pow(r, n - 1) * k.j(r);
    };
    // geometric breaks resolve the kernel scale, the others the first oscillations
    std::vector<double> br;
    for (int m = 1; m <= 8; ++m) br.push_back(m * kPi / tau);
    for (int e = -6; e <= 12; ++e) br.push_back(std::ldexp(1.0, e));
    IntegralResult res = integrate_adaptive(f, 0.0, kInf, br, q);
    const double c = std::pow(2 * kPi, 0.5 * n);
    res.value *= c;
    res.err_estimate *= c;
    return res;
}

}  // namespace nonlocal
