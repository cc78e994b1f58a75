#include "nonlocal/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nonlocal {

namespace {

constexpr double kPi = std::numbers::pi;

void require_params(const FracParams& p) {
    p.validate();
    if (p.n > 3) throw std::invalid_argument("poisson: dimension must be at most 3");
}

}  // namespace

void ExteriorData::validate() const {
    require_params(params);
    if (!g) throw std::invalid_argument("ExteriorData: missing g");
    if (!(r > 0)) throw std::invalid_argument("ExteriorData: radius must be positive");
    if (!(support_radius > r)) throw std::invalid_argument("ExteriorData: support must extend beyond B_r");
    // |g| |y|^{-n-2s} must be integrable at infinity
    if (std::isinf(support_radius) && !(decay_exponent > -2 * params.s))
        throw std::invalid_argument("ExteriorData: data not integrable against the Poisson kernel");
}

double exterior_antisymmetry_defect(const ExteriorData& d, int samples, std::uint64_t seed) {
    SeededStream rng(seed, 7);
    double R = std::isinf(d.support_radius) ? 4 * d.r : d.support_radius;
    double worst = 0;
    for (int i = 0; i < samples;) {
        Point y(d.params.n);
        for (int k = 0; k < y.n; ++k) y[k] = rng.uniform(-R, R);
        if (y.norm() <= d.r) continue;
        worst = std::max(worst, std::fabs(d.g(y.reflected()) + d.g(y)));
        ++i;
    }
    return worst;
}

IntegralResult integrate_exterior(const ExteriorIntegral& e, const FnN& F, const QuadSpec& q) {
    return integrate_exterior(e, RadialFn([&](const Point& omega, double rho, double) { return F(rho * omega); }), q);
}

IntegralResult integrate_exterior(const ExteriorIntegral& e, const RadialFn& F, const QuadSpec& q) {
    if (e.n < 1 || e.n > 3) throw std::invalid_argument("integrate_exterior: dimension must be 1..3");
    if (!(e.sigma >= 0 && e.sigma < 1)) throw std::invalid_argument("integrate_exterior: sigma must lie in [0,1)");
    const double P = 1 / (1 - e.sigma);
    // rho = r + w^P turns (rho - r)^{-sigma} d rho into P dw
    const double w_max = std::isinf(e.outer_radius) ? kInf : std::pow(e.outer_radius - e.r, 1 / P);
    std::vector<double> w_breaks;
    for (double b : e.radial_breaks)
        if (b > e.r && b < e.outer_radius) w_breaks.push_back(std::pow(b - e.r, 1 / P));

    bool ok = true;
    double inner_err = 0;
    long evals = 0;
    auto radial = [&](const Point& omega) {
        auto G = [&](double w) {
            double excess = std::pow(w, P);
            double rho = e.r + excess;
            double jac = P * std::pow(rho + e.r, -e.sigma) * std::pow(rho, e.n - 1);
            if (jac == 0) return 0.0;
            return jac * F(omega, rho, excess);
        };
        IntegralResult res = integrate_adaptive(G, 0.0, w_max, w_breaks, q);
        ok = ok && res.converged;
        inner_err = std::max(inner_err, res.err_estimate);
        evals += res.evaluations;
        return res.value;
    };

    IntegralResult out;
    double measure = 1;
    if (e.n == 1) {
        out.value = radial(Point{1.0});
        if (!e.half) out.value += radial(Point{-1.0});
        measure = e.half ? 1 : 2;
    } else if (e.n == 2) {
        double lo = e.half ? -kPi / 2 : -kPi, hi = e.half ? kPi / 2 : kPi;
        out = integrate_adaptive([&](double th) { return radial(Point{std::cos(th), std::sin(th)}); }, lo, hi,
                                 e.angle_breaks, q);
        measure = hi - lo;
    } else {
        double th_hi = e.half ? kPi / 2 : kPi;
        auto polar = [&](double th) {
            double st = std::sin(th), ct = std::cos(th);
            auto az = [&](double ph) { return radial(Point{ct, st * std::cos(ph), st * std::sin(ph)}); };
            IntegralResult r = integrate_adaptive(az, 0.0, 2 * kPi, q);
            ok = ok && r.converged;
            return st * r.value;
        };
        out = integrate_adaptive(polar, 0.0, th_hi, q);
        measure = 2 * kPi * th_hi;
    }
    out.err_estimate += inner_err * measure;
    out.evaluations += evals;
    out.converged = out.converged && ok;
    return out;
}

namespace {

// |y - x|^2 for y = (r + excess) w: (rho - w.x)^2 + |x - (w.x) w|^2, rho - w.x = excess + (r - w.x)
double exterior_distance2(const Point& x, const Point& omega, double r, double excess) {
    double wx = dot(omega, x);
    double along = excess + (r - wx);
    return along * along + axpy(x, -wx, omega).norm2();
}

}  // namespace

IntegralResult poisson_extend(const ExteriorData& d, const Point& x, const QuadSpec& q) {
    d.validate();
    const int n = d.params.n;
    if (x.n != n) throw std::invalid_argument("poisson_extend: dimension mismatch");
    double x2 = x.norm2();
    if (!(x2 < d.r * d.r)) throw std::domain_error("poisson_extend: x must lie in B_r");
    ExteriorIntegral e{n, d.r, d.params.s, false, d.support_radius, d.radial_breaks, d.angle_breaks};
    if (n == 2 && x2 > 0) e.angle_breaks.push_back(std::atan2(x[1], x[0]));
    // the kernel peaks on the scale of dist(x, boundary)
    double gap = d.r - std::sqrt(x2);
    for (double k : {1.0, 10.0, 100.0})
        if (k * gap < d.r) e.radial_breaks.push_back(d.r + k * gap);
    auto F = [&](const Point& omega, double rho, double excess) {
        return d.g(rho * omega) * std::pow(exterior_distance2(x, omega, d.r, excess), -0.5 * n);
    };
    double pre = gamma_poisson(n, d.params.s) * std::pow(d.r * d.r - x2, d.params.s);
    QuadSpec qi = q;
    qi.abs_tol = q.abs_tol / pre;  // tolerance applies to the final value
    IntegralResult res = integrate_exterior(e, F, qi);
    res.value *= pre;
    res.err_estimate *= pre;
    return res;
}

double poisson_solution(const ExteriorData& d, const Point& x, const QuadSpec& q) {
    if (x.norm() >= d.r) return d.g(x);
    return poisson_extend(d, x, q).value;
}

namespace {

void require_antisymmetric(const ExteriorData& d) {
    if (!d.antisymmetric) throw std::invalid_argument("antisymmetric data required");
    if (exterior_antisymmetry_defect(d, 64, 11) > 1e-12) throw std::invalid_argument("data is not antisymmetric");
}

}  // namespace

IntegralResult antisym_representation(const ExteriorData& d, const Point& x, const QuadSpec& q) {
    d.validate();
    require_antisymmetric(d);
    const int n = d.params.n;
    if (x.n != n) throw std::invalid_argument("antisym_representation: dimension mismatch");
    double x2 = x.norm2();
    if (!(x2 < d.r * d.r) || x[0] < 0) throw std::domain_error("antisym_representation: x must lie in B_r^+");
    if (x[0] == 0) return {};
    Point xs = x.reflected();
    ExteriorIntegral e{n, d.r, d.params.s, true, d.support_radius, d.radial_breaks, d.angle_breaks};
    if (n == 2 && x2 > 0) e.angle_breaks.push_back(std::atan2(x[1], x[0]));
    auto F = [&](const Point& omega, double rho, double excess) {
        return d.g(rho * omega) * (std::pow(exterior_distance2(x, omega, d.r, excess), -0.5 * n) -
                                   std::pow(exterior_distance2(xs, omega, d.r, excess), -0.5 * n));
    };
    double pre = gamma_poisson(n, d.params.s) * std::pow(d.r * d.r - x2, d.params.s);
    QuadSpec qi = q;
    qi.abs_tol = q.abs_tol / pre;
    IntegralResult res = integrate_exterior(e, F, qi);
    res.value *= pre;
    res.err_estimate *= pre;
    return res;
}

IntegralResult meanvalue_derivative(const ExteriorData& d, double rr, const QuadSpec& q) {
    d.validate();
    require_antisymmetric(d);
    if (d.r != 1.0) throw std::invalid_argument("meanvalue_derivative: data must be given outside B_1");
    if (!(rr > 0 && rr <= 1)) throw std::domain_error("meanvalue_derivative: radius must lie in (0,1]");
    const int n = d.params.n;
    const double s = d.params.s;
    ExteriorIntegral e{n, rr, s, true, d.support_radius, d.radial_breaks, d.angle_breaks};
    e.radial_breaks.push_back(1.0);
    bool inner_ok = true;
    auto F = [&](const Point& y) {
        double u;
        if (y.norm() >= 1) {
            u = d.g(y);
        } else {
            IntegralResult in = poisson_extend(d, y, q);
            inner_ok = inner_ok && in.converged;
            u = in.value;
        }
        return y[0] * u * std::pow(y.norm(), -n - 2);
    };
    IntegralResult res = integrate_exterior(e, F, q);
    double pre = 2 * n * gamma_poisson(n, s) * std::pow(rr, 2 * s);
    res.value *= pre;
    res.err_estimate *= pre;
    res.converged = res.converged && inner_ok;
    return res;
}

double psi_s_weight_radial(const FracParams& p, double rho) {
    require_params(p);
    if (rho < 0) throw std::domain_error("psi_s_weight: negative radius");
    const int n = p.n;
    const double s = p.s;
    const double m = rho > 1 ? 1 / rho : 1.0;
    QuadSpec q;
    q.abs_tol = 0;
    q.rel_tol = 1e-13;
    auto direct = [&](double t) { return std::pow(t, 2 * s + n + 1) * std::pow(1 - t * t, -s); };
    double split = std::min(m, 0.5);
    double I = integrate_adaptive(direct, 0.0, split, q).value;
    if (m > split) {
        // v = t^2, 1 - v = w^P with P = 1/(1-s): the (1-v)^{-s} factor is absorbed into dv
        const double P = 1 / (1 - s);
        auto h = [&](double w) { return 0.5 * P * std::pow(1 - std::pow(w, P), s + 0.5 * n); };
        double w_lo = std::pow(1 - m * m, 1 - s), w_hi = std::pow(1 - split * split, 1 - s);
        I += integrate_adaptive(h, w_lo, w_hi, q).value;
    }
    return n * (n + 2) * gamma_poisson(n, s) * I;
}

double psi_s_weight(const FracParams& p, const Point& y) { return psi_s_weight_radial(p, y.norm()); }

double psi_sandwich_constant(const FracParams& p, int samples, double rho_max) {
    if (samples < 2) throw std::invalid_argument("psi_sandwich_constant: need at least two samples");
    const double e = p.n + 2 * p.s + 2;
    double C = 1;
    auto visit = [&](double rho) {
        double v = psi_s_weight_radial(p, rho) * (1 + std::pow(rho, e));
        C = std::max({C, v, 1 / v});
    };
    visit(0.0);
    const double lo = std::log(1e-3), hi = std::log(rho_max);
    for (int i = 0; i < samples - 1; ++i) visit(std::exp(lo + (hi - lo) * i / (samples - 2)));
    return C;
}

IntegralResult a_norm(const FnN& u, const FracParams& p, const std::vector<double>& radial_breaks,
                      const QuadSpec& q) {
    require_params(p);
    const double e = p.n + 2 * p.s + 2;
    ExteriorIntegral ei{p.n, 0.0, 0.0, true, kInf, radial_breaks, {}};
    return integrate_exterior(ei, [&](const Point& x) { return x[0] * std::fabs(u(x)) / (1 + std::pow(x.norm(), e)); },
                              q);
}

HarnackInstance harnack_instance(const ExteriorData& d, int per_axis, const QuadSpec& q) {
    d.validate();
    require_antisymmetric(d);
    if (d.r != 1.0) throw std::invalid_argument("harnack_instance: data must be given outside B_1");
    if (d.params.n > 2) throw std::invalid_argument("harnack_instance: n must be 1 or 2");
    if (per_axis < 1) throw std::invalid_argument("harnack_instance: empty grid");
    HarnackInstance h;
    h.sup_ratio = -kInf;
    h.inf_ratio = kInf;
    auto visit = [&](const Point& x) {
        IntegralResult r = poisson_extend(d, x, q);
        h.converged = h.converged && r.converged;
        double v = r.value / x[0];
        h.sup_ratio = std::max(h.sup_ratio, v);
        h.inf_ratio = std::min(h.inf_ratio, v);
    };
    for (int i = 1; i <= per_axis; ++i) {
        double x1 = 0.5 * i / per_axis;
        if (d.params.n == 1) {
            visit(Point{x1});
            continue;
        }
        for (int j = 0; j <= 2 * per_axis; ++j) {
            double x2 = -0.5 + 0.5 * j / per_axis;
            if (x1 * x1 + x2 * x2 <= 0.25) visit(Point{x1, x2});
        }
    }
    // the comparability factors are recorded to a few digits only
    QuadSpec qn = q;
    qn.abs_tol = std::max(q.abs_tol, 1e-6);
    qn.rel_tol = std::max(q.rel_tol, 1e-6);
    const int n = d.params.n;
    const double s = d.params.s, e = n + 2 * s + 2;
    auto weight = [&](const Point& x, double u) { return x[0] * std::fabs(u) / (1 + std::pow(x.norm(), e)); };

    ExteriorIntegral ext{n, 1.0, 0.0, true, d.support_radius, d.radial_breaks, d.angle_breaks};
    IntegralResult A = integrate_exterior(ext, [&](const Point& y) { return weight(y, d.g(y)); }, qn);

    // inside B_1, u ~ (1 - rho)^s: substitute 1 - rho = v^{1/s}
    bool inner_ok = true;
    auto radial = [&](const Point& omega) {
        auto f = [&](double v) {
            double gap = std::pow(v, 1 / s);
            double rho = 1 - gap;
            if (rho <= 0 || rho >= 1) return 0.0;
            Point y = rho * omega;
            IntegralResult r = poisson_extend(d, y, qn);
            inner_ok = inner_ok && r.converged;
            return std::pow(rho, n - 1) * weight(y, r.value) * gap / (s * v);
        };
        IntegralResult r = integrate_adaptive(f, 0.0, 1.0, qn);
        inner_ok = inner_ok && r.converged;
        return r.value;
    };
    IntegralResult inside;
    if (n == 1)
        inside.value = radial(Point{1.0});
    else
        inside = integrate_adaptive([&](double th) { return radial(Point{std::cos(th), std::sin(th)}); }, -kPi / 2,
                                    kPi / 2, qn);
    A += inside;
    h.a_norm = A.value;
    h.converged = h.converged && A.converged && inner_ok;
    h.sup_factor = h.sup_ratio / h.a_norm;
    h.inf_factor = h.inf_ratio / h.a_norm;
    return h;
}

double zeta_weight_a(double s) {
    FracParams{1, s}.validate();
    return std::sin(kPi * s) / kPi;
}

namespace {

// int_1^inf dt / ((t^2 - xi^2)(t^2 - 1)^s) with t = 1 + w^P
IntegralResult zeta_integral(double s, double xi, const QuadSpec& q) {
    const double P = 1 / (1 - s);
    auto f = [&](double w) {
        double t = 1 + std::pow(w, P);
        return P * std::pow(t + 1, -s) / ((t - xi) * (t + xi));
    };
    return integrate_adaptive(f, 0.0, kInf, q);
}

}  // namespace

IntegralResult zeta_interval(double R, double s, double x, const QuadSpec& q) {
    if (!(R > 0)) throw std::invalid_argument("zeta_interval: R must be positive");
    double a = zeta_weight_a(s);
    if (!(std::fabs(x) < R)) throw std::domain_error("zeta_interval: |x| must be below R");
    double xi = x / R;
    IntegralResult J = zeta_integral(s, xi, q);
    double pre = R * 2 * a * xi * std::pow(1 - xi * xi, s);
    J.value *= pre;
    J.err_estimate *= std::fabs(pre);
    return J;
}

double c0_limit(double s) { return zeta_weight_a(s) * beta_fn(s + 0.5, 1 - s); }

IntegralResult c0_limit_quadrature(double s, const QuadSpec& q) {
    double a = zeta_weight_a(s);
    IntegralResult J = zeta_integral(s, 0.0, q);
    J.value *= 2 * a;
    J.err_estimate *= 2 * a;
    return J;
}

}  // namespace nonlocal
