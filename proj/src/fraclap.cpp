#include "nonlocal/fraclap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace nonlocal {

namespace {

constexpr double kPi = std::numbers::pi;

// Positive roots rho of |((x - c) + rho w) / a| = 1.
void ellipsoid_crossings(const KinkSurface& k, const Point& x, const Point& w, std::vector<double>& out) {
    double A = 0, B = 0, C = -1;
    for (int i = 0; i < x.n; ++i) {
        double ai = k.semi_axes[i], d = x[i] - k.center[i];
        A += w[i] * w[i] / (ai * ai);
        B += d * w[i] / (ai * ai);
        C += d * d / (ai * ai);
    }
    if (A == 0) return;
    double disc = B * B - A * C;
    if (disc < 0) return;
    double sq = std::sqrt(disc);
    for (double r : {(-B - sq) / A, (-B + sq) / A})
        if (r > 0 && std::isfinite(r)) out.push_back(r);
}

// Lower bound of the distance from x to the surface of k.
double kink_distance(const KinkSurface& k, const Point& x) {
    double q = 0, amin = kInf;
    for (int i = 0; i < x.n; ++i) {
        double d = (x[i] - k.center[i]) / k.semi_axes[i];
        q += d * d;
        amin = std::min(amin, k.semi_axes[i]);
    }
    return amin * std::fabs(std::sqrt(q) - 1.0);
}

// Directions in [0, pi) along which a line through x is tangent to the ellipse k (n = 2).
void tangent_angles(const KinkSurface& k, const Point& x, std::vector<double>& out) {
    double px = (x[0] - k.center[0]) / k.semi_axes[0], py = (x[1] - k.center[1]) / k.semi_axes[1];
    double d = std::hypot(px, py);
    if (d <= 1.0) return;
    double phi0 = std::atan2(-py, -px), half = std::asin(1.0 / d);
    for (double phi : {phi0 - half, phi0 + half}) {
        double th = std::atan2(k.semi_axes[1] * std::sin(phi), k.semi_axes[0] * std::cos(phi));
        th = std::fmod(th, kPi);
        if (th < 0) th += kPi;
        if (th > 0 && th < kPi) out.push_back(th);
    }
}

std::vector<KinkSurface> kinks_with_support(const ScalarField& u) {
    std::vector<KinkSurface> ks = u.kinks;
    if (std::isfinite(u.support_radius)) {
        KinkSurface s{Point(u.dim), Point(u.dim)};
        for (int i = 0; i < u.dim; ++i) s.semi_axes[i] = u.support_radius;
        ks.push_back(s);
    }
    return ks;
}

void check_dims(const ScalarField& u, const Point& x, const FracParams& p) {
    p.validate();
    if (p.n > 3) throw std::invalid_argument("fractional Laplacian quadrature supports n <= 3");
    if (u.dim != p.n || x.n != p.n) throw std::invalid_argument("dimension mismatch between field, point and params");
}

double first_cutoff(const std::vector<KinkSurface>& ks, const Point& x) {
    double c = 0.1;
    for (const auto& k : ks) c = std::min(c, 0.25 * kink_distance(k, x));
    if (!(c > 0)) throw std::domain_error("evaluation point lies on a kink surface of the field");
    return c;
}

}  // namespace

double antisymmetry_defect(const ScalarField& u, int samples, std::uint64_t seed, double R) {
    SeededStream rng(seed, 0);
    double worst = 0;
    Point x(u.dim);
    for (int k = 0; k < samples; ++k) {
        for (int i = 0; i < u.dim; ++i) x[i] = rng.uniform(-R, R);
        worst = std::max(worst, std::fabs(u(x.reflected()) + u(x)));
    }
    return worst;
}

ScalarField torsion_profile(const FracParams& p, const Point& center, double rho) {
    p.validate();
    if (!(rho > 0)) throw std::invalid_argument("torsion_profile: rho must be positive");
    const double g = gamma_torsion(p.n, p.s), s = p.s;
    ScalarField u;
    u.dim = p.n;
    u.eval = [=](const Point& x) {
        double t = rho * rho - (x - center).norm2();
        return t > 0 ? g * std::pow(t, s) : 0.0;
    };
    u.support_radius = center.norm() + rho;
    KinkSurface k{center, Point(p.n)};
    for (int i = 0; i < p.n; ++i) k.semi_axes[i] = rho;
    u.kinks.push_back(k);
    u.smoothness_note = "C^infinity inside the ball, Holder-s across its boundary";
    return u;
}

IntegralResult frac_lap_pv(const ScalarField& u, const Point& x, const FracParams& p, const QuadSpec& q) {
    check_dims(u, x, p);
    const int n = p.n;
    const double e = n + 2 * p.s;
    const double ux = u(x);
    std::vector<KinkSurface> ks = kinks_with_support(u);

    PvProblem pb;
    pb.n = n;
    pb.x0 = x;
    pb.integrand = [&](const Point& y) { return (ux - u(y)) * std::pow((y - x).norm2(), -0.5 * e); };
    pb.ray_breaks = [&](const Point& w, std::vector<double>& br) {
        for (const auto& k : ks) ellipsoid_crossings(k, x, w, br);
    };
    if (n == 2)
        for (const auto& k : ks) tangent_angles(k, x, pb.angle_breaks);
    double R = std::isfinite(u.support_radius) ? x.norm() + u.support_radius : kInf;
    pb.outer_radius = R;
    pb.leading_exponent = 2 - 2 * p.s;
    pb.first_cutoff = first_cutoff(ks, x);

    IntegralResult r = integrate_pv(pb, q);
    if (std::isfinite(R)) r.value += ux * unit_sphere_area(n) * std::pow(R, -2 * p.s) / (2 * p.s);
    const double c = c_frac(n, p.s);
    r.value *= c;
    r.err_estimate *= c;
    return r;
}

IntegralResult half_space_difference_pv(const ScalarField& u, const Point& x, double e, int weight_power,
                                        const QuadSpec& q) {
    if (x.n != u.dim) throw std::invalid_argument("half_space_difference_pv: dimension mismatch");
    if (!(x[0] > 0)) throw std::domain_error("half_space_difference_pv: x_1 must be positive");
    if (weight_power < 0) throw std::invalid_argument("half_space_difference_pv: negative weight power");
    const int n = x.n;
    const double ux = u(x);
    const Point xs = x.reflected();
    std::vector<KinkSurface> ks = kinks_with_support(u);
    auto w = [weight_power](const Point& y) { return weight_power == 0 ? 1.0 : std::pow(y[0], weight_power); };

    PvProblem pb;
    pb.n = n;
    pb.x0 = x;
    // Away from x the two kernels are combined: A^{-e/2} - (A + 4 x_1 y_1)^{-e/2} without cancellation.
    // The PV cores only reach rho < x_1 / 2, so the split below is what they see.
    const double far2 = x[0] * x[0];
    pb.integrand = [&](const Point& y) {
        if (!(y[0] > 0)) return 0.0;
        double A = (y - x).norm2();
        if (A > far2) {
            double k = -std::pow(A, -0.5 * e) * std::expm1(-0.5 * e * std::log1p(4 * x[0] * y[0] / A));
            return k == 0 ? 0.0 : w(y) * (ux - u(y)) * k;
        }
        return w(y) * (ux - u(y)) * std::pow(A, -0.5 * e);
    };
    pb.regular = [&](const Point& y) {
        if (!(y[0] > 0) || (y - x).norm2() > far2) return 0.0;
        return w(y) * (u(y) - ux) * std::pow((y - xs).norm2(), -0.5 * e);
    };
    pb.ray_breaks = [&](const Point& dir, std::vector<double>& br) {
        for (const auto& k : ks) ellipsoid_crossings(k, x, dir, br);
        if (dir[0] < 0) br.push_back(x[0] / -dir[0]);
    };
    if (n == 2)
        for (const auto& k : ks) tangent_angles(k, x, pb.angle_breaks);
    pb.outer_radius = kInf;
    pb.leading_exponent = e - n > 0 ? 2 - (e - n) : 1.0;
    pb.first_cutoff = std::min(first_cutoff(ks, x), 0.5 * x[0]);
    return integrate_pv(pb, q);
}

IntegralResult frac_lap_antisym(const ScalarField& u, const Point& x, const FracParams& p, const QuadSpec& q) {
    check_dims(u, x, p);
    if (!(x[0] > 0)) throw std::domain_error("frac_lap_antisym: x_1 must be positive");
    IntegralResult r = half_space_difference_pv(u, x, p.n + 2 * p.s, 0, q);
    const double c = c_frac(p.n, p.s);
    r.value = c * r.value + c_frac(1, p.s) / p.s * u(x) * std::pow(x[0], -2 * p.s);
    r.err_estimate *= c;
    return r;
}

void validate_solid_harmonic(const SolidHarmonic& h, int n) {
    if (!h.P) throw std::invalid_argument("solid harmonic: empty polynomial");
    if (h.degree < 0) throw std::invalid_argument("solid harmonic: negative degree");
    SeededStream rng(0x5017, static_cast<std::uint64_t>(n));
    std::vector<Point> pts;
    double scale = 0;
    for (int k = 0; k < 20; ++k) {
        Point x(n);
        for (int i = 0; i < n; ++i) x[i] = rng.uniform(-1, 1);
        pts.push_back(x);
        scale = std::max(scale, std::fabs(h.P(x)));
    }
    scale = std::max(scale, 1e-300);
    auto lap = [&](const Point& x, double step) {
        double v = -2.0 * n * h.P(x);
        for (int i = 0; i < n; ++i) {
            Point a = x, b = x;
            a[i] += step;
            b[i] -= step;
            v += h.P(a) + h.P(b);
        }
        return v / (step * step);
    };
    for (const auto& x : pts) {
        // one Richardson step removes the h^2 term of the stencil
        double L = (4.0 * lap(x, 5e-3) - lap(x, 1e-2)) / 3.0;
        if (std::fabs(L) > 1e-8 * scale) throw std::invalid_argument("solid harmonic: Laplacian does not vanish");
    }
}

ExtendedReal torsion_closed_form(const SolidHarmonic& h, double rho, const Point& x, const FracParams& p) {
    p.validate();
    if (!(rho > 0)) throw std::invalid_argument("torsion_closed_form: rho must be positive");
    if (x.n != p.n) throw std::invalid_argument("torsion_closed_form: dimension mismatch");
    validate_solid_harmonic(h, p.n);
    const int n = p.n, l = h.degree;
    const double s = p.s;
    const double r = x.norm() / rho;
    if (std::fabs(r - 1.0) <= 4 * std::numeric_limits<double>::epsilon()) return ExtendedReal::minus_infinity();
    const double ratio = gamma_torsion(n, s) / gamma_torsion(n + 2 * l, s);
    const double Px = h.P(x);
    if (r < 1) return {ratio * Px, false};
    const double m = 0.5 * (n + 2 * s) + l;
    double F = hyp2f1(m, s + 1, m + 1, 1.0 / (r * r));
    return {-ratio * Px * a_hyp(n + 2 * l, s) * std::pow(r, -n - 2 * s - 2 * l) * F, false};
}

void BarrierSpec::validate() const {
    params.validate();
    if (a.n != params.n) throw std::invalid_argument("BarrierSpec: centre has wrong dimension");
    if (!(rho > 0)) throw std::invalid_argument("BarrierSpec: rho must be positive");
    if (!(a[0] >= 0)) throw std::invalid_argument("BarrierSpec: a_1 must be non-negative");
}

double barrier_eval(const BarrierSpec& b, const Point& x) {
    const double g = gamma_torsion(b.params.n, b.params.s), s = b.params.s, r2 = b.rho * b.rho;
    auto psi = [&](const Point& c) {
        double t = r2 - (x - c).norm2();
        return t > 0 ? g * std::pow(t, s) : 0.0;
    };
    return x[0] * (psi(b.a) + psi(b.a_star()));
}

ScalarField barrier_field(const BarrierSpec& b) {
    b.validate();
    ScalarField u;
    u.dim = b.params.n;
    u.antisymmetric = true;
    u.eval = [b](const Point& x) { return barrier_eval(b, x); };
    u.support_radius = b.a.norm() + b.rho;
    for (const Point& c : {b.a, b.a_star()}) {
        KinkSurface k{c, Point(u.dim)};
        for (int i = 0; i < u.dim; ++i) k.semi_axes[i] = b.rho;
        u.kinks.push_back(k);
    }
    u.smoothness_note = "x_1 times two torsion profiles; Holder-s across both spheres";
    return u;
}

StabilityValues stability_functions(double tau, const FracParams& p) {
    p.validate();
    if (!(tau > 0 && tau < 1)) throw std::domain_error("stability_functions: tau must lie in (0,1)");
    const double n = p.n, s = p.s;
    StabilityValues v;
    v.K = a_hyp(p.n, s) * std::pow(1 - tau, -s) * std::pow(tau, 0.5 * (n + 2 * s));
    v.F = hyp2f1(1.0, 0.5 * n, 0.5 * (n + 2 * s) + 1, tau);
    v.f = 1 - v.K * (v.F - 1);
    v.g = v.K * ((n + 2 * s) / (2 * s) - v.F) - 1;
    return v;
}

double extrapolate_F_at_one(const FracParams& p) {
    p.validate();
    const double t1 = 1e-6, t2 = 1e-8;
    const double F1 = stability_functions(1 - t1, p).F, F2 = stability_functions(1 - t2, p).F;
    const double w1 = std::pow(t1, p.s), w2 = std::pow(t2, p.s);
    return (F2 * w1 - F1 * w2) / (w1 - w2);
}

StabilityTable::StabilityTable(const FracParams& p, int intervals, double tau_max)
    : p_(p), tau_max_(tau_max), h_(tau_max / intervals) {
    p.validate();
    if (intervals < 4 || !(tau_max > 0 && tau_max < 1)) throw std::invalid_argument("StabilityTable: bad grid");
    const double a = 1, b = 0.5 * p.n, c = 0.5 * (p.n + 2 * p.s) + 1;
    const int N = intervals;
    F_.resize(N + 1);
    M_.assign(N + 1, 0.0);
    for (int i = 0; i <= N; ++i) F_[i] = hyp2f1(a, b, c, i * h_);
    // exact second derivatives at both ends, tridiagonal solve inside
    auto d2 = [&](double t) { return a * (a + 1) * b * (b + 1) / (c * (c + 1)) * hyp2f1(a + 2, b + 2, c + 2, t); };
    M_[0] = d2(0.0);
    M_[N] = d2(tau_max);
    std::vector<double> cp(N + 1, 0.0), dp(N + 1, 0.0);
    for (int i = 1; i < N; ++i) {
        double rhs = 6.0 * (F_[i + 1] - 2 * F_[i] + F_[i - 1]) / (h_ * h_);
        if (i == 1) rhs -= M_[0];
        if (i == N - 1) rhs -= M_[N];
        double diag = 4.0 - (i > 1 ? cp[i - 1] : 0.0);
        cp[i] = 1.0 / diag;
        dp[i] = (rhs - (i > 1 ? dp[i - 1] : 0.0)) / diag;
    }
    for (int i = N - 1; i >= 1; --i) M_[i] = dp[i] - (i < N - 1 ? cp[i] * M_[i + 1] : 0.0);
}

StabilityValues StabilityTable::operator()(double tau) const {
    if (!(tau > 0 && tau < 1)) throw std::domain_error("StabilityTable: tau must lie in (0,1)");
    if (tau > tau_max_) return stability_functions(tau, p_);
    const int N = static_cast<int>(F_.size()) - 1;
    int i = std::min(N - 1, static_cast<int>(tau / h_));
    double t0 = i * h_, A = (t0 + h_ - tau) / h_, B = 1 - A;
    double F = A * F_[i] + B * F_[i + 1] + ((A * A * A - A) * M_[i] + (B * B * B - B) * M_[i + 1]) * h_ * h_ / 6.0;
    const double n = p_.n, s = p_.s;
    StabilityValues v;
    v.K = a_hyp(p_.n, s) * std::pow(1 - tau, -s) * std::pow(tau, 0.5 * (n + 2 * s));
    v.F = F;
    v.f = 1 - v.K * (v.F - 1);
    v.g = v.K * ((n + 2 * s) / (2 * s) - v.F) - 1;
    return v;
}

BarrierLaplacian barrier_frac_lap(const BarrierSpec& b, const Point& x, const StabilityTable* table) {
    b.validate();
    if (x.n != b.params.n) throw std::invalid_argument("barrier_frac_lap: dimension mismatch");
    if (!(x[0] > 0) || !((x - b.a).norm() < b.rho))
        throw std::domain_error("barrier_frac_lap: x must lie in the upper half of B_rho(a)");
    const double n = b.params.n, s = b.params.s;
    const double ds = (x - b.a_star()).norm();
    if (std::fabs(ds - b.rho) <= 1e-14 * b.rho) throw std::domain_error("barrier_frac_lap: x on the reflected sphere");
    BarrierLaplacian out;
    if (ds < b.rho) {
        out.region = BarrierRegion::lens;
        out.value = 2 * (n + 2 * s) * x[0] / n;
        return out;
    }
    out.region = BarrierRegion::outside_reflected;
    out.tau = (b.rho / ds) * (b.rho / ds);
    StabilityValues v = table ? (*table)(out.tau) : stability_functions(out.tau, b.params);
    out.value = (n + 2 * s) / n * v.f * x[0] + 2 * s / n * v.g * b.a[0];
    return out;
}

double barrier_frac_lap_from_torsion(const BarrierSpec& b, const Point& x) {
    b.validate();
    const FracParams& p = b.params;
    SolidHarmonic one{0, [](const Point&) { return 1.0; }};
    SolidHarmonic lin{1, [](const Point& y) { return y[0]; }};
    auto piece = [&](const Point& c, double sign) {
        Point y = (1.0 / b.rho) * (x - c);
        ExtendedReal t1 = torsion_closed_form(lin, 1.0, y, p), t0 = torsion_closed_form(one, 1.0, y, p);
        if (!t1.finite() || !t0.finite()) throw std::domain_error("barrier_frac_lap_from_torsion: x on a sphere");
        return b.rho * t1.value + sign * b.a[0] * t0.value;
    };
    return piece(b.a, 1.0) + piece(b.a_star(), -1.0);
}

}  // namespace nonlocal
