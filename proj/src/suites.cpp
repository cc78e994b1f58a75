#include "nonlocal/suites.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "nonlocal/bochner.hpp"
#include "nonlocal/counterexamples.hpp"
#include "nonlocal/fraclap.hpp"
#include "nonlocal/geometry.hpp"
#include "nonlocal/perimeter.hpp"
#include "nonlocal/poisson.hpp"
#include "nonlocal/quadrature.hpp"
#include "nonlocal/specfun.hpp"

namespace nonlocal {

namespace {

constexpr double kPi = std::numbers::pi;

using Checks = std::vector<CheckReport>;

struct Task {
    std::string label;
    std::function<Checks()> run;
};

std::string g(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

std::string ns_tag(int n, double s) { return "n=" + std::to_string(n) + ",s=" + g(s); }

QuadSpec quad(double tol) {
    QuadSpec q;
    q.abs_tol = tol;
    q.rel_tol = tol;
    return q;
}

double tol_or(const SuiteOptions& o, double def) { return o.tol.value_or(def); }

std::vector<int> dims(const SuiteOptions& o, std::vector<int> def) {
    if (o.n) return {*o.n};
    return def;
}

std::vector<double> orders(const SuiteOptions& o, std::vector<double> def) {
    if (o.s) return {*o.s};
    return def;
}

std::vector<double> eps_list(const SuiteOptions& o, std::vector<double> def) { return o.eps.empty() ? def : o.eps; }

void require_dims(const SuiteOptions& o, int lo, int hi, const char* suite) {
    if (o.n && (*o.n < lo || *o.n > hi))
        throw std::invalid_argument(std::string(suite) + ": --n must lie in " + std::to_string(lo) + ".." +
                                    std::to_string(hi));
}

// Oracles built on std::tgamma, independent of the library's gamma_fn.
double ball_volume_ref(int n) { return std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n + 1); }
double c_frac_ref(int n, double s) {
    return s * std::pow(4.0, s) * std::tgamma(0.5 * n + s) / (std::pow(kPi, 0.5 * n) * std::tgamma(1 - s));
}

// ---------------------------------------------------------------- constants

void constants_suite(const SuiteOptions& o, std::vector<Task>& tasks) {
    require_dims(o, 1, 6, "constants");
    const std::string note = c_frac_normalization_note();
    for (int n : dims(o, {1, 2, 3}))
        for (double s : orders(o, {0.3, 0.5, 0.7})) {
            const std::string tag = "[" + ns_tag(n, s) + "]";
            tasks.push_back({"constants" + tag, [=, &o] {
                                 Checks out;
                                 double gref = std::pow(4.0, -s) * std::tgamma(0.5 * n) /
                                               (std::tgamma(0.5 * n + s) * std::tgamma(1 + s));
                                 out.push_back(make_check("constants.gamma_torsion" + tag,
                                                          "gamma_{n,s} = 4^{-s} Gamma(n/2) / (Gamma(n/2+s) Gamma(1+s))",
                                                          gamma_torsion(n, s), gref, tol_or(o, 1e-12), TolMode::rel));
                                 out.push_back(make_check("constants.gamma_dimension_shift" + tag,
                                                          "gamma_{n+2,s} (n+2s) = n gamma_{n,s}",
                                                          gamma_torsion(n + 2, s) * (n + 2 * s),
                                                          n * gamma_torsion(n, s), tol_or(o, 1e-12), TolMode::rel));

                                 // c_{n,s} times the integral of |z|^{-n-2s} over {z_1 > 1}, sliced in z_1 = e^v
                                 QuadSpec qo;
                                 qo.abs_tol = 1e-14;
                                 qo.rel_tol = 1e-9;
                                 QuadSpec qi;
                                 qi.abs_tol = 1e-300;
                                 qi.rel_tol = 1e-12;
                                 bool conv = true;
                                 auto slice = [&](double z1) {
                                     double A = 1 + z1;
                                     if (n == 1) return std::pow(A, -1 - 2 * s);
                                     const double sph = unit_sphere_area(n - 1);
                                     auto f = [&](double r) {
                                         return sph * std::pow(r, n - 2) * std::pow(A * A + r * r, -(n + 2 * s) / 2);
                                     };
                                     auto r = integrate_adaptive(f, 0, kInf, {A}, qi);
                                     conv = conv && r.converged;
                                     return r.value;
                                 };
                                 auto r = integrate_adaptive(
                                     [&](double v) { return std::exp(v) * slice(std::expm1(v)); }, 0, 18.0 / s, qo);
                                 auto c = make_check("constants.c_tilde_dimension" + tag,
                                                     "c_{n,s} int_{z_1>1} |z|^{-n-2s} dz = c_{1,s}/(2s), independent of n",
                                                     c_frac(n, s) * r.value, c_tilde(s), tol_or(o, 1e-6), TolMode::rel,
                                                     r.converged && conv);
                                 c.metadata["normalization"] = note;
                                 c.metadata["quadrature_error"] = format_real(c_frac(n, s) * r.err_estimate);
                                 out.push_back(c);

                                 double kref = n / std::pow(2.0, 1 - 2 * s) * std::pow(ball_volume_ref(n), 1 + 2 * s / n) *
                                               (1 - s) * std::pow(kPi, -0.5 * n) * std::tgamma(0.5 * n + s) /
                                               std::tgamma(2 + s);
                                 c = make_check("constants.kappa_fk" + tag,
                                                "kappa_{n,s} = n 2^{2s-1} |B_1|^{1+2s/n} (1-s) pi^{-n/2} Gamma(n/2+s) / Gamma(2+s)",
                                                kappa_fk(n, s), kref, tol_or(o, 1e-12), TolMode::rel);
                                 out.push_back(c);

                                 const FracParams p{n, s};
                                 const double vb = ball_volume_ref(n);
                                 c = make_check("constants.lambda1_formula" + tag,
                                                "lambda_1 bound at |Omega| = |B_1| equals (n/2s) |B_1| c_{n,s}",
                                                lambda1_lower_bound(p, vb), n / (2 * s) * vb * c_frac_ref(n, s),
                                                tol_or(o, 1e-12), TolMode::rel);
                                 c.metadata["normalization"] = note;
                                 out.push_back(c);
                                 out.push_back(make_check("constants.lambda1_scaling" + tag,
                                                          "lambda_1 bound scales like |Omega|^{-2s/n}",
                                                          lambda1_lower_bound(p, 2 * vb) / lambda1_lower_bound(p, vb),
                                                          std::pow(2.0, -2 * s / n), tol_or(o, 1e-12), TolMode::rel));
                                 return out;
                             }});
        }
}

// ---------------------------------------------------------------- fraclap

Point direction_point(int n, double r) {
    Point x(n);
    x[0] = n == 1 ? r : 0.8 * r;
    if (n > 1) x[1] = 0.6 * r;
    return x;
}

void fraclap_suite(const SuiteOptions& o, std::vector<Task>& tasks) {
    require_dims(o, 1, 3, "fraclap");
    const QuadSpec q = quad(1e-8);
    for (int n : dims(o, {1, 2}))
        for (double s : orders(o, {0.3, 0.5, 0.7})) {
            const FracParams p{n, s};
            const std::string tag = "[" + ns_tag(n, s) + "]";
            tasks.push_back({"fraclap.torsion_identity" + tag, [=, &o] {
                                 auto u = torsion_profile(p, Point(n), 1.0);
                                 double worst = 1, worst_r = 0;
                                 bool conv = true;
                                 for (int k = 0; k < 10; ++k) {
                                     double r = 0.05 + 0.09 * k;
                                     auto res = frac_lap_pv(u, direction_point(n, r), p, q);
                                     conv = conv && res.converged;
                                     if (!(std::fabs(res.value - 1) <= std::fabs(worst - 1))) {
                                         worst = res.value;
                                         worst_r = r;
                                     }
                                 }
                                 auto c = make_check("fraclap.torsion_identity" + tag,
                                                     "(-Delta)^s [gamma_{n,s} (1-|x|^2)^s_+] = 1 in B_1 (worst of 10 points)",
                                                     worst, 1.0, tol_or(o, 1e-3), TolMode::abs, conv);
                                 c.metadata["points"] = "10";
                                 c.metadata["worst_radius"] = g(worst_r);
                                 c.metadata["quad_tol"] = "1e-08";
                                 return Checks{c};
                             }});
            for (double r : {1.5, 2.0, 3.0}) {
                const std::string id = "fraclap.exterior_closed_form[" + ns_tag(n, s) + ",r=" + g(r) + "]";
                tasks.push_back({id, [=, &o] {
                                     auto u = torsion_profile(p, Point(n), 1.0);
                                     Point x = direction_point(n, r);
                                     auto res = frac_lap_pv(u, x, p, q);
                                     SolidHarmonic one{0, [](const Point&) { return 1.0; }};
                                     double cf = torsion_closed_form(one, 1.0, x, p).value;
                                     auto c = make_check(id,
                                                         "hypergeometric closed form of (-Delta)^s of the torsion profile "
                                                         "outside B_1 equals PV quadrature",
                                                         res.value, cf, tol_or(o, 1e-3), TolMode::rel, res.converged);
                                     c.metadata["quadrature_error"] = format_real(res.err_estimate);
                                     return Checks{c};
                                 }});
            }
        }
}

// ---------------------------------------------------------------- barrier

Point pt(int n, double a, double b = 0) {
    Point x(n);
    x[0] = a;
    if (n > 1) x[1] = b;
    return x;
}

void barrier_suite(const SuiteOptions& o, std::vector<Task>& tasks) {
    require_dims(o, 1, 3, "barrier");
    const std::uint64_t seed = mix_seed(o.seed, 0xBA55);
    for (int n : dims(o, {1, 2, 3}))
        for (double s : orders(o, {0.3, 0.5, 0.7})) {
            const FracParams p{n, s};
            const std::string tag = "[" + ns_tag(n, s) + "]";
            tasks.push_back({"barrier" + tag, [=, &o] {
                                 Checks out;
                                 const double lam = (n + 2 * s) / double(n);
                                 // lens region: x_1 > 0 inside both B_rho(a) and B_rho(a*)
                                 BarrierSpec b{pt(n, 0.4), 1.0, p};
                                 double worst = 0, assembly = 0;
                                 bool in_lens = true;
                                 for (int k = 0; k < 10; ++k) {
                                     Point x = pt(n, 0.02 + 0.05 * k, 0.3 * std::sin(k));
                                     auto v = barrier_frac_lap(b, x);
                                     const double want = 2 * (n + 2 * s) * x[0] / n;
                                     in_lens = in_lens && v.region == BarrierRegion::lens;
                                     worst = std::max(worst, std::fabs(v.value - want));
                                     assembly = std::max(assembly,
                                                         std::fabs(barrier_frac_lap_from_torsion(b, x) - want) / want);
                                 }
                                 auto c = make_check("barrier.lens_identity" + tag,
                                                     "(-Delta)^s phi = 2 (n+2s) x_1 / n in the lens (10 points, exact)",
                                                     worst, 0.0, 0.0, TolMode::abs, in_lens);
                                 c.metadata["center"] = "a = 0.4 e_1, rho = 1";
                                 c.metadata["torsion_assembly_max_rel_dev"] = format_real(assembly);
                                 out.push_back(c);

                                 // outside the reflected ball
                                 BarrierSpec be{pt(n, 0.5, 0.2), 0.9, p};
                                 StabilityTable table(p);
                                 const std::uint64_t sd = mix_seed(seed, 100 * n + std::llround(100 * s));
                                 SeededStream rng(sd, 0);
                                 double viol = -INFINITY;
                                 bool region_ok = true;
                                 int count = 0;
                                 while (count < 200) {
                                     Point x(n);
                                     for (int i = 0; i < n; ++i) x[i] = be.a[i] + rng.uniform(-be.rho, be.rho);
                                     if (!(x[0] > 0) || (x - be.a).norm() >= be.rho || (x - be.a_star()).norm() <= be.rho)
                                         continue;
                                     auto v = barrier_frac_lap(be, x, &table);
                                     region_ok = region_ok && v.region == BarrierRegion::outside_reflected;
                                     viol = std::max(viol, v.value - lam * x[0]);
                                     ++count;
                                 }
                                 c = make_check("barrier.exterior_inequality" + tag,
                                                "(-Delta)^s phi <= (n+2s) x_1 / n outside the reflected ball "
                                                "(max of the difference over 200 samples)",
                                                viol, 0.0, 1e-10, TolMode::upper, region_ok);
                                 c.metadata["seed"] = std::to_string(sd);
                                 c.metadata["samples"] = "200";
                                 out.push_back(c);

                                 // stability functions
                                 double fmax = -INFINITY, gmax = -INFINITY;
                                 for (int i = 1; i <= 100; ++i) {
                                     auto v = stability_functions(i / 101.0, p);
                                     fmax = std::max(fmax, v.f);
                                     gmax = std::max(gmax, v.g);
                                 }
                                 c = make_check("barrier.stability_f" + tag, "f(tau) <= 1 on tau = i/101, i = 1..100",
                                                fmax, 1.0, 0.0, TolMode::upper);
                                 out.push_back(c);
                                 c = make_check("barrier.stability_g" + tag, "g(tau) <= 0 on tau = i/101, i = 1..100",
                                                gmax, 0.0, 0.0, TolMode::upper);
                                 out.push_back(c);
                                 out.push_back(make_check("barrier.stability_F_limit" + tag, "F(1-) = (n+2s)/(2s)",
                                                          extrapolate_F_at_one(p), (n + 2 * s) / (2 * s),
                                                          tol_or(o, 1e-4), TolMode::abs));
                                 return out;
                             }});
            if (n <= 2)
                tasks.push_back({"barrier.pv_match" + tag, [=, &o] {
                                     const QuadSpec q = quad(1e-8);
                                     BarrierSpec b{pt(n, 0.6), 1.0, p};
                                     auto u = barrier_field(b);
                                     double worst = 0, worst_x = 0, cf_w = 0, pv_w = 0;
                                     bool conv = true;
                                     for (double x1 : {0.1, 0.2, 0.3, 0.5, 0.6, 0.7, 0.9, 1.1, 1.3, 1.5}) {
                                         Point x = pt(n, x1, 0.2);
                                         double cf = barrier_frac_lap(b, x).value;
                                         auto r = frac_lap_antisym(u, x, p, q);
                                         conv = conv && r.converged;
                                         double e = std::fabs(r.value - cf) / std::fabs(cf);
                                         if (!(e <= worst)) {
                                             worst = e;
                                             worst_x = x1;
                                             cf_w = cf;
                                             pv_w = r.value;
                                         }
                                     }
                                     auto c = make_check("barrier.pv_match" + tag,
                                                         "closed-form (-Delta)^s phi equals antisymmetric PV quadrature "
                                                         "(worst of 10 points)",
                                                         pv_w, cf_w, tol_or(o, 1e-3), TolMode::rel, conv);
                                     c.metadata["worst_x1"] = g(worst_x);
                                     c.metadata["points"] = "10";
                                     return Checks{c};
                                 }});
        }
}

// ---------------------------------------------------------------- poisson

double sgn(double t) { return (t > 0) - (t < 0); }

std::vector<std::pair<std::string, ExteriorData>> poisson_data(int n, double s) {
    std::vector<std::pair<std::string, ExteriorData>> out;
    ExteriorData base;
    base.params = {n, s};
    base.antisymmetric = true;

    ExteriorData a = base;
    a.g = [](const Point& y) { return y.norm() < 3 ? y[0] : 0.0; };
    a.support_radius = 3;
    a.radial_breaks = {3};
    out.emplace_back("truncated_linear", a);

    ExteriorData b = base;
    b.g = [](const Point& y) { return sgn(y[0]); };
    b.decay_exponent = 0;
    b.angle_breaks = {-kPi / 2, kPi / 2};
    out.emplace_back("sign", b);

    ExteriorData c = base;
    c.g = [](const Point& y) { return y[0] * std::exp(-y.norm2()); };
    c.decay_exponent = 10;
    out.emplace_back("gaussian", c);
    return out;
}

void poisson_suite(const SuiteOptions& o, std::vector<Task>& tasks) {
    require_dims(o, 1, 2, "poisson");
    const QuadSpec q = quad(1e-9);
    for (int n : dims(o, {1}))
        for (double s : orders(o, {0.3, 0.5, 0.7}))
            for (const auto& [name, d] : poisson_data(n, s)) {
                const std::string tag = "[" + ns_tag(n, s) + ",data=" + name + "]";
                tasks.push_back({"poisson" + tag, [=, &o, d = d] {
                                     const double h = 1e-3;
                                     auto plus = poisson_extend(d, pt(n, h), q), minus = poisson_extend(d, pt(n, -h), q);
                                     double fd = (plus.value - minus.value) / (2 * h);
                                     bool conv = plus.converged && minus.converged;
                                     double lo = INFINITY, hi = -INFINITY, worst = fd;
                                     for (double rr : {0.25, 0.5, 1.0}) {
                                         auto m = meanvalue_derivative(d, rr, q);
                                         conv = conv && m.converged;
                                         lo = std::min(lo, m.value);
                                         hi = std::max(hi, m.value);
                                         if (std::fabs(m.value - fd) > std::fabs(worst - fd)) worst = m.value;
                                     }
                                     Checks out;
                                     auto c = make_check("poisson.meanvalue_derivative" + tag,
                                                         "mean-value formula for d_1 u(0) equals the central difference "
                                                         "of the Poisson extension (worst of r = 0.25, 0.5, 1)",
                                                         worst, fd, tol_or(o, 1e-3), TolMode::abs, conv);
                                     c.metadata["step"] = "1e-3";
                                     out.push_back(c);
                                     c = make_check("poisson.meanvalue_r_independence" + tag,
                                                    "mean-value formula does not depend on r in {0.25, 0.5, 1} (spread)",
                                                    hi - lo, 0.0, 1e-3, TolMode::upper, conv);
                                     out.push_back(c);
                                     return out;
                                 }});
            }
}

// ---------------------------------------------------------------- bochner

std::vector<SymmetricProfile> bochner_profiles(int n) {
    std::vector<SymmetricProfile> out;
    KinkSurface sphere{Point(n), Point(n)};
    for (int i = 0; i < n; ++i) sphere.semi_axes[i] = 1;
    SymmetricProfile p;
    p.n = n;
    p.f = [](const Point& x) { return std::exp(-x.norm2()); };
    out.push_back(p);

    SymmetricProfile b = p;
    b.f = [](const Point& x) {
        double t = 1 - x.norm2();
        return t > 0 ? t * t : 0.0;
    };
    b.support_radius = 1;
    b.kinks = {sphere};
    b.decay_class = "compact, C^1";
    out.push_back(b);

    p.f = [](const Point& x) {
        double t = x.norm2();
        return std::isfinite(t) ? std::exp(-t) * (1 + x[0] * x[0]) : 0.0;
    };
    out.push_back(p);

    SymmetricProfile r = p;
    r.f = [](const Point& x) { return std::pow(1 + x.norm2(), -2); };
    r.decay_class = "algebraic |x|^-4";
    out.push_back(r);

    p.f = [](const Point& x) { return std::cos(x[0]) * std::exp(-x.norm2()); };
    out.push_back(p);
    return out;
}

const char* kProfileNames[] = {"gaussian", "compact_c1", "weighted_gaussian", "algebraic", "cosine_gaussian"};

void bochner_suite(const SuiteOptions& o, std::vector<Task>& tasks) {
    require_dims(o, 1, 2, "bochner");
    const QuadSpec q = quad(1e-8);
    for (int n : dims(o, {1, 2})) {
        for (double s : orders(o, {0.3, 0.5, 0.7}))
            for (int i = 0; i < 5; ++i) {
                const std::string tag = "[" + ns_tag(n, s) + ",f=" + kProfileNames[i] + "]";
                tasks.push_back({"bochner.residual" + tag, [=] {
                                     auto f = bochner_profiles(n)[i];
                                     double worst = 0, res_w = 0, err_w = 0;
                                     bool conv = true;
                                     for (int k = 0; k < 10; ++k) {
                                         Point x(n);
                                         x[0] = 0.07 + 0.13 * k;
                                         if (n == 2) x[1] = 0.4 * std::sin(1.7 * k);
                                         auto r = bochner_residual(f, x, {n, s}, q);
                                         conv = conv && r.converged;
                                         double ratio = r.residual == 0 ? 0.0 : std::fabs(r.residual) / (2 * r.err_sum);
                                         if (!(ratio <= worst)) {
                                             worst = ratio;
                                             res_w = r.residual;
                                             err_w = r.err_sum;
                                         }
                                     }
                                     auto c = make_check("bochner.residual" + tag,
                                                         "(-Delta)^s [x_1 f] = x_1 (-Delta)^s f~ in R^{n+2}: "
                                                         "|residual| / (2 combined error), worst of 10 points",
                                                         worst, 1.0, 0.0, TolMode::upper, conv);
                                     c.metadata["worst_residual"] = format_real(res_w);
                                     c.metadata["worst_error_sum"] = format_real(err_w);
                                     return Checks{c};
                                 }});
            }
        for (double tau : {0.5, 1.0, 2.0}) {
            const std::string id = "bochner.symbol_lift[n=" + std::to_string(n) + ",tau=" + g(tau) + "]";
            tasks.push_back({id, [=, &o] {
                                 LevyKernel k;
                                 k.n = n;
                                 k.j = [](double r) { return std::exp(-r * r); };
                                 auto a = levy_symbol(k, tau, q), b = levy_symbol(kernel_lift(k), tau, q);
                                 auto c = make_check(id, "psi_n(tau) = psi_{n+2}(tau) for the Gaussian jump kernel and its lift",
                                                     b.value, a.value, tol_or(o, 1e-5), TolMode::abs,
                                                     a.converged && b.converged);
                                 return Checks{c};
                             }});
        }
    }
}

// ---------------------------------------------------------------- ellipsoid

void ellipsoid_suite(const SuiteOptions& o, std::vector<Task>& tasks) {
    require_dims(o, 2, 2, "ellipsoid");
    const std::vector<double> eps = eps_list(o, {0.02, 0.01, 0.005});
    if (eps.size() < 3) throw std::invalid_argument("ellipsoid: --eps needs at least three values");
    for (std::size_t i = 0; i < eps.size(); ++i)
        if (!(eps[i] > 0 && eps[i] < 0.25) || (i && !(eps[i] < eps[i - 1])))
            throw std::invalid_argument("ellipsoid: --eps must be strictly decreasing in (0, 1/4)");
    for (double s : orders(o, {0.5})) {
        const std::string tag = "[" + ns_tag(2, s) + "]";
        tasks.push_back({"ellipsoid.limit_ratio" + tag, [=, &o] {
                             auto lr = limit_ratio_experiment(eps, {2, s}, 256);
                             auto c = make_check("ellipsoid.limit_ratio" + tag,
                                                 "[u_eps]_{parallel boundary} / eps -> s gamma_{n,s} (3/4)^{s-1} "
                                                 "(polynomial extrapolation to eps = 0)",
                                                 lr.extrapolated, lr.predicted, tol_or(o, 0.02), TolMode::rel);
                             c.metadata["eps"] = format_list(lr.eps);
                             c.metadata["ratios"] = format_list(lr.ratios);
                             c.metadata["extrapolation_error"] = format_real(lr.extrapolation_error);
                             c.metadata["grid"] = "256";
                             c.metadata["monotone"] = lr.monotone ? "true" : "false";
                             return Checks{c};
                         }});
    }
    tasks.push_back({"ellipsoid.sup_quotient", [&o] {
                         FamilyParams f0{0, 2, {2, 0.5}};
                         auto sn = boundary_seminorm([](const Point& x) { return 4 * x[1] * x[1]; }, parallel_chart(f0), 128);
                         auto c = make_check("ellipsoid.sup_quotient[n=2]",
                                             "sup over the round parallel chart of the difference quotient of 4|x'|^2 is 2",
                                             sn.value, 2.0, tol_or(o, 1e-3), TolMode::abs);
                         c.metadata["argmax_abs_r"] = format_real(std::fabs(sn.r_best[0]));
                         c.metadata["grid"] = "128";
                         c.metadata["label"] = sn.label;
                         return Checks{c};
                     }});
}

// ---------------------------------------------------------------- slab

void slab_suite(const SuiteOptions& o, std::vector<Task>& tasks) {
    require_dims(o, 2, 2, "slab");
    const std::vector<double> eps = eps_list(o, {1e-4, 4e-4, 1.6e-3});
    if (eps.size() < 2) throw std::invalid_argument("slab: --eps needs at least two values");
    for (double e : eps)
        if (!(e > 0 && e < 0.25)) throw std::invalid_argument("slab: --eps values must lie in (0, 1/4)");
    if (!(o.alpha > 1)) throw std::invalid_argument("slab: --alpha must exceed 1");
    const double alpha = o.alpha;
    const std::string tag = "[alpha=" + g(alpha) + "]";
    tasks.push_back({"slab" + tag, [=, &o] {
                         const Point e1{1.0, 0.0};
                         const double expo = 1 - 1 / alpha;
                         std::vector<double> lams, at01;
                         double worst_ratio = 0;
                         bool conv = true;
                         long samples_used = 0;
                         for (std::size_t i = 0; i < eps.size(); ++i) {
                             ShapeDescriptor d = make_perturbed_disk(eps[i], alpha);
                             double lam = critical_plane(d, e1).lambda;
                             lams.push_back(lam);
                             RadialBounds rb = radial_bounds(d);
                             int j = 0;
                             for (double gam : {0.05, 0.1, 0.25}) {
                                 QuadSpec q;
                                 q.mc_samples = o.samples;
                                 q.rng_seed = mix_seed(o.seed, 0x51AB00 + 10 * i + j++);
                                 auto r = slab_measure(d, lam, gam, e1, q);
                                 conv = conv && r.converged;
                                 samples_used += r.evaluations;
                                 worst_ratio = std::max(worst_ratio, r.value / (gam * std::pow(rb.r_out - rb.r_in, expo)));
                                 if (gam == 0.1) at01.push_back(r.value);
                             }
                         }
                         Checks out;
                         auto c = make_check("slab.exponent" + tag,
                                             "slab measure at gamma = 0.1 scales like eps^{1-1/alpha} (fitted exponent)",
                                             fit_power_law(eps, at01).exponent, expo, tol_or(o, 0.05), TolMode::abs, conv);
                         c.metadata["eps"] = format_list(eps);
                         c.metadata["values"] = format_list(at01);
                         c.metadata["base_seed"] = std::to_string(o.seed);
                         c.metadata["samples"] = std::to_string(samples_used);
                         out.push_back(c);
                         c = make_check("slab.upper_bound_ratio" + tag,
                                        "slab measure / (gamma (R-r)^{1-1/alpha}) stays below 5 over gamma in "
                                        "{0.05, 0.1, 0.25} and the eps list",
                                        worst_ratio, 5.0, 0.0, TolMode::upper, conv);
                         c.metadata["base_seed"] = std::to_string(o.seed);
                         out.push_back(c);
                         c = make_check("slab.critical_plane_exponent" + tag,
                                        "critical plane position lambda scales like eps^{1-1/alpha} (fitted exponent)",
                                        fit_power_law(eps, lams).exponent, expo, tol_or(o, 0.05), TolMode::abs);
                         c.metadata["lambda"] = format_list(lams);
                         out.push_back(c);
                         return out;
                     }});
}

// ---------------------------------------------------------------- perimeter

void perimeter_suite(const SuiteOptions& o, std::vector<Task>& tasks) {
    require_dims(o, 1, 6, "perimeter");
    QuadSpec q;
    q.abs_tol = 1e-8;
    q.rel_tol = 1e-7;
    const auto ns = dims(o, {1, 2, 3});
    const auto ss = orders(o, {0.3, 0.5, 0.7});
    for (int n : ns)
        for (double s : ss) {
            const std::string tag = "[" + ns_tag(n, s) + "]";
            tasks.push_back({"perimeter.halfspace_energy" + tag, [=, &o] {
                                 auto h = halfspace_energy({n, s}, q);
                                 auto c = make_check("perimeter.halfspace_energy" + tag,
                                                     "closed-form half-space extension energy equals the product of "
                                                     "the radial and angular quadratures",
                                                     h.product, h.closed_form, tol_or(o, 1e-6), TolMode::rel,
                                                     h.radial.converged && h.angular.converged);
                                 return Checks{c};
                             }});
        }
    for (double s : ss) {
        if (std::find(ns.begin(), ns.end(), 1) != ns.end()) {
            const std::string id = "perimeter.interval_exact[s=" + g(s) + "]";
            tasks.push_back({id, [=, &o] {
                                 auto r = frac_perimeter(make_ball(1), make_ball(1, 2.0), {1, s}, q);
                                 return Checks{make_check(id, "Per_s((-1,1); (-2,2)) = 2^{2-s} / (s (1-s))", r.total.value,
                                                          2 * std::pow(2.0, 1 - s) / (s * (1 - s)), tol_or(o, 1e-12),
                                                          TolMode::rel, r.total.converged)};
                             }});
        }
        if (std::find(ns.begin(), ns.end(), 2) != ns.end()) {
            const std::string id = "perimeter.disk_scaling[s=" + g(s) + "]";
            tasks.push_back({id, [=, &o] {
                                 auto a = frac_perimeter(make_ball(2), make_ball(2, 2.0), {2, s}, q);
                                 auto b = frac_perimeter(make_ball(2, 2.0), make_ball(2, 4.0), {2, s}, q);
                                 auto c = make_check(id, "Per_s(2B_1; B_4) = 2^{2-s} Per_s(B_1; B_2)",
                                                     b.total.value / a.total.value, std::pow(2.0, 2 - s), tol_or(o, 1e-7),
                                                     TolMode::rel, a.total.converged && b.total.converged);
                                 c.metadata["per_unit_disk"] = format_real(a.total.value);
                                 return Checks{c};
                             }});
        }
    }
    tasks.push_back({"moments.n3", [=, &o] {
                         QuadSpec qm = q;
                         qm.abs_tol = qm.rel_tol = 1e-10;
                         qm.mc_samples = o.samples;
                         qm.rng_seed = mix_seed(o.seed, 0x303);
                         auto m = moment_integrals(3, qm);
                         Checks out;
                         out.push_back(make_check("moments.n3[ball,quadrature]", "int_{B_1} x_1^4 dx = 4 pi / 35",
                                                  m.ball_quad.value, 4 * kPi / 35, tol_or(o, 1e-3), TolMode::either,
                                                  m.ball_quad.converged));
                         out.push_back(make_check("moments.n3[sphere,quadrature]", "int_{S^2} theta_1^4 dH^2 = 4 pi / 5",
                                                  m.sphere_quad.value, 4 * kPi / 5, tol_or(o, 1e-3), TolMode::either,
                                                  m.sphere_quad.converged));
                         auto mc = [&](const char* id, const char* st, const IntegralResult& r, double ref) {
                             auto c = make_check(id, st, r.value, ref, 3 * r.err_estimate, TolMode::abs);
                             c.metadata["seed"] = std::to_string(qm.rng_seed);
                             c.metadata["samples"] = std::to_string(qm.mc_samples);
                             c.metadata["std_error"] = format_real(r.err_estimate);
                             c.metadata["tolerance_rule"] = "3 standard errors";
                             return c;
                         };
                         out.push_back(mc("moments.n3[ball,mc]", "Monte Carlo int_{B_1} x_1^4 dx = 4 pi / 35", m.ball_mc,
                                          4 * kPi / 35));
                         out.push_back(mc("moments.n3[sphere,mc]", "Monte Carlo int_{S^2} theta_1^4 dH^2 = 4 pi / 5",
                                          m.sphere_mc, 4 * kPi / 5));
                         return out;
                     }});
}

// ---------------------------------------------------------------- counterexamples

void counterexamples_suite(const SuiteOptions& o, std::vector<Task>& tasks) {
    const std::vector<double> eps = eps_list(o, {0.2, 0.5});
    for (double e : eps)
        if (!(e > 0 && e < 1)) throw std::invalid_argument("counterexamples: --eps values must lie in (0, 1)");
    for (double e : eps) {
        const std::string tag = "[eps=" + g(e) + "]";
        tasks.push_back({"counterexamples.harnack" + tag, [=, &o] {
                             HarnackCheck h = harnack_check(e);
                             Checks out;
                             auto c = make_check("counterexamples.harnack_sup" + tag, "sup over (1,2) of f^(eps) is 4",
                                                 h.sup_outer.value, 4.0, tol_or(o, 1e-6), TolMode::abs);
                             c.metadata["argmax"] = format_real(h.sup_outer.x);
                             out.push_back(c);
                             c = make_check("counterexamples.harnack_inf" + tag, "inf over (1/2,5/2) of f^(eps) is 2 eps",
                                            h.inf_inner.value, 2 * e, tol_or(o, 1e-6), TolMode::abs);
                             c.metadata["argmin"] = format_real(h.inf_inner.x);
                             c.metadata["indicative_ratio"] = format_real(h.indicative_ratio);
                             out.push_back(c);
                             return out;
                         }});
    }
    tasks.push_back({"counterexamples.smp", [] {
                         OddPolynomial f = smp_polynomial();
                         Checks out;
                         for (auto [x, want] : {std::pair{2, 1}, std::pair{3, 5}}) {
                             Rational v = f(Rational(x));
                             auto c = make_check("counterexamples.smp_value[x=" + std::to_string(x) + "]",
                                                 "f(" + std::to_string(x) + ") = " + std::to_string(want) +
                                                     " in exact rational arithmetic",
                                                 v.convert_to<double>(), double(want), 0.0, TolMode::abs);
                             c.metadata["exact_value"] = v.str();
                             if (v != Rational(want)) c.pass = false;
                             out.push_back(c);
                         }
                         return out;
                     }});
}

using SuiteFn = void (*)(const SuiteOptions&, std::vector<Task>&);

struct SuiteEntry {
    const char* name;
    SuiteFn fn;
    int n_lo, n_hi;
};

const SuiteEntry kSuites[] = {
    {"constants", constants_suite, 1, 6},     {"fraclap", fraclap_suite, 1, 3},
    {"barrier", barrier_suite, 1, 3},         {"poisson", poisson_suite, 1, 2},
    {"bochner", bochner_suite, 1, 2},         {"ellipsoid", ellipsoid_suite, 2, 2},
    {"slab", slab_suite, 2, 2},               {"perimeter", perimeter_suite, 1, 6},
    {"counterexamples", counterexamples_suite, 1, 99},
};

Checks execute(std::vector<Task>& tasks, int threads) {
    std::vector<Checks> results(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < tasks.size();) {
            try {
                results[i] = tasks[i].run();
            } catch (const std::exception& e) {
                CheckReport c;
                c.check_id = tasks[i].label;
                c.statement = "check raised an exception";
                c.computed = NAN;
                c.converged = false;
                c.pass = false;
                c.metadata["error"] = e.what();
                results[i] = {c};
            }
        }
    };
    int nt = threads > 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
    nt = std::min<int>(nt, static_cast<int>(tasks.size()));
    std::vector<std::thread> pool;
    for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    Checks out;
    for (auto& r : results) out.insert(out.end(), r.begin(), r.end());
    std::sort(out.begin(), out.end(), [](const CheckReport& a, const CheckReport& b) { return a.check_id < b.check_id; });
    return out;
}

}  // namespace

void SuiteOptions::validate() const {
    if (n && (*n < 1 || *n > kMaxDim)) throw std::invalid_argument("--n must lie in 1..6");
    if (s && !(*s > 0 && *s < 1)) throw std::invalid_argument("--s must lie in (0, 1)");
    if (tol && !(*tol >= 0)) throw std::invalid_argument("--tol must be nonnegative");
    if (samples < 100) throw std::invalid_argument("--samples must be at least 100");
    if (!std::isfinite(alpha)) throw std::invalid_argument("--alpha must be finite");
    for (double e : eps)
        if (!std::isfinite(e)) throw std::invalid_argument("--eps values must be finite");
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& e : kSuites) v.push_back(e.name);
        return v;
    }();
    return names;
}

bool is_suite(const std::string& name) {
    if (name == "all") return true;
    const auto& v = suite_names();
    return std::find(v.begin(), v.end(), name) != v.end();
}

std::vector<CheckReport> run_suite(const std::string& name, const SuiteOptions& opts) {
    if (!is_suite(name)) throw std::invalid_argument("unknown suite '" + name + "'");
    opts.validate();
    std::vector<Task> tasks;
    for (const auto& e : kSuites) {
        if (name == "all") {
            // suites that do not cover the requested dimension are left out of "all"
            if (opts.n && (*opts.n < e.n_lo || *opts.n > e.n_hi)) continue;
            e.fn(opts, tasks);
        } else if (name == e.name) {
            e.fn(opts, tasks);
        }
    }
    return execute(tasks, opts.threads);
}

Report make_report(const std::string& suite, const SuiteOptions& opts, std::vector<CheckReport> checks) {
    Report r;
    r.suite = suite;
    r.params["n"] = opts.n ? std::to_string(*opts.n) : "default";
    r.params["s"] = opts.s ? format_real(*opts.s) : "default";
    r.params["eps"] = opts.eps.empty() ? "default" : format_list(opts.eps);
    r.params["alpha"] = format_real(opts.alpha);
    r.params["tol"] = opts.tol ? format_real(*opts.tol) : "default";
    r.params["seed"] = std::to_string(opts.seed);
    r.params["samples"] = std::to_string(opts.samples);
    r.checks = std::move(checks);
    return r;
}

const std::vector<Explanation>& explanations() {
    static const std::vector<Explanation> table = {
        {"barrier.exterior_inequality", "Antisymmetric barrier phi = x_1 (psi_{B(a)} + psi_{B(a*)}) is a supersolution gap "
                                        "outside the reflected ball",
         "(-Delta)^s phi(x) <= (n+2s) x_1 / n for x in B_rho^+(a) outside B_rho(a*)",
         "one-sided, 1e-10: the closed form uses a spline table of F, whose error is below 1e-10"},
        {"barrier.lens_identity", "Closed-form fractional Laplacian of the antisymmetric barrier in the lens region",
         "(-Delta)^s phi(x) = 2 (n+2s) x_1 / n for x_1 > 0 in B_rho(a) cap B_rho(a*)",
         "exact (0): both torsion terms are evaluated at an interior point where each equals its polynomial"},
        {"barrier.pv_match", "Closed-form barrier values against antisymmetric principal-value quadrature",
         "(-Delta)^s phi(x) = c_{n,s} PV int_{y_1>0} (phi(x)-phi(y)) (|x-y|^{-n-2s} - |x*-y|^{-n-2s}) dy + "
         "(c_{1,s}/s) phi(x) x_1^{-2s}",
         "rel 1e-3: quadrature tolerance 1e-8 leaves two orders of margin near the kink of phi"},
        {"barrier.stability_F_limit", "Limit of the stability function F at tau = 1",
         "F(1-) = (n+2s)/(2s), extrapolated from tau = 1 - 1e-6 and 1 - 1e-8",
         "abs 1e-4: the (1-tau)^s term is eliminated and the remainder is O(1-tau)"},
        {"barrier.stability_f", "Upper bound of the normalized stability function f", "f(tau) <= 1 on (0,1)",
         "exact (0) on the grid i/101"},
        {"barrier.stability_g", "Sign of the stability function g", "g(tau) <= 0 on (0,1)", "exact (0) on the grid i/101"},
        {"bochner.residual", "Odd reduction of the fractional Laplacian through the 3-isotropic lift",
         "(-Delta)^s_{R^n} [x_1 f](x) = x_1 (-Delta)^s_{R^{n+2}} f~(x_1, 0, 0, x')",
         "|residual| <= 2 (err_lhs + err_rhs): both sides are quadratures, their combined estimate bounds the gap"},
        {"bochner.symbol_lift", "Levy symbol is unchanged by the kernel lift j_{n+2}(r) = -j_n'(r)/(2 pi r)",
         "psi_n(tau) = psi_{n+2}(tau)", "abs 1e-5 at quadrature tolerance 1e-8"},
        {"constants.c_tilde_dimension", "Half-space kernel mass is independent of the dimension",
         "c_{n,s} int_{z_1>1} |z|^{-n-2s} dz = c_{1,s}/(2s)", "rel 1e-6: nested adaptive quadrature at 1e-9 / 1e-12"},
        {"constants.gamma_dimension_shift", "Dimension shift of the torsion constant",
         "gamma_{n+2,s} (n+2s) = n gamma_{n,s}", "rel 1e-12: closed forms only"},
        {"constants.gamma_torsion", "Torsion constant", "gamma_{n,s} = 4^{-s} Gamma(n/2) / (Gamma(n/2+s) Gamma(1+s))",
         "rel 1e-12 against std::tgamma"},
        {"constants.kappa_fk", "Faber-Krahn constant",
         "kappa_{n,s} = n 2^{2s-1} |B_1|^{1+2s/n} (1-s) pi^{-n/2} Gamma(n/2+s) / Gamma(2+s)",
         "rel 1e-12 against std::tgamma"},
        {"constants.lambda1_formula", "Lower bound of the first eigenvalue at the volume of the unit ball",
         "(n/2s) |B_1|^{1+2s/n} c_{n,s} |Omega|^{-2s/n} at |Omega| = |B_1|", "rel 1e-12 against std::tgamma"},
        {"constants.lambda1_scaling", "Volume scaling of the eigenvalue lower bound",
         "bound(2V) / bound(V) = 2^{-2s/n}", "rel 1e-12"},
        {"counterexamples.harnack_inf", "Interior infimum of the Harnack counterexample family",
         "inf_{(1/2,5/2)} f^(eps) = f(2) = 2 eps", "abs 1e-6: grid plus golden-section refinement in double precision"},
        {"counterexamples.harnack_sup", "Supremum of the Harnack counterexample family on (1,2)",
         "sup_{(1,2)} f^(eps) = f(1) = 4", "abs 1e-6: grid plus golden-section refinement in double precision"},
        {"counterexamples.smp_value", "Pinned values of the odd degree-9 polynomial", "f(2) = 1, f(3) = 5",
         "exact rational arithmetic"},
        {"ellipsoid.limit_ratio", "Boundary seminorm of the ellipsoid torsion function on the parallel surface, "
                                  "divided by eps, as eps -> 0",
         "lim [u_eps]_{C^{0,1}(parallel boundary)} / eps = s gamma_{n,s} (3/4)^{s-1} (= 2/(sqrt 3 pi) at n=2, s=1/2)",
         "rel 2%: Neville extrapolation of three seminorm ratios, each a refined grid lower bound"},
        {"ellipsoid.sup_quotient", "Difference quotient of 4|x'|^2 along the round parallel chart",
         "sup_{r != r~} |4|x'(r)|^2 - 4|x'(r~)|^2| / |phi(r) - phi(r~)| = 2, attained as |r| -> 1/sqrt 2",
         "abs 1e-3: grid 128 plus compass search"},
        {"fraclap.exterior_closed_form", "Fractional Laplacian of the torsion profile outside the ball",
         "closed form through 2F1 for |x| > 1 against principal-value quadrature",
         "rel 1e-3 at quadrature tolerance 1e-8"},
        {"fraclap.torsion_identity", "Torsion profile solves the fractional torsion problem",
         "(-Delta)^s [gamma_{n,s} (1-|x|^2)^s_+] = 1 in B_1", "abs 1e-3 at quadrature tolerance 1e-8"},
        {"moments.n3", "Fourth moments of the unit ball and sphere in R^3",
         "int_{B_1} x_1^4 dx = 4 pi/35, int_{S^2} theta_1^4 = 4 pi/5",
         "quadrature: 1e-3 (abs or rel); Monte Carlo: 3 standard errors with the seed in metadata"},
        {"perimeter.disk_scaling", "Scaling law of the fractional perimeter", "Per_s(tE; t Omega) = t^{n-s} Per_s(E; Omega)",
         "rel 1e-7: both sides use the same deterministic line quadrature"},
        {"perimeter.halfspace_energy", "Extension energy of the half-space",
         "a~(n,s)^2 omega_{n-1} int_0^1 r^{-s} (1-r^2)^{(n-1)/2} dr int_0^pi sin^{s-1} t dt equals the Gamma closed form",
         "rel 1e-6 at quadrature tolerance 1e-7"},
        {"perimeter.interval_exact", "Fractional perimeter of an interval",
         "Per_s((-1,1); (-2,2)) = 2^{2-s} / (s (1-s))", "rel 1e-12: the one-dimensional kernel is integrated exactly"},
        {"poisson.meanvalue_derivative", "Mean-value representation of d_1 u(0) for antisymmetric s-harmonic u",
         "d_1 u(0) = 2n gamma_{n,s} int_{R^n_+ minus B_r} r^{2s} y_1 u(y) (|y|^2-r^2)^{-s} |y|^{-n-2} dy",
         "abs 1e-3: central difference with step 1e-3 of the Poisson extension"},
        {"poisson.meanvalue_r_independence", "Mean-value representation does not depend on r",
         "spread over r in {0.25, 0.5, 1}", "abs 1e-3, one-sided"},
        {"slab.critical_plane_exponent", "Critical plane of the perturbed disk",
         "lambda(eps) ~ eps^{1-1/alpha}", "abs 0.05 on the fitted exponent"},
        {"slab.exponent", "Slab measure of the perturbed disk near its critical plane",
         "|{x in Omega triangle Omega' : |x_1 - lambda| <= gamma}| ~ eps^{1-1/alpha}",
         "abs 0.05 on the fitted exponent over three eps values"},
        {"slab.upper_bound_ratio", "Upper bound of the slab measure",
         "slab / (gamma (R - r)^{1-1/alpha}) bounded, R, r the outer and inner radii",
         "one-sided bound 5, pinned from the observed maximum near 1.2"},
    };
    return table;
}

std::optional<Explanation> explain(const std::string& check_id) {
    const std::string family = check_id.substr(0, check_id.find('['));
    for (const auto& e : explanations())
        if (e.id == family) return e;
    return std::nullopt;
}

}  // namespace nonlocal
