#include "nonlocal/quadrature.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <queue>
#include <stdexcept>

namespace nonlocal {

namespace {

constexpr double kXgk[11] = {0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
                             0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
                             0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
                             0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
                             0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
                             0.0};
constexpr double kWgk[11] = {0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
                             0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
                             0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
                             0.123491976262065851077208980517854, 0.134709217311473325928054001771707,
                             0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
                             0.149445554002916905664936468389821};
constexpr double kWg[5] = {0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
                           0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
                           0.295524224714752870173892994651338};

struct Segment {
    double a, b, value, err;
    bool operator<(const Segment& o) const { return err < o.err; }
};

Segment gk21(const Fn1& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double fc = f(c);
    double fv1[10], fv2[10];
    double resk = fc * kWgk[10];
    double resg = 0.0;
    double resabs = std::fabs(resk);
    for (int j = 0; j < 10; ++j) {
        double dx = h * kXgk[j];
        double f1 = f(c - dx), f2 = f(c + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += kWgk[j] * (f1 + f2);
        resabs += kWgk[j] * (std::fabs(f1) + std::fabs(f2));
        if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }
    // QUADPACK qk21 error heuristic
    double mean = 0.5 * resk;
    double resasc = kWgk[10] * std::fabs(fc - mean);
    for (int j = 0; j < 10; ++j) resasc += kWgk[j] * (std::fabs(fv1[j] - mean) + std::fabs(fv2[j] - mean));
    double ah = std::fabs(h);
    resk *= h;
    resg *= h;
    resabs *= ah;
    resasc *= ah;
    double err = std::fabs(resk - resg);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double kEps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50 * kEps)) err = std::max(50 * kEps * resabs, err);
    if (!std::isfinite(resk)) err = kInf;
    return {a, b, resk, err};
}

// Maps an infinite interval onto a finite one.
struct Mapped {
    Fn1 g;
    double a, b;
};

Mapped map_interval(const Fn1& f, double a, double b) {
    if (std::isfinite(a) && std::isfinite(b)) return {f, a, b};
    // length scale follows the finite endpoint so far-out half-lines are not squeezed
    if (std::isfinite(a)) {
        double L = std::max(1.0, std::fabs(a));
        return {[f, a, L](double t) {
                    double u = 1.0 - t;
                    if (u <= 0) return 0.0;  // node rounded onto the point at infinity
                    return L * f(a + L * t / u) / (u * u);
                },
                0.0, 1.0};
    }
    if (std::isfinite(b)) {
        double L = std::max(1.0, std::fabs(b));
        return {[f, b, L](double t) {
                    double u = 1.0 - t;
                    if (u <= 0) return 0.0;
                    return L * f(b - L * t / u) / (u * u);
                },
                0.0, 1.0};
    }
    return {[f](double t) {
                double u = 1.0 - t * t;
                if (u <= 0) return 0.0;
                return f(t / u) * (1.0 + t * t) / (u * u);
            },
            -1.0, 1.0};
}

IntegralResult adaptive_core(const Fn1& f, double a, double b, const QuadSpec& q) {
    IntegralResult r;
    if (a == b) return r;
    std::priority_queue<Segment> heap;
    Segment first = gk21(f, a, b);
    r.evaluations = 21;
    heap.push(first);
    double total = first.value, err = first.err;
    int intervals = 1;
    std::vector<Segment> frozen;  // too narrow to split further
    while (!heap.empty()) {
        double tol = std::max(q.abs_tol, q.rel_tol * std::fabs(total));
        if (err <= tol) break;
        if (intervals >= q.max_refinements) break;
        Segment s = heap.top();
        heap.pop();
        double m = 0.5 * (s.a + s.b);
        if (!(m > s.a && m < s.b) || std::fabs(s.b - s.a) < 1e-14 * std::fabs(m)) {
            frozen.push_back(s);
            continue;
        }
        Segment l = gk21(f, s.a, m), rr = gk21(f, m, s.b);
        r.evaluations += 42;
        ++intervals;
        total += l.value + rr.value - s.value;
        err += l.err + rr.err - s.err;
        heap.push(l);
        heap.push(rr);
    }
    CompensatedSum vs, es;
    while (!heap.empty()) {
        vs.add(heap.top().value);
        es.add(heap.top().err);
        heap.pop();
    }
    for (const auto& s : frozen) {
        vs.add(s.value);
        es.add(s.err);
    }
    r.value = vs.value();
    r.err_estimate = es.value();
    double tol = std::max(q.abs_tol, q.rel_tol * std::fabs(r.value));
    r.converged = std::isfinite(r.value) && r.err_estimate <= tol;
    return r;
}

// Directions on a half sphere (n = 2: angle; n = 3: (z, phi)) and their weights.
Point direction2(double th) { return Point{std::cos(th), std::sin(th)}; }
Point direction3(double z, double phi) {
    double w = std::sqrt(std::max(0.0, 1.0 - z * z));
    return Point{w * std::cos(phi), w * std::sin(phi), z};
}

}  // namespace

void QuadSpec::validate() const {
    if (!(abs_tol > 0) || !(rel_tol > 0)) throw std::invalid_argument("QuadSpec: tolerances must be positive");
    if (max_refinements < 1) throw std::invalid_argument("QuadSpec: max_refinements must be >= 1");
    if (mc_samples < 1) throw std::invalid_argument("QuadSpec: mc_samples must be >= 1");
    for (std::size_t i = 0; i < pv_cutoffs.size(); ++i) {
        if (!(pv_cutoffs[i] > 0)) throw std::invalid_argument("QuadSpec: pv_cutoffs must be positive");
        if (i > 0 && !(pv_cutoffs[i] < pv_cutoffs[i - 1]))
            throw std::invalid_argument("QuadSpec: pv_cutoffs must be strictly decreasing");
    }
}

IntegralResult integrate_adaptive(const Fn1& f, double a, double b, const QuadSpec& q) {
    if (std::isnan(a) || std::isnan(b)) throw std::invalid_argument("integrate_adaptive: NaN limit");
    if (a > b) {
        IntegralResult r = integrate_adaptive(f, b, a, q);
        r.value = -r.value;
        return r;
    }
    Mapped m = map_interval(f, a, b);
    return adaptive_core(m.g, m.a, m.b, q);
}

IntegralResult integrate_adaptive(const Fn1& f, double a, double b, std::vector<double> breaks,
                                  const QuadSpec& q) {
    if (a > b) {
        IntegralResult r = integrate_adaptive(f, b, a, breaks, q);
        r.value = -r.value;
        return r;
    }
    std::vector<double> pts{a};
    std::sort(breaks.begin(), breaks.end());
    for (double t : breaks)
        if (t > pts.back() && t < b) pts.push_back(t);
    pts.push_back(b);
    IntegralResult total;
    QuadSpec sub = q;
    sub.abs_tol = q.abs_tol / static_cast<double>(pts.size() - 1);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) total += integrate_adaptive(f, pts[i], pts[i + 1], sub);
    return total;
}

IntegralResult integrate_box(const FnN& f, const Point& lo, const Point& hi, const QuadSpec& q) {
    const int n = lo.n;
    if (n < 1 || n > 3 || hi.n != n) throw std::invalid_argument("integrate_box: dimension must be 1..3");
    IntegralResult total;
    bool inner_ok = true;
    double inner_err = 0;
    long evals = 0;
    QuadSpec inner = q;
    inner.abs_tol = q.abs_tol * 0.1;
    inner.rel_tol = q.rel_tol * 0.1;
    std::function<double(int, Point&)> rec = [&](int dim, Point& x) -> double {
        if (dim == n) {
            ++evals;
            return f(x);
        }
        Fn1 g = [&, dim](double t) {
            x[dim] = t;
            return rec(dim + 1, x);
        };
        const QuadSpec& use = dim == 0 ? q : inner;
        IntegralResult r = integrate_adaptive(g, lo[dim], hi[dim], use);
        if (dim > 0) {
            inner_ok = inner_ok && r.converged;
            inner_err = std::max(inner_err, r.err_estimate);
            return r.value;
        }
        total = r;
        return r.value;
    };
    Point x(n);
    rec(0, x);
    total.converged = total.converged && inner_ok;
    total.err_estimate += inner_err * std::fabs(hi[0] - lo[0]);
    total.evaluations = evals;
    return total;
}

IntegralResult integrate_pv(const PvProblem& pb, const QuadSpec& q) {
    q.validate();
    const int n = pb.n;
    if (n < 1 || n > 3) throw std::invalid_argument("integrate_pv: n must be 1, 2 or 3");
    if (pb.x0.n != n) throw std::invalid_argument("integrate_pv: x0 has wrong dimension");
    std::vector<double> cut = q.pv_cutoffs;
    if (cut.empty()) {
        double e = pb.first_cutoff;
        for (int k = 0; k < std::max(2, pb.n_cutoffs); ++k, e *= 0.5) cut.push_back(e);
    }
    const double eps0 = cut.front();

    QuadSpec inner = q;
    inner.abs_tol = q.abs_tol * 0.05;
    inner.rel_tol = q.rel_tol * 0.05;
    bool all_ok = true;
    double inner_err = 0;
    long evals = 0;

    // Radial integral of the folded integrand along +-omega over (r_lo, r_hi).
    std::vector<double> brk;
    int mode = 0;  // 0: integrand + regular, 1: integrand, 2: regular
    auto radial = [&](const Point& omega, double r_lo, double r_hi) -> double {
        brk.clear();
        if (pb.ray_breaks) {
            pb.ray_breaks(omega, brk);
            Point neg = -1.0 * omega;
            pb.ray_breaks(neg, brk);
        }
        std::vector<double> local = brk;
        Fn1 g = [&](double rho) {
            evals += 2;
            Point yp = axpy(pb.x0, rho, omega), ym = axpy(pb.x0, -rho, omega);
            double v = 0;
            if (mode != 2) v += pb.integrand(yp) + pb.integrand(ym);
            if (mode != 1 && pb.regular) v += pb.regular(yp) + pb.regular(ym);
            return n == 1 ? v : v * std::pow(rho, n - 1);
        };
        IntegralResult r;
        if (std::isinf(r_hi)) {
            // algebraic tails become exponential in v = log(rho / R1)
            double R1 = std::max(2 * r_lo, 8 * (1 + pb.x0.norm()));
            r = integrate_adaptive(g, r_lo, R1, local, inner);
            std::vector<double> vb;
            for (double b : local)
                if (b > R1) vb.push_back(std::log(b / R1));
            Fn1 gt = [&](double v) {
                double rho = R1 * std::exp(v);
                return std::isfinite(rho) ? g(rho) * rho : 0.0;
            };
            r += integrate_adaptive(gt, 0.0, kInf, vb, inner);
        } else {
            r = integrate_adaptive(g, r_lo, r_hi, local, inner);
        }
        all_ok = all_ok && r.converged;
        inner_err += r.err_estimate;
        return r.value;
    };

    auto over_directions = [&](double r_lo, double r_hi, const QuadSpec& outer) -> IntegralResult {
        if (n == 1) {
            IntegralResult r;
            r.value = radial(Point{1.0}, r_lo, r_hi);
            return r;
        }
        if (n == 2) {
            Fn1 g = [&](double th) { return radial(direction2(th), r_lo, r_hi); };
            return integrate_adaptive(g, 0.0, std::numbers::pi, pb.angle_breaks, outer);
        }
        QuadSpec mid = outer;
        mid.abs_tol *= 0.1;
        mid.rel_tol *= 0.1;
        Fn1 gz = [&](double z) {
            Fn1 gp = [&](double phi) { return radial(direction3(z, phi), r_lo, r_hi); };
            IntegralResult r = integrate_adaptive(gp, 0.0, 2 * std::numbers::pi, mid);
            all_ok = all_ok && r.converged;
            inner_err += r.err_estimate;
            return r.value;
        };
        return integrate_adaptive(gz, 0.0, 1.0, outer);
    };

    IntegralResult base = over_directions(eps0, pb.outer_radius, q);
    all_ok = all_ok && base.converged;
    double quad_err = base.err_estimate;
    if (pb.regular) {
        mode = 2;
        IntegralResult core = over_directions(0.0, eps0, q);
        all_ok = all_ok && core.converged;
        quad_err += core.err_estimate;
        base.value += core.value;
    }
    mode = 1;

    const std::size_t K = cut.size();
    std::vector<double> vals(K);
    vals[0] = base.value;
    QuadSpec ann = q;
    for (std::size_t k = 1; k < K; ++k) {
        IntegralResult a = over_directions(cut[k], cut[k - 1], ann);
        all_ok = all_ok && a.converged;
        quad_err += a.err_estimate;
        vals[k] = vals[k - 1] + a.value;
    }

    // Richardson table with orders p, p+2, ... merged with the extra exponents
    std::vector<double> orders;
    for (std::size_t j = 0; j < K; ++j) orders.push_back(pb.leading_exponent + 2.0 * static_cast<double>(j));
    for (double e : pb.extra_exponents)
        if (e > 0) orders.push_back(e);
    std::sort(orders.begin(), orders.end());
    orders.erase(std::unique(orders.begin(), orders.end(), [](double a, double b) { return std::fabs(a - b) < 1e-9; }),
                 orders.end());
    std::vector<std::vector<double>> T(K);
    for (std::size_t k = 0; k < K; ++k) {
        T[k].push_back(vals[k]);
        for (std::size_t j = 1; j <= k; ++j) {
            double p = orders[j - 1];
            double f = std::pow(cut[k - 1] / cut[k], p);
            T[k].push_back(T[k][j - 1] + (T[k][j - 1] - T[k - 1][j - 1]) / (f - 1.0));
        }
    }
    IntegralResult out;
    out.value = T[K - 1][K - 1];
    double diff = std::fabs(T[K - 1][K - 1] - T[K - 2][K - 2]);
    out.err_estimate = diff + quad_err + inner_err;
    out.evaluations = evals;
    double tol = std::max({q.abs_tol, q.rel_tol * std::fabs(out.value), 4.0 * (quad_err + inner_err)});
    out.converged = all_ok && std::isfinite(out.value) && diff <= tol;
    return out;
}

IntegralResult integrate_pv(const Fn1& f, double x0, double a, double b, const QuadSpec& q,
                            double leading_exponent) {
    if (!(a < x0 && x0 < b)) throw std::invalid_argument("integrate_pv: x0 must be interior");
    double reach = std::min(x0 - a, b - x0);
    PvProblem pb;
    pb.n = 1;
    pb.x0 = Point{x0};
    pb.integrand = [&](const Point& y) {
        double t = y[0];
        return (t < a || t > b) ? 0.0 : f(t);
    };
    double far = std::max(x0 - a, b - x0);
    pb.ray_breaks = [reach](const Point&, std::vector<double>& br) { br.push_back(reach); };
    pb.outer_radius = far;
    pb.leading_exponent = leading_exponent;
    pb.first_cutoff = std::min(0.1, 0.25 * reach);
    return integrate_pv(pb, q);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

SeededStream::SeededStream(std::uint64_t seed, std::uint64_t stream) : eng_(mix_seed(seed, stream)) {}

double SeededStream::uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

double SeededStream::uniform(double a, double b) { return a + (b - a) * uniform(); }

double SeededStream::normal() { return nd_(eng_); }

IntegralResult integrate_mc(const FnN& f, const McRegion& region, const QuadSpec& q) {
    if (q.mc_samples < 1) throw std::domain_error("integrate_mc: zero samples");
    const int n = region.lo.n;
    if (n < 1 || region.hi.n != n) throw std::invalid_argument("integrate_mc: bad bounding box");
    double vol = 1;
    for (int i = 0; i < n; ++i) vol *= region.hi[i] - region.lo[i];

    constexpr long kChunk = 4096;
    const long N = q.mc_samples;
    const long chunks = (N + kChunk - 1) / kChunk;
    // Chan et al. pairwise merge of per-chunk moments, in chunk order.
    double mean = 0, m2 = 0;
    long count = 0;
    Point x(n);
    for (long c = 0; c < chunks; ++c) {
        SeededStream rng(q.rng_seed, static_cast<std::uint64_t>(c));
        long m = std::min(kChunk, N - c * kChunk);
        double cm = 0, cm2 = 0;
        for (long i = 0; i < m; ++i) {
            for (int d = 0; d < n; ++d) x[d] = rng.uniform(region.lo[d], region.hi[d]);
            double v = (!region.contains || region.contains(x)) ? f(x) : 0.0;
            double delta = v - cm;
            cm += delta / static_cast<double>(i + 1);
            cm2 += delta * (v - cm);
        }
        long tot = count + m;
        double delta = cm - mean;
        mean += delta * static_cast<double>(m) / static_cast<double>(tot);
        m2 += cm2 + delta * delta * static_cast<double>(count) * static_cast<double>(m) / static_cast<double>(tot);
        count = tot;
    }
    IntegralResult r;
    r.value = vol * mean;
    double var = count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
    r.err_estimate = vol * std::sqrt(var / static_cast<double>(count));
    r.evaluations = count;
    r.converged = std::isfinite(r.value);
    return r;
}

}  // namespace nonlocal
