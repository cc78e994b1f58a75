#include "nonlocal/perimeter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nonlocal {

namespace {

constexpr double kPi = std::numbers::pi;

IntervalList intersect_lists(const IntervalList& a, const IntervalList& b) {
    IntervalList out;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        double lo = std::max(a[i].first, b[j].first), hi = std::min(a[i].second, b[j].second);
        if (lo < hi) out.push_back({lo, hi});
        if (a[i].second < b[j].second)
            ++i;
        else
            ++j;
    }
    return out;
}

IntervalList complement_list(const IntervalList& a) {
    IntervalList out;
    double from = -kInf;
    for (const auto& iv : a) {
        if (from < iv.first) out.push_back({from, iv.first});
        from = iv.second;
    }
    if (from < kInf) out.push_back({from, kInf});
    return out;
}

// roots of A t^2 + 2 B t + C < 0 with A > 0
IntervalList quadratic_chord(double A, double B, double C) {
    double D = B * B - A * C;
    if (!(D > 0)) return {};
    double sq = std::sqrt(D);
    // stable pair of roots
    double q = -(B + std::copysign(sq, B));
    double t1 = q / A, t2 = q != 0 ? C / q : -t1;
    if (t1 > t2) std::swap(t1, t2);
    return {{t1, t2}};
}

// Radius of a ball about the origin containing a bounded region.
double containing_radius(const Region& r) {
    double best = kInf;
    for (const auto& p : r.parts) {
        if (p.complement || !p.shape.bounded()) continue;
        auto [lo, hi] = p.shape.bounding_box();
        double m = 0;
        for (int i = 0; i < r.n; ++i) m += std::max(lo[i] * lo[i], hi[i] * hi[i]);
        best = std::min(best, std::sqrt(m));
    }
    return best;
}

// Boundary crossing points of pairs of planar shapes (kinks of the offset integrand).
void corner_points(const ShapeDescriptor& a, const ShapeDescriptor& b, std::vector<Point>& out) {
    auto circle_line = [&](const Point& c, double R, double x1) {
        double h = R * R - (x1 - c[0]) * (x1 - c[0]);
        if (h < 0) return;
        out.push_back(Point{x1, c[1] + std::sqrt(h)});
        out.push_back(Point{x1, c[1] - std::sqrt(h)});
    };
    using K = ShapeKind;
    if (a.kind == K::Ball && b.kind == K::HalfSpace) circle_line(a.center, a.radius, b.offset);
    if (b.kind == K::Ball && a.kind == K::HalfSpace) circle_line(b.center, b.radius, a.offset);
    if (a.kind == K::Ellipsoid && b.kind == K::HalfSpace) {
        double ax = 1 + a.eps, t = 1 - b.offset * b.offset / (ax * ax);
        if (t >= 0) {
            out.push_back(Point{b.offset, std::sqrt(t)});
            out.push_back(Point{b.offset, -std::sqrt(t)});
        }
    }
    if (a.kind == K::HalfSpace && b.kind == K::Ellipsoid) corner_points(b, a, out);
    if (a.kind == K::Ball && b.kind == K::Ball) {
        Point d = b.center - a.center;
        double L = d.norm();
        if (L == 0 || L > a.radius + b.radius || L < std::fabs(a.radius - b.radius)) return;
        double x = (L * L + a.radius * a.radius - b.radius * b.radius) / (2 * L);
        double h = std::sqrt(std::max(0.0, a.radius * a.radius - x * x));
        Point u = (1 / L) * d, v{-u[1], u[0]};
        Point m = axpy(a.center, x, u);
        out.push_back(axpy(m, h, v));
        out.push_back(axpy(m, -h, v));
    }
}

// Offsets z (line x = z w_perp + t w) where the chord structure changes.
void offset_breaks(const ShapeDescriptor& s, const Point& wp, std::vector<double>& br) {
    switch (s.kind) {
        case ShapeKind::Ball: {
            double c = dot(s.center, wp);
            br.push_back(c - s.radius);
            br.push_back(c + s.radius);
            break;
        }
        case ShapeKind::Ellipsoid: {
            double a = 1 + s.eps, h = std::hypot(a * wp[0], wp[1]);
            br.push_back(-h);
            br.push_back(h);
            break;
        }
        default: break;
    }
}

IntegralResult interaction_planar(const SetPair& pr, double Rb, const QuadSpec& q) {
    const double sigma = pr.kernel.sigma;
    std::vector<ShapeDescriptor> shapes;
    for (const auto* r : {&pr.A, &pr.B})
        for (const auto& p : r->parts) shapes.push_back(p.shape);
    std::vector<Point> corners;
    for (std::size_t i = 0; i < shapes.size(); ++i)
        for (std::size_t j = i + 1; j < shapes.size(); ++j) corner_points(shapes[i], shapes[j], corners);
    bool has_halfspace = false;
    for (const auto& s : shapes) has_halfspace = has_halfspace || s.kind == ShapeKind::HalfSpace;

    QuadSpec inner = q;
    inner.abs_tol = 0.1 * q.abs_tol;
    inner.rel_tol = 0.1 * q.rel_tol;
    bool inner_ok = true;
    long evals = 0;
    auto F = [&](double theta) {
        const Point w{std::cos(theta), std::sin(theta)}, wp{-w[1], w[0]};
        std::vector<double> br;
        for (const auto& s : shapes) offset_breaks(s, wp, br);
        for (const Point& c : corners) br.push_back(dot(c, wp));
        auto g = [&](double z) {
            Point x0 = z * wp;
            return line_interaction(region_chord(pr.A, x0, w), region_chord(pr.B, x0, w), sigma);
        };
        IntegralResult r = integrate_adaptive(g, -Rb, Rb, br, inner);
        inner_ok = inner_ok && r.converged;
        evals += r.evaluations;
        return r.value;
    };
    std::vector<double> tb;
    if (has_halfspace) tb.push_back(kPi / 2);
    IntegralResult out = integrate_adaptive(F, 0.0, kPi, tb, q);
    out.converged = out.converged && inner_ok;
    out.evaluations = evals;
    return out;
}

IntegralResult interaction_mc(const SetPair& pr, double Rb, const QuadSpec& q) {
    const int n = pr.kernel.n;
    const double sigma = pr.kernel.sigma;
    const double scale = 0.5 * unit_sphere_area(n) * unit_ball_volume(n - 1) * std::pow(Rb, n - 1);
    SeededStream rng(q.rng_seed, 0xC0FF);
    double mean = 0, m2 = 0;
    long count = 0;
    for (long k = 0; k < q.mc_samples; ++k) {
        Point w(n);
        do {
            for (int i = 0; i < n; ++i) w[i] = rng.normal();
        } while (!(w.norm2() > 0));
        w = (1 / w.norm()) * w;
        // uniform point of the (n-1)-ball of radius Rb inside w-perp
        Point z(n);
        do {
            for (int i = 0; i < n; ++i) z[i] = rng.uniform(-Rb, Rb);
            z = axpy(z, -dot(z, w), w);
        } while (!(z.norm() < Rb));
        double y = line_interaction(region_chord(pr.A, z, w), region_chord(pr.B, z, w), sigma);
        ++count;
        double d = y - mean;
        mean += d / count;
        m2 += d * (y - mean);
    }
    IntegralResult out;
    out.value = scale * mean;
    out.err_estimate = count > 1 ? scale * std::sqrt(m2 / (count - 1) / count) : kInf;
    out.evaluations = count;
    out.converged = std::isfinite(out.value);
    return out;
}

}  // namespace

void PerimeterKernel::validate() const {
    if (n < 1 || n > kMaxDim) throw std::invalid_argument("PerimeterKernel: dimension out of range");
    if (!(sigma > 0 && sigma < 1)) throw std::invalid_argument("PerimeterKernel: sigma must lie in (0,1)");
}

bool Region::contains(const Point& x) const {
    for (const auto& p : parts)
        if (p.shape.contains(x) == p.complement) return false;
    return true;
}

bool Region::bounded() const {
    for (const auto& p : parts)
        if (!p.complement && p.shape.bounded()) return true;
    return false;
}

Region region_of(const ShapeDescriptor& s) { return Region{s.n, {{s, false}}}; }
Region complement_of(const ShapeDescriptor& s) { return Region{s.n, {{s, true}}}; }

Region intersect(const Region& a, const Region& b) {
    if (a.n != b.n) throw std::invalid_argument("intersect: dimension mismatch");
    Region r = a;
    r.parts.insert(r.parts.end(), b.parts.begin(), b.parts.end());
    return r;
}

IntervalList shape_chord(const ShapeDescriptor& s, const Point& x0, const Point& w) {
    switch (s.kind) {
        case ShapeKind::Ball: {
            Point d = x0 - s.center;
            return quadratic_chord(1.0, dot(w, d), d.norm2() - s.radius * s.radius);
        }
        case ShapeKind::HalfSpace: {
            double gap = s.offset - x0[0];
            if (w[0] > 0) return {{-kInf, gap / w[0]}};
            if (w[0] < 0) return {{gap / w[0], kInf}};
            if (gap > 0) return {{-kInf, kInf}};
            return {};
        }
        case ShapeKind::Ellipsoid: {
            double A = 0, B = 0, C = -1;
            for (int i = 0; i < s.n; ++i) {
                double inv = i == 0 ? 1 / ((1 + s.eps) * (1 + s.eps)) : 1.0;
                A += w[i] * w[i] * inv;
                B += w[i] * x0[i] * inv;
                C += x0[i] * x0[i] * inv;
            }
            return quadratic_chord(A, B, C);
        }
        default: throw std::invalid_argument("shape_chord: only balls, half-spaces and ellipsoids have chords");
    }
}

IntervalList region_chord(const Region& r, const Point& x0, const Point& w) {
    IntervalList cur{{-kInf, kInf}};
    for (const auto& p : r.parts) {
        IntervalList c = shape_chord(p.shape, x0, w);
        cur = intersect_lists(cur, p.complement ? complement_list(c) : c);
        if (cur.empty()) break;
    }
    return cur;
}

double interval_pair_kernel(std::pair<double, double> I, std::pair<double, double> J, double sigma) {
    const double p1 = I.first, p2 = I.second, q1 = J.first, q2 = J.second;
    if (std::isinf(p1) && std::isinf(q2)) return kInf;
    const double e = 1 - sigma;
    // terms containing an infinite endpoint cancel in pairs
    double v = 0;
    if (!std::isinf(p1)) v += std::pow(q1 - p1, e);
    v -= std::pow(std::max(0.0, q1 - p2), e);
    if (!std::isinf(p1) && !std::isinf(q2)) v -= std::pow(q2 - p1, e);
    if (!std::isinf(q2)) v += std::pow(q2 - p2, e);
    return std::max(0.0, v) / (sigma * e);
}

double line_interaction(const IntervalList& a, const IntervalList& b, double sigma) {
    double sum = 0;
    for (const auto& I : a)
        for (const auto& J : b) sum += I.second <= J.first ? interval_pair_kernel(I, J, sigma)
                                                              : interval_pair_kernel(J, I, sigma);
    return sum;
}

void SetPair::validate(int samples, std::uint64_t seed) const {
    kernel.validate();
    if (A.n != kernel.n || B.n != kernel.n) throw std::invalid_argument("SetPair: dimension mismatch");
    if (!A.bounded() && !B.bounded()) throw std::invalid_argument("SetPair: one of the sets must be bounded");
    const Region& bnd = A.bounded() ? A : B;
    const Region& other = A.bounded() ? B : A;
    const double R = containing_radius(bnd);
    SeededStream rng(seed, 0xD15);
    for (int k = 0; k < samples; ++k) {
        Point x(kernel.n);
        for (int i = 0; i < kernel.n; ++i) x[i] = rng.uniform(-R, R);
        if (bnd.contains(x) && other.contains(x)) throw std::invalid_argument("SetPair: sets overlap");
    }
}

IntegralResult interaction(const SetPair& pr, const QuadSpec& q) {
    pr.validate();
    q.validate();
    const double Rb = containing_radius(pr.A.bounded() ? pr.A : pr.B);
    switch (pr.kernel.n) {
        case 1: {
            IntegralResult r;
            r.value = line_interaction(region_chord(pr.A, Point{0.0}, Point{1.0}),
                                       region_chord(pr.B, Point{0.0}, Point{1.0}), pr.kernel.sigma);
            r.evaluations = 1;
            r.converged = std::isfinite(r.value);
            return r;
        }
        case 2: return interaction_planar(pr, Rb, q);
        default: return interaction_mc(pr, Rb, q);
    }
}

PerimeterResult frac_perimeter(const ShapeDescriptor& E, const ShapeDescriptor& Omega, const PerimeterKernel& k,
                               const QuadSpec& q) {
    k.validate();
    if (!Omega.bounded()) throw std::invalid_argument("frac_perimeter: Omega must be bounded");
    if (E.n != k.n || Omega.n != k.n) throw std::invalid_argument("frac_perimeter: dimension mismatch");
    const Region in_e = intersect(region_of(E), region_of(Omega));
    const Region in_c = intersect(complement_of(E), region_of(Omega));
    const Region out_e = intersect(region_of(E), complement_of(Omega));
    const Region out_c = intersect(complement_of(E), complement_of(Omega));
    PerimeterResult r;
    QuadSpec q2 = q, q3 = q;
    q2.rng_seed = mix_seed(q.rng_seed, 2);
    q3.rng_seed = mix_seed(q.rng_seed, 3);
    r.inside = interaction({in_e, in_c, k}, q);
    r.cross_in_out = interaction({in_e, out_c, k}, q2);
    r.cross_out_in = interaction({out_e, in_c, k}, q3);
    r.total = r.inside;
    r.total += r.cross_in_out;
    r.total += r.cross_out_in;
    return r;
}

double classical_perimeter_in_ball(const ShapeDescriptor& E, double rho) {
    if (!(rho > 0)) throw std::domain_error("classical_perimeter_in_ball: rho must be positive");
    const int n = E.n;
    if (E.kind == ShapeKind::HalfSpace) {
        double h = rho * rho - E.offset * E.offset;
        return h > 0 ? unit_ball_volume(n - 1) * std::pow(h, 0.5 * (n - 1)) : 0.0;
    }
    if (E.kind == ShapeKind::Ball) {
        double c = E.center.norm();
        if (c + E.radius <= rho) return unit_sphere_area(n) * std::pow(E.radius, n - 1);
        if (c - E.radius >= rho || E.radius - c >= rho) return 0.0;
        throw std::domain_error("classical_perimeter_in_ball: ball boundary crosses the sphere");
    }
    throw std::invalid_argument("classical_perimeter_in_ball: needs a ball or a half-space");
}

InterpolationResult interpolation_check(const ShapeDescriptor& E, double R, double eps, const PerimeterKernel& k,
                                        const QuadSpec& q) {
    k.validate();
    const double s = k.sigma;
    if (!(eps > 0 && eps < std::pow(3.0, -1 / s)))
        throw std::domain_error("interpolation_check: eps must lie in (0, 3^{-1/s})");
    if (!(R > 0)) throw std::domain_error("interpolation_check: R must be positive");
    InterpolationResult r;
    r.lhs = frac_perimeter(E, make_ball(k.n, R), k, q).total;
    const double big = (1 + std::pow(eps, -1 / s)) * R;
    r.tail = eps * std::pow(R, k.n - s) / s;
    r.rhs = std::pow(eps, -(1 - s) / s) * std::pow(R, 1 - s) / (1 - s) * classical_perimeter_in_ball(E, big) + r.tail;
    r.ratio = r.lhs.value / r.rhs;
    return r;
}

HalfspaceEnergy halfspace_energy(const FracParams& p, const QuadSpec& q) {
    p.validate();
    const int n = p.n;
    const double s = p.s, h = 0.5 * (n - 1);
    HalfspaceEnergy out;
    out.closed_form = phi_halfspace(n, s);
    // [0,1/2] with r = u^{1/(1-s)}; [1/2,1] with r = 1 - w^2
    auto near0 = [&](double u) {
        double r = std::pow(u, 1 / (1 - s));
        return std::pow(1 - r * r, h) / (1 - s);
    };
    auto near1 = [&](double w) {
        double r = 1 - w * w;
        return std::pow(r, -s) * std::pow(w, n - 1) * std::pow(2 - w * w, h) * 2 * w;
    };
    out.radial = integrate_adaptive(near0, 0.0, std::pow(0.5, 1 - s), q);
    out.radial += integrate_adaptive(near1, 0.0, std::sqrt(0.5), q);
    // int_0^pi sin^{s-1} = 2 int_0^{pi/2}, theta = v^{1/s}
    auto ang = [&](double v) {
        double th = std::pow(v, 1 / s);
        return th == 0 ? 2 / s : 2 / s * std::pow(std::sin(th) / th, s - 1);
    };
    out.angular = integrate_adaptive(ang, 0.0, std::pow(kPi / 2, s), q);
    const double at = a_tilde_ext(n, s);
    out.product = at * at * unit_ball_volume(n - 1) * out.radial.value * out.angular.value;
    return out;
}

MomentResult moment_integrals(int n, const QuadSpec& q) {
    if (n < 2 || n > kMaxDim) throw std::invalid_argument("moment_integrals: n must lie in 2..6");
    q.validate();
    MomentResult m;
    m.n = n;
    m.sphere_exact = 3 * unit_sphere_area(n) / (n * (n + 2.0));
    m.ball_exact = m.sphere_exact / (n + 4);
    const double sn2 = unit_sphere_area(n - 1);
    m.sphere_quad = integrate_adaptive(
        [&](double phi) { return sn2 * std::pow(std::cos(phi), 4) * std::pow(std::sin(phi), n - 2); }, 0.0, kPi, q);
    const double wn1 = unit_ball_volume(n - 1);
    m.ball_quad = integrate_adaptive(
        [&](double x) { return wn1 * std::pow(x, 4) * std::pow(std::max(0.0, 1 - x * x), 0.5 * (n - 1)); }, -1.0, 1.0,
        q);

    auto welford = [&](auto&& draw, double scale, std::uint64_t stream) {
        SeededStream rng(q.rng_seed, stream);
        double mean = 0, m2 = 0;
        for (long k = 1; k <= q.mc_samples; ++k) {
            double y = draw(rng), d = y - mean;
            mean += d / k;
            m2 += d * (y - mean);
        }
        IntegralResult r;
        r.value = scale * mean;
        r.err_estimate = scale * std::sqrt(m2 / (q.mc_samples - 1) / q.mc_samples);
        r.evaluations = q.mc_samples;
        return r;
    };
    m.ball_mc = welford(
        [n](SeededStream& rng) {
            Point x(n);
            for (int i = 0; i < n; ++i) x[i] = rng.uniform(-1, 1);
            return x.norm2() < 1 ? std::pow(x[0], 4) : 0.0;
        },
        std::ldexp(1.0, n), 0xBA11);
    m.sphere_mc = welford(
        [n](SeededStream& rng) {
            Point g(n);
            do {
                for (int i = 0; i < n; ++i) g[i] = rng.normal();
            } while (!(g.norm2() > 0));
            return std::pow(g[0] / g.norm(), 4);
        },
        unit_sphere_area(n), 0x5FE);
    return m;
}

}  // namespace nonlocal
