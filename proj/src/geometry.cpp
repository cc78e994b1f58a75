#include "nonlocal/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "json.hpp"

namespace nonlocal {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLevelTol = 1e-9;

// Unit vector from hyperspherical angles; the last angle runs over (0, 2 pi).
Point sphere_point(int n, const Point& ang) {
    Point u(n);
    double sprod = 1;
    for (int i = 0; i < n - 1; ++i) {
        u[i] = sprod * std::cos(ang[i]);
        sprod *= std::sin(ang[i]);
    }
    u[n - 1] = sprod;
    return u;
}

Chart sphere_chart(int n, std::function<Point(const Point&)> embed) {
    Chart c;
    c.param_dim = n - 1;
    c.lo = Point(n - 1);
    c.hi = Point(n - 1);
    for (int i = 0; i < n - 1; ++i) c.hi[i] = (i == n - 2) ? 2 * kPi : kPi;
    c.map = [n, embed](const Point& ang) { return embed(sphere_point(n, ang)); };
    return c;
}

// Nearest point on the ellipse (x/e0)^2 + (y/e1)^2 = 1, e0 >= e1, for y0, y1 >= 0.
double ellipse_distance(double e0, double e1, double y0, double y1, double& x0, double& x1) {
    if (y1 > 0) {
        if (y0 > 0) {
            double z0 = y0 / e0, z1 = y1 / e1, g = z0 * z0 + z1 * z1 - 1;
            if (g == 0) {
                x0 = y0;
                x1 = y1;
                return 0;
            }
            double r0 = (e0 / e1) * (e0 / e1), n0 = r0 * z0;
            double s0 = z1 - 1, s1 = g < 0 ? 0 : std::hypot(n0, z1) - 1, sb = 0;
            for (int it = 0; it < 1100; ++it) {
                sb = 0.5 * (s0 + s1);
                if (sb == s0 || sb == s1) break;
                double a = n0 / (sb + r0), b = z1 / (sb + 1), gg = a * a + b * b - 1;
                if (gg > 0)
                    s0 = sb;
                else if (gg < 0)
                    s1 = sb;
                else
                    break;
            }
            x0 = r0 * y0 / (sb + r0);
            x1 = y1 / (sb + 1);
            return std::hypot(x0 - y0, x1 - y1);
        }
        x0 = 0;
        x1 = e1;
        return std::fabs(y1 - e1);
    }
    double num = e0 * y0, den = e0 * e0 - e1 * e1;
    if (num < den) {
        double q = num / den;
        x0 = e0 * q;
        x1 = e1 * std::sqrt(1 - q * q);
        return std::hypot(x0 - y0, x1);
    }
    x0 = e0;
    x1 = 0;
    return std::fabs(y0 - e0);
}

double smooth_step(double t) {
    auto h = [](double x) { return x > 0 ? std::exp(-1 / x) : 0.0; };
    if (t <= 0) return 0;
    if (t >= 1) return 1;
    double a = h(t), b = h(1 - t);
    return a / (a + b);
}

// lower graph of the perturbed disk over (0, 1/2)
double disk_graph(double x, double eps, double alpha) {
    return -std::sqrt(1 - x * x) - bump_eta_scaled(x, eps, alpha);
}

bool in_disk_box(const Point& x) { return x[0] > 0 && x[0] < 0.5 && x[1] > -1.5 && x[1] < -0.5; }

void require_ball_or_ellipsoid(const ShapeDescriptor& s, const char* who) {
    if (s.kind != ShapeKind::Ball && s.kind != ShapeKind::Ellipsoid)
        throw std::invalid_argument(std::string(who) + ": needs a ball or an ellipsoid");
}

}  // namespace

bool Chart::contains_param(const Point& r) const {
    for (int i = 0; i < param_dim; ++i)
        if (!(r[i] > lo[i] && r[i] < hi[i])) return false;
    return !in_domain || in_domain(r);
}

std::vector<Point> Chart::sample_params(int per_axis) const {
    if (per_axis < 1) throw std::invalid_argument("Chart: per_axis must be positive");
    std::vector<Point> out;
    std::vector<int> idx(param_dim, 0);
    while (true) {
        Point r(param_dim);
        for (int i = 0; i < param_dim; ++i) r[i] = lo[i] + (idx[i] + 0.5) * (hi[i] - lo[i]) / per_axis;
        if (!in_domain || in_domain(r)) out.push_back(r);
        int k = 0;
        while (k < param_dim && ++idx[k] == per_axis) idx[k++] = 0;
        if (k == param_dim) break;
    }
    return out;
}

std::string to_string(ShapeKind k) {
    switch (k) {
        case ShapeKind::Ball: return "ball";
        case ShapeKind::HalfSpace: return "halfspace";
        case ShapeKind::Ellipsoid: return "ellipsoid";
        case ShapeKind::InnerParallel: return "inner_parallel";
        case ShapeKind::PerturbedDisk: return "perturbed_disk";
    }
    return "unknown";
}

bool ShapeDescriptor::contains(const Point& x) const {
    if (kind == ShapeKind::InnerParallel) return base->contains(x) && boundary_distance(*base, x) > rho;
    return level(x) < 0;
}

double ShapeDescriptor::level(const Point& x) const {
    switch (kind) {
        case ShapeKind::Ball: return (x - center).norm() - radius;
        case ShapeKind::HalfSpace: return x[0] - offset;
        case ShapeKind::Ellipsoid: {
            const double a = 1 + eps;
            double q = x[0] * x[0] / (a * a), g2 = x[0] * x[0] / (a * a * a * a);
            for (int i = 1; i < n; ++i) {
                q += x[i] * x[i];
                g2 += x[i] * x[i];
            }
            // (q - 1) / |grad q| is first-order accurate as a signed distance
            return g2 > 0 ? (q - 1) / (2 * std::sqrt(g2)) : -1.0;
        }
        case ShapeKind::InnerParallel: {
            double d = boundary_distance(*base, x);
            return base->level(x) < 0 ? rho - d : rho + d;
        }
        case ShapeKind::PerturbedDisk:
            if (in_disk_box(x)) return disk_graph(x[0], eps, alpha) - x[1];
            return x.norm() - 1;
    }
    return 1;
}

bool ShapeDescriptor::bounded() const { return kind != ShapeKind::HalfSpace; }

std::pair<Point, Point> ShapeDescriptor::bounding_box() const {
    Point lo(n), hi(n);
    switch (kind) {
        case ShapeKind::Ball:
            for (int i = 0; i < n; ++i) {
                lo[i] = center[i] - radius;
                hi[i] = center[i] + radius;
            }
            break;
        case ShapeKind::HalfSpace: throw std::invalid_argument("bounding_box: half-space is unbounded");
        case ShapeKind::Ellipsoid:
            for (int i = 0; i < n; ++i) {
                hi[i] = i == 0 ? 1 + eps : 1;
                lo[i] = -hi[i];
            }
            break;
        case ShapeKind::InnerParallel: {
            auto [blo, bhi] = base->bounding_box();
            for (int i = 0; i < n; ++i) {
                lo[i] = blo[i] + rho;
                hi[i] = bhi[i] - rho;
            }
            break;
        }
        case ShapeKind::PerturbedDisk:
            for (int i = 0; i < 2; ++i) {
                lo[i] = -1 - eps;
                hi[i] = 1 + eps;
            }
            break;
    }
    return {lo, hi};
}

std::vector<Chart> ShapeDescriptor::charts() const {
    std::vector<Chart> out;
    switch (kind) {
        case ShapeKind::Ball: {
            if (n < 2) break;
            Point c = center;
            double R = radius;
            out.push_back(sphere_chart(n, [c, R](const Point& u) { return axpy(c, R, u); }));
            break;
        }
        case ShapeKind::HalfSpace: break;
        case ShapeKind::Ellipsoid: {
            double a = 1 + eps;
            out.push_back(sphere_chart(n, [a](const Point& u) {
                Point p = u;
                p[0] *= a;
                return p;
            }));
            break;
        }
        case ShapeKind::InnerParallel: {
            auto b = base;
            double r = rho;
            for (Chart c : base->charts()) {
                auto m = c.map;
                c.map = [b, r, m](const Point& t) {
                    Point p = m(t);
                    return axpy(p, -r, outward_normal(*b, p));
                };
                out.push_back(c);
            }
            break;
        }
        case ShapeKind::PerturbedDisk: {
            Chart arc;
            arc.lo = Point{-kPi / 3};
            arc.hi = Point{1.5 * kPi};
            arc.map = [](const Point& t) { return Point{std::cos(t[0]), std::sin(t[0])}; };
            out.push_back(arc);
            // graph over (0, 1/2), split so the bump support gets its own chart
            double c = std::pow(eps, 1 - 1 / alpha), w = 0.5 * std::pow(eps, 1 / alpha);
            std::vector<double> cuts{0.0};
            for (double b : {c - w, c + w})
                if (b > cuts.back() && b < 0.5) cuts.push_back(b);
            cuts.push_back(0.5);
            double e = eps, al = alpha;
            for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
                Chart g;
                g.lo = Point{cuts[i]};
                g.hi = Point{cuts[i + 1]};
                g.map = [e, al](const Point& t) { return Point{t[0], disk_graph(t[0], e, al)}; };
                out.push_back(g);
            }
            break;
        }
    }
    return out;
}

void ShapeDescriptor::validate() const {
    if (n < 1 || n > kMaxDim) throw std::invalid_argument("ShapeDescriptor: dimension out of range");
    switch (kind) {
        case ShapeKind::Ball:
            if (!(radius > 0)) throw std::invalid_argument("ShapeDescriptor: ball radius must be positive");
            if (center.n != n) throw std::invalid_argument("ShapeDescriptor: ball centre has wrong dimension");
            break;
        case ShapeKind::HalfSpace:
            if (!std::isfinite(offset)) throw std::invalid_argument("ShapeDescriptor: half-space offset must be finite");
            break;
        case ShapeKind::Ellipsoid:
            if (n < 2) throw std::invalid_argument("ShapeDescriptor: ellipsoid needs n >= 2");
            if (!(eps >= 0 && eps < 1)) throw std::invalid_argument("ShapeDescriptor: ellipsoid eps must be in [0,1)");
            break;
        case ShapeKind::InnerParallel:
            if (!base) throw std::invalid_argument("ShapeDescriptor: inner parallel set without base");
            base->validate();
            if (base->n != n) throw std::invalid_argument("ShapeDescriptor: base has wrong dimension");
            if (!(rho > 0 && rho < interior_ball_radius(*base)))
                throw std::domain_error("ShapeDescriptor: rho must lie in (0, interior ball radius)");
            break;
        case ShapeKind::PerturbedDisk:
            if (n != 2) throw std::invalid_argument("ShapeDescriptor: perturbed disk is planar");
            if (!(eps > 0 && eps < 0.25)) throw std::invalid_argument("ShapeDescriptor: eps must be in (0,1/4)");
            if (!(alpha > 1)) throw std::invalid_argument("ShapeDescriptor: alpha must exceed 1");
            break;
    }
    for (const Chart& c : charts()) {
        int per = c.param_dim == 1 ? 64 : 12;
        for (const Point& r : c.sample_params(per)) {
            double lv = level(c.map(r));
            if (!(std::fabs(lv) <= kLevelTol))
                throw std::invalid_argument("ShapeDescriptor: chart point off the boundary (level " +
                                            std::to_string(lv) + ")");
        }
    }
}

ShapeDescriptor make_ball(int n, double radius, const Point& center) {
    ShapeDescriptor s;
    s.kind = ShapeKind::Ball;
    s.n = n;
    s.radius = radius;
    s.center = center;
    s.validate();
    return s;
}

ShapeDescriptor make_ball(int n, double radius) { return make_ball(n, radius, Point(n)); }

ShapeDescriptor make_halfspace(int n, double offset) {
    ShapeDescriptor s;
    s.kind = ShapeKind::HalfSpace;
    s.n = n;
    s.offset = offset;
    s.validate();
    return s;
}

ShapeDescriptor make_ellipsoid(int n, double eps) {
    ShapeDescriptor s;
    s.kind = ShapeKind::Ellipsoid;
    s.n = n;
    s.eps = eps;
    s.validate();
    return s;
}

ShapeDescriptor make_inner_parallel(const ShapeDescriptor& base, double rho) {
    require_ball_or_ellipsoid(base, "make_inner_parallel");
    ShapeDescriptor s;
    s.kind = ShapeKind::InnerParallel;
    s.n = base.n;
    s.rho = rho;
    s.base = std::make_shared<const ShapeDescriptor>(base);
    s.validate();
    return s;
}

ShapeDescriptor make_perturbed_disk(double eps, double alpha) {
    ShapeDescriptor s;
    s.kind = ShapeKind::PerturbedDisk;
    s.n = 2;
    s.eps = eps;
    s.alpha = alpha;
    s.validate();
    return s;
}

namespace {

nlohmann::json shape_json(const ShapeDescriptor& s) {
    nlohmann::json j;
    j["schema"] = "nonlocal.shape.v1";
    j["kind"] = to_string(s.kind);
    j["n"] = s.n;
    switch (s.kind) {
        case ShapeKind::Ball: {
            j["radius"] = s.radius;
            std::vector<double> c(s.center.c.begin(), s.center.c.begin() + s.n);
            j["center"] = c;
            break;
        }
        case ShapeKind::HalfSpace: j["offset"] = s.offset; break;
        case ShapeKind::Ellipsoid: j["eps"] = s.eps; break;
        case ShapeKind::InnerParallel:
            j["rho"] = s.rho;
            j["base"] = shape_json(*s.base);
            break;
        case ShapeKind::PerturbedDisk:
            j["eps"] = s.eps;
            j["alpha"] = s.alpha;
            break;
    }
    return j;
}

ShapeDescriptor shape_parse(const nlohmann::json& j) {
    if (j.value("schema", std::string()) != "nonlocal.shape.v1")
        throw std::invalid_argument("shape_from_json: unknown or missing schema");
    const std::string kind = j.at("kind").get<std::string>();
    const int n = j.at("n").get<int>();
    if (kind == "ball") {
        auto c = j.at("center").get<std::vector<double>>();
        if (static_cast<int>(c.size()) != n) throw std::invalid_argument("shape_from_json: centre size");
        Point p(n);
        for (int i = 0; i < n; ++i) p[i] = c[i];
        return make_ball(n, j.at("radius").get<double>(), p);
    }
    if (kind == "halfspace") return make_halfspace(n, j.at("offset").get<double>());
    if (kind == "ellipsoid") return make_ellipsoid(n, j.at("eps").get<double>());
    if (kind == "inner_parallel") return make_inner_parallel(shape_parse(j.at("base")), j.at("rho").get<double>());
    if (kind == "perturbed_disk") return make_perturbed_disk(j.at("eps").get<double>(), j.at("alpha").get<double>());
    throw std::invalid_argument("shape_from_json: unknown kind '" + kind + "'");
}

}  // namespace

std::string shape_to_json(const ShapeDescriptor& s) { return shape_json(s).dump(); }

ShapeDescriptor shape_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("shape_from_json: ") + e.what());
    }
    try {
        return shape_parse(j);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("shape_from_json: ") + e.what());
    }
}

double interior_ball_radius(const ShapeDescriptor& s) {
    require_ball_or_ellipsoid(s, "interior_ball_radius");
    // smallest principal curvature radius b^2/a with a = 1+eps, b = 1
    return s.kind == ShapeKind::Ball ? s.radius : 1 / (1 + s.eps);
}

double boundary_distance(const ShapeDescriptor& s, const Point& x, Point* nearest) {
    require_ball_or_ellipsoid(s, "boundary_distance");
    if (s.kind == ShapeKind::Ball) {
        Point d = x - s.center;
        double r = d.norm();
        if (nearest) {
            Point u(s.n);
            if (r > 0)
                u = (1 / r) * d;
            else
                u[0] = 1;
            *nearest = axpy(s.center, s.radius, u);
        }
        return std::fabs(r - s.radius);
    }
    double rp = 0;
    for (int i = 1; i < s.n; ++i) rp += x[i] * x[i];
    rp = std::sqrt(rp);
    double z0 = 0, z1 = 0;
    double d = ellipse_distance(1 + s.eps, 1.0, std::fabs(x[0]), rp, z0, z1);
    if (nearest) {
        Point p(s.n);
        p[0] = std::copysign(z0, x[0]);
        if (rp > 0)
            for (int i = 1; i < s.n; ++i) p[i] = z1 * x[i] / rp;
        else
            p[1] = z1;
        *nearest = p;
    }
    return d;
}

Point outward_normal(const ShapeDescriptor& s, const Point& p) {
    require_ball_or_ellipsoid(s, "outward_normal");
    Point g = p - (s.kind == ShapeKind::Ball ? s.center : Point(s.n));
    if (s.kind == ShapeKind::Ellipsoid) g[0] /= (1 + s.eps) * (1 + s.eps);
    return (1 / g.norm()) * g;
}

RadialBounds radial_bounds(const ShapeDescriptor& s, int samples) {
    RadialBounds b;
    switch (s.kind) {
        case ShapeKind::Ball: {
            double c = s.center.norm();
            b.r_in = std::fabs(s.radius - c);
            b.r_out = s.radius + c;
            return b;
        }
        case ShapeKind::Ellipsoid:
            b.r_in = 1;
            b.r_out = 1 + s.eps;
            return b;
        case ShapeKind::HalfSpace: throw std::invalid_argument("radial_bounds: half-space is unbounded");
        default: break;
    }
    b.r_in = kInf;
    b.r_out = 0;
    for (const Chart& c : s.charts()) {
        int per = c.param_dim == 1 ? samples : static_cast<int>(std::ceil(std::sqrt(samples)));
        for (const Point& r : c.sample_params(per)) {
            double v = c.map(r).norm();
            b.r_in = std::min(b.r_in, v);
            b.r_out = std::max(b.r_out, v);
        }
    }
    return b;
}

double rho_deficit(const ShapeDescriptor& s, int samples) {
    if (s.kind == ShapeKind::Ellipsoid) return s.eps;
    RadialBounds b = radial_bounds(s, samples);
    return b.r_out - b.r_in;
}

double bump_eta(double t) { return 2 * t * (1 - smooth_step(4 * std::fabs(t) - 1)); }

double bump_eta_scaled(double t, double eps, double alpha) {
    return eps * bump_eta((t - std::pow(eps, 1 - 1 / alpha)) / std::pow(eps, 1 / alpha));
}

void FamilyParams::validate_ellipsoid() const {
    params.validate();
    if (params.n < 2) throw std::invalid_argument("FamilyParams: the ellipsoid family needs n >= 2");
    if (!(eps >= 0 && eps < 0.25)) throw std::invalid_argument("FamilyParams: eps must lie in [0, 1/4)");
}

void FamilyParams::validate_disk() const {
    if (!(eps > 0 && eps < 0.25)) throw std::invalid_argument("FamilyParams: eps must lie in (0, 1/4)");
    if (!(alpha > 1)) throw std::invalid_argument("FamilyParams: alpha must exceed 1");
}

double ellipsoid_gamma(const FamilyParams& fp) {
    fp.validate_ellipsoid();
    const int n = fp.params.n;
    const double s = fp.params.s, a = 1 + fp.eps;
    return gamma_torsion(n, s) / (a * hyp2f1(0.5 * (n + 2 * s), 0.5, 0.5 * n, 1 - a * a));
}

double ellipsoid_torsion(const FamilyParams& fp, const Point& x) {
    if (x.n != fp.params.n) throw std::invalid_argument("ellipsoid_torsion: dimension mismatch");
    const double a = 1 + fp.eps;
    double t = 1 - x[0] * x[0] / (a * a);
    for (int i = 1; i < x.n; ++i) t -= x[i] * x[i];
    return t > 0 ? ellipsoid_gamma(fp) * std::pow(t, fp.params.s) : 0.0;
}

ScalarField ellipsoid_torsion_field(const FamilyParams& fp) {
    const double g = ellipsoid_gamma(fp), a = 1 + fp.eps, s = fp.params.s;
    ScalarField u;
    u.dim = fp.params.n;
    u.support_radius = a;
    u.eval = [g, a, s](const Point& x) {
        double t = 1 - x[0] * x[0] / (a * a);
        for (int i = 1; i < x.n; ++i) t -= x[i] * x[i];
        return t > 0 ? g * std::pow(t, s) : 0.0;
    };
    KinkSurface k{Point(u.dim), Point(u.dim)};
    for (int i = 0; i < u.dim; ++i) k.semi_axes[i] = i == 0 ? a : 1;
    u.kinks.push_back(k);
    u.smoothness_note = "C^s across the ellipsoid boundary";
    return u;
}

Point parallel_param(const FamilyParams& fp, const Point& r) {
    const int n = fp.params.n;
    if (r.n != n - 1) throw std::invalid_argument("parallel_param: r must lie in R^{n-1}");
    const double t2 = r.norm2();
    if (!(t2 < 1)) throw std::domain_error("parallel_param: |r| must be < 1");
    const double e = fp.eps, D = std::sqrt(1 + ((1 + e) * (1 + e) - 1) * t2);
    const double a = 1 + e - 1 / (2 * D), b = 1 - (1 + e) / (2 * D);
    Point p(n);
    p[0] = a * std::sqrt(1 - t2);
    for (int i = 1; i < n; ++i) p[i] = b * r[i - 1];
    return p;
}

Chart parallel_chart(const FamilyParams& fp) {
    fp.validate_ellipsoid();
    const int d = fp.params.n - 1;
    Chart c;
    c.param_dim = d;
    c.lo = Point(d);
    c.hi = Point(d);
    for (int i = 0; i < d; ++i) {
        c.lo[i] = -1;
        c.hi[i] = 1;
    }
    c.in_domain = [](const Point& r) { return r.norm2() < 1; };
    c.map = [fp](const Point& r) { return parallel_param(fp, r); };
    return c;
}

SeminormResult boundary_seminorm(const std::function<double(const Point&)>& u, const Chart& chart, int grid,
                                 bool refine) {
    if (grid < 64) throw std::invalid_argument("boundary_seminorm: grid must be at least 64 per dimension");
    const int d = chart.param_dim;
    // vertex grid without the box faces, so doubling `grid` nests the point sets
    std::vector<Point> prm;
    {
        std::vector<int> idx(d, 1);
        while (true) {
            Point r(d);
            for (int i = 0; i < d; ++i) r[i] = chart.lo[i] + idx[i] * (chart.hi[i] - chart.lo[i]) / grid;
            if (chart.contains_param(r)) prm.push_back(r);
            int k = 0;
            while (k < d && ++idx[k] == grid) idx[k++] = 1;
            if (k == d) break;
        }
    }
    if (prm.size() < 2) throw std::invalid_argument("boundary_seminorm: chart domain contains fewer than 2 grid points");
    std::vector<Point> X;
    std::vector<double> f;
    double scale = 0;
    for (const Point& r : prm) {
        X.push_back(chart.map(r));
        f.push_back(u(X.back()));
        scale = std::max(scale, X.back().norm());
    }
    SeminormResult res;
    std::size_t bi = 0, bj = 1;
    const double tiny = 1e-13 * (1 + scale);
    for (std::size_t i = 0; i < X.size(); ++i)
        for (std::size_t j = i + 1; j < X.size(); ++j) {
            double dist = distance(X[i], X[j]);
            if (!(dist > tiny)) throw std::invalid_argument("boundary_seminorm: degenerate chart (repeated points)");
            double qv = std::fabs(f[i] - f[j]) / dist;
            if (qv > res.grid_value) {
                res.grid_value = qv;
                bi = i;
                bj = j;
            }
        }
    res.value = res.grid_value;
    res.r_best = prm[bi];
    res.r2_best = prm[bj];
    if (!refine) return res;

    double range = 0;
    for (int i = 0; i < d; ++i) range = std::max(range, chart.hi[i] - chart.lo[i]);
    const double min_sep = 1e-6 * range;
    auto quotient = [&](const Point& a, const Point& b) {
        if (!chart.contains_param(a) || !chart.contains_param(b)) return -1.0;
        Point dr = a - b;
        if (dr.norm() < min_sep) return -1.0;
        Point xa = chart.map(a), xb = chart.map(b);
        double dist = distance(xa, xb);
        if (!(dist > tiny)) return -1.0;
        return std::fabs(u(xa) - u(xb)) / dist;
    };
    Point a = res.r_best, b = res.r2_best;
    double best = res.value;
    double h = range / grid;
    for (int it = 0; it < 20000 && h > 1e-10 * range; ++it) {
        double cand = best;
        Point ca = a, cb = b;
        for (int k = 0; k < 2 * d; ++k)
            for (double sgn : {-1.0, 1.0}) {
                Point ta = a, tb = b;
                if (k < d)
                    ta[k] += sgn * h;
                else
                    tb[k - d] += sgn * h;
                double v = quotient(ta, tb);
                if (v > cand) {
                    cand = v;
                    ca = ta;
                    cb = tb;
                }
            }
        if (cand > best) {
            best = cand;
            a = ca;
            b = cb;
        } else {
            h *= 0.5;
        }
    }
    if (best > res.value) {
        res.value = best;
        res.r_best = a;
        res.r2_best = b;
    }
    return res;
}

std::pair<double, double> extrapolate_to_zero(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t k = x.size();
    if (k < 2 || y.size() != k) throw std::invalid_argument("extrapolate_to_zero: need >= 2 matching points");
    auto neville = [&](std::size_t from) {
        std::vector<double> P(y.begin() + from, y.end());
        const std::size_t m = P.size();
        for (std::size_t lev = 1; lev < m; ++lev)
            for (std::size_t i = 0; i + lev < m; ++i) {
                double xi = x[from + i], xj = x[from + i + lev];
                P[i] = (xj * P[i] - xi * P[i + 1]) / (xj - xi);
            }
        return P[0];
    };
    double full = neville(0), lower = neville(1);
    return {full, std::fabs(full - lower)};
}

LimitRatioResult limit_ratio_experiment(const std::vector<double>& eps, const FracParams& p, int grid) {
    p.validate();
    if (eps.size() < 3) throw std::invalid_argument("limit_ratio_experiment: need at least 3 eps values");
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0 && eps[i] < 0.25))
            throw std::invalid_argument("limit_ratio_experiment: eps values must lie in (0, 1/4)");
        if (i > 0 && !(eps[i] < eps[i - 1]))
            throw std::invalid_argument("limit_ratio_experiment: eps list must be decreasing");
    }
    LimitRatioResult out;
    out.eps = eps;
    for (double e : eps) {
        FamilyParams fp{e, 2, p};
        fp.validate_ellipsoid();
        SeminormResult sn = boundary_seminorm([&](const Point& x) { return ellipsoid_torsion(fp, x); },
                                              parallel_chart(fp), grid);
        out.seminorms.push_back(sn.value);
        out.ratios.push_back(sn.value / rho_deficit(make_ellipsoid(p.n, e)));
    }
    auto [v, err] = extrapolate_to_zero(out.eps, out.ratios);
    out.extrapolated = v;
    out.extrapolation_error = err;
    out.predicted = p.s * gamma_torsion(p.n, p.s) * std::pow(0.75, p.s - 1);
    for (std::size_t i = 2; i < out.ratios.size(); ++i)
        if ((out.ratios[i] - out.ratios[i - 1]) * (out.ratios[i - 1] - out.ratios[i - 2]) < 0) out.monotone = false;
    for (std::size_t i = 1; i < out.ratios.size(); ++i)
        if (!(std::fabs(out.ratios[i] - v) < std::fabs(out.ratios[i - 1] - v))) out.converging = false;
    return out;
}

CriticalPlane critical_plane(const ShapeDescriptor& s, const Point& e_in, double tol, int samples) {
    if (!s.bounded()) throw std::invalid_argument("critical_plane: shape must be bounded");
    if (e_in.n != s.n) throw std::invalid_argument("critical_plane: direction has wrong dimension");
    const double en = e_in.norm();
    if (!(en > 0)) throw std::invalid_argument("critical_plane: zero direction");
    if (!(tol > 0)) throw std::invalid_argument("critical_plane: tol must be positive");
    const Point e = (1 / en) * e_in;

    std::vector<Point> pts;
    for (const Chart& c : s.charts()) {
        int per = c.param_dim == 1 ? samples
                                   : static_cast<int>(std::ceil(std::pow(samples, 1.0 / c.param_dim)));
        for (const Point& r : c.sample_params(per)) pts.push_back(c.map(r));
    }
    if (pts.empty()) throw std::invalid_argument("critical_plane: shape has no boundary charts");
    std::vector<double> h(pts.size());
    CriticalPlane out;
    out.Lambda = -kInf;
    double mu_min = kInf;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        h[i] = dot(pts[i], e);
        out.Lambda = std::max(out.Lambda, h[i]);
        mu_min = std::min(mu_min, h[i]);
    }
    auto inside = [&](double mu) {
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (!(h[i] > mu)) continue;
            if (s.level(axpy(pts[i], -2 * (h[i] - mu), e)) > kLevelTol) return false;
        }
        return true;
    };
    constexpr int kScan = 1000;
    double hi = out.Lambda, lo = mu_min;
    bool found = false;
    for (int k = 1; k <= kScan; ++k) {
        double mu = out.Lambda - k * (out.Lambda - mu_min) / kScan;
        if (!inside(mu)) {
            lo = mu;
            found = true;
            break;
        }
        hi = mu;
    }
    if (!found) {
        out.lambda = mu_min;
        return out;
    }
    bool ever_true = hi < out.Lambda;
    while (hi - lo > tol && out.bisections < 48) {
        double mid = 0.5 * (lo + hi);
        if (inside(mid)) {
            hi = mid;
            ever_true = true;
        } else {
            lo = mid;
        }
        ++out.bisections;
    }
    if (!ever_true) throw std::invalid_argument("critical_plane: reflected cap never inside below Lambda");
    out.lambda = hi;
    return out;
}

IntegralResult slab_measure(const ShapeDescriptor& s, double lambda, double gamma, const Point& e_in,
                            const QuadSpec& q, double rel_se, double abs_floor) {
    q.validate();
    if (s.n != 2) throw std::invalid_argument("slab_measure: only planar shapes are supported");
    if (!(gamma > 0 && gamma <= 0.25)) throw std::domain_error("slab_measure: gamma must lie in (0, 1/4]");
    if (e_in.n != 2 || !(e_in.norm() > 0)) throw std::invalid_argument("slab_measure: bad direction");
    const Point e = (1 / e_in.norm()) * e_in;
    const Point ep{-e[1], e[0]};
    RadialBounds rb = radial_bounds(s);
    const double pad = 0.05 * (rb.r_out - rb.r_in) + 1e-9;
    const double r = std::max(0.0, rb.r_in - pad), R = rb.r_out + pad;

    // |w| ranges where x (with x.e = u1) can lie in Omega \ Omega' or Omega' \ Omega:
    // |x| < R and |x'| >= r, or the same with x and x' exchanged (x' has x'.e = u2).
    auto band = [&](double u1, double u2, std::vector<std::pair<double, double>>& iv) {
        iv.clear();
        for (int k = 0; k < 2; ++k) {
            double a = k == 0 ? u1 : u2, b = k == 0 ? u2 : u1;
            if (R * R - a * a <= 0) continue;
            double top = std::sqrt(R * R - a * a), bot = std::sqrt(std::max(0.0, r * r - b * b));
            if (bot < top) {
                iv.push_back({bot, top});
                iv.push_back({-top, -bot});
            }
        }
        std::sort(iv.begin(), iv.end());
        std::vector<std::pair<double, double>> m;
        for (auto& p : iv) {
            if (!m.empty() && p.first <= m.back().second)
                m.back().second = std::max(m.back().second, p.second);
            else
                m.push_back(p);
        }
        iv.swap(m);
    };

    SeededStream rng(q.rng_seed, 0x51AB);
    std::vector<std::pair<double, double>> iv;
    double mean = 0, m2 = 0;
    long count = 0;
    auto draw = [&](long N) {
        for (long i = 0; i < N; ++i) {
            double t = rng.uniform(-gamma, gamma);
            double wr = rng.uniform();
            band(lambda + t, lambda - t, iv);
            double L = 0;
            for (auto& p : iv) L += p.second - p.first;
            double y = 0;
            if (L > 0) {
                double pos = wr * L, w = iv.back().second;
                for (auto& p : iv) {
                    double len = p.second - p.first;
                    if (pos < len) {
                        w = p.first + pos;
                        break;
                    }
                    pos -= len;
                }
                Point x = axpy((lambda + t) * e, w, ep);
                Point xr = axpy(x, -2 * t, e);
                if (s.contains(x) != s.contains(xr)) y = 2 * gamma * L;
            }
            ++count;
            double d = y - mean;
            mean += d / count;
            m2 += d * (y - mean);
        }
    };
    IntegralResult out;
    long N = 1 << 14;
    const long cap = std::max<long>(q.mc_samples, 1L << 22);
    draw(N);
    while (true) {
        double se = count > 1 ? std::sqrt(m2 / (count - 1) / count) : kInf;
        out.value = mean;
        out.err_estimate = se;
        out.evaluations = count;
        if (se <= rel_se * std::fabs(mean) || se <= abs_floor) break;
        if (count >= cap) {
            out.converged = false;
            break;
        }
        draw(count);
    }
    return out;
}

MinkowskiCheck minkowski_check(const ShapeDescriptor& inner, int samples, std::uint64_t seed) {
    if (inner.kind != ShapeKind::InnerParallel) throw std::invalid_argument("minkowski_check: needs an inner parallel set");
    const ShapeDescriptor& base = *inner.base;
    const double rho = inner.rho, rb = interior_ball_radius(base);
    const int n = inner.n;
    auto [lo, hi] = base.bounding_box();
    SeededStream rng(seed, 0x3141);
    auto in_box = [&]() {
        Point x(n);
        for (int i = 0; i < n; ++i) x[i] = rng.uniform(lo[i], hi[i]);
        return x;
    };
    MinkowskiCheck out;
    out.samples = samples;
    for (int k = 0; k < samples; ++k) {
        Point x = in_box();
        while (!base.contains(x)) x = in_box();
        Point p;
        double d = boundary_distance(base, x, &p);
        if (d > rho) continue;
        // witness y = x - (rho - d + mu) nu with nu pointing from x to its nearest boundary point
        Point nu = (1 / d) * (p - x);
        double mu = 0.5 * std::min(rb - rho, d);
        Point y = axpy(x, -(rho - d + mu), nu);
        if (!inner.contains(y) || !(distance(x, y) < rho)) ++out.failures_inner;
    }
    for (int k = 0; k < samples; ++k) {
        Point y = in_box();
        while (!inner.contains(y)) y = in_box();
        Point z(n);
        do {
            for (int i = 0; i < n; ++i) z[i] = rng.uniform(-rho, rho);
        } while (!(z.norm() < rho));
        if (!base.contains(y + z)) ++out.failures_outer;
    }
    return out;
}

PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t m = x.size();
    if (m < 2 || y.size() != m) throw std::invalid_argument("fit_power_law: need >= 2 matching points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (!(x[i] > 0 && y[i] > 0)) throw std::domain_error("fit_power_law: data must be positive");
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double den = m * sxx - sx * sx;
    if (den == 0) throw std::invalid_argument("fit_power_law: x values must differ");
    PowerFit f;
    f.exponent = (m * sxy - sx * sy) / den;
    f.prefactor = std::exp((sy - f.exponent * sx) / m);
    return f;
}

}  // namespace nonlocal
