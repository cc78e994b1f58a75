#pragma once

#include <array>
#include <cmath>
#include <initializer_list>
#include <stdexcept>

namespace nonlocal {

inline constexpr int kMaxDim = 6;

// Fixed-capacity point in R^n, n <= kMaxDim.
struct Point {
    std::array<double, kMaxDim> c{};
    int n = 0;

    Point() = default;
    explicit Point(int dim) : n(dim) {
        if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("Point: dimension out of range");
    }
    Point(std::initializer_list<double> xs) : n(static_cast<int>(xs.size())) {
        if (n < 1 || n > kMaxDim) throw std::invalid_argument("Point: dimension out of range");
        int i = 0;
        for (double v : xs) c[i++] = v;
    }

    double& operator[](int i) { return c[i]; }
    double operator[](int i) const { return c[i]; }

    double norm2() const {
        double s = 0;
        for (int i = 0; i < n; ++i) s += c[i] * c[i];
        return s;
    }
    double norm() const { return std::sqrt(norm2()); }

    // x* = x - 2 x_1 e_1
    Point reflected() const {
        Point r = *this;
        r.c[0] = -r.c[0];
        return r;
    }
};

inline Point operator+(const Point& a, const Point& b) {
    Point r(a.n);
    for (int i = 0; i < a.n; ++i) r.c[i] = a.c[i] + b.c[i];
    return r;
}
inline Point operator-(const Point& a, const Point& b) {
    Point r(a.n);
    for (int i = 0; i < a.n; ++i) r.c[i] = a.c[i] - b.c[i];
    return r;
}
inline Point operator*(double t, const Point& a) {
    Point r(a.n);
    for (int i = 0; i < a.n; ++i) r.c[i] = t * a.c[i];
    return r;
}
inline double dot(const Point& a, const Point& b) {
    double s = 0;
    for (int i = 0; i < a.n; ++i) s += a.c[i] * b.c[i];
    return s;
}
inline double distance(const Point& a, const Point& b) { return (a - b).norm(); }

// a + t*d without building temporaries
inline Point axpy(const Point& a, double t, const Point& d) {
    Point r(a.n);
    for (int i = 0; i < a.n; ++i) r.c[i] = a.c[i] + t * d.c[i];
    return r;
}

}  // namespace nonlocal
