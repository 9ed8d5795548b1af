#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ppcauchy/error.hpp"

namespace ppcauchy {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Strictly increasing 1D node set spanning [0, h].
class Axis {
public:
    Axis() = default;

    explicit Axis(std::vector<double> points) : points_(std::move(points)) {
        require(points_.size() >= 3, ErrorKind::InsufficientResolution,
                "axis needs at least 3 points, got " + std::to_string(points_.size()));
        require(points_.front() == 0.0, ErrorKind::InvalidArgument, "axis must start at 0");
        for (std::size_t k = 0; k < points_.size(); ++k) {
            require(std::isfinite(points_[k]), ErrorKind::InvalidArgument,
                    "axis point " + std::to_string(k) + " is not finite");
            if (k > 0) {
                require(points_[k] > points_[k - 1], ErrorKind::InvalidArgument,
                        "axis not strictly increasing at index " + std::to_string(k));
            }
        }
    }

    /// `cells` equal intervals on [0, h]; the last node is h exactly.
    static Axis uniform(double h, std::size_t cells) {
        require(h > 0.0 && std::isfinite(h), ErrorKind::InvalidArgument, "axis length must be positive");
        require(cells >= 2, ErrorKind::InsufficientResolution, "uniform axis needs at least 2 cells");
        std::vector<double> pts(cells + 1);
        for (std::size_t k = 0; k <= cells; ++k) {
            pts[k] = h * static_cast<double>(k) / static_cast<double>(cells);
        }
        pts.back() = h;
        return Axis(std::move(pts));
    }

    [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
    [[nodiscard]] std::size_t cells() const noexcept { return points_.size() - 1; }
    [[nodiscard]] double length() const noexcept { return points_.back(); }
    [[nodiscard]] double operator[](std::size_t k) const noexcept { return points_[k]; }
    [[nodiscard]] std::span<const double> points() const noexcept { return points_; }
    [[nodiscard]] double max_spacing() const noexcept {
        double m = 0.0;
        for (std::size_t k = 1; k < points_.size(); ++k) {
            m = std::max(m, points_[k] - points_[k - 1]);
        }
        return m;
    }

    /// Slack allowed outside [0, h] before a query counts as out of range.
    [[nodiscard]] double slack() const noexcept { return 1e-12 * length(); }

    /// Clamps t into [0, h]; throws if t lies further out than slack().
    [[nodiscard]] double clamp(double t) const {
        if (!(t >= -slack() && t <= length() + slack())) {
            fail(ErrorKind::OutOfRange,
                 "coordinate " + std::to_string(t) + " outside [0, " + std::to_string(length()) + "]");
        }
        return std::clamp(t, 0.0, length());
    }

    /// Index k of the cell [x_k, x_{k+1}] containing t (t already clamped).
    [[nodiscard]] std::size_t cell_of(double t) const noexcept {
        auto it = std::upper_bound(points_.begin(), points_.end(), t);
        auto k = static_cast<std::size_t>(std::distance(points_.begin(), it));
        if (k == 0) {
            return 0;
        }
        return std::min(k - 1, points_.size() - 2);
    }

    friend bool operator==(const Axis&, const Axis&) = default;

private:
    std::vector<double> points_;
};

/// Function sampled on the nodes of one axis.
struct Fn1 {
    Axis axis;
    std::vector<double> values;

    Fn1() = default;
    Fn1(Axis a, std::vector<double> v) : axis(std::move(a)), values(std::move(v)) {
        require(values.size() == axis.size(), ErrorKind::AxisMismatch,
                "Fn1 has " + std::to_string(values.size()) + " values for " + std::to_string(axis.size()) +
                    " axis points");
        for (std::size_t k = 0; k < values.size(); ++k) {
            require(std::isfinite(values[k]), ErrorKind::InvalidArgument,
                    "Fn1 value " + std::to_string(k) + " is not finite");
        }
    }

    static Fn1 zeros(const Axis& a) { return Fn1(a, std::vector<double>(a.size(), 0.0)); }
    static Fn1 constant(const Axis& a, double c) { return Fn1(a, std::vector<double>(a.size(), c)); }

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    double& operator[](std::size_t k) noexcept { return values[k]; }
    double operator[](std::size_t k) const noexcept { return values[k]; }
};

/// Function sampled on a tensor grid; values stored x-major: (i, j) -> i * ny + j.
struct Fn2 {
    Axis axis_x;
    Axis axis_y;
    std::vector<double> values;

    Fn2() = default;
    Fn2(Axis ax, Axis ay, std::vector<double> v)
        : axis_x(std::move(ax)), axis_y(std::move(ay)), values(std::move(v)) {
        require(values.size() == axis_x.size() * axis_y.size(), ErrorKind::AxisMismatch,
                "Fn2 value count does not match grid " + std::to_string(axis_x.size()) + "x" +
                    std::to_string(axis_y.size()));
        for (std::size_t k = 0; k < values.size(); ++k) {
            require(std::isfinite(values[k]), ErrorKind::InvalidArgument,
                    "Fn2 value " + std::to_string(k) + " is not finite");
        }
    }

    static Fn2 zeros(const Axis& ax, const Axis& ay) {
        return Fn2(ax, ay, std::vector<double>(ax.size() * ay.size(), 0.0));
    }
    static Fn2 constant(const Axis& ax, const Axis& ay, double c) {
        return Fn2(ax, ay, std::vector<double>(ax.size() * ay.size(), c));
    }

    [[nodiscard]] std::size_t nx() const noexcept { return axis_x.size(); }
    [[nodiscard]] std::size_t ny() const noexcept { return axis_y.size(); }
    double& operator()(std::size_t i, std::size_t j) noexcept { return values[i * axis_y.size() + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return values[i * axis_y.size() + j]; }

    [[nodiscard]] Fn1 row_x(std::size_t j) const {
        std::vector<double> v(nx());
        for (std::size_t i = 0; i < nx(); ++i) {
            v[i] = (*this)(i, j);
        }
        return Fn1(axis_x, std::move(v));
    }
    [[nodiscard]] Fn1 column_y(std::size_t i) const {
        auto first = values.begin() + static_cast<std::ptrdiff_t>(i * ny());
        return Fn1(axis_y, std::vector<double>(first, first + static_cast<std::ptrdiff_t>(ny())));
    }
};

inline void require_same_axis(const Axis& a, const Axis& b, const char* what) {
    require(a == b, ErrorKind::AxisMismatch, std::string(what) + ": axes differ");
}

inline void require_same_grid(const Fn2& a, const Fn2& b, const char* what) {
    require(a.axis_x == b.axis_x && a.axis_y == b.axis_y, ErrorKind::AxisMismatch,
            std::string(what) + ": grids differ");
}

// Pointwise arithmetic.

inline Fn1 operator+(const Fn1& a, const Fn1& b) {
    require_same_axis(a.axis, b.axis, "Fn1 +");
    Fn1 r = a;
    for (std::size_t k = 0; k < r.size(); ++k) r[k] += b[k];
    return r;
}
inline Fn1 operator-(const Fn1& a, const Fn1& b) {
    require_same_axis(a.axis, b.axis, "Fn1 -");
    Fn1 r = a;
    for (std::size_t k = 0; k < r.size(); ++k) r[k] -= b[k];
    return r;
}
inline Fn1 operator*(double s, const Fn1& a) {
    Fn1 r = a;
    for (auto& v : r.values) v *= s;
    return r;
}
inline Fn2 operator+(const Fn2& a, const Fn2& b) {
    require_same_grid(a, b, "Fn2 +");
    Fn2 r = a;
    for (std::size_t k = 0; k < r.values.size(); ++k) r.values[k] += b.values[k];
    return r;
}
inline Fn2 operator-(const Fn2& a, const Fn2& b) {
    require_same_grid(a, b, "Fn2 -");
    Fn2 r = a;
    for (std::size_t k = 0; k < r.values.size(); ++k) r.values[k] -= b.values[k];
    return r;
}
inline Fn2 operator*(double s, const Fn2& a) {
    Fn2 r = a;
    for (auto& v : r.values) v *= s;
    return r;
}

inline double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}
inline double max_abs(const Fn1& f) { return max_abs(f.values); }
inline double max_abs(const Fn2& f) { return max_abs(f.values); }

enum class Origin { Left, Right };

/// Signed composite-trapezoid integral of f from the chosen endpoint to each node.
inline Fn1 cumulative_integral(const Fn1& f, Origin origin = Origin::Left) {
    const Axis& ax = f.axis;
    const std::size_t n = ax.size();
    std::vector<double> out(n, 0.0);
    if (origin == Origin::Left) {
        for (std::size_t k = 1; k < n; ++k) {
            out[k] = out[k - 1] + 0.5 * (ax[k] - ax[k - 1]) * (f[k] + f[k - 1]);
        }
    } else {
        for (std::size_t k = n - 1; k-- > 0;) {
            out[k] = out[k + 1] - 0.5 * (ax[k + 1] - ax[k]) * (f[k] + f[k + 1]);
        }
    }
    return Fn1(ax, std::move(out));
}

/// Piecewise-linear evaluation of a nodal function.
inline double interp1(const Fn1& f, double t) {
    t = f.axis.clamp(t);
    const std::size_t k = f.axis.cell_of(t);
    const double x0 = f.axis[k];
    const double x1 = f.axis[k + 1];
    if (t == x0) return f[k];
    if (t == x1) return f[k + 1];
    const double s = (t - x0) / (x1 - x0);
    return (1.0 - s) * f[k] + s * f[k + 1];
}

/// Cumulative integral evaluated off-grid by linear interpolation of the cumulant.
inline double eval_integral_to(const Fn1& cumulant, double t) { return interp1(cumulant, t); }

/// Cumulative integral evaluated off-grid by integrating the piecewise-linear
/// integrand over the partial cell. Exact whenever the integrand is affine per cell.
inline double eval_integral_to(const Fn1& integrand, const Fn1& cumulant, double t) {
    t = cumulant.axis.clamp(t);
    const std::size_t k = cumulant.axis.cell_of(t);
    const double x0 = cumulant.axis[k];
    const double x1 = cumulant.axis[k + 1];
    if (t == x0) return cumulant[k];
    if (t == x1) return cumulant[k + 1];
    const double d = t - x0;
    const double slope = (integrand[k + 1] - integrand[k]) / (x1 - x0);
    return cumulant[k] + d * integrand[k] + 0.5 * slope * d * d;
}

/// Second-order finite differences; three-point stencils that account for
/// non-uniform spacing, one-sided at the ends.
inline Fn1 derivative(const Fn1& f) {
    const Axis& ax = f.axis;
    const std::size_t n = ax.size();
    require(n >= 3, ErrorKind::InsufficientResolution, "derivative needs at least 3 points");
    std::vector<double> d(n);
    {
        const double h0 = ax[1] - ax[0];
        const double h1 = ax[2] - ax[1];
        d[0] = -(2.0 * h0 + h1) / (h0 * (h0 + h1)) * f[0] + (h0 + h1) / (h0 * h1) * f[1] -
               h0 / (h1 * (h0 + h1)) * f[2];
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double h0 = ax[k] - ax[k - 1];
        const double h1 = ax[k + 1] - ax[k];
        d[k] = -h1 / (h0 * (h0 + h1)) * f[k - 1] + (h1 - h0) / (h0 * h1) * f[k] + h0 / (h1 * (h0 + h1)) * f[k + 1];
    }
    {
        const double h0 = ax[n - 2] - ax[n - 3];
        const double h1 = ax[n - 1] - ax[n - 2];
        d[n - 1] = h1 / (h0 * (h0 + h1)) * f[n - 3] - (h0 + h1) / (h0 * h1) * f[n - 2] +
                   (2.0 * h1 + h0) / (h1 * (h0 + h1)) * f[n - 1];
    }
    return Fn1(ax, std::move(d));
}

/// Trapezoid quadrature weights of an axis.
inline std::vector<double> trapezoid_weights(const Axis& ax) {
    const std::size_t n = ax.size();
    std::vector<double> w(n, 0.0);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double h = ax[k + 1] - ax[k];
        w[k] += 0.5 * h;
        w[k + 1] += 0.5 * h;
    }
    return w;
}

inline void require_exponent(double p) {
    require(p >= 1.0 || std::isinf(p), ErrorKind::InvalidExponent,
            "Lebesgue exponent must satisfy p >= 1, got " + std::to_string(p));
    require(!(std::isinf(p) && p < 0), ErrorKind::InvalidExponent, "p = -inf is not an exponent");
}

inline double lp_norm(const Fn1& f, double p = 2.0) {
    require_exponent(p);
    if (std::isinf(p)) return max_abs(f);
    const auto w = trapezoid_weights(f.axis);
    double acc = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
        acc += w[k] * std::pow(std::abs(f[k]), p);
    }
    return std::pow(acc, 1.0 / p);
}

inline double lp_norm(const Fn2& g, double p = 2.0) {
    require_exponent(p);
    if (std::isinf(p)) return max_abs(g);
    const auto wx = trapezoid_weights(g.axis_x);
    const auto wy = trapezoid_weights(g.axis_y);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.nx(); ++i) {
        for (std::size_t j = 0; j < g.ny(); ++j) {
            acc += wx[i] * wy[j] * std::pow(std::abs(g(i, j)), p);
        }
    }
    return std::pow(acc, 1.0 / p);
}

/// Bilinear interpolation.
inline double interp2(const Fn2& g, double x, double y) {
    x = g.axis_x.clamp(x);
    y = g.axis_y.clamp(y);
    const std::size_t i = g.axis_x.cell_of(x);
    const std::size_t j = g.axis_y.cell_of(y);
    const double sx = (x - g.axis_x[i]) / (g.axis_x[i + 1] - g.axis_x[i]);
    const double sy = (y - g.axis_y[j]) / (g.axis_y[j + 1] - g.axis_y[j]);
    if (sx == 0.0 && sy == 0.0) return g(i, j);
    return (1.0 - sx) * (1.0 - sy) * g(i, j) + sx * (1.0 - sy) * g(i + 1, j) + (1.0 - sx) * sy * g(i, j + 1) +
           sx * sy * g(i + 1, j + 1);
}

/// Linear resampling of f onto another axis of the same length.
inline Fn1 resample(const Fn1& f, const Axis& target) {
    std::vector<double> v(target.size());
    for (std::size_t k = 0; k < target.size(); ++k) {
        v[k] = interp1(f, target[k]);
    }
    return Fn1(target, std::move(v));
}

/// Nodal sampling of a callable f(x).
template <class F>
Fn1 sample(const Axis& ax, F&& f) {
    std::vector<double> v(ax.size());
    for (std::size_t k = 0; k < ax.size(); ++k) {
        v[k] = static_cast<double>(f(ax[k]));
        require(std::isfinite(v[k]), ErrorKind::InvalidArgument,
                "non-finite sample at x = " + std::to_string(ax[k]));
    }
    return Fn1(ax, std::move(v));
}

/// Nodal sampling of a callable f(x, y).
template <class F>
Fn2 sample(const Axis& ax, const Axis& ay, F&& f) {
    std::vector<double> v(ax.size() * ay.size());
    for (std::size_t i = 0; i < ax.size(); ++i) {
        for (std::size_t j = 0; j < ay.size(); ++j) {
            const double val = static_cast<double>(f(ax[i], ay[j]));
            require(std::isfinite(val), ErrorKind::InvalidArgument,
                    "non-finite sample at (" + std::to_string(ax[i]) + ", " + std::to_string(ay[j]) + ")");
            v[i * ay.size() + j] = val;
        }
    }
    return Fn2(ax, ay, std::move(v));
}

/// Partial x-derivative of every row of g.
inline Fn2 derivative_x(const Fn2& g) {
    Fn2 r = g;
    for (std::size_t j = 0; j < g.ny(); ++j) {
        const Fn1 d = derivative(g.row_x(j));
        for (std::size_t i = 0; i < g.nx(); ++i) r(i, j) = d[i];
    }
    return r;
}

/// Partial y-derivative of every column of g.
inline Fn2 derivative_y(const Fn2& g) {
    Fn2 r = g;
    for (std::size_t i = 0; i < g.nx(); ++i) {
        const Fn1 d = derivative(g.column_y(i));
        for (std::size_t j = 0; j < g.ny(); ++j) r(i, j) = d[j];
    }
    return r;
}

} // namespace ppcauchy
