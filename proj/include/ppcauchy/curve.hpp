#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "ppcauchy/grid.hpp"

namespace ppcauchy {

/// Data carrier y = S(x): strictly decreasing from (0, h2) to (h1, 0), piecewise
/// linear between its samples, together with its exact inverse x = v(y).
class MonotoneCurve {
public:
    /// Validates the sampled curve. If `slope_bound` is omitted the largest
    /// difference quotient is used.
    static MonotoneCurve from_samples(double h1, double h2, Fn1 samples, std::optional<double> slope_bound = {}) {
        require(h1 > 0.0 && std::isfinite(h1), ErrorKind::InvalidArgument, "h1 must be positive");
        require(h2 > 0.0 && std::isfinite(h2), ErrorKind::InvalidArgument, "h2 must be positive");
        const Axis& ax = samples.axis;
        require(std::abs(ax.length() - h1) <= 1e-12 * h1, ErrorKind::CurveInvalid,
                "curve samples span [0, " + std::to_string(ax.length()) + "], expected h1 = " + std::to_string(h1));
        require(samples[0] == h2, ErrorKind::CurveInvalid,
                "S(0) = " + std::to_string(samples[0]) + " differs from h2 = " + std::to_string(h2) + " (index 0)");
        const std::size_t last = samples.size() - 1;
        require(samples[last] == 0.0, ErrorKind::CurveInvalid,
                "S(h1) = " + std::to_string(samples[last]) + " is not 0 (index " + std::to_string(last) + ")");

        const double eps = 1e-12 * h2;
        double max_slope = 0.0;
        double max_inverse_slope = 0.0;
        for (std::size_t k = 0; k < last; ++k) {
            const double drop = samples[k] - samples[k + 1];
            require(samples[k + 1] <= samples[k] - eps, ErrorKind::CurveInvalid,
                    "curve not strictly decreasing at index " + std::to_string(k + 1));
            const double dx = ax[k + 1] - ax[k];
            max_slope = std::max(max_slope, drop / dx);
            max_inverse_slope = std::max(max_inverse_slope, dx / drop);
        }
        for (std::size_t k = 0; k <= last; ++k) {
            require(samples[k] >= 0.0 && samples[k] <= h2, ErrorKind::CurveInvalid,
                    "curve leaves [0, h2] at index " + std::to_string(k));
        }
        const double bound = slope_bound.value_or(max_slope);
        require(max_slope <= bound * (1.0 + 1e-12), ErrorKind::CurveInvalid,
                "difference quotient " + std::to_string(max_slope) + " exceeds slope bound " + std::to_string(bound));

        MonotoneCurve c;
        c.h1_ = h1;
        c.h2_ = h2;
        c.samples_ = std::move(samples);
        c.slope_bound_ = bound;
        c.inverse_slope_ = max_inverse_slope;
        return c;
    }

    /// S(x) = h2 (1 - x / h1) sampled on `axis`.
    static MonotoneCurve linear(double h1, double h2, const Axis& axis) {
        require(h1 > 0.0 && h2 > 0.0, ErrorKind::InvalidArgument, "h1 and h2 must be positive");
        Fn1 s = sample(axis, [&](double x) { return h2 * (1.0 - x / h1); });
        s[0] = h2;
        s[s.size() - 1] = 0.0;
        return from_samples(h1, h2, std::move(s), h2 / h1);
    }

    /// Samples an analytic decreasing S on `axis` and validates it.
    template <class F>
    static MonotoneCurve from_function(double h1, double h2, const Axis& axis, F&& s) {
        Fn1 v = sample(axis, std::forward<F>(s));
        // Snap round-off at the endpoints; genuine mismatches still fail validation.
        if (std::abs(v[0] - h2) <= 1e-12 * h2) v[0] = h2;
        if (std::abs(v[v.size() - 1]) <= 1e-12 * h2) v[v.size() - 1] = 0.0;
        return from_samples(h1, h2, std::move(v));
    }

    [[nodiscard]] double h1() const noexcept { return h1_; }
    [[nodiscard]] double h2() const noexcept { return h2_; }
    [[nodiscard]] const Fn1& samples() const noexcept { return samples_; }
    [[nodiscard]] double slope_bound() const noexcept { return slope_bound_; }
    /// Largest |dv/dy| of the piecewise-linear inverse; a conditioning warning, not a hypothesis.
    [[nodiscard]] double inverse_slope() const noexcept { return inverse_slope_; }

    [[nodiscard]] double s_at(double x) const { return interp1(samples_, x); }

    [[nodiscard]] double v_at(double y) const {
        require(y >= -1e-12 * h2_ && y <= h2_ * (1.0 + 1e-12), ErrorKind::OutOfRange,
                "v(y) queried at y = " + std::to_string(y) + " outside [0, h2]");
        y = std::clamp(y, 0.0, h2_);
        const auto& s = samples_.values;
        const Axis& ax = samples_.axis;
        // First index whose sample is <= y; samples are strictly decreasing.
        std::size_t lo = 0;
        std::size_t hi = s.size() - 1;
        if (y >= s[0]) return ax[0];
        while (hi - lo > 1) {
            const std::size_t mid = lo + (hi - lo) / 2;
            if (s[mid] > y) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if (y == s[hi]) return ax[hi];
        const double frac = (s[lo] - y) / (s[lo] - s[hi]);
        return ax[lo] + frac * (ax[hi] - ax[lo]);
    }

private:
    MonotoneCurve() = default;

    double h1_ = 0.0;
    double h2_ = 0.0;
    Fn1 samples_;
    double slope_bound_ = 0.0;
    double inverse_slope_ = 0.0;
};

} // namespace ppcauchy
