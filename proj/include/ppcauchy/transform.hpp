#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "ppcauchy/curve.hpp"
#include "ppcauchy/data.hpp"

namespace ppcauchy {

// Curve compositions ---------------------------------------------------------

/// x -> g(x, S(x)) on the x-axis of g.
inline Fn1 curve_trace_x(const Fn2& g, const MonotoneCurve& c) {
    return sample(g.axis_x, [&](double x) { return interp2(g, x, c.s_at(x)); });
}

/// y -> g(v(y), y) on the y-axis of g.
inline Fn1 curve_trace_y(const Fn2& g, const MonotoneCurve& c) {
    return sample(g.axis_y, [&](double y) { return interp2(g, c.v_at(y), y); });
}

/// y -> f(v(y)) for f on the x-axis, resampled onto `axis_y`.
inline Fn1 compose_inverse(const Fn1& f, const MonotoneCurve& c, const Axis& axis_y) {
    return sample(axis_y, [&](double y) { return interp1(f, c.v_at(y)); });
}

/// x -> f(S(x)) for f on the y-axis, resampled onto `axis_x`.
inline Fn1 compose_curve(const Fn1& f, const MonotoneCurve& c, const Axis& axis_x) {
    return sample(axis_x, [&](double x) { return interp1(f, c.s_at(x)); });
}

/// x -> signed integral of g from h2 down to S(x); g lives on the y-axis.
inline Fn1 integral_h2_to_curve(const Fn1& g, const MonotoneCurve& c, const Axis& axis_x) {
    const Fn1 cum = cumulative_integral(g, Origin::Right);
    return sample(axis_x, [&](double x) { return eval_integral_to(g, cum, c.s_at(x)); });
}

/// y -> integral of f from 0 to v(y); f lives on the x-axis.
inline Fn1 integral_0_to_inverse(const Fn1& f, const MonotoneCurve& c, const Axis& axis_y) {
    const Fn1 cum = cumulative_integral(f, Origin::Left);
    return sample(axis_y, [&](double y) { return eval_integral_to(f, cum, c.v_at(y)); });
}

/// y -> G(v(y)) for G on the x-axis, by four-point Lagrange interpolation in y through
/// the nodes (S(x_k), G(x_k)). The nodes lie exactly on the sampled curve, so no
/// inverse evaluation enters; the interpolation error stays O(h^4) and survives a
/// later numerical differentiation, which plain linear resampling does not.
inline Fn1 compose_inverse_smooth(const Fn1& G, const MonotoneCurve& c, const Axis& axis_y) {
    const std::size_t n = G.size();
    std::vector<double> t(n);
    std::vector<double> val(n);
    for (std::size_t k = 0; k < n; ++k) {
        t[k] = c.s_at(G.axis[n - 1 - k]);
        val[k] = G[n - 1 - k];
    }
    const std::size_t width = std::min<std::size_t>(4, n);
    return sample(axis_y, [&](double y) {
        const auto it = std::lower_bound(t.begin(), t.end(), y);
        if (it != t.end() && *it == y) return val[static_cast<std::size_t>(it - t.begin())];
        const std::size_t hi = std::clamp<std::size_t>(static_cast<std::size_t>(it - t.begin()), 1, n - 1);
        std::size_t first = hi >= 2 ? hi - 2 : 0;
        first = std::min(first, n - width);
        double acc = 0.0;
        for (std::size_t a = first; a < first + width; ++a) {
            double w = 1.0;
            for (std::size_t b = first; b < first + width; ++b)
                if (b != a) w *= (y - t[b]) / (t[a] - t[b]);
            acc += w * val[a];
        }
        return acc;
    });
}

inline void require_curve_on(const MonotoneCurve& c, const Axis& ax, const Axis& ay) {
    require(std::abs(c.h1() - ax.length()) <= 1e-12 * c.h1() && std::abs(c.h2() - ay.length()) <= 1e-12 * c.h2(),
            ErrorKind::AxisMismatch, "curve and data live on different domains");
}

// Forward map ----------------------------------------------------------------

/// Non-classical data to classical curve traces, following the trace identities
/// from the top mixed derivative downwards.
inline ClassicalData to_classical(const NonClassicalData& nc, const MonotoneCurve& c) {
    nc.validate();
    const Axis& ax = nc.axis_x();
    const Axis& ay = nc.axis_y();
    require_curve_on(c, ax, ay);

    auto constant = [&](double v) { return Fn1::constant(ax, v); };
    auto along_x = [&](const Fn1& f) { return cumulative_integral(f, Origin::Left); };
    auto down_curve = [&](const Fn1& g_on_y) { return integral_h2_to_curve(g_on_y, c, ax); };
    auto through_v = [&](const Fn1& f_on_x) { return compose_inverse(f_on_x, c, ay); };

    const auto& z = nc.corner;
    ClassicalData cl;
    auto& t = cl.traces;
    t[2][1] = constant(z[2][1]) + along_x(nc.x_traces[1]) + down_curve(nc.y_traces[2]);
    t[2][0] = constant(z[2][0]) + along_x(nc.x_traces[0]) + down_curve(through_v(t[2][1]));
    t[1][1] = constant(z[1][1]) + along_x(t[2][1]) + down_curve(nc.y_traces[1]);
    t[0][1] = constant(z[0][1]) + along_x(t[1][1]) + down_curve(nc.y_traces[0]);
    t[1][0] = constant(z[1][0]) + along_x(t[2][0]) + down_curve(through_v(t[1][1]));
    t[0][0] = constant(z[0][0]) + along_x(t[1][0]) + down_curve(through_v(t[0][1]));
    cl.mixed22 = nc.y_traces[2];
    return cl;
}

// Agreement functions --------------------------------------------------------

/// F^(1), F^(2) on the x-axis and F^(3), F^(4) on the y-axis. Their derivatives are
/// the non-classical traces; they must lie in W_p^1 for classical data to admit a solution.
inline std::array<Fn1, 4> agreement_functions(const ClassicalData& cl, const MonotoneCurve& c) {
    cl.validate();
    const Axis& ax = cl.axis_x();
    const Axis& ay = cl.axis_y();
    require_curve_on(c, ax, ay);
    const auto& t = cl.traces;
    return {
        t[2][0] - integral_h2_to_curve(compose_inverse(t[2][1], c, ay), c, ax),
        t[2][1] - integral_h2_to_curve(cl.mixed22, c, ax),
        compose_inverse_smooth(t[0][1] - cumulative_integral(t[1][1]), c, ay),
        compose_inverse_smooth(t[1][1] - cumulative_integral(t[2][1]), c, ay),
    };
}

struct AgreementOptions {
    int levels = 4;
    double threshold = 4.0;
    double p = kInf;
};

struct AgreementEntry {
    Fn1 function;                   // F^(k) on the finest grid
    std::vector<double> norms;      // derivative L_p norm per level, finest first
    double derivative_lp_norm = 0;  // norms.front()
    double refinement_ratio = 1.0;  // finest / coarsest
    bool flagged = false;
};

struct AgreementReport {
    std::array<AgreementEntry, 4> entries;
    int levels = 1;
    double threshold = 4.0;
    double p = kInf;

    [[nodiscard]] bool any_flagged() const {
        for (const auto& e : entries)
            if (e.flagged) return true;
        return false;
    }
};

/// Axis with `factor` times fewer cells: a nested subset when divisible, uniform otherwise.
inline Axis coarsen(const Axis& ax, std::size_t factor) {
    if (factor == 1) return ax;
    const std::size_t cells = ax.cells();
    if (cells % factor == 0) {
        require(cells / factor >= 2, ErrorKind::InsufficientResolution,
                "axis with " + std::to_string(cells) + " cells cannot be coarsened by " + std::to_string(factor));
        std::vector<double> pts;
        for (std::size_t k = 0; k <= cells; k += factor) pts.push_back(ax[k]);
        return Axis(std::move(pts));
    }
    const auto coarse = static_cast<std::size_t>(std::lround(static_cast<double>(cells) / static_cast<double>(factor)));
    require(coarse >= 2, ErrorKind::InsufficientResolution,
            "axis with " + std::to_string(cells) + " cells cannot be coarsened by " + std::to_string(factor));
    return Axis::uniform(ax.length(), coarse);
}

inline ClassicalData resample(const ClassicalData& cl, const Grid& g) {
    ClassicalData r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) r.traces[i][j] = resample(cl.traces[i][j], g.x);
    r.mixed22 = resample(cl.mixed22, g.y);
    return r;
}

/// Deepest refinement hierarchy (at most `wanted` levels) both axes support.
inline int feasible_levels(const ClassicalData& cl, int wanted) {
    int levels = 1;
    std::size_t factor = 2;
    while (levels < wanted && cl.axis_x().cells() / factor >= 2 && cl.axis_y().cells() / factor >= 2) {
        ++levels;
        factor *= 2;
    }
    return levels;
}

/// Compares difference-quotient norms of F^(1..4) across nested coarsenings of the
/// classical data. A norm that keeps growing under refinement means F^(k) has no
/// integrable derivative and the classical problem has no W_p^(3,2) solution.
inline AgreementReport agreement_check(const ClassicalData& cl, const MonotoneCurve& c,
                                       const AgreementOptions& opts = {}) {
    require(opts.levels >= 2, ErrorKind::InvalidArgument,
            "agreement check needs at least 2 levels, got " + std::to_string(opts.levels));
    require(opts.threshold > 0.0, ErrorKind::InvalidArgument, "agreement threshold must be positive");
    require_exponent(opts.p);

    AgreementReport report;
    report.levels = opts.levels;
    report.threshold = opts.threshold;
    report.p = opts.p;
    std::size_t factor = 1;
    for (int level = 0; level < opts.levels; ++level, factor *= 2) {
        const Grid g{coarsen(cl.axis_x(), factor), coarsen(cl.axis_y(), factor)};
        const auto fs = agreement_functions(level == 0 ? cl : resample(cl, g), c);
        for (int k = 0; k < 4; ++k) {
            if (level == 0) report.entries[k].function = fs[k];
            report.entries[k].norms.push_back(lp_norm(derivative(fs[k]), opts.p));
        }
    }
    for (auto& e : report.entries) {
        e.derivative_lp_norm = e.norms.front();
        // Norms at round-off level carry no refinement information.
        const double floor = 1e-8 * (1.0 + max_abs(e.function));
        const double fine = e.norms.front();
        const double coarse = e.norms.back();
        if (fine <= floor) {
            e.refinement_ratio = 1.0;
        } else if (coarse <= floor) {
            e.refinement_ratio = kInf;
        } else {
            e.refinement_ratio = fine / coarse;
        }
        e.flagged = e.refinement_ratio > opts.threshold;
    }
    return report;
}

// Trace identities -----------------------------------------------------------

struct IdentityDefect {
    int i = 0;
    int j = 0;
    double defect = 0.0;  // sup over x of |lhs - rhs|
};

/// Discrete check of the six trace identities for a jet:
/// g_ij(x, S(x)) = g_ij(0, h2) + int_0^x g_{i+1,j}(t, S(t)) dt + int_{h2}^{S(x)} g_{i,j+1}(v(s), s) ds
/// for (i, j) in {0,1,2} x {0,1}.
inline std::vector<IdentityDefect> trace_identity_defects(const DerivativeJet& jet, const MonotoneCurve& c) {
    jet.validate();
    const Axis& ax = jet.axis_x();
    const Axis& ay = jet.axis_y();
    require_curve_on(c, ax, ay);
    std::vector<IdentityDefect> out;
    for (int i = 0; i <= 2; ++i) {
        for (int j = 0; j <= 1; ++j) {
            const Fn1 lhs = curve_trace_x(jet.g[i][j], c);
            const double corner = interp2(jet.g[i][j], 0.0, c.h2());
            const Fn1 rhs = Fn1::constant(ax, corner) +
                            cumulative_integral(curve_trace_x(jet.g[i + 1][j], c), Origin::Left) +
                            integral_h2_to_curve(curve_trace_y(jet.g[i][j + 1], c), c, ax);
            out.push_back({i, j, max_abs(lhs - rhs)});
        }
    }
    return out;
}

// Inverse map ----------------------------------------------------------------

struct InverseResult {
    NonClassicalData data;
    AgreementReport agreement;
};

/// Classical traces to non-classical data. The right side `rhs` of the equation is
/// shared by both formulations and passed through unchanged.
inline InverseResult to_nonclassical(const ClassicalData& cl, const MonotoneCurve& c, const Fn2& rhs,
                                     const AgreementOptions& opts = {}) {
    cl.validate();
    require(rhs.axis_x == cl.axis_x() && rhs.axis_y == cl.axis_y(), ErrorKind::AxisMismatch,
            "right side and classical data live on different grids");
    const auto fs = agreement_functions(cl, c);

    InverseResult out;
    auto& nc = out.data;
    nc.rhs = rhs;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) nc.corner[i][j] = cl.traces[i][j][0];
    nc.x_traces[0] = derivative(fs[0]);
    nc.x_traces[1] = derivative(fs[1]);
    nc.y_traces[0] = derivative(fs[2]);
    nc.y_traces[1] = derivative(fs[3]);
    nc.y_traces[2] = cl.mixed22;

    AgreementOptions used = opts;
    used.levels = feasible_levels(cl, opts.levels);
    if (used.levels >= 2) {
        out.agreement = agreement_check(cl, c, used);
    } else {
        auto& r = out.agreement;
        r.levels = 1;
        r.threshold = opts.threshold;
        r.p = opts.p;
        for (int k = 0; k < 4; ++k) {
            r.entries[k].function = fs[k];
            r.entries[k].derivative_lp_norm = lp_norm(derivative(fs[k]), opts.p);
            r.entries[k].norms = {r.entries[k].derivative_lp_norm};
        }
    }
    return out;
}

} // namespace ppcauchy
