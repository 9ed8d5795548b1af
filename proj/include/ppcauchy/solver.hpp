#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "ppcauchy/transform.hpp"

namespace ppcauchy {

/// Builds every D_x^i D_y^j u from w = D_x^3 D_y^2 u and the non-classical data by
/// integrating away from the carrier curve: x-integrals start at v(y), y-integrals
/// at S(x). Both are signed, so points on either side of the curve are handled.
inline DerivativeJet reconstruct_jet(const Fn2& w, const NonClassicalData& nc, const MonotoneCurve& c) {
    nc.validate();
    require(w.axis_x == nc.axis_x() && w.axis_y == nc.axis_y(), ErrorKind::AxisMismatch,
            "w and the non-classical data live on different grids");
    require_curve_on(c, w.axis_x, w.axis_y);
    const Axis& ax = w.axis_x;
    const Axis& ay = w.axis_y;
    const std::size_t nx = ax.size();
    const std::size_t ny = ay.size();

    std::vector<double> v_of_y(ny);
    for (std::size_t m = 0; m < ny; ++m) v_of_y[m] = c.v_at(ay[m]);
    std::vector<double> s_of_x(nx);
    for (std::size_t k = 0; k < nx; ++k) s_of_x[k] = c.s_at(ax[k]);

    // out(x, y) = base(y) + integral from v(y) to x of integrand(., y)
    auto integrate_x_from_curve = [&](const Fn2& integrand, const Fn1& base) {
        Fn2 out = integrand;
        for (std::size_t m = 0; m < ny; ++m) {
            const Fn1 row = integrand.row_x(m);
            const Fn1 cum = cumulative_integral(row, Origin::Left);
            const double at_curve = eval_integral_to(row, cum, v_of_y[m]);
            for (std::size_t k = 0; k < nx; ++k) out(k, m) = base[m] + (cum[k] - at_curve);
        }
        return out;
    };
    // out(x, y) = base(x) + integral from S(x) to y of integrand(x, .)
    auto integrate_y_from_curve = [&](const Fn2& integrand, const Fn1& base) {
        Fn2 out = integrand;
        for (std::size_t k = 0; k < nx; ++k) {
            const Fn1 col = integrand.column_y(k);
            const Fn1 cum = cumulative_integral(col, Origin::Left);
            const double at_curve = eval_integral_to(col, cum, s_of_x[k]);
            for (std::size_t m = 0; m < ny; ++m) out(k, m) = base[k] + (cum[m] - at_curve);
        }
        return out;
    };

    DerivativeJet jet;
    auto& g = jet.g;
    g[3][2] = w;
    for (int i = 2; i >= 0; --i) g[i][2] = integrate_x_from_curve(g[i + 1][2], nc.y_traces[i]);
    for (int j = 1; j >= 0; --j) g[3][j] = integrate_y_from_curve(g[3][j + 1], nc.x_traces[j]);
    const ClassicalData traces = to_classical(nc, c);
    for (int i = 0; i <= 2; ++i) {
        g[i][1] = integrate_y_from_curve(g[i][2], traces.traces[i][1]);
        g[i][0] = integrate_y_from_curve(g[i][1], traces.traces[i][0]);
    }
    return jet;
}

/// Sum over (i, j) != (3, 2) of a_ij * g_ij.
inline Fn2 lower_order_terms(const DerivativeJet& jet, const CoefficientSet& coeffs) {
    Fn2 out = Fn2::zeros(jet.axis_x(), jet.axis_y());
    for (int i = 0; i <= 3; ++i) {
        for (int j = 0; j <= 2; ++j) {
            if (!CoefficientSet::is_term(i, j)) continue;
            const Fn2& a = coeffs.a[i][j];
            const Fn2& g = jet.g[i][j];
            require_same_grid(a, g, "coefficient vs jet");
            for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] += a.values[k] * g.values[k];
        }
    }
    return out;
}

/// Nodal evaluation of the fifth-order operator on a jet.
inline Fn2 apply_operator(const DerivativeJet& jet, const CoefficientSet& coeffs) {
    jet.validate();
    Fn2 out = lower_order_terms(jet, coeffs);
    for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] += jet.g[3][2].values[k];
    return out;
}

inline double residual(const Fn2& w, const NonClassicalData& nc, const CoefficientSet& coeffs,
                       const MonotoneCurve& c) {
    return max_abs(apply_operator(reconstruct_jet(w, nc, c), coeffs) - nc.rhs);
}

struct SolverOptions {
    double tol = 1e-10;
    int max_iter = 100;
    double relaxation = 1.0;  // omega in (0, 1]
};

struct ConvergenceReport {
    int iterations = 0;
    std::vector<double> update_norms;
    double final_residual = 0.0;
    double tolerance = 0.0;  // absolute threshold the last update was compared against
    bool converged = false;
};

struct Solution {
    Fn2 w;
    DerivativeJet jet;
    ConvergenceReport report;
};

/// Successive substitution w <- Z_{3,2} - sum a_ij g_ij[w], starting from w = Z_{3,2}.
/// Non-convergence is reported, never thrown.
inline Solution solve_picard(const NonClassicalData& nc, const CoefficientSet& coeffs, const MonotoneCurve& c,
                             const SolverOptions& opts = {}) {
    require(opts.tol > 0.0 && std::isfinite(opts.tol), ErrorKind::InvalidArgument, "solver tol must be positive");
    require(opts.max_iter >= 1, ErrorKind::InvalidArgument, "solver max_iter must be at least 1");
    require(opts.relaxation > 0.0 && opts.relaxation <= 1.0, ErrorKind::InvalidArgument,
            "relaxation must lie in (0, 1]");

    Solution sol;
    auto& rep = sol.report;
    rep.tolerance = opts.tol * (1.0 + max_abs(nc.rhs));
    Fn2 w = nc.rhs;
    for (int it = 1; it <= opts.max_iter; ++it) {
        const DerivativeJet jet = reconstruct_jet(w, nc, c);
        Fn2 next = nc.rhs - lower_order_terms(jet, coeffs);
        if (opts.relaxation < 1.0) {
            for (std::size_t k = 0; k < next.values.size(); ++k) {
                next.values[k] = (1.0 - opts.relaxation) * w.values[k] + opts.relaxation * next.values[k];
            }
        }
        double update = 0.0;
        for (std::size_t k = 0; k < next.values.size(); ++k) {
            const double d = std::abs(next.values[k] - w.values[k]);
            update = std::isfinite(d) ? std::max(update, d) : kInf;
        }
        rep.iterations = it;
        rep.update_norms.push_back(update);
        if (!std::isfinite(update)) break;
        w = std::move(next);
        if (update <= rep.tolerance) {
            rep.converged = true;
            break;
        }
    }
    sol.jet = reconstruct_jet(w, nc, c);
    rep.final_residual = max_abs(apply_operator(sol.jet, coeffs) - nc.rhs);
    sol.w = std::move(w);
    return sol;
}

struct ConsistencyDefect {
    int i = 0;
    int j = 0;
    char direction = 'x';  // compares d/dx g_ij with g_{i+1,j}, or d/dy g_ij with g_{i,j+1}
    double defect = 0.0;   // sup over interior nodes
};

/// Finite-difference cross-check of the jet at interior nodes.
inline std::vector<ConsistencyDefect> jet_consistency(const DerivativeJet& jet) {
    jet.validate();
    std::vector<ConsistencyDefect> out;
    auto interior_sup = [](const Fn2& a, const Fn2& b) {
        double m = 0.0;
        for (std::size_t i = 1; i + 1 < a.nx(); ++i)
            for (std::size_t j = 1; j + 1 < a.ny(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
        return m;
    };
    for (int i = 0; i <= 3; ++i) {
        for (int j = 0; j <= 2; ++j) {
            if (i < 3) out.push_back({i, j, 'x', interior_sup(derivative_x(jet.g[i][j]), jet.g[i + 1][j])});
            if (j < 2) out.push_back({i, j, 'y', interior_sup(derivative_y(jet.g[i][j]), jet.g[i][j + 1])});
        }
    }
    return out;
}

} // namespace ppcauchy
