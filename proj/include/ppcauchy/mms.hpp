#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ppcauchy/solver.hpp"

namespace ppcauchy {

/// Bivariate polynomial u(x, y) = sum c[m][n] x^m y^n.
class PolySolution {
public:
    PolySolution() : coeff_{{0.0}} {}

    explicit PolySolution(std::vector<std::vector<double>> coeff) : coeff_(std::move(coeff)) {
        require(!coeff_.empty(), ErrorKind::InvalidArgument, "polynomial needs at least one coefficient row");
        std::size_t width = 0;
        for (const auto& row : coeff_) width = std::max(width, row.size());
        require(width > 0, ErrorKind::InvalidArgument, "polynomial needs at least one coefficient");
        for (auto& row : coeff_) {
            row.resize(width, 0.0);
            for (double c : row) require(std::isfinite(c), ErrorKind::InvalidArgument, "non-finite coefficient");
        }
    }

    /// u = x^3 y^2 + x^2 y + x + 1: non-zero in every slot of both data bundles.
    static PolySolution default_solution() {
        std::vector<std::vector<double>> c(4, std::vector<double>(3, 0.0));
        c[3][2] = 1.0;
        c[2][1] = 1.0;
        c[1][0] = 1.0;
        c[0][0] = 1.0;
        return PolySolution(std::move(c));
    }

    static PolySolution monomial(int m, int n, double scale = 1.0) {
        std::vector<std::vector<double>> c(static_cast<std::size_t>(m) + 1,
                                           std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0));
        c[static_cast<std::size_t>(m)][static_cast<std::size_t>(n)] = scale;
        return PolySolution(std::move(c));
    }

    [[nodiscard]] const std::vector<std::vector<double>>& coeff() const noexcept { return coeff_; }
    [[nodiscard]] int degree_x() const noexcept { return static_cast<int>(coeff_.size()) - 1; }
    [[nodiscard]] int degree_y() const noexcept { return static_cast<int>(coeff_.front().size()) - 1; }

    [[nodiscard]] double operator()(double x, double y) const {
        double acc = 0.0;
        for (auto row = coeff_.rbegin(); row != coeff_.rend(); ++row) {
            double inner = 0.0;
            for (auto c = row->rbegin(); c != row->rend(); ++c) inner = inner * y + *c;
            acc = acc * x + inner;
        }
        return acc;
    }

    /// D_x^i D_y^j by falling-factorial scaling; over-differentiation gives zero.
    [[nodiscard]] PolySolution derivative(int i, int j) const {
        require(i >= 0 && j >= 0, ErrorKind::InvalidArgument, "derivative orders must be non-negative");
        const int mx = degree_x() - i;
        const int ny = degree_y() - j;
        if (mx < 0 || ny < 0) return PolySolution();
        std::vector<std::vector<double>> out(static_cast<std::size_t>(mx) + 1,
                                             std::vector<double>(static_cast<std::size_t>(ny) + 1, 0.0));
        for (int m = 0; m <= mx; ++m) {
            for (int n = 0; n <= ny; ++n) {
                double scale = 1.0;
                for (int k = 0; k < i; ++k) scale *= m + i - k;
                for (int k = 0; k < j; ++k) scale *= n + j - k;
                out[m][n] = scale * coeff_[m + i][n + j];
            }
        }
        return PolySolution(std::move(out));
    }

    friend bool operator==(const PolySolution& a, const PolySolution& b) {
        // Compare after trimming trailing zero rows/columns.
        const int mx = std::max(a.degree_x(), b.degree_x());
        const int ny = std::max(a.degree_y(), b.degree_y());
        for (int m = 0; m <= mx; ++m)
            for (int n = 0; n <= ny; ++n)
                if (a.at(m, n) != b.at(m, n)) return false;
        return true;
    }

    [[nodiscard]] double at(int m, int n) const {
        if (m < 0 || n < 0 || m > degree_x() || n > degree_y()) return 0.0;
        return coeff_[m][n];
    }

private:
    std::vector<std::vector<double>> coeff_;
};

/// Exact derivatives of `ps` sampled at the grid nodes.
inline DerivativeJet exact_jet(const PolySolution& ps, const Grid& g) {
    DerivativeJet jet;
    for (int i = 0; i <= 3; ++i) {
        for (int j = 0; j <= 2; ++j) {
            const PolySolution d = ps.derivative(i, j);
            jet.g[i][j] = sample(g.x, g.y, [&](double x, double y) { return d(x, y); });
        }
    }
    return jet;
}

/// Samples every component of the non-classical conditions from the exact solution;
/// the right side is the operator applied to the exact jet.
inline NonClassicalData generate_nonclassical(const PolySolution& ps, const MonotoneCurve& c,
                                              const CoefficientSet& coeffs, const Grid& g) {
    NonClassicalData nc;
    nc.rhs = apply_operator(exact_jet(ps, g), coeffs);
    for (int j = 0; j <= 1; ++j) {
        const PolySolution d = ps.derivative(3, j);
        nc.x_traces[j] = sample(g.x, [&](double x) { return d(x, c.s_at(x)); });
    }
    for (int i = 0; i <= 2; ++i) {
        const PolySolution d = ps.derivative(i, 2);
        nc.y_traces[i] = sample(g.y, [&](double y) { return d(c.v_at(y), y); });
    }
    for (int i = 0; i <= 2; ++i)
        for (int j = 0; j <= 1; ++j) nc.corner[i][j] = ps.derivative(i, j)(0.0, c.h2());
    return nc;
}

inline ClassicalData generate_classical(const PolySolution& ps, const MonotoneCurve& c, const Grid& g) {
    ClassicalData cl;
    for (int i = 0; i <= 2; ++i) {
        for (int j = 0; j <= 1; ++j) {
            const PolySolution d = ps.derivative(i, j);
            cl.traces[i][j] = sample(g.x, [&](double x) { return d(x, c.s_at(x)); });
        }
    }
    const PolySolution d22 = ps.derivative(2, 2);
    cl.mixed22 = sample(g.y, [&](double y) { return d22(c.v_at(y), y); });
    return cl;
}

struct JetError {
    std::array<std::array<double, 3>, 4> field{};  // ||g_ij - D_x^i D_y^j u||_p
    double sobolev_total = 0.0;                     // sum of the twelve
};

inline JetError jet_error(const DerivativeJet& jet, const PolySolution& ps, double p = 2.0) {
    jet.validate();
    const DerivativeJet exact = exact_jet(ps, Grid{jet.axis_x(), jet.axis_y()});
    JetError e;
    for (int i = 0; i <= 3; ++i) {
        for (int j = 0; j <= 2; ++j) {
            e.field[i][j] = lp_norm(jet.g[i][j] - exact.g[i][j], p);
            e.sobolev_total += e.field[i][j];
        }
    }
    return e;
}

// Convergence studies --------------------------------------------------------

/// Everything needed to instantiate a manufactured problem on a given grid.
struct ProblemSetup {
    Domain domain;
    std::function<MonotoneCurve(const Grid&)> curve;
    std::function<CoefficientSet(const Grid&)> coefficients;
    SolverOptions solver;

    /// Unit-square-style setup with the linear curve and zero coefficients.
    static ProblemSetup linear_zero(const Domain& d) {
        ProblemSetup s;
        s.domain = d;
        s.curve = [d](const Grid& g) { return MonotoneCurve::linear(d.h1, d.h2, g.x); };
        s.coefficients = [](const Grid& g) { return CoefficientSet::zeros(g); };
        return s;
    }
};

struct ObservedOrder {
    double value = 0.0;
    bool exact = false;  // both errors at round-off level
};

struct StudyRow {
    std::string metric;
    std::vector<double> errors;                       // one per grid size
    std::vector<std::optional<ObservedOrder>> orders; // empty for the first size
    double floor = 0.0;                               // round-off threshold used for "exact"

    /// Smallest observed order; +inf when every step is exact.
    [[nodiscard]] double min_order() const {
        double m = kInf;
        for (const auto& o : orders)
            if (o && !o->exact) m = std::min(m, o->value);
        return m;
    }
    [[nodiscard]] bool all_exact() const {
        for (const auto& o : orders)
            if (o && !o->exact) return false;
        return true;
    }
};

struct StudyTable {
    std::vector<std::size_t> sizes;
    std::vector<StudyRow> rows;

    [[nodiscard]] const StudyRow& row(const std::string& metric) const {
        for (const auto& r : rows)
            if (r.metric == metric) return r;
        fail(ErrorKind::MissingField, "study has no metric '" + metric + "'");
    }
};

/// Per-grid error metrics of the full pipeline.
struct PipelineErrors {
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<double> scales;  // magnitude of the exact quantity, for the round-off floor
    ConvergenceReport solver;

    void add(std::string name, double error, double scale) {
        metrics.emplace_back(std::move(name), error);
        scales.push_back(scale);
    }
};

inline double scalar_error(const std::array<std::array<double, 2>, 3>& a, const std::array<std::array<double, 2>, 3>& b) {
    double e = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) e = std::max(e, std::abs(a[i][j] - b[i][j]));
    return e;
}

/// generate -> solve -> jet error, and generate -> transforms -> data error, on one grid.
inline PipelineErrors run_pipeline(const PolySolution& ps, const ProblemSetup& setup, std::size_t n) {
    const Grid g = Grid::uniform(setup.domain, n, n);
    const MonotoneCurve c = setup.curve(g);
    const CoefficientSet coeffs = setup.coefficients(g);
    const NonClassicalData nc = generate_nonclassical(ps, c, coeffs, g);
    const ClassicalData cl = generate_classical(ps, c, g);
    const DerivativeJet exact = exact_jet(ps, g);

    PipelineErrors out;
    const Solution sol = solve_picard(nc, coeffs, c, setup.solver);
    out.solver = sol.report;
    const JetError je = jet_error(sol.jet, ps, kInf);
    for (int i = 0; i <= 3; ++i)
        for (int j = 0; j <= 2; ++j) out.add(index_name("solve.g", i, j), je.field[i][j], max_abs(exact.g[i][j]));
    out.add("solve.sobolev_total", jet_error(sol.jet, ps, setup.domain.p).sobolev_total,
            sobolev_norm_32(exact, setup.domain.p));
    out.add("solve.residual", sol.report.final_residual, max_abs(nc.rhs));

    const ClassicalData forward = to_classical(nc, c);
    for (int i = 0; i <= 2; ++i)
        for (int j = 0; j <= 1; ++j)
            out.add(index_name("forward.Z", i, j), max_abs(forward.traces[i][j] - cl.traces[i][j]),
                    max_abs(cl.traces[i][j]));

    const NonClassicalData nc_back = to_nonclassical(forward, c, nc.rhs).data;
    out.add("roundtrip_nc.z30", max_abs(nc_back.x_traces[0] - nc.x_traces[0]), max_abs(nc.x_traces[0]));
    out.add("roundtrip_nc.z31", max_abs(nc_back.x_traces[1] - nc.x_traces[1]), max_abs(nc.x_traces[1]));
    out.add("roundtrip_nc.z02", max_abs(nc_back.y_traces[0] - nc.y_traces[0]), max_abs(nc.y_traces[0]));
    out.add("roundtrip_nc.z12", max_abs(nc_back.y_traces[1] - nc.y_traces[1]), max_abs(nc.y_traces[1]));
    out.add("roundtrip_nc.z22", max_abs(nc_back.y_traces[2] - nc.y_traces[2]), max_abs(nc.y_traces[2]));
    out.add("roundtrip_nc.scalars", scalar_error(nc_back.corner, nc.corner), 1.0);

    const NonClassicalData nc_from_cl = to_nonclassical(cl, c, nc.rhs).data;
    const ClassicalData cl_back = to_classical(nc_from_cl, c);
    for (int i = 0; i <= 2; ++i)
        for (int j = 0; j <= 1; ++j)
            out.add(index_name("roundtrip_cl.Z", i, j), max_abs(cl_back.traces[i][j] - cl.traces[i][j]),
                    max_abs(cl.traces[i][j]));
    out.add("roundtrip_cl.Z4", max_abs(cl_back.mixed22 - cl.mixed22), max_abs(cl.mixed22));
    return out;
}

inline void require_doubling(const std::vector<std::size_t>& sizes) {
    require(sizes.size() >= 3, ErrorKind::InvalidArgument, "convergence study needs at least 3 grid sizes");
    for (std::size_t k = 1; k < sizes.size(); ++k) {
        require(sizes[k] == 2 * sizes[k - 1], ErrorKind::InvalidArgument,
                "grid sizes must double: " + std::to_string(sizes[k - 1]) + " then " + std::to_string(sizes[k]));
    }
}

/// Observed order log2(e_h / e_{h/2}); steps where both errors sit below the
/// round-off floor are marked exact.
inline std::vector<std::optional<ObservedOrder>> observed_orders(const std::vector<double>& errors, double floor) {
    std::vector<std::optional<ObservedOrder>> orders(errors.size());
    for (std::size_t k = 1; k < errors.size(); ++k) {
        ObservedOrder o;
        if (errors[k - 1] <= floor && errors[k] <= floor) {
            o.exact = true;
        } else if (errors[k] <= floor) {
            o.value = kInf;
        } else {
            o.value = std::log2(errors[k - 1] / errors[k]);
        }
        orders[k] = o;
    }
    return orders;
}

inline double roundoff_floor(double scale) { return 1e-10 * (1.0 + scale); }

inline StudyTable convergence_study(const PolySolution& ps, const ProblemSetup& setup,
                                    const std::vector<std::size_t>& sizes) {
    require_doubling(sizes);
    StudyTable table;
    table.sizes = sizes;
    std::vector<PipelineErrors> runs;
    runs.reserve(sizes.size());
    for (std::size_t n : sizes) runs.push_back(run_pipeline(ps, setup, n));
    for (std::size_t m = 0; m < runs.front().metrics.size(); ++m) {
        StudyRow row;
        row.metric = runs.front().metrics[m].first;
        double scale = 0.0;
        for (const auto& r : runs) {
            row.errors.push_back(r.metrics[m].second);
            scale = std::max(scale, r.scales[m]);
        }
        row.floor = roundoff_floor(scale);
        row.orders = observed_orders(row.errors, row.floor);
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace ppcauchy
