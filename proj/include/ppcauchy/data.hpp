#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "ppcauchy/grid.hpp"

namespace ppcauchy {

/// Rectangle G = (0, h1) x (0, h2) and the Lebesgue exponent p.
struct Domain {
    double h1 = 1.0;
    double h2 = 1.0;
    double p = 2.0;

    void validate() const {
        require(h1 > 0.0 && std::isfinite(h1), ErrorKind::InvalidArgument, "domain.h1 must be positive");
        require(h2 > 0.0 && std::isfinite(h2), ErrorKind::InvalidArgument, "domain.h2 must be positive");
        require_exponent(p);
    }
};

/// Uniform axes for a domain with the given cell counts.
struct Grid {
    Axis x;
    Axis y;

    static Grid uniform(const Domain& d, std::size_t nx, std::size_t ny) {
        return Grid{Axis::uniform(d.h1, nx), Axis::uniform(d.h2, ny)};
    }
};

inline std::string index_name(const char* prefix, int i, int j) {
    return std::string(prefix) + std::to_string(i) + std::to_string(j);
}

/// Right-hand sides of the non-classical conditions: the equation's right side,
/// the top mixed derivatives along the curve, and the six corner values at (0, h2).
struct NonClassicalData {
    Fn2 rhs;                        // Z_{3,2}(x, y) on G
    std::array<Fn1, 2> x_traces;    // Z_{3,j}(x) = D_x^3 D_y^j u(x, S(x)), j = 0, 1
    std::array<Fn1, 3> y_traces;    // Z_{i,2}(y) = D_x^i D_y^2 u(v(y), y), i = 0, 1, 2
    std::array<std::array<double, 2>, 3> corner{};  // Z_{i,j} = D_x^i D_y^j u(0, h2)

    static NonClassicalData zeros(const Grid& g) {
        NonClassicalData nc;
        nc.rhs = Fn2::zeros(g.x, g.y);
        nc.x_traces = {Fn1::zeros(g.x), Fn1::zeros(g.x)};
        nc.y_traces = {Fn1::zeros(g.y), Fn1::zeros(g.y), Fn1::zeros(g.y)};
        return nc;
    }

    [[nodiscard]] const Axis& axis_x() const { return rhs.axis_x; }
    [[nodiscard]] const Axis& axis_y() const { return rhs.axis_y; }

    void validate() const {
        for (const auto& f : x_traces) require_same_axis(f.axis, axis_x(), "non-classical x trace");
        for (const auto& f : y_traces) require_same_axis(f.axis, axis_y(), "non-classical y trace");
        for (const auto& row : corner) {
            for (double c : row) require(std::isfinite(c), ErrorKind::InvalidArgument, "corner value not finite");
        }
    }
};

/// Classical Cauchy data: six traces D_x^i D_y^j u(x, S(x)) and D_x^2 D_y^2 u(v(y), y).
struct ClassicalData {
    std::array<std::array<Fn1, 2>, 3> traces;  // Z^{(i,j)}(x), i = 0..2, j = 0..1
    Fn1 mixed22;                               // Z^{(4)}(y)

    static ClassicalData zeros(const Grid& g) {
        ClassicalData cl;
        for (auto& row : cl.traces) row = {Fn1::zeros(g.x), Fn1::zeros(g.x)};
        cl.mixed22 = Fn1::zeros(g.y);
        return cl;
    }

    [[nodiscard]] const Axis& axis_x() const { return traces[0][0].axis; }
    [[nodiscard]] const Axis& axis_y() const { return mixed22.axis; }

    void validate() const {
        for (const auto& row : traces) {
            for (const auto& f : row) require_same_axis(f.axis, axis_x(), "classical trace");
        }
    }
};

inline NonClassicalData operator+(const NonClassicalData& a, const NonClassicalData& b) {
    NonClassicalData r = a;
    r.rhs = a.rhs + b.rhs;
    for (int j = 0; j < 2; ++j) r.x_traces[j] = a.x_traces[j] + b.x_traces[j];
    for (int i = 0; i < 3; ++i) r.y_traces[i] = a.y_traces[i] + b.y_traces[i];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) r.corner[i][j] = a.corner[i][j] + b.corner[i][j];
    return r;
}

inline NonClassicalData operator*(double s, const NonClassicalData& a) {
    NonClassicalData r = a;
    r.rhs = s * a.rhs;
    for (auto& f : r.x_traces) f = s * f;
    for (auto& f : r.y_traces) f = s * f;
    for (auto& row : r.corner)
        for (double& c : row) c *= s;
    return r;
}

inline ClassicalData operator+(const ClassicalData& a, const ClassicalData& b) {
    ClassicalData r = a;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) r.traces[i][j] = a.traces[i][j] + b.traces[i][j];
    r.mixed22 = a.mixed22 + b.mixed22;
    return r;
}

inline ClassicalData operator*(double s, const ClassicalData& a) {
    ClassicalData r = a;
    for (auto& row : r.traces)
        for (auto& f : row) f = s * f;
    r.mixed22 = s * a.mixed22;
    return r;
}

/// Lower-order coefficients a_{i,j}, (i, j) in {0..3} x {0..2} minus (3, 2), and
/// the optional majorants a0_{i,2}(x) and a0_{3,j}(y).
struct CoefficientSet {
    std::array<std::array<Fn2, 3>, 4> a;  // a[3][2] is unused and stays zero
    std::array<std::optional<Fn1>, 3> majorant_x;  // a0_{i,2}(x), i = 0..2
    std::array<std::optional<Fn1>, 2> majorant_y;  // a0_{3,j}(y), j = 0..1

    static CoefficientSet zeros(const Grid& g) {
        CoefficientSet c;
        for (auto& row : c.a)
            for (auto& f : row) f = Fn2::zeros(g.x, g.y);
        return c;
    }

    static bool is_term(int i, int j) { return i >= 0 && i <= 3 && j >= 0 && j <= 2 && !(i == 3 && j == 2); }

    [[nodiscard]] bool all_zero() const {
        for (int i = 0; i <= 3; ++i)
            for (int j = 0; j <= 2; ++j)
                if (is_term(i, j) && max_abs(a[i][j]) != 0.0) return false;
        return true;
    }

    void validate(const Grid& g) const {
        for (int i = 0; i <= 3; ++i) {
            for (int j = 0; j <= 2; ++j) {
                require(a[i][j].axis_x == g.x && a[i][j].axis_y == g.y, ErrorKind::AxisMismatch,
                        "coefficient " + index_name("a", i, j) + " is not on the problem grid");
            }
        }
        for (const auto& m : majorant_x)
            if (m) require_same_axis(m->axis, g.x, "majorant a0_i2");
        for (const auto& m : majorant_y)
            if (m) require_same_axis(m->axis, g.y, "majorant a0_3j");
    }
};

/// Sampled fields g[i][j] ~ D_x^i D_y^j u, i = 0..3, j = 0..2.
struct DerivativeJet {
    std::array<std::array<Fn2, 3>, 4> g;

    static DerivativeJet zeros(const Grid& grid) {
        DerivativeJet jet;
        for (auto& row : jet.g)
            for (auto& f : row) f = Fn2::zeros(grid.x, grid.y);
        return jet;
    }

    [[nodiscard]] const Axis& axis_x() const { return g[0][0].axis_x; }
    [[nodiscard]] const Axis& axis_y() const { return g[0][0].axis_y; }

    void validate() const {
        for (int i = 0; i <= 3; ++i) {
            for (int j = 0; j <= 2; ++j) {
                require(!g[i][j].values.empty(), ErrorKind::MissingField,
                        "jet field " + index_name("g", i, j) + " is missing");
                require_same_grid(g[i][j], g[0][0], "derivative jet");
            }
        }
    }
};

/// Discrete anisotropic Sobolev norm: sum over i <= 3, j <= 2 of ||g_ij||_p.
inline double sobolev_norm_32(const DerivativeJet& jet, double p = 2.0) {
    jet.validate();
    double total = 0.0;
    for (int i = 0; i <= 3; ++i)
        for (int j = 0; j <= 2; ++j) total += lp_norm(jet.g[i][j], p);
    return total;
}

/// Norm on the product space of the non-classical bundle; components combine by summation.
inline double product_norm(const NonClassicalData& nc, double p = 2.0) {
    double total = lp_norm(nc.rhs, p);
    for (const auto& f : nc.x_traces) total += lp_norm(f, p);
    for (const auto& f : nc.y_traces) total += lp_norm(f, p);
    for (const auto& row : nc.corner)
        for (double c : row) total += std::abs(c);
    return total;
}

struct MajorantCheck {
    std::string coefficient;  // e.g. "a22"
    bool checked = false;     // false when no majorant was supplied
    bool pass = true;
    double worst_excess = 0.0;  // max of |a| - a0 over nodes (<= 0 on pass)
    std::size_t worst_i = 0;
    std::size_t worst_j = 0;
};

/// Checks |a_{i,2}(x, y)| <= a0_{i,2}(x) and |a_{3,j}(x, y)| <= a0_{3,j}(y) at every node.
inline std::vector<MajorantCheck> validate_majorants(const CoefficientSet& c) {
    std::vector<MajorantCheck> report;
    auto check = [&](int ci, int cj, const std::optional<Fn1>& maj, bool along_x) {
        MajorantCheck r;
        r.coefficient = index_name("a", ci, cj);
        if (maj) {
            r.checked = true;
            r.worst_excess = -kInf;
            const Fn2& a = c.a[ci][cj];
            for (std::size_t i = 0; i < a.nx(); ++i) {
                for (std::size_t j = 0; j < a.ny(); ++j) {
                    const double bound = along_x ? (*maj)[i] : (*maj)[j];
                    const double excess = std::abs(a(i, j)) - bound;
                    if (excess > r.worst_excess) {
                        r.worst_excess = excess;
                        r.worst_i = i;
                        r.worst_j = j;
                    }
                }
            }
            r.pass = r.worst_excess <= 0.0;
        }
        report.push_back(r);
    };
    for (int i = 0; i <= 2; ++i) check(i, 2, c.majorant_x[i], true);
    for (int j = 0; j <= 1; ++j) check(3, j, c.majorant_y[j], false);
    return report;
}

/// Coefficient with a jump: `left` on nodes up to the last one at or before `at`,
/// `right` after. The jump sits midway between two nodes, so no node lies on it.
inline Fn2 step_coefficient(const Grid& g, double left, double right, double at, bool along_x = true) {
    const Axis& ax = along_x ? g.x : g.y;
    const double t = ax.clamp(at);
    std::size_t last_left = ax.cell_of(t);
    if (t >= ax[last_left + 1]) last_left += 1;
    return sample(g.x, g.y, [&](double x, double y) {
        const double s = along_x ? x : y;
        return s <= ax[last_left] ? left : right;
    });
}

} // namespace ppcauchy
