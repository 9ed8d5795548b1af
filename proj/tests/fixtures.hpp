#pragma once

// Closed-form data bundles for polynomial solutions, built from the oracle
// derivative evaluator rather than the library's manufactured-solution module.

#include <cstring>
#include <functional>
#include <vector>

#include "oracles.hpp"
#include "ppcauchy/transform.hpp"

namespace fixtures {

using namespace ppcauchy;

using Coeff = std::vector<std::vector<double>>;

inline Coeff x3y2() {
    Coeff c(4, std::vector<double>(3, 0.0));
    c[3][2] = 1.0;
    return c;
}

inline Coeff default_poly() {
    Coeff c = x3y2();
    c[2][1] = 1.0;
    c[1][0] = 1.0;
    c[0][0] = 1.0;
    return c;
}

/// A degree (6, 6) polynomial with every coefficient non-zero.
inline Coeff rich_poly() {
    Coeff c(7, std::vector<double>(7, 0.0));
    for (int m = 0; m <= 6; ++m)
        for (int n = 0; n <= 6; ++n) c[m][n] = ((m * 7 + n) % 5 - 2) * 0.25 + 0.1;
    return c;
}

struct Case {
    Grid g;
    MonotoneCurve c;
    std::function<double(double)> S;
    std::function<double(double)> v;
};

inline Case linear_setup(std::size_t n) {
    Grid g = Grid::uniform(Domain{}, n, n);
    return {g, MonotoneCurve::linear(1.0, 1.0, g.x), [](double x) { return 1.0 - x; },
            [](double y) { return 1.0 - y; }};
}

/// S(x) = 1 - x/2 - x^2/2 on the unit square.
inline Case curved_setup(std::size_t n) {
    Grid g = Grid::uniform(Domain{}, n, n);
    auto S = [](double x) { return 1.0 - 0.5 * x - 0.5 * x * x; };
    return {g, MonotoneCurve::from_function(1.0, 1.0, g.x, S), S,
            [](double y) { return (-0.5 + std::sqrt(0.25 + 2.0 * (1.0 - y))); }};
}

/// Non-classical data of a polynomial, sampled from closed-form derivatives.
inline NonClassicalData oracle_nc(const Coeff& u, const Case& s) {
    NonClassicalData nc = NonClassicalData::zeros(s.g);
    nc.rhs = sample(s.g.x, s.g.y, [&](double x, double y) { return oracle::deriv_eval(u, 3, 2, x, y); });
    for (int j = 0; j < 2; ++j)
        nc.x_traces[j] = sample(s.g.x, [&](double x) { return oracle::deriv_eval(u, 3, j, x, s.S(x)); });
    for (int i = 0; i < 3; ++i)
        nc.y_traces[i] = sample(s.g.y, [&](double y) { return oracle::deriv_eval(u, i, 2, s.v(y), y); });
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) nc.corner[i][j] = oracle::deriv_eval(u, i, j, 0.0, 1.0);
    return nc;
}

inline ClassicalData oracle_cl(const Coeff& u, const Case& s) {
    ClassicalData cl = ClassicalData::zeros(s.g);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j)
            cl.traces[i][j] = sample(s.g.x, [&](double x) { return oracle::deriv_eval(u, i, j, x, s.S(x)); });
    cl.mixed22 = sample(s.g.y, [&](double y) { return oracle::deriv_eval(u, 2, 2, s.v(y), y); });
    return cl;
}

inline DerivativeJet oracle_jet(const Coeff& u, const Grid& g) {
    DerivativeJet jet;
    for (int i = 0; i <= 3; ++i)
        for (int j = 0; j <= 2; ++j)
            jet.g[i][j] = sample(g.x, g.y, [&](double x, double y) { return oracle::deriv_eval(u, i, j, x, y); });
    return jet;
}

inline double err_vs(const Fn1& f, const std::function<double(double)>& exact) {
    double e = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) e = std::max(e, std::abs(f[k] - exact(f.axis[k])));
    return e;
}

inline bool bitwise_equal(const Fn1& a, const Fn1& b) {
    return a.size() == b.size() && std::memcmp(a.values.data(), b.values.data(), a.size() * sizeof(double)) == 0;
}

inline double nc_distance(const NonClassicalData& a, const NonClassicalData& b) {
    double e = max_abs(a.rhs - b.rhs);
    for (int k = 0; k < 2; ++k) e = std::max(e, max_abs(a.x_traces[k] - b.x_traces[k]));
    for (int k = 0; k < 3; ++k) e = std::max(e, max_abs(a.y_traces[k] - b.y_traces[k]));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) e = std::max(e, std::abs(a.corner[i][j] - b.corner[i][j]));
    return e;
}

inline double cl_distance(const ClassicalData& a, const ClassicalData& b) {
    double e = max_abs(a.mixed22 - b.mixed22);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) e = std::max(e, max_abs(a.traces[i][j] - b.traces[i][j]));
    return e;
}

} // namespace fixtures
