#include <gtest/gtest.h>

#include <cstring>
#include <tuple>

#include "fixtures.hpp"

namespace ppcauchy {
namespace {

using namespace fixtures;

// curve traces -----------------------------------------------------------------

TEST(CurveTrace, Examples) {
    const Case s = linear_setup(32);
    for (double v : curve_trace_x(Fn2::constant(s.g.x, s.g.y, 7.0), s.c).values) EXPECT_EQ(v, 7.0);
    const Fn1 ty = curve_trace_x(sample(s.g.x, s.g.y, [](double, double y) { return y; }), s.c);
    EXPECT_LT(err_vs(ty, [](double x) { return 1 - x; }), 1e-15);
    const double h = 1.0 / 32;
    const Fn1 t = curve_trace_x(sample(s.g.x, s.g.y, [](double x, double y) { return x * x * x * y * y; }), s.c);
    EXPECT_LT(err_vs(t, [](double x) { return x * x * x * (1 - x) * (1 - x); }), 2 * h * h);
}

// forward cascade ----------------------------------------------------------------

TEST(ToClassical, HandCascadeTopTraces) {
    const Case s = linear_setup(64);
    NonClassicalData nc = NonClassicalData::zeros(s.g);
    nc.x_traces[1] = sample(s.g.x, [](double x) { return 12 * (1 - x); });
    nc.y_traces[2] = sample(s.g.y, [](double y) { return 12 * (1 - y); });
    const ClassicalData partial = to_classical(nc, s.c);
    const double h2 = 1.0 / (64.0 * 64.0);
    EXPECT_LT(err_vs(partial.traces[2][1], [](double x) { return 12 * x * (1 - x); }), 50 * h2);

    nc.x_traces[0] = sample(s.g.x, [](double x) { return 6 * (1 - x) * (1 - x); });
    const ClassicalData more = to_classical(nc, s.c);
    EXPECT_LT(err_vs(more.traces[2][0], [](double x) { return 6 * x * (1 - x) * (1 - x); }), 50 * h2);
}

TEST(ToClassical, ZeroDataMapsToZero) {
    const Case s = curved_setup(16);
    const ClassicalData cl = to_classical(NonClassicalData::zeros(s.g), s.c);
    for (const auto& row : cl.traces)
        for (const auto& f : row)
            for (double v : f.values) EXPECT_EQ(v, 0.0);
    for (double v : cl.mixed22.values) EXPECT_EQ(v, 0.0);
}

TEST(ToClassical, BottomTraceConvergesAtSecondOrder) {
    std::vector<double> errors;
    for (std::size_t n : {32u, 64u}) {
        const Case s = linear_setup(n);
        const ClassicalData cl = to_classical(oracle_nc(x3y2(), s), s.c);
        errors.push_back(err_vs(cl.traces[0][0], [](double x) { return x * x * x * (1 - x) * (1 - x); }));
        EXPECT_LE(errors.back(), 0.5 * 100.0 / (double(n) * n));
    }
    EXPECT_GT(errors[0] / errors[1], 3.6);
    EXPECT_LT(errors[0] / errors[1], 4.4);
}

TEST(ToClassical, MixedTraceIsCopiedBitwise) {
    const Case s = curved_setup(20);
    const NonClassicalData nc = oracle_nc(rich_poly(), s);
    EXPECT_TRUE(bitwise_equal(to_classical(nc, s.c).mixed22, nc.y_traces[2]));
}

TEST(ToClassical, AffineInData) {
    auto r = oracle::rng(31);
    const Case s = curved_setup(24);
    for (int trial = 0; trial < 5; ++trial) {
        NonClassicalData a = NonClassicalData::zeros(s.g);
        NonClassicalData b = NonClassicalData::zeros(s.g);
        for (auto* nc : {&a, &b}) {
            for (auto& f : nc->x_traces) f.values = oracle::uniform_values(r, f.size());
            for (auto& f : nc->y_traces) f.values = oracle::uniform_values(r, f.size());
            for (auto& row : nc->corner) row = {oracle::uniform_values(r, 1)[0], oracle::uniform_values(r, 1)[0]};
        }
        const auto ab = oracle::uniform_values(r, 2, -2.0, 2.0);
        const ClassicalData lhs = to_classical(ab[0] * a + ab[1] * b, s.c);
        const ClassicalData rhs = ab[0] * to_classical(a, s.c) + ab[1] * to_classical(b, s.c);
        EXPECT_LT(cl_distance(lhs, rhs), 1e-13);
    }
}

TEST(ToClassical, RejectsCurveOnOtherDomain) {
    const Case s = linear_setup(16);
    const MonotoneCurve other = MonotoneCurve::linear(2.0, 1.0, Axis::uniform(2.0, 16));
    EXPECT_THROW(to_classical(NonClassicalData::zeros(s.g), other), Error);
    // A differently sampled carrier on the same domain is acceptable.
    const MonotoneCurve coarse = MonotoneCurve::linear(1.0, 1.0, Axis::uniform(1.0, 8));
    EXPECT_NO_THROW(to_classical(NonClassicalData::zeros(s.g), coarse));
}

// inverse map ----------------------------------------------------------------------

TEST(ToNonClassical, HandComputedAgreementFunctions) {
    const std::size_t n = 64;
    const double h2 = 1.0 / double(n * n);
    const Case s = linear_setup(n);
    const ClassicalData cl = oracle_cl(x3y2(), s);
    const auto F = agreement_functions(cl, s.c);
    EXPECT_LT(err_vs(F[1], [](double x) { return 12 * x - 6 * x * x; }), 50 * h2);
    EXPECT_LT(err_vs(F[2], [](double y) { return -std::pow(1 - y, 4) / 2; }), 50 * h2);

    const NonClassicalData nc = to_nonclassical(cl, s.c, Fn2::constant(s.g.x, s.g.y, 12.0)).data;
    EXPECT_LT(err_vs(nc.x_traces[1], [](double x) { return 12 * (1 - x); }), 200 * h2);
    EXPECT_LT(err_vs(nc.y_traces[0], [](double y) { return 2 * std::pow(1 - y, 3); }), 200 * h2);
}

TEST(ToNonClassical, ZeroDataMapsToZeroUnflagged) {
    const Case s = linear_setup(32);
    const auto res = to_nonclassical(ClassicalData::zeros(s.g), s.c, Fn2::zeros(s.g.x, s.g.y));
    EXPECT_EQ(nc_distance(res.data, NonClassicalData::zeros(s.g)), 0.0);
    EXPECT_FALSE(res.agreement.any_flagged());
}

TEST(ToNonClassical, PassthroughsAreBitwise) {
    const Case s = curved_setup(32);
    const ClassicalData cl = oracle_cl(default_poly(), s);
    const Fn2 rhs = sample(s.g.x, s.g.y, [](double x, double y) { return 3 * x - y; });
    const NonClassicalData nc = to_nonclassical(cl, s.c, rhs).data;
    EXPECT_TRUE(bitwise_equal(nc.y_traces[2], cl.mixed22));
    EXPECT_EQ(nc.rhs.values, rhs.values);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) EXPECT_EQ(nc.corner[i][j], cl.traces[i][j][0]);
    EXPECT_EQ(nc.corner[0][0], 1.0);
    EXPECT_EQ(nc.corner[1][0], 1.0);
    EXPECT_EQ(nc.corner[2][0], 2.0);
    EXPECT_EQ(nc.corner[2][1], 2.0);
}

TEST(ToNonClassical, RecoversTracesAtSecondOrder) {
    std::vector<double> e31;
    std::vector<double> e02;
    for (std::size_t n : {16u, 32u, 64u}) {
        const Case s = linear_setup(n);
        const NonClassicalData nc = to_nonclassical(oracle_cl(x3y2(), s), s.c, Fn2::zeros(s.g.x, s.g.y)).data;
        e31.push_back(err_vs(nc.x_traces[1], [](double x) { return 12 * (1 - x); }));
        e02.push_back(err_vs(nc.y_traces[0], [](double y) { return 2 * std::pow(1 - y, 3); }));
    }
    // z31 depends only on quadratic data and is reproduced to round-off.
    EXPECT_LT(e31.back(), 1e-10);
    EXPECT_GE(oracle::order(e02[0], e02[1]), 1.9);
    EXPECT_GE(oracle::order(e02[1], e02[2]), 1.9);
}

// round trips -----------------------------------------------------------------------

class RoundTrip : public ::testing::TestWithParam<std::tuple<int, bool>> {
protected:
    Coeff poly() const { return std::get<0>(GetParam()) == 0 ? default_poly() : rich_poly(); }
    Case make(std::size_t n) const { return std::get<1>(GetParam()) ? curved_setup(n) : linear_setup(n); }
    std::vector<std::size_t> sizes() const {
        // The curved carrier and the degree-6 polynomial need finer grids to leave the pre-asymptotic range.
        const bool hard = std::get<1>(GetParam()) || std::get<0>(GetParam()) == 1;
        return hard ? std::vector<std::size_t>{64, 128, 256} : std::vector<std::size_t>{32, 64, 128};
    }
};

TEST_P(RoundTrip, NonClassicalThroughClassical) {
    std::vector<double> errs;
    for (std::size_t n : sizes()) {
        const Case s = make(n);
        const NonClassicalData nc = oracle_nc(poly(), s);
        const NonClassicalData back = to_nonclassical(to_classical(nc, s.c), s.c, nc.rhs).data;
        EXPECT_TRUE(bitwise_equal(back.y_traces[2], nc.y_traces[2]));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 2; ++j) EXPECT_EQ(back.corner[i][j], nc.corner[i][j]);
        errs.push_back(nc_distance(back, nc));
    }
    EXPECT_GE(oracle::order(errs[1], errs[2]), 1.9) << errs[0] << " " << errs[1] << " " << errs[2];
}

TEST_P(RoundTrip, ClassicalThroughNonClassical) {
    std::vector<double> errs;
    for (std::size_t n : sizes()) {
        const Case s = make(n);
        const ClassicalData cl = oracle_cl(poly(), s);
        const ClassicalData back = to_classical(to_nonclassical(cl, s.c, Fn2::zeros(s.g.x, s.g.y)).data, s.c);
        EXPECT_TRUE(bitwise_equal(back.mixed22, cl.mixed22));
        errs.push_back(cl_distance(back, cl));
    }
    EXPECT_GE(oracle::order(errs[1], errs[2]), 1.9) << errs[0] << " " << errs[1] << " " << errs[2];
}

INSTANTIATE_TEST_SUITE_P(PolynomialsAndCarriers, RoundTrip,
                         ::testing::Combine(::testing::Values(0, 1), ::testing::Bool()));

// agreement diagnostic -------------------------------------------------------------

TEST(Agreement, SmoothDataIsNotFlagged) {
    for (const Case& s : {linear_setup(64), curved_setup(64)}) {
        const AgreementReport r = agreement_check(oracle_cl(x3y2(), s), s.c);
        EXPECT_FALSE(r.any_flagged());
        for (const auto& e : r.entries) {
            EXPECT_LE(e.refinement_ratio, 1.5);
            EXPECT_EQ(e.norms.size(), 4u);
            EXPECT_EQ(e.derivative_lp_norm, e.norms.front());
        }
    }
}

TEST(Agreement, StepInSecondTraceFlagsFirstFunction) {
    const Case s = linear_setup(64);
    ClassicalData cl = oracle_cl(x3y2(), s);
    for (std::size_t k = 0; k < s.g.x.size(); ++k)
        if (s.g.x[k] > 0.5) cl.traces[2][0][k] += 1.0;
    double previous = 1.0;
    for (int levels : {2, 3, 4}) {
        AgreementOptions opts;
        opts.levels = levels;
        const AgreementReport r = agreement_check(cl, s.c, opts);
        // The ratio grows with every level; only four levels clear the default threshold.
        EXPECT_GT(r.entries[0].refinement_ratio, 1.5 * previous) << levels;
        previous = r.entries[0].refinement_ratio;
        EXPECT_EQ(r.entries[0].flagged, levels == 4);
        if (levels == 4) {
            EXPECT_GE(r.entries[0].refinement_ratio, 4.0);
        }
        for (int k = 1; k < 4; ++k) EXPECT_FALSE(r.entries[k].flagged);
        // The jump's difference quotient doubles per refinement in the max norm.
        EXPECT_NEAR(r.entries[0].norms[0] / r.entries[0].norms[1], 2.0, 0.2);
    }
}

TEST(Agreement, ZeroDataHasUnitRatio) {
    const Case s = linear_setup(16);
    const AgreementReport r = agreement_check(ClassicalData::zeros(s.g), s.c);
    for (const auto& e : r.entries) {
        EXPECT_EQ(e.refinement_ratio, 1.0);
        for (double v : e.norms) EXPECT_EQ(v, 0.0);
        EXPECT_FALSE(e.flagged);
    }
}

TEST(Agreement, FlagMatchesThreshold) {
    const Case s = linear_setup(64);
    ClassicalData cl = oracle_cl(x3y2(), s);
    for (std::size_t k = 0; k < s.g.x.size(); ++k)
        if (s.g.x[k] > 0.5) cl.traces[2][0][k] += 1.0;
    for (double threshold : {2.0, 4.0, 16.0}) {
        AgreementOptions opts;
        opts.threshold = threshold;
        for (const auto& e : agreement_check(cl, s.c, opts).entries)
            EXPECT_EQ(e.flagged, e.refinement_ratio > threshold);
    }
}

TEST(Agreement, NeedsTwoLevels) {
    const Case s = linear_setup(16);
    AgreementOptions opts;
    opts.levels = 1;
    EXPECT_THROW(agreement_check(ClassicalData::zeros(s.g), s.c, opts), Error);
}

// trace identities ------------------------------------------------------------------

TEST(TraceIdentities, ExactJetOnLinearCurve) {
    for (std::size_t n : {16u, 32u}) {
        const Case s = linear_setup(n);
        const auto defects = trace_identity_defects(oracle_jet(x3y2(), s.g), s.c);
        ASSERT_EQ(defects.size(), 6u);
        const double h = 1.0 / double(n);
        for (const auto& d : defects) EXPECT_LE(d.defect, 10 * h * h) << d.i << d.j;
    }
}

TEST(TraceIdentities, SecondOrderOnCurvedCarrier) {
    std::vector<double> worst;
    for (std::size_t n : {32u, 64u}) {
        const Case s = curved_setup(n);
        double w = 0.0;
        for (const auto& d : trace_identity_defects(oracle_jet(default_poly(), s.g), s.c)) w = std::max(w, d.defect);
        worst.push_back(w);
    }
    EXPECT_GT(worst[0] / worst[1], 3.5);
    EXPECT_LT(worst[0] / worst[1], 4.5);
}

} // namespace
} // namespace ppcauchy
