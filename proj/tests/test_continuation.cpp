#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

#include "cases.hpp"
#include "ptb/continuation.hpp"
#include "ptb/errors.hpp"

using namespace ptb;

namespace {

struct Traced {
    const Case* c;
    DegenerationProfile profile;
    TildeSystem sys;
    IdealPointSolution sol;
    ContinuationTrace trace;
};

const std::vector<Traced>& traced(int maxn)
{
    static std::map<int, std::vector<Traced>> cache;
    auto& out = cache[maxn];
    if (out.empty())
        for (const auto& c : cases(maxn)) {
            Traced t{&c, full_profile(c), {}, {}, {}};
            t.sys = build_tilde_system(t.profile, c.tri);
            t.sol = solve_directions(t.sys);
            t.trace = continue_solution(t.sys, c.tri, t.sol);
            out.push_back(std::move(t));
        }
    return out;
}

// plain corner arithmetic, independent of the log-coordinate code
cplx plain_equation(const GluingEquation& eq, const std::vector<cplx>& z)
{
    cplx v = 1.0;
    for (const auto& g : eq.terms) {
        cplx x = z[static_cast<size_t>(g.tet)];
        cplx c = g.slot == 0 ? x : g.slot == 1 ? 1.0 - 1.0 / x : 1.0 / (1.0 - x);
        v *= std::pow(c, g.exponent);
    }
    return v;
}

const cplx kRegular = std::polar(1.0, std::numbers::pi / 3);

} // namespace

TEST(Helpers, StableLogExp)
{
    for (cplx z : {cplx(1e-12, 2e-13), cplx(-3e-9, 1e-9), cplx(0.3, -0.2), cplx(2.0, 1.0)}) {
        EXPECT_LT(std::abs(cexpm1(clog1p(z)) - z), 1e-15 * std::max(1.0, std::abs(z)) + 1e-28);
        if (std::abs(z) > 1e-3) {
            EXPECT_LT(std::abs(clog1p(z) - std::log(1.0 + z)), 1e-14);
            EXPECT_LT(std::abs(cexpm1(z) - (std::exp(z) - 1.0)), 1e-14);
        }
    }
    // the naive forms lose everything here
    cplx tiny(1e-17, 1e-17);
    EXPECT_LT(std::abs(clog1p(tiny) - tiny), 1e-32);
}

TEST(Reconstruct, Substitution)
{
    TetDegeneration d{DegType::T1, 1};
    EXPECT_LT(std::abs(zero_corner_value(d, -1.0, 1e-2) + 1e-2), 1e-17);
    // the ->1 corner of a degenerating tet tends to 1
    DegenerationProfile p;
    p.tets = {d};
    for (double zeta : {1e-2, 1e-4, 1e-6}) {
        auto z = reconstruct_shapes(p, {cplx(0.4, 0.9)}, zeta);
        cplx one = z[0]; // slot 0 is the ->1 slot for this type
        EXPECT_LT(std::abs(one - 1.0), 3 * zeta);
    }
    // the angle at the ->0 slot scales exactly as zeta^k
    for (DegType t : {DegType::T0, DegType::T1, DegType::TInf})
        for (int k = 1; k <= 3; ++k) {
            DegenerationProfile q;
            q.tets = {TetDegeneration{t, k}};
            cplx y(-0.7, 0.5);
            auto z1 = reconstruct_shapes(q, {y}, 1e-1), z2 = reconstruct_shapes(q, {y}, 1e-2);
            int s = zero_slot(t);
            double l1 = std::log(std::abs(corner_angle(z1[0], s))), l2 = std::log(std::abs(corner_angle(z2[0], s)));
            EXPECT_NEAR((l1 - l2) / std::log(10.0), k, 1e-6);
            EXPECT_LT(std::abs(corner_log(q, {y}, 1e-2, 0, s) - std::log(std::pow(1e-2, k) * y)), 1e-12);
        }
}

TEST(Refine, FigureEight)
{
    Triangulation tri = build_triangulation(parse_word("LR"));
    HolonomyConstraint c{meridian_curve(tri), 1.0};
    int it = -1;
    auto z = newton_refine(tri, {cplx(0.5, 0.8), cplx(0.5, 0.8)}, c, {}, &it);
    for (const auto& x : z)
        EXPECT_LT(std::abs(x - kRegular), 1e-9);
    EXPECT_LT(shape_residual(tri, z), 1e-12);
    for (const auto& eq : tri.equations)
        EXPECT_LT(std::abs(plain_equation(eq, z) - 1.0), 1e-12);

    // already converged: at most one step, nothing moves
    auto again = newton_refine(tri, {kRegular, kRegular}, c, {}, &it);
    EXPECT_LE(it, 1);
    for (const auto& x : again)
        EXPECT_LT(std::abs(x - kRegular), 1e-12);
}

TEST(Refine, Failures)
{
    Triangulation tri = build_triangulation(parse_word("LR"));
    HolonomyConstraint c{meridian_curve(tri), 1.0};
    ContinuationOptions few;
    few.max_iter = 1;
    try {
        newton_refine(tri, {cplx(3.0, 2.5), cplx(-1.0, 0.2)}, c, few);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NoConvergence);
    }
    try {
        newton_refine(tri, {cplx(1.0 + 1e-8, 0.0), kRegular}, c);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerationCollision);
    }
}

TEST(Trace, EverySurfaceToSmallZeta)
{
    for (const auto& t : traced(5)) {
        const auto& tr = t.trace;
        ASSERT_GE(tr.steps.size(), 3u) << t.c->word;
        EXPECT_NEAR(tr.steps.back().zeta, 1e-4, 1e-12);
        for (size_t i = 1; i < tr.steps.size(); ++i)
            EXPECT_LT(tr.steps[i].zeta, tr.steps[i - 1].zeta);
        for (const auto& s : tr.steps) {
            EXPECT_LT(s.residual, 1e-10) << t.c->word;
            EXPECT_LT(s.dropped_residual, 1e-10) << t.c->word;
            EXPECT_LT(gluing_residual(t.profile, t.c->tri, s.values, s.zeta), 1e-10);
        }
        EXPECT_LT(tr.max_rate_error, 0.05) << t.c->word;
        EXPECT_LT(tr.final_mu_error, 1e-4) << t.c->word;
        // mu error shrinks with zeta
        EXPECT_LT(tr.steps.back().mu_error, tr.steps.front().mu_error + 1e-12);
    }
}

TEST(Trace, PlainShapesSolveGluing)
{
    int checked = 0;
    for (const auto& t : traced(5)) {
        int maxr = 0;
        for (const auto& d : t.profile.tets)
            maxr = std::max(maxr, d.rate);
        const auto& s = t.trace.steps.front();
        if (std::pow(s.zeta, maxr) < 1e-8)
            continue;
        auto z = reconstruct_shapes(t.profile, s.values, s.zeta);
        for (const auto& eq : t.c->tri.equations)
            EXPECT_LT(std::abs(plain_equation(eq, z) - 1.0), 1e-6) << t.c->word;
        ++checked;
    }
    EXPECT_GT(checked, 5);
}

TEST(Trace, FittedRatesMatchProfile)
{
    for (const auto& t : traced(5)) {
        auto r = fit_rates(t.trace, 3);
        ASSERT_EQ(r.size(), static_cast<size_t>(t.profile.size()));
        for (int k = 0; k < t.profile.size(); ++k)
            EXPECT_NEAR(r[static_cast<size_t>(k)], t.profile.at(k).rate, 0.05) << t.c->word;
    }
}

TEST(Trace, DoubledRatesAreDoubled)
{
    int doubled = 0;
    for (const auto& t : traced(5)) {
        if (!t.profile.doubled)
            continue;
        SphereResult sr = add_spheres(path_to_yoshida(t.c->path, t.c->tri), t.c->tri, t.c->path);
        for (int k = 0; k < t.profile.size(); ++k)
            EXPECT_NEAR(t.trace.fitted_rates[static_cast<size_t>(k)], 2 * sr.profile.at(k).rate, 0.05);
        ++doubled;
    }
    EXPECT_GT(doubled, 0);
}

TEST(Trace, InsufficientSteps)
{
    const auto& t = traced(4).front();
    ContinuationTrace shortened = t.trace;
    shortened.steps.resize(2);
    try {
        fit_rates(shortened);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InsufficientSteps);
    }
}

TEST(Trace, ZetaMinHonoured)
{
    const auto& t = traced(4).front();
    ContinuationOptions opts;
    opts.zeta_min = 1e-3;
    auto tr = continue_solution(t.sys, t.c->tri, t.sol, opts);
    for (const auto& s : tr.steps)
        EXPECT_GE(s.zeta, 1e-3 * (1 - 1e-12));
}

TEST(Trace, CsvExport)
{
    const auto& t = traced(4).front();
    std::ostringstream os;
    write_trace_csv(t.trace, os);
    std::istringstream is(os.str());
    std::string line;
    int lines = 0;
    size_t cols = 0;
    while (std::getline(is, line)) {
        size_t c = static_cast<size_t>(std::count(line.begin(), line.end(), ',')) + 1;
        if (lines == 0) {
            cols = c;
            EXPECT_EQ(line.rfind("zeta", 0), 0u);
        } else {
            EXPECT_EQ(c, cols);
        }
        ++lines;
    }
    EXPECT_EQ(lines, static_cast<int>(t.trace.steps.size()) + 1);
}

TEST(Peripheral, Orders)
{
    for (const auto& t : traced(6)) {
        PeripheralOrders po = peripheral_orders(t.profile, t.c->tri);
        EXPECT_EQ(po.semi_meridian, 2 * t.profile.unit) << t.c->word;
        EXPECT_EQ(po.meridian, 4 * t.profile.unit) << t.c->word;
        // the order is additive along curves
        EXPECT_EQ(po.meridian, 2 * po.semi_meridian);
        // the reported slope has order zero and is primitive
        EXPECT_EQ(po.slope_m * po.meridian + po.slope_l * po.vertical, 0);
        EXPECT_EQ(std::gcd(std::llabs(po.slope_m), std::llabs(po.slope_l)), 1);
        EXPECT_TRUE(po.slope_l > 0 || (po.slope_l == 0 && po.slope_m > 0));
        // cusp vertex loops carry no order
        for (int v = 0; v < t.c->tri.boundary.vertex_count; ++v)
            EXPECT_EQ(holonomy_order(t.c->tri, t.profile, vertex_loop(t.c->tri, v)), 0) << t.c->word;
    }
}

TEST(Peripheral, MuLevelsAgree)
{
    for (const auto& t : traced(4)) {
        const auto& s = t.trace.steps.back();
        auto mus = mu_levels(t.profile, t.c->tri, s.values, s.zeta);
        ASSERT_EQ(mus.size(), static_cast<size_t>(t.c->tri.size()));
        for (const auto& m : mus)
            EXPECT_LT(std::abs(m + 1.0), 1e-4) << t.c->word;
    }
}
