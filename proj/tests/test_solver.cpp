#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "cases.hpp"
#include "oracles.hpp"
#include "ptb/errors.hpp"
#include "ptb/solver.hpp"

using namespace ptb;

namespace {

struct Solved {
    const Case* c;
    SphereResult spheres;
    DegenerationProfile profile;
    TildeSystem sys;
    IdealPointSolution sol;
};

const std::vector<Solved>& solved(int maxn)
{
    static std::map<int, std::vector<Solved>> cache;
    auto& out = cache[maxn];
    if (out.empty())
        for (const auto& c : cases(maxn)) {
            Solved s{&c, add_spheres(path_to_yoshida(c.path, c.tri), c.tri, c.path), {}, {}, {}};
            s.profile = orientability_and_double(s.spheres.profile, c.path);
            s.sys = build_tilde_system(s.profile, c.tri);
            s.sol = solve_directions(s.sys);
            out.push_back(std::move(s));
        }
    return out;
}

bool close(cplx a, cplx b, double tol = 1e-8) { return std::abs(a - b) < tol * std::max(1.0, std::abs(b)); }

} // namespace

TEST(AngleChain, ClosedFormSmallCases)
{
    auto two = chain_sequence(2);
    ASSERT_EQ(two.size(), 3u);
    EXPECT_NEAR(two[1], 2.0, 1e-14);
    auto three = chain_sequence(3);
    ASSERT_EQ(three.size(), 4u);
    EXPECT_NEAR(three[1], 2.618034, 1e-6);
    EXPECT_NEAR(three[2], 2.618034, 1e-6);

    AngleChain one{ChainKind::B, {0}};
    auto b = solve_angle_chain(one);
    ASSERT_EQ(b.size(), 1u);
    EXPECT_NEAR(b[0].real(), 0.5, 1e-14);
    one.kind = ChainKind::A;
    EXPECT_NEAR(solve_angle_chain(one)[0].real(), 2.0, 1e-14);
}

TEST(AngleChain, RecursionAndBounds)
{
    for (int n = 1; n <= 50; ++n) {
        auto a = chain_sequence(n);
        ASSERT_EQ(a.size(), static_cast<size_t>(n + 1));
        EXPECT_EQ(a.front(), 1.0);
        EXPECT_EQ(a.back(), 1.0);
        EXPECT_LT(oracle::recursion_residual_scaled(a), 1e-12) << n;
        if (n <= 10)
            EXPECT_LT(oracle::recursion_residual(a), 1e-12) << n;
        std::vector<double> b;
        for (double x : a)
            b.push_back(1 / x);
        for (size_t k = 1; k + 1 < a.size(); ++k) {
            EXPECT_GT(a[k], 1.0);
            EXPECT_GT(b[k], 0.0);
            EXPECT_LT(b[k], 1.0);
        }
    }
}

TEST(AngleChain, ChainsCoverAngleTets)
{
    for (const auto& s : solved(6)) {
        std::vector<int> seen(static_cast<size_t>(s.profile.size()), 0);
        for (const auto& ch : angle_chains(s.profile))
            for (int t : ch.members) {
                EXPECT_FALSE(s.profile.at(t).degenerate());
                ++seen[static_cast<size_t>(t)];
            }
        for (int t = 0; t < s.profile.size(); ++t)
            EXPECT_EQ(seen[static_cast<size_t>(t)], s.profile.at(t).degenerate() ? 0 : 1);
    }
}

TEST(Directions, SolveEverySurface)
{
    for (const auto& s : solved(6)) {
        EXPECT_LT(s.sol.residual, 1e-10) << s.c->word;
        EXPECT_LT(evaluate_bar_residual(s.sys, s.sol.values), 1e-10) << s.c->word;
        for (size_t t = 0; t < s.sol.values.size(); ++t) {
            cplx v = s.sol.values[t];
            if (s.sys.variables[t].kind == VarKind::Direction) {
                EXPECT_GT(std::abs(v), 1e-8) << s.c->word;
            } else {
                EXPECT_GT(std::abs(v), 1e-8);
                EXPECT_GT(std::abs(v - 1.0), 1e-8);
            }
        }
        EXPECT_LT(std::abs(s.sol.mu + 1.0), 1e-12);
    }
}

TEST(Directions, VerifyPasses)
{
    SolverOptions opts;
    for (const auto& s : solved(5)) {
        VerifyReport r = verify_solution(s.sys, s.sol, opts);
        EXPECT_TRUE(r.ok) << s.c->word;
        EXPECT_LT(r.residual, 1e-10);
        EXPECT_LT(r.newton_return, 1e-9) << s.c->word;
        EXPECT_GT(r.isolation, opts.isolation) << s.c->word;
    }
}

TEST(Directions, Deterministic)
{
    for (const auto& s : solved(5)) {
        IdealPointSolution again = solve_directions(s.sys);
        ASSERT_EQ(again.values.size(), s.sol.values.size());
        for (size_t t = 0; t < again.values.size(); ++t)
            EXPECT_EQ(again.values[t], s.sol.values[t]);
    }
}

// the other square root at a recorded choice either solves too or is refused
TEST(Directions, AlternateBranches)
{
    int tried = 0, solved_alt = 0;
    for (const auto& s : solved(5))
        for (const auto& sc : s.sol.sign_choices) {
            if (sc.degree < 2)
                continue;
            SolverOptions opts;
            opts.forced_branch[sc.tet] = (sc.branch + 1) % sc.degree;
            ++tried;
            try {
                IdealPointSolution alt = solve_directions(s.sys, opts);
                EXPECT_LT(evaluate_bar_residual(s.sys, alt.values), 1e-10);
                ++solved_alt;
            } catch (const Error& e) {
                EXPECT_TRUE(e.code() == ErrorCode::ZeroDirection || e.code() == ErrorCode::UnsolvedVariable) << e.what();
            }
        }
    EXPECT_GT(tried, 0);
    EXPECT_GT(solved_alt, 0);
}

TEST(Directions, NewtonReturnsToSolution)
{
    for (const auto& s : solved(5)) {
        auto v = s.sol.values;
        for (auto& x : v)
            x *= cplx(1.0 + 1e-3, 5e-4);
        auto back = bar_newton(s.sys, v);
        double dist = 0;
        for (size_t t = 0; t < v.size(); ++t)
            dist = std::max(dist, std::abs(back[t] - s.sol.values[t]));
        EXPECT_LT(dist, 1e-9) << s.c->word;
    }
}

// the relations around each LR, written with phi = -b/a^2 and psi = a_check^2/d
TEST(FiveCase, SolvedRelations)
{
    std::map<FiveCase, int> seen;
    for (const auto& s : solved(7)) {
        int n = s.profile.size();
        auto y = [&](int t) { return s.sol.values[static_cast<size_t>(((t % n) + n) % n)]; };
        for (const auto& site : s.spheres.sites) {
            cplx a = y(site.upper_outer()), b = y(site.hinge + 1), c = y(site.hinge), d = y(site.hinge - 1), ac = y(site.lower_outer());
            cplx phi = -b / (a * a), psi = ac * ac / d;
            // measured through b, c, d
            EXPECT_TRUE(close(c * c, -b * d)) << s.c->word;
            FiveCase fc = classify_window(window_rates(s.spheres.profile, site));
            ++seen[fc];
            switch (fc) {
            case FiveCase::AlphaPlusOneLess:
                EXPECT_TRUE(close(a, 2.0 / phi));
                EXPECT_TRUE(close(b, -4.0 / phi));
                EXPECT_TRUE(close(c, -2.0 / phi));
                EXPECT_TRUE(close(d, 1.0 / phi));
                break;
            case FiveCase::Equal:
                EXPECT_TRUE(close(c * c, psi / phi));
                EXPECT_TRUE(close(a, -c));
                EXPECT_TRUE(close(ac, -c));
                EXPECT_TRUE(close(b, -psi));
                EXPECT_TRUE(close(d, 1.0 / phi));
                break;
            case FiveCase::AlphaEqualBetaPlusOne:
                EXPECT_TRUE(close(a * a, psi / phi));
                EXPECT_TRUE(close(b, -psi));
                EXPECT_TRUE(close(c, -ac));
                EXPECT_TRUE(close(c, -a * (1.0 - 2.0 * a * phi)));
                // equivalently d = c^2 / psi
                EXPECT_TRUE(close(d, (1.0 - 2.0 * a * phi) * (1.0 - 2.0 * a * phi) / phi));
                break;
            case FiveCase::AlphaGreater:
                // mirror of the first case read from below
                EXPECT_TRUE(close(ac, -c));
                break;
            default:
                break;
            }
        }
    }
    EXPECT_GE(seen.size(), 4u);
}

TEST(PhiPsi, PlainNeighbourhoods)
{
    int phi_checked = 0, psi_checked = 0;
    for (const auto& s : solved(7)) {
        if (s.profile.doubled)
            continue;
        for (const auto& pp : compute_phi_psi(s.spheres, s.c->path, s.sol)) {
            if (pp.phi_expected) {
                EXPECT_TRUE(close(pp.phi, *pp.phi_expected)) << s.c->word << " " << pp.phi_context;
                ++phi_checked;
            }
            if (pp.psi_expected) {
                EXPECT_TRUE(close(pp.psi, *pp.psi_expected)) << s.c->word << " " << pp.psi_context;
                ++psi_checked;
            }
        }
    }
    EXPECT_GT(phi_checked, 0);
    EXPECT_GT(psi_checked, 0);
}

// outer fan above a non-degenerate tet: every direction of the fan column equals -1/v
TEST(Directions, OuterFanOverAngle)
{
    int checked = 0;
    for (const auto& s : solved(6)) {
        int n = s.profile.size();
        for (const auto& sec : s.c->path.sections) {
            if (sec.type != SectionType::LL)
                continue;
            // column runs downward from the anchor; the tet below it must be an angle tet
            int bottom = sec.hinge - (sec.fan_length - 1);
            int v = ((bottom - 1) % n + n) % n;
            if (s.profile.at(v).degenerate())
                continue;
            bool plain = true;
            for (int t = bottom; t <= sec.hinge; ++t)
                plain = plain && s.profile.at(((t % n) + n) % n).type == DegType::TInf;
            if (!plain || s.profile.doubled)
                continue;
            cplx want = -1.0 / s.sol.values[static_cast<size_t>(v)];
            for (int t = bottom; t <= sec.hinge; ++t)
                EXPECT_TRUE(close(s.sol.values[static_cast<size_t>(((t % n) + n) % n)], want)) << s.c->word;
            ++checked;
        }
    }
    EXPECT_GT(checked, 0);
}
