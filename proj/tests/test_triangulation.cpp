#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>

#include "json.hpp"
#include "oracles.hpp"
#include "ptb/errors.hpp"
#include "ptb/triangulation.hpp"

using namespace ptb;

namespace {

// corner values written out directly: z, (z-1)/z, 1/(1-z)
cplx corner(cplx z, int slot)
{
    switch (slot) {
    case 0:
        return z;
    case 1:
        return 1.0 - 1.0 / z;
    default:
        return 1.0 / (1.0 - z);
    }
}

cplx eval(const GluingEquation& eq, const std::vector<cplx>& z)
{
    cplx v = 1.0;
    for (const auto& t : eq.terms)
        for (int e = 0; e < std::abs(t.exponent); ++e)
            v = t.exponent > 0 ? v * corner(z[static_cast<size_t>(t.tet)], t.slot) : v / corner(z[static_cast<size_t>(t.tet)], t.slot);
    return v;
}

std::vector<cplx> random_shapes(std::mt19937& rng, int n)
{
    std::uniform_real_distribution<double> re(-1.5, 2.5), im(0.2, 1.8);
    std::vector<cplx> z;
    for (int i = 0; i < n; ++i)
        z.emplace_back(re(rng), im(rng));
    return z;
}

const cplx kRegular = std::polar(1.0, std::numbers::pi / 3);

} // namespace

TEST(Build, SmallCounts)
{
    Triangulation lr = build_triangulation(parse_word("LR"));
    EXPECT_EQ(lr.size(), 2);
    ASSERT_EQ(lr.edges.size(), 2u);
    for (const auto& e : lr.edges)
        EXPECT_EQ(e.valence, 6);

    Triangulation llrr = build_triangulation(parse_word("LLRR"));
    EXPECT_EQ(llrr.size(), 4);
    EXPECT_EQ(llrr.edges.size(), 4u);
    int four = 0;
    for (const auto& e : llrr.edges)
        four += e.valence == 4;
    EXPECT_GT(four, 0);
}

TEST(Build, EdgesEqualTetsAndSlotTotals)
{
    for (const auto& w : oracle::all_words(10)) {
        Triangulation tri = build_triangulation(parse_word(w));
        ASSERT_EQ(tri.edges.size(), static_cast<size_t>(tri.size())) << w;
        ASSERT_EQ(tri.equations.size(), tri.edges.size());
        std::vector<std::array<int, 3>> tot(static_cast<size_t>(tri.size()), {0, 0, 0});
        int valence = 0;
        for (size_t e = 0; e < tri.equations.size(); ++e) {
            int v = 0;
            for (const auto& t : tri.equations[e].terms) {
                tot[static_cast<size_t>(t.tet)][static_cast<size_t>(t.slot)] += t.exponent;
                v += t.exponent;
            }
            EXPECT_EQ(v, tri.edges[e].valence);
            valence += v;
        }
        EXPECT_EQ(valence, 6 * tri.size());
        for (const auto& t : tot)
            EXPECT_EQ(t, (std::array<int, 3>{2, 2, 2})) << w;
    }
}

TEST(Build, FanInteriorEdgePattern)
{
    for (const char* w : {"LLLLR", "LRRRR", "LLLRRRR", "LLRLLLRR"}) {
        Triangulation tri = build_triangulation(parse_word(w));
        int seen = 0;
        for (const auto& e : tri.edges) {
            if (e.valence != 4)
                continue;
            ++seen;
            std::map<int, int> slots; // slot -> total exponent
            std::set<int> tets;
            for (const auto& t : tri.equations[static_cast<size_t>(e.id)].terms) {
                slots[t.slot] += t.exponent;
                tets.insert(t.tet);
            }
            EXPECT_EQ(tets.size(), 3u) << w;
            EXPECT_EQ(slots[0], 2) << w;
            // the middle tet meets the edge twice in its side slot
            char letter = tri.strip.fan(e.fan).letter;
            EXPECT_EQ(slots[letter == 'L' ? 1 : 2], 2) << w << " " << e.name;
        }
        EXPECT_GT(seen, 0) << w;
    }
}

TEST(Boundary, TorusEuler)
{
    for (const auto& w : oracle::all_words(8)) {
        Triangulation tri = build_triangulation(parse_word(w));
        const auto& b = tri.boundary;
        int F = static_cast<int>(b.tris.size());
        EXPECT_EQ(F, 4 * tri.size());
        EXPECT_EQ(b.vertex_count - b.edge_count() + F, 0) << w;
        // neighbour relation is an involution
        for (size_t i = 0; i < b.tris.size(); ++i)
            for (int a = 0; a < 3; ++a) {
                const auto& T = b.tris[i];
                const auto& U = b.tris[static_cast<size_t>(T.nbr_tri[static_cast<size_t>(a)])];
                EXPECT_EQ(U.nbr_tri[static_cast<size_t>(T.nbr_side[static_cast<size_t>(a)])], static_cast<int>(i));
            }
    }
}

TEST(Gluing, ProductOfAllEquationsIsOne)
{
    std::mt19937 rng(7);
    for (const auto& w : oracle::all_words(7)) {
        Triangulation tri = build_triangulation(parse_word(w));
        for (int trial = 0; trial < 10; ++trial) {
            auto z = random_shapes(rng, tri.size());
            cplx prod = 1.0;
            for (const auto& eq : tri.equations) {
                cplx v = eval(eq, z);
                EXPECT_LT(std::abs(v - equation_value(eq, z)), 1e-9 * std::max(1.0, std::abs(v)));
                prod *= v;
            }
            EXPECT_LT(std::abs(prod - 1.0), 1e-10) << w;
        }
    }
}

TEST(Gluing, FigureEightRegularSolution)
{
    Triangulation tri = build_triangulation(parse_word("LR"));
    std::vector<cplx> z{kRegular, kRegular};
    for (const auto& eq : tri.equations)
        EXPECT_LT(std::abs(eval(eq, z) - 1.0), 1e-12);
    EXPECT_NEAR(std::abs(holonomy(tri, z, meridian_curve(tri))), 1.0, 1e-12);
}

TEST(Holonomy, DegenerateShapeRejected)
{
    Triangulation tri = build_triangulation(parse_word("LR"));
    try {
        holonomy(tri, {1.0, kRegular}, meridian_curve(tri));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateShape);
    }
}

TEST(Holonomy, SemiMeridianSquaresToMeridian)
{
    std::mt19937 rng(11);
    for (const auto& w : oracle::all_words(6)) {
        Triangulation tri = build_triangulation(parse_word(w));
        for (int level = 0; level < tri.size(); ++level) {
            BoundaryCurve semi = semi_meridian_curve(tri, level);
            BoundaryCurve mer = meridian_curve(tri, level);
            EXPECT_TRUE(curve_is_connected(tri, semi)) << w;
            EXPECT_TRUE(curve_is_connected(tri, mer)) << w;
            auto z = random_shapes(rng, tri.size());
            cplx s = holonomy(tri, z, semi), m = holonomy(tri, z, mer);
            EXPECT_LT(std::abs(s * s - m), 1e-10 * std::max(1.0, std::abs(m))) << w;
            // the corner monomial above the level gives the same value
            cplx prod = 1.0;
            for (const auto& t : semi_meridian_monomial(tri, level))
                prod *= std::pow(corner(z[static_cast<size_t>(t.tet)], t.slot), t.exponent);
            EXPECT_LT(std::abs(s + 1.0 / prod), 1e-10 * std::max(1.0, std::abs(s))) << w;
        }
    }
}

TEST(Holonomy, VertexLoopIsGluingEquation)
{
    std::mt19937 rng(3);
    for (const auto& w : oracle::all_words(6)) {
        Triangulation tri = build_triangulation(parse_word(w));
        auto z = random_shapes(rng, tri.size());
        for (int v = 0; v < tri.boundary.vertex_count; ++v) {
            cplx h = holonomy(tri, z, vertex_loop(tri, v));
            cplx e = eval(tri.equations[static_cast<size_t>(tri.boundary.vertex_edge[static_cast<size_t>(v)])], z);
            bool same = std::abs(h - e) < 1e-9 * std::abs(e) || std::abs(h * e - 1.0) < 1e-9;
            EXPECT_TRUE(same) << w << " vertex " << v;
        }
    }
}

TEST(Holonomy, LevelsAgreeAtSolution)
{
    Triangulation tri = build_triangulation(parse_word("LR"));
    std::vector<cplx> z{kRegular, kRegular};
    cplx h0 = holonomy(tri, z, semi_meridian_curve(tri, 0));
    cplx h1 = holonomy(tri, z, semi_meridian_curve(tri, 1));
    EXPECT_LT(std::abs(h0 - h1), 1e-12);
    // a loop around one cusp vertex is trivial at a solution
    EXPECT_LT(std::abs(holonomy(tri, z, vertex_loop(tri, 0)) - 1.0), 1e-12);
}

TEST(Export, JsonShape)
{
    Triangulation tri = build_triangulation(parse_word("LLR"));
    auto j = nlohmann::json::parse(triangulation_json(tri));
    EXPECT_EQ(j["tets"].size(), 3u);
    EXPECT_EQ(j["edges"].size(), 3u);
    EXPECT_EQ(j["equations"].size(), 3u);
}
