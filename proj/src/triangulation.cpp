#include "ptb/triangulation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>

#include "json.hpp"
#include "ptb/errors.hpp"

namespace ptb {

namespace {

struct FaceGlue {
    int tet = 0;
    int missing = 0;            // vertex of the partner tet not on the face
    std::array<int, 4> sigma{}; // vertex map, sigma[missing here] = missing there
    int step = 0;
};

struct TetSlopes {
    Vec2 bottom, top, c, d;
};

TetSlopes slopes_at(const MonodromyWord& w, long long j)
{
    Mat2 m = partial_product(w, j + 1);
    Vec2 c = m.col0(), d = m.col1();
    return {d - c, c + d, c, d};
}

// top faces of tet j glued onto the bottom faces of tet j+1
std::array<std::array<FaceGlue, 4>, 2> top_glue(char next_letter, int tn)
{
    std::array<std::array<FaceGlue, 4>, 2> g{};
    if (next_letter == 'L') {
        g[0][2] = {tn, 3, {0, 1, 3, 2}, 1}; // 013 -> 012
        g[0][1] = {tn, 0, {1, 0, 2, 3}, 1}; // 023 -> 123 (translate by c)
    } else {
        g[0][1] = {tn, 3, {0, 3, 2, 1}, 1}; // 023 -> 012
        g[0][2] = {tn, 0, {2, 1, 0, 3}, 1}; // 013 -> 123 (translate by d)
    }
    return g;
}

} // namespace

int tet_edge_slot(int i, int k)
{
    int a = std::min(i, k), b = std::max(i, k);
    if ((a == 0 && b == 3) || (a == 1 && b == 2))
        return 0;
    if ((a == 0 && b == 2) || (a == 1 && b == 3))
        return 1;
    return 2;
}

int Triangulation::edge_of(int tet, int i, int k) const
{
    const Tetrahedron& t = tets[static_cast<size_t>(tet)];
    int a = std::min(i, k), b = std::max(i, k);
    if (a == 0 && b == 3)
        return t.edge_top;
    if (a == 1 && b == 2)
        return t.edge_bottom;
    if (tet_edge_slot(a, b) == 1)
        return t.edge_d;
    return t.edge_c;
}

static void build_edges(Triangulation& tri)
{
    const MonodromyWord& w = tri.word;
    const FareyStrip& strip = tri.strip;
    int n = w.period();
    // every strip vertex first appears as the top edge of exactly one tet per period
    std::map<Slope, int> cls;
    for (int q = -3; q <= 2; ++q)
        for (int k = 0; k < n; ++k)
            cls[Slope::of(slopes_at(w, k + static_cast<long long>(q) * n).top)] = k;
    auto lookup = [&](const Vec2& v) {
        auto it = cls.find(Slope::of(v));
        if (it == cls.end())
            throw Error(ErrorCode::MalformedPath, "edge slope outside the strip window");
        return it->second;
    };

    struct Role {
        Side side;
        bool pivot;
        int fan;
        int pos;
    };
    std::map<Slope, Role> roles;
    for (int q = -3; q <= 3; ++q) {
        Mat2 sh = power(strip.phi, q);
        for (int f = 0; f < strip.fan_count(); ++f) {
            roles[Slope::of(sh * strip.pivot(f))] = {strip.pivot_side(f), true, f, 0};
            Side far = strip.pivot_side(f) == Side::Left ? Side::Right : Side::Left;
            auto side = strip.side_interior(f);
            for (size_t k = 0; k < side.size(); ++k)
                roles[Slope::of(sh * side[k])] = {far, false, f, static_cast<int>(k) + 1};
        }
    }

    for (int k = 0; k < n; ++k) {
        EdgeClass e;
        e.id = k;
        Vec2 v = slopes_at(w, k).top;
        e.slope = Slope::of(v);
        auto it = roles.find(e.slope);
        if (it == roles.end())
            throw Error(ErrorCode::MalformedPath, "strip vertex without a fan role");
        const Role& r = it->second;
        e.side = r.side;
        e.pivot = r.pivot;
        e.fan = r.fan;
        e.position = r.pos;
        std::string base = r.side == Side::Left ? "lambda" : "rho";
        if (r.pivot)
            e.name = base + "*[" + std::to_string(r.fan) + "]";
        else
            e.name = base + "[" + std::to_string(r.fan) + "," + std::to_string(r.pos) + "]";
        tri.edges.push_back(e);
    }

    for (int j = 0; j < n; ++j) {
        Tetrahedron t;
        t.id = j;
        t.layer = j;
        t.hinge = w.at(j) != w.at(j + 1);
        t.fan = strip.fan_of_letter(j);
        TetSlopes s = slopes_at(w, j);
        t.c = s.c;
        t.d = s.d;
        t.edge_bottom = lookup(s.bottom);
        t.edge_top = lookup(s.top);
        t.edge_c = lookup(s.c);
        t.edge_d = lookup(s.d);
        tri.tets.push_back(t);
    }

    std::vector<std::map<std::pair<int, int>, int>> acc(static_cast<size_t>(n));
    for (const Tetrahedron& t : tri.tets) {
        acc[static_cast<size_t>(t.edge_bottom)][{t.id, 0}] += 1;
        acc[static_cast<size_t>(t.edge_top)][{t.id, 0}] += 1;
        acc[static_cast<size_t>(t.edge_c)][{t.id, 2}] += 2;
        acc[static_cast<size_t>(t.edge_d)][{t.id, 1}] += 2;
    }
    for (int k = 0; k < n; ++k) {
        GluingEquation eq;
        eq.edge_id = k;
        int val = 0;
        for (auto& [key, m] : acc[static_cast<size_t>(k)]) {
            eq.terms.push_back({key.first, key.second, m});
            val += m;
        }
        tri.edges[static_cast<size_t>(k)].valence = val;
        tri.equations.push_back(eq);
    }
}

static void build_boundary(Triangulation& tri)
{
    int n = tri.size();
    std::vector<std::array<FaceGlue, 4>> glue(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
        int tn = (j + 1) % n;
        auto g = top_glue(tri.word.at(j + 1), tn);
        for (int m : {1, 2}) {
            FaceGlue up = g[0][static_cast<size_t>(m)];
            glue[static_cast<size_t>(j)][static_cast<size_t>(m)] = up;
            FaceGlue down;
            down.tet = j;
            down.missing = m;
            down.step = -1;
            for (int v = 0; v < 4; ++v)
                down.sigma[static_cast<size_t>(up.sigma[static_cast<size_t>(v)])] = v;
            glue[static_cast<size_t>(tn)][static_cast<size_t>(up.missing)] = down;
        }
    }

    static const int ccw[4][3] = {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}};
    BoundaryTriangulation& B = tri.boundary;
    B.tris.resize(static_cast<size_t>(4 * n));
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < 4; ++i) {
            BoundaryTriangle& T = B.tris[static_cast<size_t>(4 * j + i)];
            T.tet = j;
            T.vertex = i;
            for (int a = 0; a < 3; ++a) {
                T.corner_vertex[static_cast<size_t>(a)] = ccw[i][a];
                T.slot[static_cast<size_t>(a)] = tet_edge_slot(i, ccw[i][a]);
            }
        }
    auto corner_index = [&](const BoundaryTriangle& T, int v) {
        for (int a = 0; a < 3; ++a)
            if (T.corner_vertex[static_cast<size_t>(a)] == v)
                return a;
        return -1;
    };
    for (auto& T : B.tris) {
        for (int a = 0; a < 3; ++a) {
            int m = T.corner_vertex[static_cast<size_t>(a)];
            const FaceGlue& g = glue[static_cast<size_t>(T.tet)][static_cast<size_t>(m)];
            int iv = g.sigma[static_cast<size_t>(T.vertex)];
            int t2 = 4 * g.tet + iv;
            T.nbr_tri[static_cast<size_t>(a)] = t2;
            T.height_step[static_cast<size_t>(a)] = g.step;
            const BoundaryTriangle& U = B.tris[static_cast<size_t>(t2)];
            T.nbr_side[static_cast<size_t>(a)] = corner_index(U, g.missing);
            for (int b = 0; b < 3; ++b) {
                int img = g.sigma[static_cast<size_t>(T.corner_vertex[static_cast<size_t>(b)])];
                T.nbr_corner[static_cast<size_t>(a)][static_cast<size_t>(b)] = corner_index(U, img);
            }
        }
    }

    // cusp vertices: corners identified across sides
    std::vector<int> parent(B.tris.size() * 3);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[static_cast<size_t>(x)] == x ? x : parent[static_cast<size_t>(x)] = find(parent[static_cast<size_t>(x)]); };
    for (size_t t = 0; t < B.tris.size(); ++t) {
        const BoundaryTriangle& T = B.tris[t];
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                if (b == a)
                    continue;
                int x = static_cast<int>(t) * 3 + b;
                int y = T.nbr_tri[static_cast<size_t>(a)] * 3 + T.nbr_corner[static_cast<size_t>(a)][static_cast<size_t>(b)];
                parent[static_cast<size_t>(find(x))] = find(y);
            }
    }
    std::map<int, int> ids;
    for (size_t t = 0; t < B.tris.size(); ++t)
        for (int a = 0; a < 3; ++a) {
            int r = find(static_cast<int>(t) * 3 + a);
            auto it = ids.find(r);
            if (it == ids.end()) {
                it = ids.emplace(r, static_cast<int>(ids.size())).first;
                const BoundaryTriangle& T = B.tris[t];
                B.vertex_edge.push_back(tri.edge_of(T.tet, T.vertex, T.corner_vertex[static_cast<size_t>(a)]));
            }
            B.tris[t].cusp_vertex[static_cast<size_t>(a)] = it->second;
        }
    B.vertex_count = static_cast<int>(ids.size());
}

Triangulation build_triangulation(const MonodromyWord& word)
{
    Triangulation tri;
    tri.word = word;
    tri.strip = build_farey_strip(word);
    build_edges(tri);
    build_boundary(tri);
    return tri;
}

const std::vector<GluingEquation>& gluing_equations(const Triangulation& tri)
{
    return tri.equations;
}

cplx corner_angle(cplx z, int slot)
{
    if (slot == 0)
        return z;
    if (slot == 1)
        return (z - 1.0) / z;
    return 1.0 / (1.0 - z);
}

cplx equation_value(const GluingEquation& eq, const std::vector<cplx>& shapes)
{
    cplx v = 1.0;
    for (const GluingTerm& t : eq.terms)
        v *= std::pow(corner_angle(shapes[static_cast<size_t>(t.tet)], t.slot), t.exponent);
    return v;
}

Turn turn_between(int enter_side, int exit_side)
{
    return exit_side == (enter_side + 1) % 3 ? Turn::Clockwise : Turn::Anticlockwise;
}

static void step_sides(const CornerStep& s, int& enter, int& exit)
{
    if (s.turn == Turn::Clockwise) {
        enter = (s.corner + 1) % 3;
        exit = (s.corner + 2) % 3;
    } else {
        enter = (s.corner + 2) % 3;
        exit = (s.corner + 1) % 3;
    }
}

cplx holonomy(const Triangulation& tri, const std::vector<cplx>& shapes, const BoundaryCurve& curve)
{
    for (const cplx& z : shapes)
        if (std::abs(z) < 1e-300 || std::abs(z - 1.0) < 1e-300)
            throw Error(ErrorCode::DegenerateShape, "shape equal to 0 or 1");
    cplx h = 1.0;
    for (const CornerStep& s : curve.steps) {
        const BoundaryTriangle& T = tri.boundary.tris[static_cast<size_t>(s.triangle)];
        cplx a = corner_angle(shapes[static_cast<size_t>(T.tet)], T.slot[static_cast<size_t>(s.corner)]);
        h *= s.turn == Turn::Anticlockwise ? a : 1.0 / a;
    }
    return h;
}

// Pushed-up copy of the level curve between tet `level` and tet `level`+1, in the
// infinite cyclic cover (heights counted from tet `level`). Upper triangles meeting
// the lower region along two sides are absorbed first so every arc is normal.
static BoundaryCurve walk_level(const Triangulation& tri, int level, bool half)
{
    const auto& B = tri.boundary.tris;
    int n = tri.size();
    int top = n + 3;
    std::set<std::pair<int, int>> absorbed;
    auto lower = [&](int t, int h) { return h <= 0 || absorbed.count({t, h}) > 0; };
    auto tet_at = [&](int h) { return ((level + h) % n + n) % n; };
    auto boundary_side = [&](int t, int h, int a) {
        const BoundaryTriangle& T = B[static_cast<size_t>(t)];
        return !lower(t, h) && lower(T.nbr_tri[static_cast<size_t>(a)], h + T.height_step[static_cast<size_t>(a)]);
    };
    for (bool changed = true; changed;) {
        changed = false;
        for (int h = 1; h <= top; ++h)
            for (int i = 0; i < 4; ++i) {
                int t = 4 * tet_at(h) + i;
                if (lower(t, h))
                    continue;
                int cnt = 0;
                for (int a = 0; a < 3; ++a)
                    cnt += boundary_side(t, h, a);
                if (cnt >= 2) {
                    absorbed.insert({t, h});
                    changed = true;
                }
            }
    }
    int t = -1, h = 0, iface = -1;
    for (int hh = 1; hh <= top && t < 0; ++hh)
        for (int i = 0; i < 4 && t < 0; ++i)
            for (int a = 0; a < 3; ++a)
                if (boundary_side(4 * tet_at(hh) + i, hh, a)) {
                    t = 4 * tet_at(hh) + i;
                    h = hh;
                    iface = a;
                    break;
                }
    if (t < 0)
        throw Error(ErrorCode::MalformedPath, "level has no boundary");
    const int t0 = t, h0 = h, s0 = iface;
    const BoundaryTriangle& F = B[static_cast<size_t>(t0)];
    int tau_t = 4 * F.tet + (3 - F.vertex);
    int tau_s = -1;
    for (int a = 0; a < 3; ++a)
        if (B[static_cast<size_t>(tau_t)].corner_vertex[static_cast<size_t>(a)] == 3 - F.corner_vertex[static_cast<size_t>(s0)])
            tau_s = a;

    BoundaryCurve curve;
    for (int seen = 0;; ++seen) {
        if (seen > 4 * n + 12)
            throw Error(ErrorCode::MalformedPath, "meridian walk overran");
        // side triangle: boundary side `iface`, turn round the apex
        int apex = iface;
        int enter = (apex + 2) % 3, exit = (apex + 1) % 3;
        curve.steps.push_back({t, apex, turn_between(enter, exit)});
        int q = (apex + 2) % 3;
        const BoundaryTriangle* T = &B[static_cast<size_t>(t)];
        int in = T->nbr_side[static_cast<size_t>(exit)];
        int qc = T->nbr_corner[static_cast<size_t>(exit)][static_cast<size_t>(q)];
        h += T->height_step[static_cast<size_t>(exit)];
        t = T->nbr_tri[static_cast<size_t>(exit)];
        // rotate round q through the upper region
        for (int guard = 0;; ++guard) {
            if (guard > 8 * n + 8)
                throw Error(ErrorCode::MalformedPath, "boundary walk did not close");
            T = &B[static_cast<size_t>(t)];
            int other = 3 - in - qc;
            if (boundary_side(t, h, other)) {
                iface = other;
                break;
            }
            curve.steps.push_back({t, qc, turn_between(in, other)});
            int nin = T->nbr_side[static_cast<size_t>(other)];
            int nq = T->nbr_corner[static_cast<size_t>(other)][static_cast<size_t>(qc)];
            h += T->height_step[static_cast<size_t>(other)];
            t = T->nbr_tri[static_cast<size_t>(other)];
            in = nin;
            qc = nq;
        }
        if (t == t0 && h == h0 && iface == s0)
            break;
        if (half && t == tau_t && h == h0 && iface == tau_s)
            break;
    }
    return curve;
}

BoundaryCurve meridian_curve(const Triangulation& tri, int level)
{
    BoundaryCurve c = walk_level(tri, level, false);
    c.name = "meridian";
    c.closed = true;
    c.meridian_coeff = 1;
    c.fiber_coeff = 0;
    return c;
}

BoundaryCurve semi_meridian_curve(const Triangulation& tri, int level)
{
    BoundaryCurve c = walk_level(tri, level, true);
    c.name = "semi-meridian";
    c.closed = false;
    c.half = true;
    c.meridian_coeff = 1;
    c.fiber_coeff = 0;
    return c;
}

BoundaryCurve vertical_curve(const Triangulation& tri)
{
    BoundaryCurve c;
    c.name = "vertical";
    c.fiber_coeff = 1;
    const auto& B = tri.boundary.tris;
    for (int j = 0; j < tri.size(); ++j) {
        const BoundaryTriangle& T = B[static_cast<size_t>(4 * j)];
        int enter = -1, exit = -1;
        int out_vertex = tri.word.at(j + 1) == 'L' ? 2 : 1;
        for (int a = 0; a < 3; ++a) {
            if (T.corner_vertex[static_cast<size_t>(a)] == 3)
                enter = a;
            if (T.corner_vertex[static_cast<size_t>(a)] == out_vertex)
                exit = a;
        }
        c.steps.push_back({4 * j, 3 - enter - exit, turn_between(enter, exit)});
    }
    return c;
}

BoundaryCurve vertex_loop(const Triangulation& tri, int cusp_vertex)
{
    const auto& B = tri.boundary.tris;
    BoundaryCurve c;
    c.name = "vertex-loop";
    int t = -1, a = -1;
    for (size_t i = 0; i < B.size() && t < 0; ++i)
        for (int k = 0; k < 3; ++k)
            if (B[i].cusp_vertex[static_cast<size_t>(k)] == cusp_vertex) {
                t = static_cast<int>(i);
                a = k;
                break;
            }
    if (t < 0)
        throw Error(ErrorCode::MalformedPath, "no such cusp vertex");
    int t0 = t, a0 = a;
    int in = (a + 1) % 3;
    for (int guard = 0; guard < 1000; ++guard) {
        int exit = 3 - in - a;
        c.steps.push_back({t, a, turn_between(in, exit)});
        const BoundaryTriangle& T = B[static_cast<size_t>(t)];
        int nt = T.nbr_tri[static_cast<size_t>(exit)];
        int nin = T.nbr_side[static_cast<size_t>(exit)];
        int na = T.nbr_corner[static_cast<size_t>(exit)][static_cast<size_t>(a)];
        t = nt;
        in = nin;
        a = na;
        if (t == t0 && a == a0)
            break;
    }
    return c;
}

bool curve_is_connected(const Triangulation& tri, const BoundaryCurve& curve)
{
    const auto& B = tri.boundary.tris;
    size_t n = curve.steps.size();
    if (n == 0)
        return false;
    for (size_t k = 0; k < n; ++k) {
        const CornerStep& s = curve.steps[k];
        int enter = 0, exit = 0;
        step_sides(s, enter, exit);
        const BoundaryTriangle& T = B[static_cast<size_t>(s.triangle)];
        int nt = T.nbr_tri[static_cast<size_t>(exit)];
        int nside = T.nbr_side[static_cast<size_t>(exit)];
        if (k + 1 < n) {
            int e2 = 0, x2 = 0;
            step_sides(curve.steps[k + 1], e2, x2);
            if (nt != curve.steps[k + 1].triangle || nside != e2)
                return false;
        } else if (curve.half) {
            // closes onto the image of the first triangle under p_i -> p_{3-i}
            const BoundaryTriangle& F = B[static_cast<size_t>(curve.steps[0].triangle)];
            if (nt != 4 * F.tet + (3 - F.vertex))
                return false;
        } else {
            int e2 = 0, x2 = 0;
            step_sides(curve.steps[0], e2, x2);
            if (nt != curve.steps[0].triangle || nside != e2)
                return false;
        }
    }
    return true;
}

std::vector<GluingTerm> semi_meridian_monomial(const Triangulation& tri, int level)
{
    const MonodromyWord& w = tri.word;
    int n = w.period();
    TetSlopes lev = slopes_at(w, level);
    std::map<std::pair<int, int>, int> acc;
    for (const Vec2& v : {lev.top, lev.c, lev.d}) {
        Slope e = Slope::of(v);
        for (long long i = level + 1;; ++i) {
            if (i > level + 4LL * n + 4)
                throw Error(ErrorCode::MalformedPath, "edge never closes above level");
            TetSlopes s = slopes_at(w, i);
            int t = static_cast<int>(((i % n) + n) % n);
            if (Slope::of(s.bottom) == e) {
                acc[{t, 0}] += 1;
                break;
            }
            if (Slope::of(s.c) == e)
                acc[{t, 2}] += 2;
            else if (Slope::of(s.d) == e)
                acc[{t, 1}] += 2;
            else
                throw Error(ErrorCode::MalformedPath, "edge lost above level");
        }
    }
    std::vector<GluingTerm> out;
    for (auto& [k, m] : acc)
        out.push_back({k.first, k.second, m});
    return out;
}

std::string triangulation_json(const Triangulation& tri)
{
    using nlohmann::json;
    json j;
    j["word"] = tri.word.letters;
    j["period"] = tri.word.period();
    json tets = json::array();
    for (const auto& t : tri.tets)
        tets.push_back({{"id", t.id},
                        {"hinge", t.hinge},
                        {"fan", t.fan},
                        {"c", {t.c.q, t.c.p}},
                        {"d", {t.d.q, t.d.p}},
                        {"edges", {{"bottom", t.edge_bottom}, {"top", t.edge_top}, {"slot1", t.edge_d}, {"slot2", t.edge_c}}}});
    j["tets"] = tets;
    json edges = json::array();
    for (const auto& e : tri.edges)
        edges.push_back({{"id", e.id}, {"name", e.name}, {"slope", e.slope.str()}, {"valence", e.valence}});
    j["edges"] = edges;
    json eqs = json::array();
    for (const auto& eq : tri.equations) {
        json terms = json::array();
        for (const auto& t : eq.terms)
            terms.push_back({t.tet, t.slot, t.exponent});
        eqs.push_back({{"edge", eq.edge_id}, {"terms", terms}});
    }
    j["equations"] = eqs;
    return j.dump(2);
}

} // namespace ptb
