#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "ptb/farey.hpp"

namespace ptb {

using cplx = std::complex<double>;

// tet j sits between strip triangles T_j and T_{j+1}; with (c, d) the columns of
// M_{j+1} its vertices are p0 = 0, p1 = c, p2 = d, p3 = c + d.
// slot 0: edges 03 (top) and 12 (bottom); slot 1: 02, 13 (slope d); slot 2: 01, 23 (slope c)
struct Tetrahedron {
    int id = 0;
    int layer = 0;
    bool hinge = false;
    int fan = 0;
    Vec2 c, d;
    int edge_bottom = 0;
    int edge_top = 0;
    int edge_c = 0; // slot 2 pair
    int edge_d = 0; // slot 1 pair
};

struct EdgeClass {
    int id = 0;
    std::string name;
    Slope slope;
    Side side = Side::Left;
    bool pivot = false;
    int fan = 0;
    int position = 0; // index along the fan side, 0 for pivots
    int valence = 0;
};

struct GluingTerm {
    int tet = 0;
    int slot = 0;
    int exponent = 1;
};

struct GluingEquation {
    int edge_id = 0;
    std::vector<GluingTerm> terms;
};

int tet_edge_slot(int i, int k);

// cusp triangle (tet, vertex); corner a sits at tet vertex corner_vertex[a],
// i.e. on tet edge (vertex, corner_vertex[a]); side a is opposite corner a
struct BoundaryTriangle {
    int tet = 0;
    int vertex = 0;
    std::array<int, 3> corner_vertex{};
    std::array<int, 3> slot{};
    std::array<int, 3> nbr_tri{};
    std::array<int, 3> nbr_side{};
    std::array<int, 3> height_step{}; // +1 when crossing side a goes up a layer
    // nbr_corner[a][b]: index in the neighbour across side a of the image of corner b
    std::array<std::array<int, 3>, 3> nbr_corner{};
    std::array<int, 3> cusp_vertex{};
};

struct BoundaryTriangulation {
    std::vector<BoundaryTriangle> tris; // index 4 * tet + vertex
    int vertex_count = 0;
    std::vector<int> vertex_edge; // edge class of each cusp vertex
    int edge_count() const { return static_cast<int>(tris.size()) * 3 / 2; }
};

struct Triangulation {
    MonodromyWord word;
    FareyStrip strip;
    std::vector<Tetrahedron> tets;
    std::vector<EdgeClass> edges;
    std::vector<GluingEquation> equations;
    BoundaryTriangulation boundary;
    int size() const { return static_cast<int>(tets.size()); }
    int edge_of(int tet, int i, int k) const;
};

Triangulation build_triangulation(const MonodromyWord& word);
const std::vector<GluingEquation>& gluing_equations(const Triangulation& tri);

cplx corner_angle(cplx z, int slot);
cplx equation_value(const GluingEquation& eq, const std::vector<cplx>& shapes);

enum class Turn { Anticlockwise, Clockwise };

struct CornerStep {
    int triangle = 0;
    int corner = 0;
    Turn turn = Turn::Anticlockwise;
};

struct BoundaryCurve {
    std::string name;
    std::vector<CornerStep> steps;
    bool closed = true;
    int meridian_coeff = 0;
    int fiber_coeff = 0;
    bool half = false; // semi-meridian: closes up only after the -I symmetry
};

Turn turn_between(int enter_side, int exit_side);
cplx holonomy(const Triangulation& tri, const std::vector<cplx>& shapes, const BoundaryCurve& curve);
BoundaryCurve meridian_curve(const Triangulation& tri, int level = 0);
BoundaryCurve semi_meridian_curve(const Triangulation& tri, int level = 0);
BoundaryCurve vertical_curve(const Triangulation& tri);
BoundaryCurve vertex_loop(const Triangulation& tri, int cusp_vertex);
bool curve_is_connected(const Triangulation& tri, const BoundaryCurve& curve);

// product of corners above level j: the semi-meridian holonomy is -1 / prod
std::vector<GluingTerm> semi_meridian_monomial(const Triangulation& tri, int level);

std::string triangulation_json(const Triangulation& tri);

} // namespace ptb
