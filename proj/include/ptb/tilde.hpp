#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ptb/surface.hpp"
#include "ptb/triangulation.hpp"

namespace ptb {

enum class VarKind { Angle, Direction };

struct TildeVariable {
    int tet = 0;
    VarKind kind = VarKind::Angle;
    int rate = 0;
    DegType type = DegType::None;
};

// leading coefficient of a corner after Z = zeta^k y
enum class Coeff { Y, MinusInvY, One, Z, ZMinusOneOverZ, InvOneMinusZ };
const char* coeff_name(Coeff c);

struct LeadingTerm {
    int var = 0; // tet id
    int slot = 0;
    int exponent = 1;
    int zeta_order = 0; // per unit exponent
    Coeff coeff = Coeff::One;
};

LeadingTerm leading_term(const TildeVariable& v, int slot, int exponent);
cplx coeff_value(Coeff c, cplx x);

// side_a: corners with order >= 0; side_b: the inf corners moved across (inverted)
struct RegularEquation {
    int edge_id = 0;
    std::vector<LeadingTerm> side_a;
    std::vector<LeadingTerm> side_b;
    int order = 0;
};

struct LinearTerm {
    int var = 0;
    int coeff = 0;
};

// sum of coeff * y over the minimum-rate tets = 0
struct SphereEquation {
    int edge_id = 0;
    int min_rate = 0;
    std::vector<LinearTerm> terms;
    std::string str() const;
};

// semi-meridian above a level: holonomy = -1 / prod(factors); mu = holonomy / zeta^(2 unit)
struct MuMeasurement {
    int level = 0;
    std::vector<LeadingTerm> factors;
    int zeta_order = 0; // order of the holonomy
};

struct TildeSystem {
    DegenerationProfile profile;
    std::vector<TildeVariable> variables;
    std::vector<RegularEquation> regular;
    std::vector<SphereEquation> sphere;
    std::vector<MuMeasurement> mu;
    int mu_reference = 0;
    int zeta_exponent_unit = 1;
    int dropped_edge = -1; // the equation left out during continuation
    std::vector<bool> sphere_edge; // per edge class
};

TildeSystem build_tilde_system(const DegenerationProfile& profile, const Triangulation& tri);
std::vector<MuMeasurement> mu_measurements(const TildeSystem& system, const Triangulation& tri, const DegenerationProfile& profile);

cplx side_value(const std::vector<LeadingTerm>& side, const std::vector<cplx>& values);
cplx regular_residual(const RegularEquation& eq, const std::vector<cplx>& values);
cplx sphere_residual(const SphereEquation& eq, const std::vector<cplx>& values);
cplx mu_value(const MuMeasurement& m, const std::vector<cplx>& values);

// max over bar equations and mu = -1 at every level
double evaluate_bar_residual(const TildeSystem& system, const std::vector<cplx>& values);

std::string tilde_json(const TildeSystem& system);

} // namespace ptb
