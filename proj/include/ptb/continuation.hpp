#pragma once

#include <map>
#include <string>
#include <vector>

#include "ptb/solver.hpp"

namespace ptb {

struct ContinuationOptions {
    std::vector<double> schedule{1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
    double zeta_min = 1e-4; // steps below this are skipped
    double tolerance = 1e-10;
    double newton_tolerance = 1e-13;
    int max_iter = 60;
    double collision_radius = 1e-6;
    int max_refinements = 4;
    int fit_points = 3;
};

// stable helpers for the log-coordinate equations
cplx clog1p(cplx z);
cplx cexpm1(cplx z);

// slot-0 shapes from tilde values: angle tets keep z; a degenerating tet of rate k puts
// zeta^k y in its ->0 slot. Precision is lost for very small zeta^k y.
std::vector<cplx> reconstruct_shapes(const DegenerationProfile& profile, const std::vector<cplx>& values, double zeta);
// value of the ->0 corner (or z itself for angle tets)
cplx zero_corner_value(const TetDegeneration& d, cplx value, double zeta);
// log of a corner angle at zeta, exact in the tilde coordinates
cplx corner_log(const DegenerationProfile& profile, const std::vector<cplx>& values, double zeta, int tet, int slot);

struct TraceStep {
    double zeta = 0;
    std::vector<cplx> values;   // tilde coordinates
    std::vector<double> log_abs; // log|corner| at the ->0 slot (slot 0 for angle tets)
    double residual = 0;        // all gluing equations, including the dropped one
    double dropped_residual = 0;
    cplx mu = -1.0;             // reference level
    double mu_error = 0;        // max over levels of |mu + 1|
    int iterations = 0;
};

struct ContinuationTrace {
    std::vector<TraceStep> steps;
    std::vector<double> fitted_rates; // per tet
    double max_rate_error = 0;
    double max_residual = 0;
    double final_mu_error = 0;
};

// Newton in log coordinates of the tilde values at fixed zeta; throws NoConvergence
std::vector<cplx> newton_tilde(const TildeSystem& system, const Triangulation& tri, std::vector<cplx> values, double zeta,
                               const ContinuationOptions& opts, int* iterations = nullptr);
double gluing_residual(const DegenerationProfile& profile, const Triangulation& tri, const std::vector<cplx>& values, double zeta,
                       int skip_edge = -1);
std::vector<cplx> mu_levels(const DegenerationProfile& profile, const Triangulation& tri, const std::vector<cplx>& values, double zeta);

ContinuationTrace continue_solution(const TildeSystem& system, const Triangulation& tri, const IdealPointSolution& sol,
                                    const ContinuationOptions& opts = {});
std::vector<double> fit_rates(const ContinuationTrace& trace, int points = 3);

// plain shapes: holonomy of `curve` pinned to `target`, one gluing equation dropped
struct HolonomyConstraint {
    BoundaryCurve curve;
    cplx target = 1.0;
};

std::vector<cplx> newton_refine(const Triangulation& tri, std::vector<cplx> shapes, const HolonomyConstraint& constraint,
                                const ContinuationOptions& opts = {}, int* iterations = nullptr);
double shape_residual(const Triangulation& tri, const std::vector<cplx>& shapes);

struct PeripheralOrders {
    std::map<std::string, int> orders; // curve name -> leading zeta order of its holonomy
    int meridian = 0;
    int semi_meridian = 0;
    int vertical = 0;
    long long slope_m = 0; // detected slope a m + b l0 with order 0
    long long slope_l = 0;
};

int holonomy_order(const Triangulation& tri, const DegenerationProfile& profile, const BoundaryCurve& curve);
PeripheralOrders peripheral_orders(const DegenerationProfile& profile, const Triangulation& tri);

void write_trace_csv(const ContinuationTrace& trace, std::ostream& out);

} // namespace ptb
