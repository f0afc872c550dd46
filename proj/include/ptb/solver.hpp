#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ptb/tilde.hpp"

namespace ptb {

enum class ChainKind { A, B };

struct AngleChain {
    ChainKind kind = ChainKind::A;
    std::vector<int> members; // tet ids in stack order
    int length() const { return static_cast<int>(members.size()); }
};

// a_1 .. a_{n+1} for a chain with n - 1 interior values, beta = 2 pi / (n + 2);
// a_1 and a_{n+1} are the fake boundary 1s
std::vector<double> chain_sequence(int n);
std::vector<cplx> solve_angle_chain(const AngleChain& chain);
std::vector<AngleChain> angle_chains(const DegenerationProfile& profile);

struct SignChoice {
    int tet = 0;
    int degree = 1; // number of roots available
    int branch = 0; // 0 = principal
};

struct IdealPointSolution {
    std::vector<cplx> values; // per tet: angle z or direction y
    cplx mu = -1.0;
    std::vector<SignChoice> sign_choices;
    std::vector<AngleChain> chains;
    double residual = 0;
};

struct SolverOptions {
    double tolerance = 1e-10;
    double isolation = 1e-6;
    double check_tolerance = 1e-8; // consistency of fully determined equations during the search
    std::map<int, int> forced_branch; // tet -> root index tried first
    std::map<int, ChainKind> forced_kind; // first member tet -> chain kind
};

IdealPointSolution solve_directions(const TildeSystem& system, const SolverOptions& opts = {});

struct PhiPsi {
    int top_site = 0;
    int bottom_site = 0;
    cplx phi = 1.0;
    cplx psi = 1.0;
    std::string phi_context; // section above the chain
    std::string psi_context; // section below the chain
    // predicted value where the neighbourhood is one of the plain cases (1 next to LL / RR)
    std::optional<cplx> phi_expected;
    std::optional<cplx> psi_expected;
};

std::vector<PhiPsi> compute_phi_psi(const SphereResult& spheres, const EdgePath& path, const IdealPointSolution& sol);

struct VerifyReport {
    double residual = 0;
    double min_direction = 0;
    double min_angle_gap = 0; // distance of angle values from {0, 1}
    double isolation = 0;     // smallest distance to an alternative solution
    int alternatives = 0;
    double newton_return = 0; // distance after re-converging from a perturbed start
    bool ok = false;
};

VerifyReport verify_solution(const TildeSystem& system, const IdealPointSolution& sol, const SolverOptions& opts = {});

// Gauss-Newton on the bar system; returns the converged values
std::vector<cplx> bar_newton(const TildeSystem& system, std::vector<cplx> values, int max_iter = 60);

} // namespace ptb
