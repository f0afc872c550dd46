#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "ptb/farey.hpp"
#include "ptb/triangulation.hpp"

namespace ptb {

// which pair of opposite edges carries the angle going to 1 (T1), to infinity (TInf)
// or to 0 (T0), read relative to the slot-0 (top) edge
enum class DegType { None, T0, T1, TInf };

const char* deg_type_name(DegType t);
int zero_slot(DegType t);
int inf_slot(DegType t);
int one_slot(DegType t);
// zeta order of the angle in each slot for a tet of rate k
std::array<int, 3> slot_orders(DegType t, int k);

struct TetDegeneration {
    DegType type = DegType::None;
    int rate = 0;
    bool degenerate() const { return rate > 0; }
};

struct DegenerationProfile {
    std::vector<TetDegeneration> tets;
    bool doubled = false;
    int unit = 1; // zeta exponent unit, 2 once doubled
    int size() const { return static_cast<int>(tets.size()); }
    const TetDegeneration& at(int t) const { return tets[static_cast<size_t>(t)]; }
    bool operator==(const DegenerationProfile& o) const;
};

// column entries of a section table, relative to the section anchor
struct ColumnEntry {
    int offset = 0;
    DegType type = DegType::None;
    int rate = 0;
};

// an LR crossing at hinge C; r, s are the upper and lower extents of its column
struct LRSite {
    int section = 0;
    int fan = 0;
    int hinge = 0;
    int r = 1;
    int s = 1;
    int upper_outer() const { return hinge + r + 1; } // the A tet
    int lower_outer() const { return hinge - s - 1; } // the A-check tet
};

std::vector<ColumnEntry> section_column(SectionType type, int fan_length, int r = 1, int s = 1);
std::vector<LRSite> lr_sites(const FareyStrip& strip, const EdgePath& path);
DegenerationProfile path_to_yoshida(const EdgePath& path, const Triangulation& tri);

std::vector<int> check_zero_infty_matching(const DegenerationProfile& profile, const Triangulation& tri);
bool matching_holds(const DegenerationProfile& profile, const Triangulation& tri);

struct Incidence {
    int tet = 0;
    int rate = 0;
    int multiplicity = 0;
};

struct SphereVertexReport {
    int edge_id = 0;
    std::vector<Incidence> incident;
    int min_rate = 0;
    std::vector<int> achievers;
};

// every incident corner is the ->1 slot of a degenerating tet
bool is_sphere_vertex(const DegenerationProfile& profile, const GluingEquation& eq);
std::vector<SphereVertexReport> find_sphere_vertices(const DegenerationProfile& profile, const Triangulation& tri);
// edges without 0/inf corners where the minimum rate is not achieved twice
std::vector<SphereVertexReport> nonunique_violations(const DegenerationProfile& profile, const Triangulation& tri);

struct SphereTemplate {
    int site = 0;
    bool upper = true;
    std::vector<std::pair<int, TetDegeneration>> increments; // (tet, increment)
};

SphereTemplate sphere_template(const LRSite& site, int site_index, bool upper, int period, int count = 1);
void apply_template(DegenerationProfile& profile, const SphereTemplate& t);

struct BalanceResult {
    bool exact = false; // case 1 (prefix equals suffix) rather than case 2
    int k = 0;
    std::vector<std::pair<int, int>> counts; // (upper, lower) per LR section between rows
};

BalanceResult balance_point(const std::vector<int>& alphas);

struct LRChain {
    std::vector<int> sites; // top to bottom
    std::vector<int> alphas;
    BalanceResult balance;
};

struct SphereResult {
    DegenerationProfile profile;
    std::vector<LRSite> sites;
    std::vector<std::pair<int, int>> counts; // per site
    std::vector<LRChain> chains;
};

// chains of LR sections linked through shared outer tets; false if they close up
bool lr_chains(const std::vector<LRSite>& sites, int period, std::vector<std::vector<int>>& out);

SphereResult add_spheres(const DegenerationProfile& profile, const Triangulation& tri, const EdgePath& path);

enum class FiveCase { AlphaPlusOneLess, AlphaPlusOneEqual, Equal, AlphaEqualBetaPlusOne, AlphaGreater, Unmatched };
const char* five_case_name(FiveCase c);
// rows A, B_n, C, D_1, A-check of the window around an LR site
std::array<int, 5> window_rates(const DegenerationProfile& profile, const LRSite& site);
FiveCase classify_window(const std::array<int, 5>& rates);

// the single-LR problem: rows (alpha+1, 2, 1, 2, beta+1) plus a upper and b lower spheres
std::pair<int, int> single_lr_counts(int alpha, int beta);
std::array<int, 5> single_lr_window(int alpha, int beta, int a, int b);
bool window_nonunique(const std::array<int, 5>& rates);

bool path_orientable(const EdgePath& path);
DegenerationProfile orientability_and_double(const DegenerationProfile& profile, const EdgePath& path);

} // namespace ptb
