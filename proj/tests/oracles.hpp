#pragma once

// Independent reference computations used by the tests. Nothing here calls into the
// library beyond plain data types, so agreement is a genuine cross-check.

#include <array>
#include <complex>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using IVec = std::pair<long long, long long>; // (q, p)
using IMat = std::array<long long, 4>;        // row major a b / c d

IMat mul(const IMat& x, const IMat& y);
IMat word_matrix(const std::string& word);
IVec act(const IMat& m, IVec v);
IVec normalize(IVec v);

// all hyperbolic words of length 2..maxn over L, R
std::vector<std::string> all_words(int maxn);

// minimal invariant paths found by a DFS in the Farey strip; each path is the set of its
// normalised vertex slopes (whole phi orbits) lying over a window of strip triangles
std::set<std::set<IVec>> brute_paths(const std::string& word);
// the same window key for a path given one period of vertices
std::set<IVec> path_key(const std::string& word, const std::vector<IVec>& period_vertices);

// u, v, w consecutive Farey neighbours: the turn at v is as sharp as possible
bool farey_tight(IVec u, IVec v, IVec w);

// every k at which balance case 1 (exact) or case 2 holds, 1-based
std::vector<int> balance_case1(const std::vector<int>& al);
std::vector<int> balance_case2(const std::vector<int>& al);

// rates in the chain model: rows alternate T1 rows and the B, C, D rows of each LR
// returns true if every 3-row window around each LR has a non-unique minimum
bool chain_windows_ok(const std::vector<int>& al, const std::vector<std::pair<int, int>>& counts);

// minimal-rate check at an edge: corners (tet, rate, multiplicity, zero_or_inf)
struct Corner {
    int tet;
    int rate;
    int mult;
    bool zero_inf;
};
bool edge_nonunique_ok(const std::vector<Corner>& corners);

// a_{k-1} a_{k+1} - (1 - a_k)^2 over a full sequence including the boundary values
double recursion_residual(const std::vector<double>& a);
// the same, each term divided by max(1, a_k^2); doubles cannot do better than about
// a_k^2 * 1e-16 in absolute terms once a_k is in the hundreds
double recursion_residual_scaled(const std::vector<double>& a);

} // namespace oracle
