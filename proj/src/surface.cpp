#include "ptb/surface.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>

#include "ptb/errors.hpp"

namespace ptb {

const char* deg_type_name(DegType t)
{
    switch (t) {
    case DegType::None:
        return "none";
    case DegType::T0:
        return "0";
    case DegType::T1:
        return "1";
    case DegType::TInf:
        return "inf";
    }
    return "?";
}

int zero_slot(DegType t)
{
    switch (t) {
    case DegType::T0:
        return 0;
    case DegType::T1:
        return 1;
    case DegType::TInf:
        return 2;
    default:
        return -1;
    }
}

int inf_slot(DegType t)
{
    switch (t) {
    case DegType::T0:
        return 1;
    case DegType::T1:
        return 2;
    case DegType::TInf:
        return 0;
    default:
        return -1;
    }
}

int one_slot(DegType t)
{
    switch (t) {
    case DegType::T0:
        return 2;
    case DegType::T1:
        return 0;
    case DegType::TInf:
        return 1;
    default:
        return -1;
    }
}

std::array<int, 3> slot_orders(DegType t, int k)
{
    std::array<int, 3> o{0, 0, 0};
    if (t == DegType::None || k == 0)
        return o;
    o[static_cast<size_t>(zero_slot(t))] = k;
    o[static_cast<size_t>(inf_slot(t))] = -k;
    return o;
}

bool DegenerationProfile::operator==(const DegenerationProfile& o) const
{
    if (doubled != o.doubled || unit != o.unit || tets.size() != o.tets.size())
        return false;
    for (size_t i = 0; i < tets.size(); ++i)
        if (tets[i].type != o.tets[i].type || tets[i].rate != o.tets[i].rate)
            return false;
    return true;
}

static int wrap(long long t, int n) { return static_cast<int>(((t % n) + n) % n); }

static void add_entry(DegenerationProfile& p, long long tet, DegType type, int rate)
{
    if (rate == 0)
        return;
    int t = wrap(tet, p.size());
    TetDegeneration& d = p.tets[static_cast<size_t>(t)];
    if (d.rate > 0 && d.type != type)
        throw Error(ErrorCode::SectionTableMiss, "sections give tet " + std::to_string(t) + " two degeneration types");
    d.type = type;
    d.rate += rate;
}

std::vector<ColumnEntry> section_column(SectionType type, int fan_length, int r, int s)
{
    if (fan_length < 1 || r < 1 || s < 1)
        throw Error(ErrorCode::SectionTableMiss, std::string("no column for ") + section_name(type) + " of length " + std::to_string(fan_length));
    std::vector<ColumnEntry> col;
    int n = fan_length - 1;
    switch (type) {
    case SectionType::LL: // anchored at the upper hinge of the outer fan
        col.push_back({1, DegType::T1, n + 1});
        col.push_back({0, DegType::TInf, 2 * n + 2});
        for (int a = 1; a <= n; ++a)
            col.push_back({-a, DegType::TInf, 2 * n + 2 - 2 * a});
        break;
    case SectionType::RR: // anchored at the lower hinge of the outer fan
        col.push_back({-1, DegType::T1, n + 1});
        col.push_back({0, DegType::T0, 2 * n + 2});
        for (int a = 1; a <= n; ++a)
            col.push_back({a, DegType::T0, 2 * n + 2 - 2 * a});
        break;
    case SectionType::RL:
        col.push_back({0, DegType::T1, 1});
        break;
    case SectionType::LR:
        col.push_back({r + 1, DegType::T1, 1});
        for (int a = r; a >= 1; --a)
            col.push_back({a, DegType::TInf, 2});
        col.push_back({0, DegType::T1, 1});
        for (int a = 1; a <= s; ++a)
            col.push_back({-a, DegType::T0, 2});
        col.push_back({-s - 1, DegType::T1, 1});
        break;
    }
    return col;
}

std::vector<LRSite> lr_sites(const FareyStrip& strip, const EdgePath& path)
{
    int f = strip.fan_count();
    auto run = [&](int i) { return strip.fans[static_cast<size_t>(((i % f) + f) % f)].ntri; };
    std::vector<LRSite> out;
    for (size_t k = 0; k < path.sections.size(); ++k) {
        const Section& sec = path.sections[k];
        if (sec.type != SectionType::LR)
            continue;
        LRSite s;
        s.section = static_cast<int>(k);
        s.fan = sec.fan;
        s.hinge = sec.hinge;
        // the column reaches past a neighbouring fan of a single tet
        s.r = run(sec.fan + 1) == 1 ? run(sec.fan + 2) + 1 : 1;
        s.s = run(sec.fan) == 1 ? run(sec.fan - 1) + 1 : 1;
        out.push_back(s);
    }
    return out;
}

DegenerationProfile path_to_yoshida(const EdgePath& path, const Triangulation& tri)
{
    const FareyStrip& strip = tri.strip;
    DegenerationProfile p;
    p.tets.resize(static_cast<size_t>(tri.size()));
    auto sites = lr_sites(strip, path);
    size_t next_lr = 0;
    for (const Section& sec : path.sections) {
        const Fan& fan = strip.fans[static_cast<size_t>(sec.fan)];
        int anchor = sec.type == SectionType::RR ? fan.lower_hinge() : fan.upper_hinge();
        int r = 1, s = 1;
        if (sec.type == SectionType::LR) {
            r = sites[next_lr].r;
            s = sites[next_lr].s;
            ++next_lr;
        }
        for (const ColumnEntry& e : section_column(sec.type, sec.fan_length, r, s))
            add_entry(p, anchor + e.offset, e.type, e.rate);
    }
    return p;
}

std::vector<int> check_zero_infty_matching(const DegenerationProfile& profile, const Triangulation& tri)
{
    std::vector<int> out;
    for (const GluingEquation& eq : tri.equations) {
        int s = 0;
        for (const GluingTerm& t : eq.terms) {
            const TetDegeneration& d = profile.at(t.tet);
            s += t.exponent * slot_orders(d.type, d.rate)[static_cast<size_t>(t.slot)];
        }
        out.push_back(s);
    }
    return out;
}

bool matching_holds(const DegenerationProfile& profile, const Triangulation& tri)
{
    auto v = check_zero_infty_matching(profile, tri);
    return std::all_of(v.begin(), v.end(), [](int x) { return x == 0; });
}

bool is_sphere_vertex(const DegenerationProfile& profile, const GluingEquation& eq)
{
    for (const GluingTerm& t : eq.terms) {
        const TetDegeneration& d = profile.at(t.tet);
        if (!d.degenerate() || t.slot != one_slot(d.type))
            return false;
    }
    return !eq.terms.empty();
}

static bool has_zero_inf_corner(const DegenerationProfile& profile, const GluingEquation& eq)
{
    for (const GluingTerm& t : eq.terms) {
        const TetDegeneration& d = profile.at(t.tet);
        if (d.degenerate() && t.slot != one_slot(d.type))
            return true;
    }
    return false;
}

static SphereVertexReport vertex_report(const DegenerationProfile& profile, const GluingEquation& eq)
{
    SphereVertexReport r;
    r.edge_id = eq.edge_id;
    std::map<int, int> mult;
    for (const GluingTerm& t : eq.terms)
        mult[t.tet] += t.exponent;
    r.min_rate = -1;
    for (auto& [tet, m] : mult) {
        int rate = profile.at(tet).rate;
        r.incident.push_back({tet, rate, m});
        if (r.min_rate < 0 || rate < r.min_rate)
            r.min_rate = rate;
    }
    for (const Incidence& i : r.incident)
        if (i.rate == r.min_rate)
            r.achievers.push_back(i.tet);
    return r;
}

std::vector<SphereVertexReport> find_sphere_vertices(const DegenerationProfile& profile, const Triangulation& tri)
{
    std::vector<SphereVertexReport> out;
    for (const GluingEquation& eq : tri.equations) {
        if (eq.terms.empty())
            throw Error(ErrorCode::UnsupportedVertex, "edge " + std::to_string(eq.edge_id) + " has no corners");
        if (is_sphere_vertex(profile, eq))
            out.push_back(vertex_report(profile, eq));
    }
    return out;
}

std::vector<SphereVertexReport> nonunique_violations(const DegenerationProfile& profile, const Triangulation& tri)
{
    std::vector<SphereVertexReport> bad;
    for (const GluingEquation& eq : tri.equations) {
        if (has_zero_inf_corner(profile, eq))
            continue;
        SphereVertexReport r = vertex_report(profile, eq);
        if (r.achievers.size() != 1)
            continue;
        int m = 0;
        for (const Incidence& i : r.incident)
            if (i.tet == r.achievers[0])
                m = i.multiplicity;
        // a lone non-degenerate tet met twice still gives a genuine equation
        if (r.min_rate > 0 || m == 1)
            bad.push_back(r);
    }
    return bad;
}

SphereTemplate sphere_template(const LRSite& site, int site_index, bool upper, int period, int count)
{
    SphereTemplate t;
    t.site = site_index;
    t.upper = upper;
    auto push = [&](long long tet, DegType type, int rate) { t.increments.push_back({wrap(tet, period), {type, rate * count}}); };
    push(site.hinge, DegType::T1, 1);
    if (upper) {
        for (int a = 1; a <= site.r; ++a)
            push(site.hinge + a, DegType::TInf, 2);
        push(site.upper_outer(), DegType::T1, 1);
    } else {
        for (int a = 1; a <= site.s; ++a)
            push(site.hinge - a, DegType::T0, 2);
        push(site.lower_outer(), DegType::T1, 1);
    }
    return t;
}

void apply_template(DegenerationProfile& profile, const SphereTemplate& t)
{
    for (auto& [tet, inc] : t.increments)
        add_entry(profile, tet, inc.type, inc.rate);
}

BalanceResult balance_point(const std::vector<int>& al)
{
    if (al.size() < 2)
        throw Error(ErrorCode::UnknownCase, "balance needs at least two rows");
    int m = static_cast<int>(al.size()) - 1;
    std::vector<long long> pre(al.size() + 1, 0);
    for (size_t i = 0; i < al.size(); ++i)
        pre[i + 1] = pre[i] + al[i];
    long long tot = pre.back();
    auto P = [&](int i) { return static_cast<int>(pre[static_cast<size_t>(i)]); };
    auto S = [&](int i) { return static_cast<int>(tot - pre[static_cast<size_t>(i)]); };
    BalanceResult res;
    for (int k = 1; k <= m; ++k) {
        if (P(k) != S(k))
            continue;
        res.exact = true;
        res.k = k;
        for (int i = 1; i <= m; ++i) {
            if (i < k)
                res.counts.push_back({P(i) + 1, P(i)});
            else if (i == k)
                res.counts.push_back({S(k), P(k)});
            else
                res.counts.push_back({S(i), S(i) + 1});
        }
        return res;
    }
    for (int k = 1; k <= m + 1; ++k) {
        if (al[static_cast<size_t>(k - 1)] <= std::abs(P(k - 1) - S(k)))
            continue;
        res.k = k;
        for (int i = 1; i <= m; ++i) {
            if (i < k)
                res.counts.push_back({P(i) + 1, P(i)});
            else
                res.counts.push_back({S(i), S(i) + 1});
        }
        return res;
    }
    throw Error(ErrorCode::UnknownCase, "no balance point");
}

bool lr_chains(const std::vector<LRSite>& sites, int period, std::vector<std::vector<int>>& out)
{
    out.clear();
    std::map<int, int> by_upper;
    for (size_t k = 0; k < sites.size(); ++k)
        by_upper[wrap(sites[k].upper_outer(), period)] = static_cast<int>(k);
    std::map<int, int> below;
    std::set<int> has_above;
    for (size_t k = 0; k < sites.size(); ++k) {
        auto it = by_upper.find(wrap(sites[k].lower_outer(), period));
        if (it != by_upper.end()) {
            below[static_cast<int>(k)] = it->second;
            has_above.insert(it->second);
        }
    }
    std::set<int> seen;
    for (size_t k = 0; k < sites.size(); ++k) {
        int h = static_cast<int>(k);
        if (has_above.count(h))
            continue;
        std::vector<int> ch{h};
        seen.insert(h);
        while (below.count(ch.back())) {
            ch.push_back(below[ch.back()]);
            seen.insert(ch.back());
        }
        out.push_back(ch);
    }
    return seen.size() == sites.size();
}

SphereResult add_spheres(const DegenerationProfile& profile, const Triangulation& tri, const EdgePath& path)
{
    const FareyStrip& strip = tri.strip;
    if (classify_semi_fiber(strip, path).semi_fiber)
        throw Error(ErrorCode::SemiFiber, "every vertex of the path is tight; the LR chains never end, so no finite number of spheres works");
    int n = tri.size();
    SphereResult res;
    res.profile = profile;
    res.sites = lr_sites(strip, path);
    res.counts.assign(res.sites.size(), {0, 0});
    std::vector<std::vector<int>> chains;
    if (!lr_chains(res.sites, n, chains))
        throw Error(ErrorCode::SemiFiber, "LR chain closes up around the period");
    for (const auto& ch : chains) {
        LRChain c;
        c.sites = ch;
        c.alphas.push_back(profile.at(wrap(res.sites[static_cast<size_t>(ch[0])].upper_outer(), n)).rate - 1);
        for (int k : ch)
            c.alphas.push_back(profile.at(wrap(res.sites[static_cast<size_t>(k)].lower_outer(), n)).rate - 1);
        c.balance = balance_point(c.alphas);
        res.chains.push_back(c);
    }
    if (nonunique_violations(profile, tri).empty())
        return res;
    for (const LRChain& c : res.chains) {
        for (size_t i = 0; i < c.sites.size(); ++i) {
            int k = c.sites[i];
            auto [a, b] = c.balance.counts[i];
            res.counts[static_cast<size_t>(k)] = {a, b};
            const LRSite& site = res.sites[static_cast<size_t>(k)];
            if (a > 0)
                apply_template(res.profile, sphere_template(site, k, true, n, a));
            if (b > 0)
                apply_template(res.profile, sphere_template(site, k, false, n, b));
        }
    }
    auto bad = nonunique_violations(res.profile, tri);
    if (!bad.empty())
        throw Error(ErrorCode::UniqueMinimum, "edge " + std::to_string(bad[0].edge_id) + " still has a unique minimum rate");
    return res;
}

const char* five_case_name(FiveCase c)
{
    switch (c) {
    case FiveCase::AlphaPlusOneLess:
        return "alpha+1<beta";
    case FiveCase::AlphaPlusOneEqual:
        return "alpha+1=beta";
    case FiveCase::Equal:
        return "alpha=beta";
    case FiveCase::AlphaEqualBetaPlusOne:
        return "alpha=beta+1";
    case FiveCase::AlphaGreater:
        return "alpha>beta+1";
    case FiveCase::Unmatched:
        return "unmatched";
    }
    return "?";
}

std::array<int, 5> window_rates(const DegenerationProfile& profile, const LRSite& site)
{
    int n = profile.size();
    return {profile.at(wrap(site.upper_outer(), n)).rate, profile.at(wrap(site.hinge + 1, n)).rate,
            profile.at(wrap(site.hinge, n)).rate, profile.at(wrap(site.hinge - 1, n)).rate,
            profile.at(wrap(site.lower_outer(), n)).rate};
}

FiveCase classify_window(const std::array<int, 5>& w)
{
    int A = w[0], B = w[1], C = w[2], D = w[3], Ac = w[4];
    if (A == C && C == D && B == A + 2 && Ac > A)
        return FiveCase::AlphaPlusOneLess;
    if (A == C && C == D && D == Ac && B == A + 2)
        return FiveCase::AlphaPlusOneEqual;
    if (A == C && C == Ac && B == A + 1 && D == A + 1)
        return FiveCase::Equal;
    if (A == B && B == C && C == Ac && D == A + 2)
        return FiveCase::AlphaEqualBetaPlusOne;
    if (B == C && C == Ac && D == B + 2 && A > B)
        return FiveCase::AlphaGreater;
    return FiveCase::Unmatched;
}

std::pair<int, int> single_lr_counts(int alpha, int beta)
{
    auto r = balance_point({alpha, beta});
    return r.counts[0];
}

std::array<int, 5> single_lr_window(int alpha, int beta, int a, int b)
{
    return {alpha + 1 + a, 2 + 2 * a, 1 + a + b, 2 + 2 * b, beta + 1 + b};
}

bool window_nonunique(const std::array<int, 5>& w)
{
    auto twice = [](int x, int y, int z) {
        int m = std::min({x, y, z});
        return (x == m) + (y == m) + (z == m) >= 2;
    };
    return twice(w[0], w[1], w[2]) && twice(w[2], w[3], w[4]);
}

bool path_orientable(const EdgePath& path) { return path.edge_count() % 2 == 0; }

DegenerationProfile orientability_and_double(const DegenerationProfile& profile, const EdgePath& path)
{
    DegenerationProfile p = profile;
    if (path_orientable(path) || p.doubled)
        return p;
    for (auto& t : p.tets)
        t.rate *= 2;
    p.doubled = true;
    p.unit = 2;
    return p;
}

} // namespace ptb
