#include "ptb/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include <Eigen/Dense>

#include "ptb/errors.hpp"

namespace ptb {

std::vector<double> chain_sequence(int n)
{
    double beta = 2 * std::numbers::pi / (n + 2);
    std::vector<double> a;
    for (int k = 1; k <= n + 1; ++k)
        a.push_back((1 - std::cos(k * beta)) / (1 - std::cos(beta)));
    a.front() = 1;
    a.back() = 1;
    return a;
}

std::vector<cplx> solve_angle_chain(const AngleChain& chain)
{
    auto seq = chain_sequence(chain.length() + 1);
    std::vector<cplx> out;
    for (int k = 1; k <= chain.length(); ++k) {
        double v = seq[static_cast<size_t>(k)];
        out.push_back(chain.kind == ChainKind::A ? v : 1 / v);
    }
    return out;
}

std::vector<AngleChain> angle_chains(const DegenerationProfile& p)
{
    int n = p.size();
    std::vector<AngleChain> out;
    int start = -1;
    for (int t = 0; t < n; ++t)
        if (p.at(t).degenerate()) {
            start = t;
            break;
        }
    if (start < 0) {
        AngleChain c;
        for (int t = 0; t < n; ++t)
            c.members.push_back(t);
        out.push_back(c);
        return out;
    }
    AngleChain cur;
    for (int i = 1; i <= n; ++i) {
        int t = (start + i) % n;
        if (p.at(t).degenerate()) {
            if (!cur.members.empty())
                out.push_back(cur);
            cur = {};
        } else {
            cur.members.push_back(t);
        }
    }
    return out;
}

namespace {

struct MonoRow {
    std::map<int, int> exps; // prod y^e = c
    cplx c = 1.0;
};

struct Search {
    const TildeSystem& sys;
    const SolverOptions& opts;
    int n;
    std::vector<MonoRow> rows;
    std::vector<std::optional<cplx>> val;
    std::vector<SignChoice> choices;

    Search(const TildeSystem& s, const SolverOptions& o) : sys(s), opts(o), n(static_cast<int>(s.variables.size())) {}

    bool angle(int t) const { return sys.variables[static_cast<size_t>(t)].kind == VarKind::Angle; }

    void add_row(const std::vector<LeadingTerm>& terms, int sign)
    {
        MonoRow r;
        for (const LeadingTerm& t : terms) {
            int e = sign * t.exponent;
            cplx x = *val[static_cast<size_t>(t.var)];
            if (angle(t.var)) {
                r.c /= std::pow(coeff_value(t.coeff, x), e);
            } else if (t.coeff == Coeff::Y) {
                r.exps[t.var] += e;
            } else if (t.coeff == Coeff::MinusInvY) {
                r.exps[t.var] -= e;
                if (e % 2)
                    r.c = -r.c;
            }
        }
        std::erase_if(r.exps, [](const auto& kv) { return kv.second == 0; });
        rows.push_back(r);
    }

    void build_rows()
    {
        rows.clear();
        for (const RegularEquation& e : sys.regular) {
            std::vector<LeadingTerm> all = e.side_a;
            for (LeadingTerm t : e.side_b) {
                t.exponent = -t.exponent;
                all.push_back(t);
            }
            add_row(all, 1);
        }
        for (const MuMeasurement& m : sys.mu)
            add_row(m.factors, 1);
    }

    // single unknown left in a row: (tet, exponent, constant)
    struct Single {
        int tet;
        long long m;
        cplx c;
    };

    std::optional<Single> reduce_row(const MonoRow& r) const
    {
        cplx c = r.c;
        int unk = -1;
        int m = 0;
        for (auto& [t, e] : r.exps) {
            if (val[static_cast<size_t>(t)]) {
                c /= std::pow(*val[static_cast<size_t>(t)], e);
            } else {
                if (unk >= 0)
                    return std::nullopt;
                unk = t;
                m = e;
            }
        }
        if (unk < 0)
            return std::nullopt;
        return Single{unk, m, c};
    }

    // integer elimination over the unknowns, each unknown in turn placed last
    std::optional<Single> echelon_single() const
    {
        std::vector<int> unknown;
        for (int t = 0; t < n; ++t)
            if (!val[static_cast<size_t>(t)])
                unknown.push_back(t);
        int u = static_cast<int>(unknown.size());
        auto index = [&](int t) { return static_cast<int>(std::find(unknown.begin(), unknown.end(), t) - unknown.begin()); };
        struct Row {
            std::vector<long long> a;
            cplx c;
        };
        std::vector<Row> base;
        for (const MonoRow& r : rows) {
            Row row{std::vector<long long>(static_cast<size_t>(u), 0), r.c};
            for (auto& [t, e] : r.exps) {
                if (val[static_cast<size_t>(t)])
                    row.c /= std::pow(*val[static_cast<size_t>(t)], e);
                else
                    row.a[static_cast<size_t>(index(t))] += e;
            }
            if (std::any_of(row.a.begin(), row.a.end(), [](long long x) { return x != 0; }))
                base.push_back(row);
        }
        // two-term sphere relations give y1 / y2 = -m2 / m1
        for (const SphereEquation& s : sys.sphere) {
            if (s.terms.size() != 2)
                continue;
            const LinearTerm& t1 = s.terms[0];
            const LinearTerm& t2 = s.terms[1];
            Row row{std::vector<long long>(static_cast<size_t>(u), 0), cplx(-static_cast<double>(t2.coeff) / t1.coeff)};
            for (auto [t, e] : {std::pair{t1.var, 1}, std::pair{t2.var, -1}}) {
                if (val[static_cast<size_t>(t)])
                    row.c /= std::pow(*val[static_cast<size_t>(t)], e);
                else
                    row.a[static_cast<size_t>(index(t))] += e;
            }
            if (std::any_of(row.a.begin(), row.a.end(), [](long long x) { return x != 0; }))
                base.push_back(row);
        }
        std::optional<Single> best;
        for (int last = 0; last < u; ++last) {
            std::vector<int> order;
            for (int j = 0; j < u; ++j)
                if (j != last)
                    order.push_back(j);
            order.push_back(last);
            std::vector<Row> R;
            for (const Row& b : base) {
                Row r{std::vector<long long>(static_cast<size_t>(u)), b.c};
                for (int j = 0; j < u; ++j)
                    r.a[static_cast<size_t>(j)] = b.a[static_cast<size_t>(order[static_cast<size_t>(j)])];
                R.push_back(r);
            }
            size_t piv = 0;
            for (int col = 0; col < u && piv < R.size(); ++col) {
                while (true) {
                    size_t i0 = R.size();
                    for (size_t i = piv; i < R.size(); ++i)
                        if (R[i].a[static_cast<size_t>(col)] && (i0 == R.size() || std::llabs(R[i].a[static_cast<size_t>(col)]) < std::llabs(R[i0].a[static_cast<size_t>(col)])))
                            i0 = i;
                    if (i0 == R.size())
                        break;
                    std::swap(R[piv], R[i0]);
                    bool done = true;
                    for (size_t i = piv + 1; i < R.size(); ++i) {
                        long long x = R[i].a[static_cast<size_t>(col)];
                        if (!x)
                            continue;
                        long long q = x / R[piv].a[static_cast<size_t>(col)];
                        for (int j = 0; j < u; ++j)
                            R[i].a[static_cast<size_t>(j)] -= q * R[piv].a[static_cast<size_t>(j)];
                        R[i].c /= std::pow(R[piv].c, static_cast<double>(q));
                        if (R[i].a[static_cast<size_t>(col)])
                            done = false;
                    }
                    if (done)
                        break;
                }
                bool any = false;
                for (size_t i = piv; i < R.size(); ++i)
                    any = any || R[i].a[static_cast<size_t>(col)] != 0;
                if (any)
                    ++piv;
            }
            for (const Row& r : R) {
                int nz = -1, cnt = 0;
                for (int j = 0; j < u; ++j)
                    if (r.a[static_cast<size_t>(j)]) {
                        nz = j;
                        ++cnt;
                    }
                if (cnt != 1)
                    continue;
                long long m = r.a[static_cast<size_t>(nz)];
                if (!best || std::llabs(m) < std::llabs(best->m))
                    best = Single{unknown[static_cast<size_t>(order[static_cast<size_t>(nz)])], m, r.c};
            }
        }
        return best;
    }

    bool consistent() const
    {
        for (const MonoRow& r : rows) {
            cplx x = r.c;
            bool full = true;
            for (auto& [t, e] : r.exps) {
                if (!val[static_cast<size_t>(t)]) {
                    full = false;
                    break;
                }
                x /= std::pow(*val[static_cast<size_t>(t)], e);
            }
            if (full && std::abs(x - 1.0) > opts.check_tolerance)
                return false;
        }
        for (const SphereEquation& s : sys.sphere) {
            cplx x = 0.0;
            bool full = true;
            for (const LinearTerm& t : s.terms) {
                if (!val[static_cast<size_t>(t.var)]) {
                    full = false;
                    break;
                }
                x += static_cast<double>(t.coeff) * *val[static_cast<size_t>(t.var)];
            }
            if (full && std::abs(x) > opts.check_tolerance)
                return false;
        }
        return true;
    }

    bool zero_seen = false;

    // 1 solved, 0 dead end, -1 stuck
    int dfs()
    {
        bool done = std::all_of(val.begin(), val.end(), [](const auto& v) { return v.has_value(); });
        if (done)
            return 1;
        std::vector<std::pair<int, cplx>> cand;
        std::optional<Single> best;
        for (const MonoRow& r : rows) {
            auto s = reduce_row(r);
            if (s && (!best || std::llabs(s->m) < std::llabs(best->m)))
                best = s;
        }
        bool linear = false;
        for (const SphereEquation& s : sys.sphere) {
            int unk = -1, cnt = 0;
            cplx sum = 0.0;
            for (const LinearTerm& t : s.terms) {
                if (val[static_cast<size_t>(t.var)])
                    sum += static_cast<double>(t.coeff) * *val[static_cast<size_t>(t.var)];
                else {
                    unk = t.var;
                    ++cnt;
                }
            }
            if (cnt == 1) {
                int c = 0;
                for (const LinearTerm& t : s.terms)
                    if (t.var == unk)
                        c += t.coeff;
                cand.push_back({unk, -sum / static_cast<double>(c)});
                linear = true;
                break;
            }
        }
        long long deg = 1;
        int first = 0;
        if (!linear) {
            if (!best)
                best = echelon_single();
            if (!best)
                return -1;
            long long m = best->m;
            deg = std::llabs(m);
            cplx root = std::pow(best->c, 1.0 / static_cast<double>(m));
            if (auto it = opts.forced_branch.find(best->tet); it != opts.forced_branch.end())
                first = static_cast<int>(((it->second % deg) + deg) % deg);
            for (long long i = 0; i < deg; ++i) {
                long long q = (first + i) % deg;
                cand.push_back({best->tet, root * std::polar(1.0, 2 * std::numbers::pi * static_cast<double>(q) / static_cast<double>(m))});
            }
        }
        for (size_t i = 0; i < cand.size(); ++i) {
            auto [t, v] = cand[i];
            if (std::abs(v) < 1e-12) {
                zero_seen = true;
                continue;
            }
            val[static_cast<size_t>(t)] = v;
            if (consistent()) {
                if (deg > 1)
                    choices.push_back({t, static_cast<int>(deg), static_cast<int>((first + static_cast<long long>(i)) % deg)});
                int r = dfs();
                if (r != 0)
                    return r;
                if (deg > 1)
                    choices.pop_back();
            }
            val[static_cast<size_t>(t)].reset();
        }
        return 0;
    }
};

bool chain_kind_passes(const TildeSystem& sys, const AngleChain& ch, ChainKind kind)
{
    AngleChain c = ch;
    c.kind = kind;
    auto vals = solve_angle_chain(c);
    std::map<int, cplx> trial;
    for (size_t i = 0; i < vals.size(); ++i)
        trial[c.members[i]] = vals[i];
    for (const RegularEquation& e : sys.regular) {
        bool only = true;
        cplx v = 1.0;
        auto scan = [&](const std::vector<LeadingTerm>& side, int sign) {
            for (const LeadingTerm& t : side) {
                if (trial.count(t.var))
                    v *= std::pow(coeff_value(t.coeff, trial[t.var]), sign * t.exponent);
                else if (t.coeff != Coeff::One)
                    only = false;
            }
        };
        scan(e.side_a, 1);
        scan(e.side_b, -1);
        if (only && std::abs(v - 1.0) > 1e-9)
            return false;
    }
    return true;
}

} // namespace

IdealPointSolution solve_directions(const TildeSystem& sys, const SolverOptions& opts)
{
    int n = static_cast<int>(sys.variables.size());
    auto chains = angle_chains(sys.profile);
    std::vector<std::vector<ChainKind>> kinds;
    for (const AngleChain& ch : chains) {
        std::vector<ChainKind> ks;
        for (ChainKind k : {ChainKind::A, ChainKind::B})
            if (chain_kind_passes(sys, ch, k))
                ks.push_back(k);
        if (auto it = opts.forced_kind.find(ch.members.front()); it != opts.forced_kind.end()) {
            auto pos = std::find(ks.begin(), ks.end(), it->second);
            if (pos != ks.end())
                std::rotate(ks.begin(), pos, pos + 1);
        }
        if (ks.empty())
            throw Error(ErrorCode::UnsolvedVariable, "no closed-form chain fits the angle chain at tet " + std::to_string(ch.members.front()));
        kinds.push_back(ks);
    }
    bool zero = false;
    std::vector<size_t> pick(chains.size(), 0);
    while (true) {
        Search s(sys, opts);
        s.val.assign(static_cast<size_t>(n), std::nullopt);
        std::vector<AngleChain> used = chains;
        for (size_t c = 0; c < chains.size(); ++c) {
            used[c].kind = kinds[c][pick[c]];
            auto v = solve_angle_chain(used[c]);
            for (size_t i = 0; i < v.size(); ++i)
                s.val[static_cast<size_t>(used[c].members[i])] = v[i];
        }
        s.build_rows();
        int r = s.dfs();
        zero = zero || s.zero_seen;
        if (r == 1) {
            IdealPointSolution sol;
            for (auto& v : s.val)
                sol.values.push_back(*v);
            sol.sign_choices = s.choices;
            sol.chains = used;
            sol.mu = mu_value(sys.mu[static_cast<size_t>(sys.mu_reference)], sol.values);
            sol.residual = evaluate_bar_residual(sys, sol.values);
            return sol;
        }
        if (r == -1)
            throw Error(ErrorCode::UnsolvedVariable, "propagation stalls with unsolved direction variables");
        size_t c = 0;
        while (c < pick.size() && ++pick[c] == kinds[c].size())
            pick[c++] = 0;
        if (c == pick.size())
            break;
    }
    if (zero)
        throw Error(ErrorCode::ZeroDirection, "every branch forces a direction variable to 0");
    throw Error(ErrorCode::UnsolvedVariable, "no consistent assignment of direction variables");
}

static std::string neighbour_name(const EdgePath& path, int section)
{
    int m = static_cast<int>(path.sections.size());
    return section_name(path.sections[static_cast<size_t>(((section % m) + m) % m)].type);
}

std::vector<PhiPsi> compute_phi_psi(const SphereResult& spheres, const EdgePath& path, const IdealPointSolution& sol)
{
    std::vector<PhiPsi> out;
    int n = static_cast<int>(sol.values.size());
    auto y = [&](int t) { return sol.values[static_cast<size_t>(((t % n) + n) % n)]; };
    for (const LRChain& ch : spheres.chains) {
        const LRSite& top = spheres.sites[static_cast<size_t>(ch.sites.front())];
        const LRSite& bot = spheres.sites[static_cast<size_t>(ch.sites.back())];
        PhiPsi p;
        p.top_site = ch.sites.front();
        p.bottom_site = ch.sites.back();
        cplx a = y(top.upper_outer()), b = y(top.hinge + 1);
        cplx ac = y(bot.lower_outer()), d = y(bot.hinge - 1);
        p.phi = -b / (a * a);
        p.psi = ac * ac / d;
        p.phi_context = neighbour_name(path, top.section + 1);
        p.psi_context = neighbour_name(path, bot.section - 1);
        const DegenerationProfile& prof = spheres.profile;
        auto deg = [&](int t) { return prof.at(((t % n) + n) % n).degenerate(); };
        if (p.phi_context == "LL" && deg(top.upper_outer() + 1))
            p.phi_expected = 1.0;
        if (p.psi_context == "RR" && deg(bot.lower_outer() - 1))
            p.psi_expected = 1.0;
        out.push_back(p);
    }
    return out;
}

namespace {

Eigen::VectorXcd bar_vector(const TildeSystem& sys, const std::vector<cplx>& v)
{
    std::vector<cplx> f;
    for (const RegularEquation& e : sys.regular)
        f.push_back(side_value(e.side_a, v) / side_value(e.side_b, v) - 1.0);
    for (const SphereEquation& e : sys.sphere)
        f.push_back(sphere_residual(e, v));
    for (const MuMeasurement& m : sys.mu)
        f.push_back(side_value(m.factors, v) - 1.0);
    Eigen::VectorXcd out(static_cast<Eigen::Index>(f.size()));
    for (size_t i = 0; i < f.size(); ++i)
        out(static_cast<Eigen::Index>(i)) = f[i];
    return out;
}

} // namespace

std::vector<cplx> bar_newton(const TildeSystem& sys, std::vector<cplx> v, int max_iter)
{
    const double h = 1e-7;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXcd f = bar_vector(sys, v);
        if (f.cwiseAbs().maxCoeff() < 1e-14)
            break;
        Eigen::MatrixXcd J(f.size(), static_cast<Eigen::Index>(v.size()));
        for (size_t j = 0; j < v.size(); ++j) {
            auto w = v;
            w[j] += h * std::max(1.0, std::abs(v[j]));
            J.col(static_cast<Eigen::Index>(j)) = (bar_vector(sys, w) - f) / (w[j] - v[j]);
        }
        Eigen::VectorXcd d = J.colPivHouseholderQr().solve(-f);
        double lam = 1;
        double f0 = f.cwiseAbs().maxCoeff();
        bool moved = false;
        while (lam > 1e-6) {
            auto w = v;
            for (size_t j = 0; j < v.size(); ++j)
                w[j] += lam * d(static_cast<Eigen::Index>(j));
            double f1 = bar_vector(sys, w).cwiseAbs().maxCoeff();
            if (std::isfinite(f1) && f1 < f0) {
                v = w;
                moved = true;
                break;
            }
            lam /= 2;
        }
        if (!moved)
            break;
    }
    return v;
}

static double distance(const std::vector<cplx>& a, const std::vector<cplx>& b)
{
    double d = 0;
    for (size_t i = 0; i < a.size(); ++i)
        d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

VerifyReport verify_solution(const TildeSystem& sys, const IdealPointSolution& sol, const SolverOptions& opts)
{
    VerifyReport rep;
    rep.residual = evaluate_bar_residual(sys, sol.values);
    if (rep.residual > opts.tolerance)
        throw Error(ErrorCode::ResidualTooLarge, "bar residual " + std::to_string(rep.residual));
    rep.min_direction = INFINITY;
    rep.min_angle_gap = INFINITY;
    for (const TildeVariable& v : sys.variables) {
        cplx x = sol.values[static_cast<size_t>(v.tet)];
        if (v.kind == VarKind::Direction) {
            rep.min_direction = std::min(rep.min_direction, std::abs(x));
        } else {
            rep.min_angle_gap = std::min({rep.min_angle_gap, std::abs(x), std::abs(x - 1.0)});
            if (std::abs(x.imag()) > 1e-12)
                throw Error(ErrorCode::DegenerateValue, "angle variable of tet " + std::to_string(v.tet) + " is not real");
        }
    }
    if (rep.min_direction < 1e-12)
        throw Error(ErrorCode::DegenerateValue, "a direction variable vanishes");
    if (rep.min_angle_gap < 1e-12)
        throw Error(ErrorCode::DegenerateValue, "an angle variable sits at 0 or 1");
    for (const AngleChain& ch : sol.chains)
        for (int t : ch.members) {
            double x = sol.values[static_cast<size_t>(t)].real();
            if ((ch.kind == ChainKind::A && !(x > 1)) || (ch.kind == ChainKind::B && !(x > 0 && x < 1)))
                throw Error(ErrorCode::DegenerateValue, "chain value out of range at tet " + std::to_string(t));
        }

    // isolation: every other recorded branch and the other chain kind give a different point
    rep.isolation = INFINITY;
    auto probe = [&](const SolverOptions& o) {
        try {
            auto alt = solve_directions(sys, o);
            double d = distance(alt.values, sol.values);
            if (d > 0) {
                ++rep.alternatives;
                rep.isolation = std::min(rep.isolation, d);
            }
        } catch (const Error&) {
        }
    };
    for (size_t i = 0; i < sol.sign_choices.size(); ++i) {
        const SignChoice& c = sol.sign_choices[i];
        SolverOptions o = opts;
        for (size_t j = 0; j < i; ++j)
            o.forced_branch[sol.sign_choices[j].tet] = sol.sign_choices[j].branch;
        for (int b = 1; b < c.degree; ++b) {
            o.forced_branch[c.tet] = (c.branch + b) % c.degree;
            probe(o);
        }
    }
    for (const AngleChain& ch : sol.chains) {
        SolverOptions o = opts;
        o.forced_kind[ch.members.front()] = ch.kind == ChainKind::A ? ChainKind::B : ChainKind::A;
        probe(o);
    }

    auto start = sol.values;
    for (size_t j = 0; j < start.size(); ++j)
        start[j] *= 1.0 + 1e-3 * std::cos(1.0 + static_cast<double>(j));
    rep.newton_return = distance(bar_newton(sys, start), sol.values);
    rep.ok = rep.isolation > opts.isolation && rep.newton_return < 1e-9;
    return rep;
}

} // namespace ptb
