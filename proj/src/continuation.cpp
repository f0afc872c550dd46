#include "ptb/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>

#include <Eigen/Dense>

#include "ptb/errors.hpp"

namespace ptb {

using std::numbers::pi;

cplx clog1p(cplx z)
{
    double x = z.real(), y = z.imag();
    return {0.5 * std::log1p(2 * x + x * x + y * y), std::atan2(y, 1 + x)};
}

cplx cexpm1(cplx z)
{
    double a = z.real(), b = z.imag();
    double s = std::sin(b / 2);
    return {std::expm1(a) * std::cos(b) - 2 * s * s, std::exp(a) * std::sin(b)};
}

// imaginary part into (-pi, pi] so that exp(S) - 1 is computed near S = 0
static cplx reduce(cplx s)
{
    double im = std::remainder(s.imag(), 2 * pi);
    return {s.real(), im};
}

static cplx log_angle(cplx z, int slot)
{
    switch (slot) {
    case 0:
        return std::log(z);
    case 1:
        return std::log((z - 1.0) / z);
    default:
        return -std::log(1.0 - z);
    }
}

cplx zero_corner_value(const TetDegeneration& d, cplx value, double zeta)
{
    if (!d.degenerate())
        return value;
    return std::pow(zeta, d.rate) * value;
}

std::vector<cplx> reconstruct_shapes(const DegenerationProfile& profile, const std::vector<cplx>& values, double zeta)
{
    std::vector<cplx> z;
    for (int t = 0; t < profile.size(); ++t) {
        const TetDegeneration& d = profile.at(t);
        cplx v = values[static_cast<size_t>(t)];
        if (!d.degenerate()) {
            z.push_back(v);
            continue;
        }
        cplx w = zero_corner_value(d, v, zeta);
        switch (zero_slot(d.type)) {
        case 0:
            z.push_back(w);
            break;
        case 1: // (z - 1) / z = w
            z.push_back(1.0 / (1.0 - w));
            break;
        default: // 1 / (1 - z) = w
            z.push_back(1.0 - 1.0 / w);
        }
    }
    return z;
}

cplx corner_log(const DegenerationProfile& profile, const std::vector<cplx>& values, double zeta, int tet, int slot)
{
    const TetDegeneration& d = profile.at(tet);
    cplx v = values[static_cast<size_t>(tet)];
    if (!d.degenerate())
        return log_angle(v, slot);
    cplx lw = d.rate * std::log(zeta) + std::log(v);
    cplx w = std::exp(lw);
    if (slot == zero_slot(d.type))
        return lw;
    if (slot == inf_slot(d.type))
        return cplx(0, pi) - lw + clog1p(-w);
    return -clog1p(-w);
}

// corner log with zeta^k removed from the ->0 and ->inf slots
static cplx tilde_log(const DegenerationProfile& profile, const std::vector<cplx>& v, double zeta, int tet, int slot)
{
    const TetDegeneration& d = profile.at(tet);
    cplx x = v[static_cast<size_t>(tet)];
    if (!d.degenerate())
        return log_angle(x, slot);
    cplx w = std::pow(zeta, d.rate) * x;
    if (slot == zero_slot(d.type))
        return std::log(x);
    if (slot == inf_slot(d.type))
        return std::log(-1.0 / x) + clog1p(-w);
    return -clog1p(-w);
}

namespace {

struct TildeEquations {
    const TildeSystem& sys;
    const Triangulation& tri;
    std::vector<GluingTerm> semi;

    TildeEquations(const TildeSystem& s, const Triangulation& t)
        : sys(s), tri(t), semi(semi_meridian_monomial(t, s.mu_reference)) {}

    Eigen::VectorXcd operator()(const std::vector<cplx>& v, double zeta) const
    {
        const DegenerationProfile& p = sys.profile;
        std::vector<cplx> f;
        for (const GluingEquation& eq : tri.equations) {
            if (eq.edge_id == sys.dropped_edge)
                continue;
            if (!sys.sphere_edge[static_cast<size_t>(eq.edge_id)]) {
                cplx s = 0.0;
                for (const GluingTerm& g : eq.terms)
                    s += static_cast<double>(g.exponent) * tilde_log(p, v, zeta, g.tet, g.slot);
                f.push_back(cexpm1(reduce(s)));
                continue;
            }
            int kmin = -1;
            for (const GluingTerm& g : eq.terms)
                if (kmin < 0 || p.at(g.tet).rate < kmin)
                    kmin = p.at(g.tet).rate;
            if (zeta == 0) {
                cplx s = 0.0;
                for (const GluingTerm& g : eq.terms)
                    if (p.at(g.tet).rate == kmin)
                        s += static_cast<double>(g.exponent) * v[static_cast<size_t>(g.tet)];
                f.push_back(s);
                continue;
            }
            cplx s = 0.0;
            for (const GluingTerm& g : eq.terms)
                s += static_cast<double>(g.exponent) * clog1p(-std::pow(zeta, p.at(g.tet).rate) * v[static_cast<size_t>(g.tet)]);
            f.push_back(-cexpm1(s) / std::pow(zeta, kmin));
        }
        cplx s = 0.0;
        for (const GluingTerm& g : semi)
            s += static_cast<double>(g.exponent) * tilde_log(p, v, zeta, g.tet, g.slot);
        f.push_back(cexpm1(reduce(s))); // product above the level is 1, i.e. mu = -1
        Eigen::VectorXcd out(static_cast<Eigen::Index>(f.size()));
        for (size_t i = 0; i < f.size(); ++i)
            out(static_cast<Eigen::Index>(i)) = f[i];
        return out;
    }
};

// damped Newton in u = log(x) for a square system F(exp(u)) = 0
template <class F>
bool log_newton(const F& fun, std::vector<cplx>& x, int max_iter, double tol, int& iters)
{
    size_t n = x.size();
    std::vector<cplx> u(n);
    for (size_t i = 0; i < n; ++i)
        u[i] = std::log(x[i]);
    auto ex = [&](const std::vector<cplx>& uu) {
        std::vector<cplx> r(n);
        for (size_t i = 0; i < n; ++i)
            r[i] = std::exp(uu[i]);
        return r;
    };
    Eigen::VectorXcd f = fun(ex(u));
    const double h = 1e-7;
    for (iters = 0; iters < max_iter; ++iters) {
        double f0 = f.cwiseAbs().maxCoeff();
        if (!std::isfinite(f0))
            return false;
        if (f0 < tol) {
            x = ex(u);
            return true;
        }
        Eigen::MatrixXcd J(f.size(), static_cast<Eigen::Index>(n));
        for (size_t j = 0; j < n; ++j) {
            auto du = u;
            du[j] += h;
            J.col(static_cast<Eigen::Index>(j)) = (fun(ex(du)) - f) / h;
        }
        Eigen::VectorXcd d = J.fullPivLu().solve(-f);
        double lam = 1;
        bool moved = false;
        while (lam > 1e-6) {
            auto nu = u;
            for (size_t j = 0; j < n; ++j)
                nu[j] += lam * d(static_cast<Eigen::Index>(j));
            Eigen::VectorXcd nf = fun(ex(nu));
            double f1 = nf.cwiseAbs().maxCoeff();
            if (std::isfinite(f1) && f1 < f0) {
                u = nu;
                f = nf;
                moved = true;
                break;
            }
            lam /= 2;
        }
        if (!moved)
            break;
    }
    x = ex(u);
    return f.cwiseAbs().maxCoeff() < std::max(tol, 1e-11);
}

} // namespace

std::vector<cplx> newton_tilde(const TildeSystem& system, const Triangulation& tri, std::vector<cplx> values, double zeta,
                               const ContinuationOptions& opts, int* iterations)
{
    TildeEquations eqs(system, tri);
    int it = 0;
    bool ok = log_newton([&](const std::vector<cplx>& v) { return eqs(v, zeta); }, values, opts.max_iter, opts.newton_tolerance, it);
    if (iterations)
        *iterations = it;
    if (!ok)
        throw Error(ErrorCode::NoConvergence, "Newton did not converge at zeta = " + std::to_string(zeta));
    for (const TildeVariable& v : system.variables) {
        cplx x = values[static_cast<size_t>(v.tet)];
        if (v.kind == VarKind::Angle && (std::abs(x) < opts.collision_radius || std::abs(x - 1.0) < opts.collision_radius))
            throw Error(ErrorCode::DegenerationCollision, "angle of tet " + std::to_string(v.tet) + " ran into 0 or 1");
        if (v.kind == VarKind::Direction && std::abs(x) < opts.collision_radius)
            throw Error(ErrorCode::DegenerationCollision, "direction of tet " + std::to_string(v.tet) + " ran into 0");
    }
    return values;
}

double gluing_residual(const DegenerationProfile& profile, const Triangulation& tri, const std::vector<cplx>& values, double zeta, int skip_edge)
{
    double r = 0;
    for (const GluingEquation& eq : tri.equations) {
        if (eq.edge_id == skip_edge)
            continue;
        cplx s = 0.0;
        for (const GluingTerm& g : eq.terms)
            s += static_cast<double>(g.exponent) * corner_log(profile, values, zeta, g.tet, g.slot);
        r = std::max(r, std::abs(cexpm1(reduce(s))));
    }
    return r;
}

std::vector<cplx> mu_levels(const DegenerationProfile& profile, const Triangulation& tri, const std::vector<cplx>& values, double zeta)
{
    std::vector<cplx> out;
    for (int j = 0; j < tri.size(); ++j) {
        cplx s = 0.0;
        for (const GluingTerm& g : semi_meridian_monomial(tri, j))
            s += static_cast<double>(g.exponent) * corner_log(profile, values, zeta, g.tet, g.slot);
        // holonomy = -1 / prod, mu = holonomy / zeta^(2 unit)
        out.push_back(-std::exp(-s - 2.0 * profile.unit * std::log(zeta)));
    }
    return out;
}

static TraceStep make_step(const TildeSystem& sys, const Triangulation& tri, const std::vector<cplx>& v, double zeta, int iters)
{
    const DegenerationProfile& p = sys.profile;
    TraceStep st;
    st.zeta = zeta;
    st.values = v;
    st.iterations = iters;
    for (int t = 0; t < p.size(); ++t) {
        const TetDegeneration& d = p.at(t);
        double la = std::log(std::abs(v[static_cast<size_t>(t)]));
        st.log_abs.push_back(d.degenerate() ? d.rate * std::log(zeta) + la : la);
    }
    st.residual = gluing_residual(p, tri, v, zeta);
    GluingEquation dropped;
    for (const GluingEquation& eq : tri.equations)
        if (eq.edge_id == sys.dropped_edge)
            dropped = eq;
    cplx s = 0.0;
    for (const GluingTerm& g : dropped.terms)
        s += static_cast<double>(g.exponent) * corner_log(p, v, zeta, g.tet, g.slot);
    st.dropped_residual = std::abs(cexpm1(reduce(s)));
    auto mus = mu_levels(p, tri, v, zeta);
    st.mu = mus[static_cast<size_t>(sys.mu_reference)];
    for (const cplx& m : mus)
        st.mu_error = std::max(st.mu_error, std::abs(m + 1.0));
    return st;
}

ContinuationTrace continue_solution(const TildeSystem& system, const Triangulation& tri, const IdealPointSolution& sol,
                                    const ContinuationOptions& opts)
{
    ContinuationTrace trace;
    std::vector<double> sched;
    for (double z : opts.schedule)
        if (z >= opts.zeta_min * (1 - 1e-12))
            sched.push_back(z);
    std::sort(sched.rbegin(), sched.rend());
    std::vector<cplx> v = sol.values;
    double prev = 0; // the bar solution sits at zeta = 0
    size_t i = 0;
    int refinements = 0;
    while (i < sched.size()) {
        double z = sched[i];
        try {
            int it = 0;
            auto nv = newton_tilde(system, tri, v, z, opts, &it);
            TraceStep st = make_step(system, tri, nv, z, it);
            if (st.residual > opts.tolerance)
                throw Error(ErrorCode::NoConvergence, "gluing residual " + std::to_string(st.residual) + " at zeta = " + std::to_string(z));
            trace.steps.push_back(st);
            v = nv;
            prev = z;
            ++i;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NoConvergence || refinements >= opts.max_refinements)
                throw;
            ++refinements;
            // shorter step: from the bar point start lower, otherwise take the midpoint
            double mid = prev == 0 ? z / 10 : std::sqrt(prev * z);
            sched.insert(sched.begin() + static_cast<std::ptrdiff_t>(i), mid);
            if (prev == 0)
                sched.erase(sched.begin() + static_cast<std::ptrdiff_t>(i) + 1);
            std::sort(sched.rbegin(), sched.rend());
        }
    }
    trace.fitted_rates = fit_rates(trace, opts.fit_points);
    for (size_t t = 0; t < trace.fitted_rates.size(); ++t)
        trace.max_rate_error = std::max(trace.max_rate_error, std::abs(trace.fitted_rates[t] - system.profile.at(static_cast<int>(t)).rate));
    for (const TraceStep& s : trace.steps) {
        trace.max_residual = std::max(trace.max_residual, s.residual);
        trace.final_mu_error = s.mu_error; // value at the smallest zeta
    }
    return trace;
}

std::vector<double> fit_rates(const ContinuationTrace& trace, int points)
{
    int m = static_cast<int>(trace.steps.size());
    if (m < 3 || points < 3)
        throw Error(ErrorCode::InsufficientSteps, "rate fit needs at least 3 steps, have " + std::to_string(m));
    int use = std::min(points, m);
    size_t nt = trace.steps.front().log_abs.size();
    std::vector<double> out;
    for (size_t t = 0; t < nt; ++t) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (int k = m - use; k < m; ++k) {
            double x = std::log(trace.steps[static_cast<size_t>(k)].zeta);
            double y = trace.steps[static_cast<size_t>(k)].log_abs[t];
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        out.push_back((use * sxy - sx * sy) / (use * sxx - sx * sx));
    }
    return out;
}

double shape_residual(const Triangulation& tri, const std::vector<cplx>& shapes)
{
    double r = 0;
    for (const GluingEquation& eq : tri.equations) {
        cplx s = 0.0;
        for (const GluingTerm& g : eq.terms)
            s += static_cast<double>(g.exponent) * log_angle(shapes[static_cast<size_t>(g.tet)], g.slot);
        r = std::max(r, std::abs(cexpm1(reduce(s))));
    }
    return r;
}

std::vector<cplx> newton_refine(const Triangulation& tri, std::vector<cplx> shapes, const HolonomyConstraint& c,
                                const ContinuationOptions& opts, int* iterations)
{
    auto check = [&](const std::vector<cplx>& z) {
        for (const cplx& x : z)
            if (std::abs(x) < opts.collision_radius || std::abs(x - 1.0) < opts.collision_radius)
                throw Error(ErrorCode::DegenerationCollision, "shape within the collision radius of 0 or 1");
    };
    check(shapes);
    cplx log_target = std::log(c.target);
    auto fun = [&](const std::vector<cplx>& z) {
        int n = static_cast<int>(tri.equations.size());
        Eigen::VectorXcd f(n);
        // the last edge equation follows from the others
        for (int k = 0; k + 1 < n; ++k) {
            cplx s = 0.0;
            for (const GluingTerm& g : tri.equations[static_cast<size_t>(k)].terms)
                s += static_cast<double>(g.exponent) * log_angle(z[static_cast<size_t>(g.tet)], g.slot);
            f(k) = cexpm1(reduce(s));
        }
        cplx s = -log_target;
        for (const CornerStep& st : c.curve.steps) {
            const BoundaryTriangle& T = tri.boundary.tris[static_cast<size_t>(st.triangle)];
            cplx l = log_angle(z[static_cast<size_t>(T.tet)], T.slot[static_cast<size_t>(st.corner)]);
            s += st.turn == Turn::Anticlockwise ? l : -l;
        }
        f(n - 1) = cexpm1(reduce(s));
        return f;
    };
    int it = 0;
    bool ok = log_newton(fun, shapes, opts.max_iter, opts.newton_tolerance, it);
    if (iterations)
        *iterations = it;
    if (!ok)
        throw Error(ErrorCode::NoConvergence, "shape Newton did not converge");
    check(shapes);
    return shapes;
}

int holonomy_order(const Triangulation& tri, const DegenerationProfile& profile, const BoundaryCurve& curve)
{
    int o = 0;
    for (const CornerStep& st : curve.steps) {
        const BoundaryTriangle& T = tri.boundary.tris[static_cast<size_t>(st.triangle)];
        const TetDegeneration& d = profile.at(T.tet);
        int k = slot_orders(d.type, d.rate)[static_cast<size_t>(T.slot[static_cast<size_t>(st.corner)])];
        o += st.turn == Turn::Anticlockwise ? k : -k;
    }
    return o;
}

PeripheralOrders peripheral_orders(const DegenerationProfile& profile, const Triangulation& tri)
{
    PeripheralOrders po;
    po.meridian = holonomy_order(tri, profile, meridian_curve(tri, 0));
    po.semi_meridian = holonomy_order(tri, profile, semi_meridian_curve(tri, 0));
    po.vertical = holonomy_order(tri, profile, vertical_curve(tri));
    po.orders["meridian"] = po.meridian;
    po.orders["semi-meridian"] = po.semi_meridian;
    po.orders["vertical"] = po.vertical;
    long long a = po.vertical, b = -po.meridian;
    long long g = std::gcd(std::llabs(a), std::llabs(b));
    if (g == 0) {
        a = 1;
        b = 0;
    } else {
        a /= g;
        b /= g;
    }
    if (b < 0 || (b == 0 && a < 0)) {
        a = -a;
        b = -b;
    }
    po.slope_m = a;
    po.slope_l = b;
    return po;
}

void write_trace_csv(const ContinuationTrace& trace, std::ostream& out)
{
    if (trace.steps.empty())
        return;
    out << "zeta";
    size_t nt = trace.steps.front().log_abs.size();
    for (size_t t = 0; t < nt; ++t)
        out << ",log_abs_" << t;
    out << ",residual,dropped_residual,mu_re,mu_im,mu_error,iterations\n";
    out.precision(17);
    for (const TraceStep& s : trace.steps) {
        out << s.zeta;
        for (double x : s.log_abs)
            out << "," << x;
        out << "," << s.residual << "," << s.dropped_residual << "," << s.mu.real() << "," << s.mu.imag() << "," << s.mu_error << ","
            << s.iterations << "\n";
    }
}

} // namespace ptb
