#include "ptb/tilde.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "json.hpp"
#include "ptb/errors.hpp"

namespace ptb {

const char* coeff_name(Coeff c)
{
    switch (c) {
    case Coeff::Y:
        return "y";
    case Coeff::MinusInvY:
        return "-1/y";
    case Coeff::One:
        return "1";
    case Coeff::Z:
        return "z";
    case Coeff::ZMinusOneOverZ:
        return "(z-1)/z";
    case Coeff::InvOneMinusZ:
        return "1/(1-z)";
    }
    return "?";
}

LeadingTerm leading_term(const TildeVariable& v, int slot, int exponent)
{
    LeadingTerm t;
    t.var = v.tet;
    t.slot = slot;
    t.exponent = exponent;
    if (v.kind == VarKind::Angle) {
        t.coeff = slot == 0 ? Coeff::Z : slot == 1 ? Coeff::ZMinusOneOverZ : Coeff::InvOneMinusZ;
        return t;
    }
    if (slot == zero_slot(v.type)) {
        t.coeff = Coeff::Y;
        t.zeta_order = v.rate;
    } else if (slot == inf_slot(v.type)) {
        t.coeff = Coeff::MinusInvY;
        t.zeta_order = -v.rate;
    } else {
        t.coeff = Coeff::One;
    }
    return t;
}

cplx coeff_value(Coeff c, cplx x)
{
    switch (c) {
    case Coeff::Y:
        return x;
    case Coeff::MinusInvY:
        if (x == 0.0)
            throw Error(ErrorCode::DivisionByZero, "direction variable is 0");
        return -1.0 / x;
    case Coeff::One:
        return 1.0;
    case Coeff::Z:
        return x;
    case Coeff::ZMinusOneOverZ:
        if (x == 0.0)
            throw Error(ErrorCode::DivisionByZero, "angle variable is 0");
        return (x - 1.0) / x;
    case Coeff::InvOneMinusZ:
        if (x == 1.0)
            throw Error(ErrorCode::DivisionByZero, "angle variable is 1");
        return 1.0 / (1.0 - x);
    }
    return 1.0;
}

static std::vector<TildeVariable> make_variables(const DegenerationProfile& p)
{
    std::vector<TildeVariable> v;
    for (int t = 0; t < p.size(); ++t) {
        const TetDegeneration& d = p.at(t);
        v.push_back({t, d.degenerate() ? VarKind::Direction : VarKind::Angle, d.rate, d.degenerate() ? d.type : DegType::None});
    }
    return v;
}

std::vector<MuMeasurement> mu_measurements(const TildeSystem& system, const Triangulation& tri, const DegenerationProfile&)
{
    std::vector<MuMeasurement> out;
    for (int j = 0; j < tri.size(); ++j) {
        MuMeasurement m;
        m.level = j;
        int ord = 0;
        for (const GluingTerm& g : semi_meridian_monomial(tri, j)) {
            LeadingTerm t = leading_term(system.variables[static_cast<size_t>(g.tet)], g.slot, g.exponent);
            ord += t.zeta_order * t.exponent;
            m.factors.push_back(t);
        }
        m.zeta_order = -ord;
        out.push_back(m);
    }
    return out;
}

TildeSystem build_tilde_system(const DegenerationProfile& profile, const Triangulation& tri)
{
    TildeSystem sys;
    sys.profile = profile;
    sys.zeta_exponent_unit = profile.unit;
    sys.variables = make_variables(profile);
    for (const GluingEquation& eq : tri.equations) {
        bool sphere = is_sphere_vertex(profile, eq);
        sys.sphere_edge.push_back(sphere);
        if (sphere) {
            SphereEquation s;
            s.edge_id = eq.edge_id;
            std::map<int, int> mult;
            for (const GluingTerm& g : eq.terms)
                mult[g.tet] += g.exponent;
            s.min_rate = -1;
            for (auto& [t, m] : mult)
                if (s.min_rate < 0 || profile.at(t).rate < s.min_rate)
                    s.min_rate = profile.at(t).rate;
            for (auto& [t, m] : mult)
                if (profile.at(t).rate == s.min_rate)
                    s.terms.push_back({t, -m}); // (1 - zeta^k y)^m = 1 - m zeta^k y + ...
            if (s.terms.size() == 1)
                throw Error(ErrorCode::UniqueMinimum, "sphere vertex at edge " + std::to_string(eq.edge_id) + " has a unique minimum rate");
            sys.sphere.push_back(s);
            continue;
        }
        RegularEquation r;
        r.edge_id = eq.edge_id;
        int oa = 0, ob = 0;
        bool zero_inf = false;
        for (const GluingTerm& g : eq.terms) {
            LeadingTerm t = leading_term(sys.variables[static_cast<size_t>(g.tet)], g.slot, g.exponent);
            if (t.zeta_order < 0) {
                t.exponent = -t.exponent;
                ob += t.zeta_order * t.exponent;
                r.side_b.push_back(t);
            } else {
                oa += t.zeta_order * t.exponent;
                r.side_a.push_back(t);
            }
            if (t.zeta_order != 0)
                zero_inf = true;
        }
        if (oa != ob)
            throw Error(ErrorCode::OrderImbalance, "edge " + std::to_string(eq.edge_id) + " sides have orders " + std::to_string(oa) + " and " + std::to_string(ob));
        r.order = oa;
        if (zero_inf)
            sys.dropped_edge = eq.edge_id;
        sys.regular.push_back(r);
    }
    if (sys.dropped_edge < 0 && !sys.regular.empty())
        sys.dropped_edge = sys.regular.back().edge_id;
    sys.mu = mu_measurements(sys, tri, profile);
    sys.mu_reference = 0;
    return sys;
}

cplx side_value(const std::vector<LeadingTerm>& side, const std::vector<cplx>& values)
{
    cplx p = 1.0;
    for (const LeadingTerm& t : side)
        p *= std::pow(coeff_value(t.coeff, values[static_cast<size_t>(t.var)]), t.exponent);
    return p;
}

cplx regular_residual(const RegularEquation& eq, const std::vector<cplx>& values)
{
    return side_value(eq.side_a, values) - side_value(eq.side_b, values);
}

cplx sphere_residual(const SphereEquation& eq, const std::vector<cplx>& values)
{
    cplx s = 0.0;
    for (const LinearTerm& t : eq.terms)
        s += static_cast<double>(t.coeff) * values[static_cast<size_t>(t.var)];
    return s;
}

cplx mu_value(const MuMeasurement& m, const std::vector<cplx>& values)
{
    cplx p = side_value(m.factors, values);
    if (p == 0.0)
        throw Error(ErrorCode::DivisionByZero, "semi-meridian product vanishes");
    return -1.0 / p;
}

double evaluate_bar_residual(const TildeSystem& system, const std::vector<cplx>& values)
{
    if (values.size() != system.variables.size())
        throw Error(ErrorCode::UnsolvedVariable, "assignment does not cover every variable");
    for (const TildeVariable& v : system.variables) {
        cplx x = values[static_cast<size_t>(v.tet)];
        if (v.kind == VarKind::Direction && x == 0.0)
            throw Error(ErrorCode::DivisionByZero, "direction variable of tet " + std::to_string(v.tet) + " is 0");
        if (v.kind == VarKind::Angle && (x == 0.0 || x == 1.0))
            throw Error(ErrorCode::DivisionByZero, "angle variable of tet " + std::to_string(v.tet) + " is 0 or 1");
    }
    double r = 0;
    for (const RegularEquation& e : system.regular)
        r = std::max(r, std::abs(regular_residual(e, values)));
    for (const SphereEquation& e : system.sphere)
        r = std::max(r, std::abs(sphere_residual(e, values)));
    for (const MuMeasurement& m : system.mu)
        r = std::max(r, std::abs(mu_value(m, values) + 1.0));
    return r;
}

std::string SphereEquation::str() const
{
    std::ostringstream os;
    bool first = true;
    for (const LinearTerm& t : terms) {
        int c = t.coeff;
        if (first)
            os << (c < 0 ? "-" : "");
        else
            os << (c < 0 ? " - " : " + ");
        if (std::abs(c) != 1)
            os << std::abs(c);
        os << "y" << t.var;
        first = false;
    }
    os << " = 0";
    return os.str();
}

static nlohmann::json side_json(const std::vector<LeadingTerm>& side)
{
    nlohmann::json a = nlohmann::json::array();
    for (const LeadingTerm& t : side)
        a.push_back({{"tet", t.var}, {"slot", t.slot}, {"exponent", t.exponent}, {"order", t.zeta_order}, {"coeff", coeff_name(t.coeff)}});
    return a;
}

std::string tilde_json(const TildeSystem& s)
{
    using nlohmann::json;
    json j;
    json vars = json::array();
    for (const TildeVariable& v : s.variables)
        vars.push_back({{"tet", v.tet}, {"kind", v.kind == VarKind::Angle ? "angle" : "direction"}, {"rate", v.rate}, {"type", deg_type_name(v.type)}});
    j["variables"] = vars;
    json reg = json::array();
    for (const RegularEquation& e : s.regular)
        reg.push_back({{"edge", e.edge_id}, {"order", e.order}, {"side_a", side_json(e.side_a)}, {"side_b", side_json(e.side_b)}});
    j["regular"] = reg;
    json sph = json::array();
    for (const SphereEquation& e : s.sphere) {
        json terms = json::array();
        for (const LinearTerm& t : e.terms)
            terms.push_back({{"tet", t.var}, {"coeff", t.coeff}});
        sph.push_back({{"edge", e.edge_id}, {"min_rate", e.min_rate}, {"terms", terms}, {"text", e.str()}});
    }
    j["sphere"] = sph;
    json mu = json::array();
    for (const MuMeasurement& m : s.mu)
        mu.push_back({{"level", m.level}, {"order", m.zeta_order}, {"factors", side_json(m.factors)}});
    j["mu"] = mu;
    j["mu_reference"] = s.mu_reference;
    j["zeta_exponent_unit"] = s.zeta_exponent_unit;
    j["dropped_edge"] = s.dropped_edge;
    return j.dump(2);
}

} // namespace ptb
