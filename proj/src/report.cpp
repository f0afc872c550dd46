#include "ptb/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

namespace ptb {

using nlohmann::json;

static json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

static cplx cfrom(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

SurfaceAnalysis analyze_surface(const Triangulation& tri, const EdgePath& path, int index, const Config& cfg)
{
    SurfaceAnalysis a;
    a.index = index;
    a.path = path;
    a.semi = classify_semi_fiber(tri.strip, path);
    a.orientable = path_orientable(path);
    auto fail = [&](const std::string& stage, const Error& e) {
        a.failed = true;
        a.stage = stage;
        a.error = e.code();
        a.message = e.what();
    };
    try {
        a.base_profile = path_to_yoshida(path, tri);
        a.profile = a.base_profile;
    } catch (const Error& e) {
        fail("profile", e);
        return a;
    }
    try {
        a.spheres = add_spheres(a.base_profile, tri, path);
        a.profile = orientability_and_double(a.spheres->profile, path);
    } catch (const Error& e) {
        fail("spheres", e);
        return a;
    }
    try {
        a.system = build_tilde_system(a.profile, tri);
    } catch (const Error& e) {
        fail("tilde", e);
        return a;
    }
    try {
        a.solution = solve_directions(*a.system, cfg.solver);
        a.phi_psi = compute_phi_psi(*a.spheres, path, *a.solution);
    } catch (const Error& e) {
        fail("solver", e);
        return a;
    }
    try {
        if (cfg.run_isolation) {
            a.verify = verify_solution(*a.system, *a.solution, cfg.solver);
        } else {
            VerifyReport v;
            v.residual = evaluate_bar_residual(*a.system, a.solution->values);
            if (v.residual > cfg.solver.tolerance)
                throw Error(ErrorCode::ResidualTooLarge, "bar residual " + std::to_string(v.residual));
            v.ok = true;
            a.verify = v;
        }
    } catch (const Error& e) {
        fail("verify", e);
        return a;
    }
    a.orders = peripheral_orders(a.profile, tri);
    if (cfg.run_continuation) {
        try {
            a.trace = continue_solution(*a.system, tri, *a.solution, cfg.continuation);
        } catch (const Error& e) {
            fail("continuation", e);
        }
    }
    return a;
}

json config_json(const Config& cfg)
{
    return {{"bar_tolerance", cfg.solver.tolerance},
            {"isolation", cfg.solver.isolation},
            {"branch_policy", "principal-first"},
            {"zeta_schedule", cfg.continuation.schedule},
            {"zeta_min", cfg.continuation.zeta_min},
            {"gluing_tolerance", cfg.continuation.tolerance},
            {"max_iter", cfg.continuation.max_iter},
            {"fit_points", cfg.continuation.fit_points},
            {"continuation", cfg.run_continuation},
            {"isolation_probe", cfg.run_isolation}};
}

json path_json(const FareyStrip&, const EdgePath& path, const SemiFiberInfo& semi)
{
    json j;
    j["labels"] = path.labels;
    json verts = json::array();
    for (const Vec2& v : path.vertices)
        verts.push_back({v.q, v.p});
    j["vertices"] = verts;
    json secs = json::array();
    for (const Section& s : path.sections)
        secs.push_back({{"type", section_name(s.type)}, {"fan", s.fan}, {"fan_length", s.fan_length}, {"span", s.span}, {"hinge", s.hinge}});
    j["sections"] = secs;
    j["semi_fiber"] = semi.semi_fiber;
    std::vector<bool> tight = semi.vertex_tight;
    j["tight"] = tight;
    j["edge_count"] = path.edge_count();
    return j;
}

json profile_json(const DegenerationProfile& p)
{
    json tets = json::array();
    for (int t = 0; t < p.size(); ++t)
        tets.push_back({{"tet", t}, {"type", deg_type_name(p.at(t).type)}, {"rate", p.at(t).rate}});
    return {{"tets", tets}, {"doubled", p.doubled}, {"unit", p.unit}};
}

static DegenerationProfile profile_from(const json& j)
{
    DegenerationProfile p;
    for (const json& t : j.at("tets")) {
        std::string ty = t.at("type").get<std::string>();
        DegType d = ty == "0" ? DegType::T0 : ty == "1" ? DegType::T1 : ty == "inf" ? DegType::TInf : DegType::None;
        p.tets.push_back({d, t.at("rate").get<int>()});
    }
    p.doubled = j.at("doubled").get<bool>();
    p.unit = j.at("unit").get<int>();
    return p;
}

json analysis_json(const SurfaceAnalysis& a)
{
    json j;
    j["index"] = a.index;
    j["path"] = path_json({}, a.path, a.semi);
    j["orientable"] = a.orientable;
    if (a.semi.semi_fiber)
        j["status"] = "refused";
    else
        j["status"] = a.failed ? "failed" : "solved";
    if (a.failed) {
        j["stage"] = a.stage;
        j["error"] = error_name(*a.error);
        j["message"] = a.message;
    }
    j["base_profile"] = profile_json(a.base_profile);
    if (a.spheres) {
        j["profile"] = profile_json(a.profile);
        json sites = json::array();
        for (size_t k = 0; k < a.spheres->sites.size(); ++k) {
            const LRSite& s = a.spheres->sites[k];
            auto w = window_rates(a.spheres->profile, s);
            sites.push_back({{"section", s.section},
                             {"hinge", s.hinge},
                             {"r", s.r},
                             {"s", s.s},
                             {"upper_spheres", a.spheres->counts[k].first},
                             {"lower_spheres", a.spheres->counts[k].second},
                             {"window", w},
                             {"case", five_case_name(classify_window(w))}});
        }
        j["lr_sites"] = sites;
        json chains = json::array();
        for (const LRChain& c : a.spheres->chains)
            chains.push_back({{"sites", c.sites}, {"alphas", c.alphas}, {"exact_balance", c.balance.exact}, {"k", c.balance.k}});
        j["chains"] = chains;
    }
    if (a.system) {
        json t;
        t["regular_equations"] = a.system->regular.size();
        json sph = json::array();
        for (const SphereEquation& e : a.system->sphere)
            sph.push_back({{"edge", e.edge_id}, {"min_rate", e.min_rate}, {"equation", e.str()}});
        t["sphere_equations"] = sph;
        t["mu_reference"] = a.system->mu_reference;
        t["dropped_edge"] = a.system->dropped_edge;
        t["zeta_exponent_unit"] = a.system->zeta_exponent_unit;
        j["tilde"] = t;
    }
    if (a.solution) {
        json s;
        json vars = json::array();
        for (const TildeVariable& v : a.system->variables)
            vars.push_back({{"tet", v.tet},
                            {"kind", v.kind == VarKind::Angle ? "angle" : "direction"},
                            {"rate", v.rate},
                            {"type", deg_type_name(v.type)},
                            {"value", cjson(a.solution->values[static_cast<size_t>(v.tet)])}});
        s["variables"] = vars;
        json sc = json::array();
        for (const SignChoice& c : a.solution->sign_choices)
            sc.push_back({{"tet", c.tet}, {"degree", c.degree}, {"branch", c.branch}});
        s["sign_choices"] = sc;
        json ch = json::array();
        for (const AngleChain& c : a.solution->chains)
            ch.push_back({{"kind", c.kind == ChainKind::A ? "a" : "b"}, {"members", c.members}});
        s["angle_chains"] = ch;
        s["mu"] = cjson(a.solution->mu);
        s["residual"] = a.solution->residual;
        json pp = json::array();
        for (const PhiPsi& p : a.phi_psi) {
            json e = {{"top_site", p.top_site}, {"bottom_site", p.bottom_site}, {"phi", cjson(p.phi)}, {"psi", cjson(p.psi)},
                      {"phi_context", p.phi_context}, {"psi_context", p.psi_context}};
            if (p.phi_expected)
                e["phi_expected"] = cjson(*p.phi_expected);
            if (p.psi_expected)
                e["psi_expected"] = cjson(*p.psi_expected);
            pp.push_back(e);
        }
        s["phi_psi"] = pp;
        j["solution"] = s;
    }
    if (a.verify) {
        const VerifyReport& v = *a.verify;
        auto fin = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
        j["verify"] = {{"residual", v.residual},         {"min_direction", fin(v.min_direction)}, {"min_angle_gap", fin(v.min_angle_gap)},
                       {"isolation", fin(v.isolation)}, {"alternatives", v.alternatives},     {"newton_return", v.newton_return},
                       {"ok", v.ok}};
    }
    if (a.orders)
        j["peripheral"] = {{"meridian", a.orders->meridian},
                           {"semi_meridian", a.orders->semi_meridian},
                           {"vertical", a.orders->vertical},
                           {"slope", {a.orders->slope_m, a.orders->slope_l}}};
    if (a.trace) {
        json steps = json::array();
        for (const TraceStep& s : a.trace->steps) {
            json vals = json::array();
            for (const cplx& v : s.values)
                vals.push_back(cjson(v));
            steps.push_back({{"zeta", s.zeta},
                             {"residual", s.residual},
                             {"dropped_residual", s.dropped_residual},
                             {"mu", cjson(s.mu)},
                             {"mu_error", s.mu_error},
                             {"iterations", s.iterations},
                             {"log_abs", s.log_abs},
                             {"values", vals}});
        }
        j["continuation"] = {{"steps", steps},
                             {"fitted_rates", a.trace->fitted_rates},
                             {"max_rate_error", a.trace->max_rate_error},
                             {"max_residual", a.trace->max_residual},
                             {"final_mu_error", a.trace->final_mu_error}};
    }
    return j;
}

static json header_json(const Triangulation& tri, const Config& cfg)
{
    json j;
    j["tool"] = {{"name", "ptb"}, {"version", kToolVersion}};
    j["config"] = config_json(cfg);
    j["word"] = tri.word.letters;
    Mat2 m = tri.strip.phi;
    json fans = json::array();
    for (const Fan& f : tri.strip.fans)
        fans.push_back({{"letter", std::string(1, f.letter)}, {"first", f.first}, {"ntri", f.ntri}});
    j["triangulation"] = {{"period", tri.size()},
                          {"tets", tri.size()},
                          {"edges", tri.edges.size()},
                          {"monodromy", {{m.a, m.b}, {m.c, m.d}}},
                          {"trace", m.trace()},
                          {"fans", fans},
                          {"cusp_vertices", tri.boundary.vertex_count}};
    return j;
}

json surfaces_report(const Triangulation& tri, const Config& cfg)
{
    json j = header_json(tri, cfg);
    json surf = json::array();
    auto paths = enumerate_minimal_paths(tri.strip);
    for (size_t i = 0; i < paths.size(); ++i) {
        SemiFiberInfo semi = classify_semi_fiber(tri.strip, paths[i]);
        surf.push_back({{"index", i}, {"path", path_json(tri.strip, paths[i], semi)}, {"orientable", path_orientable(paths[i])}});
    }
    j["surfaces"] = surf;
    return j;
}

json ideal_report(const Triangulation& tri, const std::vector<int>& indices, const Config& cfg, std::vector<SurfaceAnalysis>* out)
{
    auto paths = enumerate_minimal_paths(tri.strip);
    std::vector<int> idx = indices;
    if (idx.empty())
        for (size_t i = 0; i < paths.size(); ++i)
            idx.push_back(static_cast<int>(i));
    for (int i : idx)
        if (i < 0 || i >= static_cast<int>(paths.size()))
            throw Error(ErrorCode::MalformedPath, "path index " + std::to_string(i) + " out of range (" + std::to_string(paths.size()) + " paths)");
    std::vector<SurfaceAnalysis> res(idx.size());
    std::atomic<size_t> next{0};
    auto work = [&] {
        for (size_t k = next++; k < idx.size(); k = next++)
            res[k] = analyze_surface(tri, paths[static_cast<size_t>(idx[k])], idx[k], cfg);
    };
    int jobs = std::max(1, std::min(cfg.jobs, static_cast<int>(idx.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < jobs; ++t)
        pool.emplace_back(work);
    work();
    for (auto& t : pool)
        t.join();
    json j = header_json(tri, cfg);
    json surf = json::array();
    for (const SurfaceAnalysis& a : res)
        surf.push_back(analysis_json(a));
    j["surfaces"] = surf;
    if (out)
        *out = std::move(res);
    return j;
}

static std::string fmt(double x)
{
    std::ostringstream os;
    os << std::fixed << std::setprecision(1) << x;
    return os.str();
}

std::string boundary_svg(const Triangulation& tri, const DegenerationProfile& profile, const std::string& title)
{
    const double w = 150, h = 120, gap = 16, left = 70, top = 60;
    int n = tri.size();
    double width = left + 4 * (w + gap) + 20;
    double height = top + n * (h + gap) + 40;
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\"" << fmt(height) << "\" viewBox=\"0 0 "
       << fmt(width) << " " << fmt(height) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    os << "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"7\" markerHeight=\"7\" orient=\"auto\">"
          "<path d=\"M0,0 L10,5 L0,10 z\" fill=\"#b03030\"/></marker></defs>\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << fmt(left) << "\" y=\"24\" font-size=\"15\">" << title << "</text>\n";
    os << "<text x=\"" << fmt(left) << "\" y=\"42\" fill=\"#555\">cusp triangles by tet (rows) and vertex (columns); arcs run from the inf corner to the 0 corner</text>\n";
    for (int t = 0; t < n; ++t) {
        const TetDegeneration& d = profile.at(t);
        double y0 = top + t * (h + gap);
        os << "<text x=\"10\" y=\"" << fmt(y0 + h / 2) << "\">tet " << t << "</text>\n";
        os << "<text x=\"10\" y=\"" << fmt(y0 + h / 2 + 14) << "\" fill=\"#555\">" << (d.degenerate() ? std::string("k=") + std::to_string(d.rate) : "-")
           << "</text>\n";
        for (int v = 0; v < 4; ++v) {
            const BoundaryTriangle& T = tri.boundary.tris[static_cast<size_t>(4 * t + v)];
            double x0 = left + v * (w + gap);
            // corners anticlockwise: bottom left, bottom right, top
            double px[3] = {x0, x0 + w, x0 + w / 2};
            double py[3] = {y0 + h, y0 + h, y0};
            os << "<g class=\"cusp-triangle\" data-tet=\"" << t << "\" data-vertex=\"" << v << "\">\n";
            os << "<polygon points=\"" << fmt(px[0]) << "," << fmt(py[0]) << " " << fmt(px[1]) << "," << fmt(py[1]) << " " << fmt(px[2]) << ","
               << fmt(py[2]) << "\" fill=\"#f4f4f8\" stroke=\"#333\"/>\n";
            double cx = (px[0] + px[1] + px[2]) / 3, cy = (py[0] + py[1] + py[2]) / 3;
            for (int a = 0; a < 3; ++a) {
                int slot = T.slot[static_cast<size_t>(a)];
                std::string lab;
                if (!d.degenerate())
                    lab = slot == 0 ? "z" : slot == 1 ? "z'" : "z''";
                else
                    lab = slot == zero_slot(d.type) ? "0" : slot == inf_slot(d.type) ? "inf" : "1";
                double lx = px[a] + 0.22 * (cx - px[a]), ly = py[a] + 0.22 * (cy - py[a]);
                os << "<text class=\"corner\" x=\"" << fmt(lx) << "\" y=\"" << fmt(ly + 4) << "\" text-anchor=\"middle\" data-cusp-vertex=\""
                   << T.cusp_vertex[static_cast<size_t>(a)] << "\">" << lab << "</text>\n";
                os << "<text x=\"" << fmt(px[a] + (a == 0 ? -4 : a == 1 ? 4 : 0)) << "\" y=\"" << fmt(py[a] + (a == 2 ? -4 : 12))
                   << "\" fill=\"#2050a0\" font-size=\"9\" text-anchor=\"middle\">v" << T.cusp_vertex[static_cast<size_t>(a)] << "</text>\n";
            }
            if (d.degenerate()) {
                int c0 = -1, ci = -1, c1 = -1;
                for (int a = 0; a < 3; ++a) {
                    int slot = T.slot[static_cast<size_t>(a)];
                    if (slot == zero_slot(d.type))
                        c0 = a;
                    else if (slot == inf_slot(d.type))
                        ci = a;
                    else
                        c1 = a;
                }
                // the arc cuts off the ->1 corner, leaving the side at the inf corner for the side at the 0 corner
                double sx = px[c1] + 0.45 * (px[ci] - px[c1]), sy = py[c1] + 0.45 * (py[ci] - py[c1]);
                double ex = px[c1] + 0.45 * (px[c0] - px[c1]), ey = py[c1] + 0.45 * (py[c0] - py[c1]);
                double mx = px[c1] + 0.55 * ((sx + ex) / 2 - px[c1]), my = py[c1] + 0.55 * ((sy + ey) / 2 - py[c1]);
                os << "<path class=\"arc\" data-tet=\"" << t << "\" data-rate=\"" << d.rate << "\" data-from=\"" << T.cusp_vertex[static_cast<size_t>(ci)]
                   << "\" data-to=\"" << T.cusp_vertex[static_cast<size_t>(c0)] << "\" d=\"M" << fmt(sx) << "," << fmt(sy) << " Q" << fmt(mx) << ","
                   << fmt(my) << " " << fmt(ex) << "," << fmt(ey) << "\" fill=\"none\" stroke=\"#b03030\" stroke-width=\"1.6\" marker-end=\"url(#arrow)\"/>\n";
                os << "<text class=\"rate\" x=\"" << fmt(mx) << "\" y=\"" << fmt(my - 4) << "\" fill=\"#b03030\" text-anchor=\"middle\">" << d.rate
                   << "</text>\n";
            }
            os << "</g>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

VerifyOutcome verify_report(const json& report, const Config& cfg)
{
    VerifyOutcome out;
    if (!report.contains("word") || !report.contains("surfaces"))
        throw Error(ErrorCode::BadReport, "report lacks word or surfaces");
    Triangulation tri = build_triangulation(parse_word(report.at("word").get<std::string>()));
    for (const json& s : report.at("surfaces")) {
        ++out.surfaces;
        if (!s.contains("solution") || !s.contains("profile"))
            continue;
        ++out.checked;
        int idx = s.at("index").get<int>();
        DegenerationProfile p = profile_from(s.at("profile"));
        if (p.size() != tri.size())
            throw Error(ErrorCode::BadReport, "profile size does not match the word");
        std::vector<cplx> vals(static_cast<size_t>(tri.size()));
        for (const json& v : s.at("solution").at("variables"))
            vals.at(v.at("tet").get<size_t>()) = cfrom(v.at("value"));
        try {
            TildeSystem sys = build_tilde_system(p, tri);
            double r = evaluate_bar_residual(sys, vals);
            out.max_bar_residual = std::max(out.max_bar_residual, r);
            if (r > cfg.solver.tolerance)
                out.problems.push_back("surface " + std::to_string(idx) + ": bar residual " + std::to_string(r));
        } catch (const Error& e) {
            out.problems.push_back("surface " + std::to_string(idx) + ": " + e.what());
            continue;
        }
        if (!s.contains("continuation"))
            continue;
        for (const json& st : s.at("continuation").at("steps")) {
            std::vector<cplx> v;
            for (const json& x : st.at("values"))
                v.push_back(cfrom(x));
            double z = st.at("zeta").get<double>();
            double g = gluing_residual(p, tri, v, z);
            out.max_gluing_residual = std::max(out.max_gluing_residual, g);
            if (g > cfg.continuation.tolerance)
                out.problems.push_back("surface " + std::to_string(idx) + ": gluing residual " + std::to_string(g) + " at zeta " + std::to_string(z));
        }
    }
    return out;
}

static void validate_at(const json& root, const json& schema, const json& doc, const std::string& where, std::vector<std::string>& errs)
{
    if (schema.contains("$ref")) {
        std::string ref = schema.at("$ref").get<std::string>();
        const std::string prefix = "#/definitions/";
        if (ref.rfind(prefix, 0) != 0 || !root.contains("definitions") || !root["definitions"].contains(ref.substr(prefix.size()))) {
            errs.push_back(where + ": unresolved $ref " + ref);
            return;
        }
        validate_at(root, root["definitions"][ref.substr(prefix.size())], doc, where, errs);
        return;
    }
    if (schema.contains("type")) {
        auto is = [&](const std::string& t) {
            if (t == "object")
                return doc.is_object();
            if (t == "array")
                return doc.is_array();
            if (t == "string")
                return doc.is_string();
            if (t == "integer")
                return doc.is_number_integer();
            if (t == "number")
                return doc.is_number();
            if (t == "boolean")
                return doc.is_boolean();
            if (t == "null")
                return doc.is_null();
            return false;
        };
        const json& ty = schema.at("type");
        bool ok = false;
        if (ty.is_array()) {
            for (const json& t : ty)
                ok = ok || is(t.get<std::string>());
        } else {
            ok = is(ty.get<std::string>());
        }
        if (!ok) {
            errs.push_back(where + ": expected type " + ty.dump());
            return;
        }
    }
    if (schema.contains("enum")) {
        const json& e = schema.at("enum");
        if (std::find(e.begin(), e.end(), doc) == e.end())
            errs.push_back(where + ": value " + doc.dump() + " not in enum");
    }
    if (schema.contains("minimum") && doc.is_number() && doc.get<double>() < schema.at("minimum").get<double>())
        errs.push_back(where + ": below minimum");
    if (doc.is_object()) {
        if (schema.contains("required"))
            for (const json& r : schema.at("required"))
                if (!doc.contains(r.get<std::string>()))
                    errs.push_back(where + ": missing " + r.get<std::string>());
        if (schema.contains("properties"))
            for (auto& [k, sub] : schema.at("properties").items())
                if (doc.contains(k))
                    validate_at(root, sub, doc.at(k), where + "/" + k, errs);
    }
    if (doc.is_array() && schema.contains("items"))
        for (size_t i = 0; i < doc.size(); ++i)
            validate_at(root, schema.at("items"), doc[i], where + "/" + std::to_string(i), errs);
}

std::vector<std::string> validate_json(const json& schema, const json& doc)
{
    std::vector<std::string> errs;
    validate_at(schema, schema, doc, "", errs);
    return errs;
}

} // namespace ptb
