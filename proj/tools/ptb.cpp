// ptb: surfaces and ideal points of punctured-torus bundles from a monodromy word
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ptb/report.hpp"

using namespace ptb;
using nlohmann::json;

namespace {

enum Exit { Ok = 0, InputError = 2, Refused = 3, NumericFailure = 4 };

void print_surfaces(const json& rep)
{
    std::cout << "word " << rep["word"].get<std::string>() << "  period " << rep["triangulation"]["period"] << "  trace "
              << rep["triangulation"]["trace"] << "\n";
    for (const json& s : rep["surfaces"]) {
        std::cout << "  [" << s["index"] << "] labels " << s["path"]["labels"].dump() << "  sections";
        for (const json& sec : s["path"]["sections"])
            std::cout << " " << sec["type"].get<std::string>();
        std::cout << (s["path"]["semi_fiber"].get<bool>() ? "  semi-fiber" : "") << (s["orientable"].get<bool>() ? "" : "  non-orientable");
        if (s.contains("status")) {
            std::cout << "  " << s["status"].get<std::string>();
            if (s.contains("stage"))
                std::cout << " (" << s["stage"].get<std::string>() << ": " << s["message"].get<std::string>() << ")";
            if (s.contains("solution"))
                std::cout << "  bar residual " << s["solution"]["residual"].get<double>();
            if (s.contains("continuation"))
                std::cout << "  rate error " << s["continuation"]["max_rate_error"].get<double>() << "  mu error "
                          << s["continuation"]["final_mu_error"].get<double>();
            if (s.contains("peripheral"))
                std::cout << "  slope " << s["peripheral"]["slope"].dump();
        }
        std::cout << "\n";
    }
}

int classify_exit(const json& rep, bool single)
{
    int code = Ok;
    for (const json& s : rep["surfaces"]) {
        std::string st = s.value("status", "solved");
        if (st == "failed")
            code = NumericFailure;
        else if (st == "refused" && single && code == Ok)
            code = Refused;
    }
    return code;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Incompressible surfaces and ideal points of punctured-torus bundles"};
    app.require_subcommand(1);

    Config cfg;
    std::string word;
    bool as_json = false;
    int index = -1;
    std::string trace_csv;
    std::string out_file;
    std::string report_file;

    auto common = [&](CLI::App* sub) {
        sub->add_option("word", word, "monodromy word in L and R")->required();
        sub->add_flag("--json", as_json, "write the JSON report to standard output");
    };
    auto numeric = [&](CLI::App* sub) {
        sub->add_option("--zeta-min", cfg.continuation.zeta_min, "smallest zeta in the continuation schedule")->envname("PTB_ZETA_MIN");
        sub->add_option("--schedule", cfg.continuation.schedule, "zeta schedule")->envname("PTB_SCHEDULE")->delimiter(',');
        sub->add_option("--tolerance", cfg.solver.tolerance, "bar residual tolerance")->envname("PTB_TOLERANCE");
        sub->add_option("--gluing-tolerance", cfg.continuation.tolerance, "gluing residual tolerance")->envname("PTB_GLUING_TOLERANCE");
        sub->add_option("--isolation", cfg.solver.isolation, "minimum distance to alternative solutions")->envname("PTB_ISOLATION");
        sub->add_option("--max-iter", cfg.continuation.max_iter, "Newton iteration cap")->envname("PTB_MAX_ITER");
        sub->add_option("--jobs,-j", cfg.jobs, "surfaces analysed in parallel")->envname("PTB_JOBS");
        sub->add_flag("!--no-continuation", cfg.run_continuation, "skip the continuation stage");
        sub->add_flag("!--no-isolation", cfg.run_isolation, "skip the isolation probe");
    };

    auto* surfaces = app.add_subcommand("surfaces", "list the minimal invariant paths");
    common(surfaces);

    auto* ideal = app.add_subcommand("ideal", "run the ideal-point pipeline");
    common(ideal);
    numeric(ideal);
    ideal->add_option("--index,-i", index, "path index (all paths when omitted)");
    ideal->add_option("--trace-csv", trace_csv, "write the continuation trace of the chosen path as CSV");

    auto* svg = app.add_subcommand("svg", "boundary picture of one surface");
    common(svg);
    svg->add_option("--index,-i", index, "path index")->required();
    svg->add_option("--output,-o", out_file, "output file (standard output by default)");

    auto* verify = app.add_subcommand("verify", "recheck residuals stored in a JSON report");
    verify->add_option("report", report_file, "report file")->required()->check(CLI::ExistingFile);
    numeric(verify);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? Ok : InputError;
    }

    try {
        if (*verify) {
            std::ifstream in(report_file);
            json rep;
            try {
                rep = json::parse(in);
            } catch (const json::exception& e) {
                std::cerr << "BadReport: " << e.what() << "\n";
                return InputError;
            }
            VerifyOutcome v = verify_report(rep, cfg);
            std::cout << "surfaces " << v.surfaces << "  checked " << v.checked << "  max bar residual " << v.max_bar_residual
                      << "  max gluing residual " << v.max_gluing_residual << "\n";
            for (const auto& p : v.problems)
                std::cout << "  " << p << "\n";
            return v.ok() ? Ok : NumericFailure;
        }

        Triangulation tri = build_triangulation(parse_word(word));

        if (*surfaces) {
            json rep = surfaces_report(tri, cfg);
            if (as_json)
                std::cout << rep.dump(2) << "\n";
            else
                print_surfaces(rep);
            return Ok;
        }

        if (*svg) {
            auto paths = enumerate_minimal_paths(tri.strip);
            if (index < 0 || index >= static_cast<int>(paths.size()))
                throw Error(ErrorCode::MalformedPath, "path index out of range");
            Config light = cfg;
            light.run_continuation = false;
            light.run_isolation = false;
            SurfaceAnalysis a = analyze_surface(tri, paths[static_cast<size_t>(index)], index, light);
            if (a.semi.semi_fiber) {
                std::cerr << "SemiFiber: path " << index << " is tight everywhere; no finite set of spheres satisfies the minimum-rate condition\n";
                return Refused;
            }
            if (a.failed) {
                std::cerr << "[" << a.stage << "] " << a.message << "\n";
                return NumericFailure;
            }
            std::string doc = boundary_svg(tri, a.profile, tri.word.letters + " path " + std::to_string(index));
            if (out_file.empty()) {
                std::cout << doc;
            } else {
                std::ofstream(out_file) << doc;
            }
            return Ok;
        }

        std::vector<int> idx;
        if (index >= 0)
            idx.push_back(index);
        std::vector<SurfaceAnalysis> res;
        json rep = ideal_report(tri, idx, cfg, &res);
        if (!trace_csv.empty()) {
            for (const SurfaceAnalysis& a : res)
                if (a.trace) {
                    std::ofstream out(trace_csv);
                    write_trace_csv(*a.trace, out);
                    break;
                }
        }
        if (as_json)
            std::cout << rep.dump(2) << "\n";
        else
            print_surfaces(rep);
        int code = classify_exit(rep, index >= 0);
        if (code == Refused)
            std::cerr << "SemiFiber: path " << index << " is tight everywhere; its LR chains never end, so no finite number of spheres can be added\n";
        for (const SurfaceAnalysis& a : res)
            if (a.failed && !a.semi.semi_fiber)
                std::cerr << "[" << a.stage << "] path " << a.index << ": " << a.message << "\n";
        return code;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        switch (e.code()) {
        case ErrorCode::EmptyWord:
        case ErrorCode::InvalidCharacter:
        case ErrorCode::NotHyperbolic:
        case ErrorCode::MalformedPath:
        case ErrorCode::BadReport:
            return InputError;
        case ErrorCode::SemiFiber:
            return Refused;
        default:
            return NumericFailure;
        }
    }
}
