#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ptb/continuation.hpp"
#include "ptb/errors.hpp"

namespace ptb {

inline constexpr const char* kToolVersion = "0.3.0";

struct Config {
    SolverOptions solver;
    ContinuationOptions continuation;
    bool run_continuation = true;
    bool run_isolation = true;
    int jobs = 1;
};

// everything computed for one path; stops at the first failing stage
struct SurfaceAnalysis {
    int index = 0;
    EdgePath path;
    SemiFiberInfo semi;
    DegenerationProfile base_profile;
    DegenerationProfile profile; // spheres added, doubled if needed
    std::optional<SphereResult> spheres;
    bool orientable = true;
    std::optional<TildeSystem> system;
    std::optional<IdealPointSolution> solution;
    std::optional<VerifyReport> verify;
    std::vector<PhiPsi> phi_psi;
    std::optional<ContinuationTrace> trace;
    std::optional<PeripheralOrders> orders;
    bool failed = false;
    std::string stage; // stage of the failure
    std::optional<ErrorCode> error;
    std::string message;
};

SurfaceAnalysis analyze_surface(const Triangulation& tri, const EdgePath& path, int index, const Config& cfg);

nlohmann::json config_json(const Config& cfg);
nlohmann::json path_json(const FareyStrip& strip, const EdgePath& path, const SemiFiberInfo& semi);
nlohmann::json profile_json(const DegenerationProfile& p);
nlohmann::json analysis_json(const SurfaceAnalysis& a);

// enumeration only
nlohmann::json surfaces_report(const Triangulation& tri, const Config& cfg);
// full pipeline for the listed path indices (all when empty), in index order
nlohmann::json ideal_report(const Triangulation& tri, const std::vector<int>& indices, const Config& cfg,
                            std::vector<SurfaceAnalysis>* out = nullptr);

std::string boundary_svg(const Triangulation& tri, const DegenerationProfile& profile, const std::string& title);

struct VerifyOutcome {
    int surfaces = 0;
    int checked = 0;
    double max_bar_residual = 0;
    double max_gluing_residual = 0;
    std::vector<std::string> problems;
    bool ok() const { return problems.empty(); }
};

// recompute residuals from the values stored in a report
VerifyOutcome verify_report(const nlohmann::json& report, const Config& cfg);

// checks a document against the subset of JSON Schema used in docs/report.schema.json
// (type, required, properties, items, enum, minimum, $ref to #/definitions)
std::vector<std::string> validate_json(const nlohmann::json& schema, const nlohmann::json& doc);

} // namespace ptb
