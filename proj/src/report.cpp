#include "sslab/report.hpp"

#include "sslab/format.hpp"

#include <chrono>
#include <ctime>
#include <sstream>

namespace sslab::report {

using nlohmann::json;

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t seconds = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&seconds, &tm);
    char buffer[32];
    std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buffer;
}

json envelope(const std::string& command, json payload) {
    return json{{"schemaVersion", kSchemaVersion},
                {"command", command},
                {"timestampUtc", timestamp_utc()},
                {"payload", std::move(payload)}};
}

json to_json(const classify::ScalingFit& fit) {
    return json{{"quantity", fit.quantity},
                {"model", classify::fit_model_name(fit.model)},
                {"exponent", fit.exponent},
                {"rSquared", fit.r_squared},
                {"samples", fit.samples},
                {"span", fit.span},
                {"valid", fit.valid},
                {"note", fit.note}};
}

json to_json(const classify::InstanceMetrics& m) {
    return json{{"familySpec", m.family_spec},
                {"sizeParam", m.size_param},
                {"numVertices", m.num_vertices},
                {"eps1", m.eps1},
                {"eps2", m.eps2},
                {"delta2", m.delta2},
                {"s1", m.s1},
                {"s2", m.s2},
                {"s3", m.s3},
                {"gamma", m.gamma},
                {"zeta1", m.zeta1},
                {"zeta2", m.zeta2},
                {"deltaPlus", m.delta_plus},
                {"deltaMinus", m.delta_minus},
                {"tStar", m.t_star},
                {"fAtTStar", m.f_at_t_star},
                {"peakValue", m.peak_value},
                {"peakTime", m.peak_time},
                {"shadowRatio", m.shadow_ratio},
                {"iAlpha", m.i_alpha},
                {"gapSkip", m.gap_skip},
                {"densePath", m.dense_path},
                {"ok", m.ok},
                {"auditFlags", m.audit_flags}};
}

json to_json(const perturb::InterlacingAudit& a) {
    return json{{"strictExpected", a.strict_expected},
                {"margin", a.margin},
                {"nonStrict", a.non_strict},
                {"pass", a.pass}};
}

json to_json(const perturb::DeltaBoundAudit& a) {
    return json{{"applicable", a.applicable},
                {"skipReason", a.skip_reason},
                {"deltaPlus", a.delta_plus},
                {"deltaMinus", a.delta_minus},
                {"betaPlus", a.beta_plus},
                {"betaMinus", a.beta_minus},
                {"ratioPlus", a.ratio_plus},
                {"ratioMinus", a.ratio_minus},
                {"lowerStrict", a.lower_strict},
                {"upperOk", a.upper_ok},
                {"minusOk", a.minus_ok},
                {"pass", a.pass}};
}

json to_json(const perturb::IdentityAudit& a) {
    json identities = json::array();
    for (const auto& id : a.identities) {
        identities.push_back(json{{"name", id.name},
                                  {"residual", id.residual},
                                  {"clustersChecked", id.clusters_checked},
                                  {"clustersSkipped", id.clusters_skipped}});
    }
    return json{{"identities", identities}, {"maxResidual", a.max_residual}, {"pass", a.pass}};
}

json to_json(const perturb::WeylAudit& a) {
    return json{{"worstSlack", a.worst_slack},
                {"inequalitiesChecked", a.inequalities_checked},
                {"violations", a.violations},
                {"pass", a.pass}};
}

json to_json(const classify::InstanceAnalysis& a) {
    json doc{{"metrics", to_json(a.metrics)},
             {"interlacing", to_json(a.interlacing)},
             {"deltaBounds", to_json(a.delta_bounds)},
             {"identityRan", a.identity_ran},
             {"secularVsDense", a.secular_vs_dense}};
    if (a.identity_ran) doc["identity"] = to_json(a.identity);
    if (!a.error.empty()) doc["error"] = a.error;
    return doc;
}

json to_json(const classify::NecessaryDiagnostics& d) {
    return json{{"caseITrend", to_json(d.case_i_trend)},
                {"caseI", d.case_i},
                {"caseIITrend", to_json(d.case_ii_trend)},
                {"caseII", d.case_ii},
                {"caseIII", d.case_iii},
                {"aboveS1Trend", to_json(d.above_s1_trend)},
                {"aboveS1", d.above_s1},
                {"iAlphaLargest", d.i_alpha_largest},
                {"aroundS1", d.around_s1},
                {"triggered", d.triggered}};
}

json to_json(const classify::Verdict& v) {
    return json{{"groverian", classify::groverian_name(v.groverian)},
                {"assumptionHolds", v.assumption_holds},
                {"assumptionFit", to_json(v.assumption_fit)},
                {"criterionHolds", v.criterion_holds},
                {"ratioMin", v.ratio_min},
                {"ratioMax", v.ratio_max},
                {"ratioTrend", to_json(v.ratio_trend)},
                {"diagnostics", v.diagnostics},
                {"gammaUsed", v.gamma_used},
                {"note", v.note}};
}

json to_json(const classify::FamilyReport& r) {
    json analyses = json::array();
    for (const auto& a : r.analyses) analyses.push_back(to_json(a));
    return json{{"family", r.family.to_string()},
                {"analyses", analyses},
                {"diagnostics", to_json(r.diagnostics)},
                {"verdict", to_json(r.verdict)},
                {"eps1Fit", to_json(r.eps1_fit)},
                {"delta2Fit", to_json(r.delta2_fit)},
                {"delta2ParamFit", to_json(r.delta2_param_fit)},
                {"s1Fit", to_json(r.s1_fit)}};
}

std::string curve_csv(const walk::FidelityCurve& curve) {
    std::ostringstream out;
    out << "t,f_direct,f_spectral,marker\n";
    bool marker_written = false;
    auto write_marker = [&]() {
        out << format::number(curve.t_star) << ',' << format::number(curve.f_at_t_star) << ','
            << format::number(curve.f_at_t_star) << ",t_star\n";
        marker_written = true;
    };
    for (size_t i = 0; i < curve.times.size(); ++i) {
        if (!marker_written && curve.times[i] > curve.t_star) write_marker();
        out << format::number(curve.times[i]) << ',' << format::number(curve.direct[i]) << ','
            << format::number(curve.spectral[i]) << ",\n";
    }
    if (!marker_written) write_marker();
    return out.str();
}

bool validate_envelope(const json& doc, std::string* error) {
    auto fail = [&](const std::string& message) {
        if (error) *error = message;
        return false;
    };
    if (!doc.is_object()) return fail("envelope is not an object");
    for (const char* key : {"schemaVersion", "command", "timestampUtc", "payload"}) {
        if (!doc.contains(key)) return fail(std::string("missing field: ") + key);
    }
    if (!doc["schemaVersion"].is_string()) return fail("schemaVersion must be a string");
    const std::string version = doc["schemaVersion"].get<std::string>();
    int major = 0, minor = 0, patch = 0;
    if (std::sscanf(version.c_str(), "%d.%d.%d", &major, &minor, &patch) != 3) {
        return fail("schemaVersion is not semantic (x.y.z): " + version);
    }
    if (!doc["command"].is_string()) return fail("command must be a string");
    if (!doc["timestampUtc"].is_string()) return fail("timestampUtc must be a string");
    const json& payload = doc["payload"];
    if (!payload.is_object()) return fail("payload must be an object");
    if (!payload.contains("kind") || !payload["kind"].is_string()) {
        return fail("payload.kind missing");
    }
    const std::string kind = payload["kind"].get<std::string>();
    auto require = [&](std::initializer_list<const char*> keys) {
        for (const char* key : keys) {
            if (!payload.contains(key)) return fail("payload missing field: " + std::string(key));
        }
        return true;
    };
    if (kind == "instance_analysis") {
        return require({"analysis", "familySpec"});
    }
    if (kind == "fidelity_curve") {
        return require({"familySpec", "tStar", "peakValue", "peakTime", "points", "tMax",
                        "maxMethodDeviation"});
    }
    if (kind == "family_report") {
        return require({"report"});
    }
    if (kind == "families_table") {
        return require({"families", "csv"});
    }
    return fail("unknown payload kind: " + kind);
}

} // namespace sslab::report
