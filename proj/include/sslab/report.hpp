#pragma once

#include "sslab/classify.hpp"
#include "sslab/perturb.hpp"
#include "sslab/walk.hpp"

#include <json.hpp>

#include <string>

namespace sslab::report {

inline constexpr const char* kSchemaVersion = "1.0.0";

/// {schemaVersion, command, timestampUtc, payload}
nlohmann::json envelope(const std::string& command, nlohmann::json payload);

std::string timestamp_utc();

nlohmann::json to_json(const classify::ScalingFit& fit);
nlohmann::json to_json(const classify::InstanceMetrics& m);
nlohmann::json to_json(const perturb::InterlacingAudit& a);
nlohmann::json to_json(const perturb::DeltaBoundAudit& a);
nlohmann::json to_json(const perturb::IdentityAudit& a);
nlohmann::json to_json(const perturb::WeylAudit& a);
nlohmann::json to_json(const classify::InstanceAnalysis& a);
nlohmann::json to_json(const classify::NecessaryDiagnostics& d);
nlohmann::json to_json(const classify::Verdict& v);
nlohmann::json to_json(const classify::FamilyReport& r);

/// Columns t, f_direct, f_spectral, marker; the critical time is inserted as
/// an extra row tagged "t_star".
std::string curve_csv(const walk::FidelityCurve& curve);

/// Structural check of an envelope against the published report schema.
bool validate_envelope(const nlohmann::json& doc, std::string* error = nullptr);

} // namespace sslab::report
