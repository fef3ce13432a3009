#pragma once

#include "sslab/graphs.hpp"
#include "sslab/perturb.hpp"
#include "sslab/spectra.hpp"
#include "sslab/walk.hpp"

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sslab::classify {

/// Everything the family sweeps and scaling fits consume for one instance.
struct InstanceMetrics {
    std::string family_spec;
    int size_param = 0;
    int num_vertices = 0;
    double eps1 = 0, eps2 = 0;
    double delta2 = 0;
    double s1 = 0, s2 = 0, s3 = 0;
    double gamma = 0;
    double zeta1 = 0, zeta2 = 0;
    double delta_plus = 0, delta_minus = 0;
    double t_star = 0, f_at_t_star = 0;
    double peak_value = 0, peak_time = 0;
    double shadow_ratio = 0; // max_{r>=2} eps_r^2 / eps_1^2
    std::map<std::string, int> i_alpha; // alpha -> |I_alpha|, keys "1.25","1.50","1.75"
    bool gap_skip = false; // eps_1 falls strictly between consecutive gaps gamma - zeta_m
    bool dense_path = true;
    bool ok = false;
    std::vector<std::string> audit_flags;
};

struct PipelineOptions {
    graphs::Convention convention = graphs::Convention::unit_interval;
    std::optional<double> gamma; // fixed override; default is S_1
    // Per-instance override, e.g. S_1 + n demonstrations. Wins over `gamma`.
    std::function<double(double s1, const graphs::GraphInstance&)> gamma_rule;
    int target_vertex = 0;
    double cluster_tolerance = spectra::kDefaultClusterTolerance;
    int dense_threshold = 2048;
    int size_cap = graphs::kDefaultSizeCap;
    double horizon_multiple = 4.0;
};

/// Full single-instance pipeline output: metrics plus the audit verdicts the
/// CLI and acceptance suite report.
struct InstanceAnalysis {
    InstanceMetrics metrics;
    perturb::InterlacingAudit interlacing;
    perturb::DeltaBoundAudit delta_bounds;
    perturb::IdentityAudit identity; // populated on the dense path only
    bool identity_ran = false;
    double secular_vs_dense = 0.0; // max top-two deviation between the two routes
    std::string error;             // non-empty when the pipeline failed
};

InstanceAnalysis analyze_graph(const graphs::GraphInstance& g, const PipelineOptions& opt = {});

/// Builds and analyzes one family member per size; per-size failures are
/// recorded and the sweep continues.
std::vector<InstanceAnalysis> sweep_family(const graphs::FamilySpec& family,
                                           const std::vector<int>& sizes,
                                           const PipelineOptions& opt = {});

enum class FitModel { power_in_vertices, power_in_param, exponential_in_param };

std::string fit_model_name(FitModel m);

struct ScalingFit {
    std::string quantity;
    FitModel model = FitModel::power_in_vertices;
    double exponent = 0.0;
    double r_squared = 0.0;
    int samples = 0;
    double span = 0.0; // max/min of the abscissa
    bool valid = false;
    std::string note;
};

/// Named metric accessor; understands derived ratios such as
/// "eps1_over_sqrt_s1_delta2" and "s2_over_s1_sq".
double metric_value(const InstanceMetrics& m, const std::string& quantity);

/// Least-squares slope of log(quantity) against log N, log(size param) or the
/// raw size param. Requires >= 5 usable sizes; an abscissa span below 8x is
/// noted but not fatal.
ScalingFit fit_scaling(std::span<const InstanceMetrics> metrics, const std::string& quantity,
                       FitModel model = FitModel::power_in_vertices);

struct NecessaryDiagnostics {
    ScalingFit case_i_trend;  // delta_plus / eps1
    bool case_i = false;      // trend slope outside [-0.1, 0.1]
    ScalingFit case_ii_trend; // eps1 / |delta_minus|
    bool case_ii = false;     // slope <= -0.1 (eps1 << |delta_minus|)
    bool case_iii = false;    // gap skip observed at the largest usable size
    ScalingFit above_s1_trend; // (gamma - S1) / (eps1 S1)
    bool above_s1 = false;
    std::map<std::string, int> i_alpha_largest; // counts at the largest usable size
    bool around_s1 = false; // |I_alpha| >= 3 with comparable shadows and gamma near S1
    std::vector<std::string> triggered; // names of conditions that fired
};

NecessaryDiagnostics necessary_diagnostics(std::span<const InstanceMetrics> metrics);

enum class Groverian { yes, no, inconclusive };

std::string groverian_name(Groverian g);

struct Verdict {
    Groverian groverian = Groverian::inconclusive;
    bool assumption_holds = false; // eps1 << sqrt(S1 Delta2), fitted
    ScalingFit assumption_fit;
    bool criterion_holds = false; // S2/S1^2 stays in [1, 10] without drift
    double ratio_min = 0.0, ratio_max = 0.0;
    ScalingFit ratio_trend;
    std::vector<std::string> diagnostics;
    double gamma_used = 0.0;
    std::string note;
};

inline constexpr double kRatioBandUpper = 10.0;
inline constexpr double kTrendMargin = 0.1;
inline constexpr double kFlatnessMargin = 0.05;
inline constexpr double kMinFitRSquared = 0.9;

Verdict make_verdict(std::span<const InstanceMetrics> metrics, const NecessaryDiagnostics& diag);

struct FamilyReport {
    graphs::FamilySpec family;
    std::vector<InstanceAnalysis> analyses;
    std::vector<InstanceMetrics> metrics; // usable rows only, sorted by size
    NecessaryDiagnostics diagnostics;
    Verdict verdict;
    ScalingFit eps1_fit;            // power in N
    ScalingFit delta2_fit;          // power in N
    ScalingFit delta2_param_fit;    // power in the size parameter
    ScalingFit s1_fit;              // power in N
};

FamilyReport run_family(const graphs::FamilySpec& family, const std::vector<int>& sizes,
                        const PipelineOptions& opt = {});

struct SweepPlan {
    graphs::FamilySpec family;
    std::vector<int> sizes;
    int size_cap = graphs::kDefaultSizeCap;
};

/// The built-in families table suite: clique, cycle, hamming(q=2),
/// johnson(k=3), grassmann(q=2,k=2), paley.
std::vector<SweepPlan> default_suite();

std::vector<FamilyReport> run_default_suite(const PipelineOptions& opt = {});

/// One row per family: verdict plus fitted eps1 / Delta2 / S1 scalings.
std::string families_table_csv(std::span<const FamilyReport> reports);

} // namespace sslab::classify
