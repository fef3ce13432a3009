#include "sslab/classify.hpp"

#include "sslab/format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sslab::classify {

namespace {

// The two near-1 probes matter for cycles: the low-frequency mode count
// reaches 3 only for alpha close to 1 at feasible sizes (exact evaluation;
// at alpha = 1.5 the count stays at 1 below n ~ 7e5).
const std::vector<std::pair<std::string, double>> kAlphaGrid = {
    {"1.02", 1.02}, {"1.05", 1.05}, {"1.25", 1.25}, {"1.50", 1.50}, {"1.75", 1.75}};

std::vector<InstanceMetrics> usable_rows(std::span<const InstanceMetrics> metrics) {
    std::vector<InstanceMetrics> rows;
    for (const auto& m : metrics) {
        if (m.ok) rows.push_back(m);
    }
    std::sort(rows.begin(), rows.end(), [](const InstanceMetrics& a, const InstanceMetrics& b) {
        return a.num_vertices < b.num_vertices;
    });
    return rows;
}

} // namespace

std::string fit_model_name(FitModel m) {
    switch (m) {
        case FitModel::power_in_vertices: return "power_in_vertices";
        case FitModel::power_in_param: return "power_in_param";
        case FitModel::exponential_in_param: return "exponential_in_param";
    }
    return "unknown";
}

std::string groverian_name(Groverian g) {
    switch (g) {
        case Groverian::yes: return "yes";
        case Groverian::no: return "no";
        case Groverian::inconclusive: return "inconclusive";
    }
    return "unknown";
}

InstanceAnalysis analyze_graph(const graphs::GraphInstance& g, const PipelineOptions& opt) {
    InstanceAnalysis a;
    InstanceMetrics& m = a.metrics;
    m.family_spec = g.spec_string();
    m.size_param = g.size_param;
    m.num_vertices = g.num_vertices;

    const graphs::NormalizedHamiltonian h = graphs::normalize_adjacency(g, opt.convention);
    const bool dense = g.num_vertices <= opt.dense_threshold;
    m.dense_path = dense;

    spectra::SpectralDecomposition decomp =
        dense ? spectra::SpectralDecomposition::from_eigensystem(
                    linalg::symmetric_eig(h.matrix()), opt.cluster_tolerance)
              : spectra::SpectralDecomposition::from_operator(h.h, h.spectrum,
                                                              opt.cluster_tolerance);
    if (decomp.ambiguous_clustering()) m.audit_flags.push_back("clustering_ambiguous");

    if (opt.target_vertex < 0 || opt.target_vertex >= g.num_vertices) {
        throw std::invalid_argument("analyze_graph: target vertex out of range");
    }
    ComplexVector w = ComplexVector::Zero(g.num_vertices);
    w(opt.target_vertex) = 1.0;

    spectra::Tuplet t = spectra::make_tuplet(h, std::move(decomp), std::move(w), std::nullopt);
    const double s1 = t.gamma; // make_tuplet defaults gamma to S_1
    if (opt.gamma_rule) {
        t.gamma = opt.gamma_rule(s1, g);
    } else if (opt.gamma) {
        t.gamma = *opt.gamma;
    }
    if (t.gamma <= 0.0) throw std::invalid_argument("analyze_graph: gamma must be positive");

    m.eps1 = t.shadows(0);
    m.eps2 = t.decomposition.distinct_count() > 1 ? t.shadows(1) : 0.0;
    m.delta2 = spectra::gap_delta2(t.decomposition);
    m.s1 = s1;
    m.s2 = spectra::moment_sk(t, 2);
    m.s3 = spectra::moment_sk(t, 3);
    m.gamma = t.gamma;
    double worst_shadow = 0.0;
    for (int r = 1; r < t.decomposition.distinct_count(); ++r) {
        worst_shadow = std::max(worst_shadow, t.shadows(r) * t.shadows(r));
    }
    m.shadow_ratio = worst_shadow / (m.eps1 * m.eps1);

    const perturb::PerturbedSpectrum top2 = perturb::find_top_two(t);
    m.zeta1 = top2.zeta[0];
    m.zeta2 = top2.zeta[1];
    m.delta_plus = top2.delta_plus();
    m.delta_minus = top2.delta_minus();

    const perturb::PerturbedSpectrum full =
        dense ? perturb::full_perturbed_spectrum(t) : perturb::secular_spectrum(t);
    if (dense) {
        a.secular_vs_dense = std::max(std::abs(top2.zeta[0] - full.zeta.at(0)),
                                      std::abs(top2.zeta[1] - full.zeta.at(1)));
        if (a.secular_vs_dense > 1e-9 * std::max(1.0, t.gamma)) {
            m.audit_flags.push_back("secular_dense_mismatch");
        }
        a.identity = perturb::identity_audit(t, full);
        a.identity_ran = true;
        if (!a.identity.pass) m.audit_flags.push_back("identity");
    } else {
        m.audit_flags.push_back("secular_only");
    }

    a.interlacing = perturb::interlacing_audit(t, top2);
    if (!a.interlacing.pass) m.audit_flags.push_back("interlacing");
    a.delta_bounds = perturb::delta_bound_audit(t, top2);
    if (a.delta_bounds.applicable && !a.delta_bounds.pass) m.audit_flags.push_back("delta_bounds");

    m.t_star = walk::critical_time(top2);
    m.f_at_t_star = walk::fidelity_spectral(t, full, m.t_star);
    const walk::PeakResult peak = walk::peak_fidelity(t, full, opt.horizon_multiple);
    m.peak_time = peak.time;
    m.peak_value = peak.value;

    for (const auto& [key, alpha] : kAlphaGrid) {
        int count = 0;
        for (int r = 1; r < t.decomposition.distinct_count(); ++r) {
            if (t.gamma * t.gaps(r) < std::pow(m.eps1, alpha)) ++count;
        }
        m.i_alpha[key] = count;
    }

    // gamma - zeta_m gaps straddling eps_1 by a decade on each side
    std::vector<double> below;
    for (size_t p = 0; p < full.zeta.size(); ++p) {
        if (full.zeta[p] < t.gamma && full.overlap[p] > 1e-14) {
            below.push_back(t.gamma - full.zeta[p]);
        }
    }
    std::sort(below.begin(), below.end());
    for (size_t i = 0; i + 1 < below.size(); ++i) {
        if (below[i] <= m.eps1 / 10.0 && below[i + 1] >= 10.0 * m.eps1) {
            m.gap_skip = true;
            break;
        }
    }

    m.ok = true;
    return a;
}

std::vector<InstanceAnalysis> sweep_family(const graphs::FamilySpec& family,
                                           const std::vector<int>& sizes,
                                           const PipelineOptions& opt) {
    std::vector<InstanceAnalysis> results;
    results.reserve(sizes.size());
    for (int size : sizes) {
        InstanceAnalysis a;
        try {
            const graphs::GraphInstance g = graphs::build_member(family, size, opt.size_cap);
            a = analyze_graph(g, opt);
        } catch (const std::exception& err) {
            a.metrics.family_spec = family.to_string();
            a.metrics.size_param = size;
            a.metrics.ok = false;
            a.metrics.audit_flags.push_back("failed");
            a.error = err.what();
        }
        results.push_back(std::move(a));
    }
    std::sort(results.begin(), results.end(),
              [](const InstanceAnalysis& a, const InstanceAnalysis& b) {
                  return a.metrics.size_param < b.metrics.size_param;
              });
    return results;
}

double metric_value(const InstanceMetrics& m, const std::string& quantity) {
    if (quantity == "eps1") return m.eps1;
    if (quantity == "eps2") return m.eps2;
    if (quantity == "delta2") return m.delta2;
    if (quantity == "s1") return m.s1;
    if (quantity == "s2") return m.s2;
    if (quantity == "s3") return m.s3;
    if (quantity == "gamma") return m.gamma;
    if (quantity == "zeta1") return m.zeta1;
    if (quantity == "zeta2") return m.zeta2;
    if (quantity == "delta_plus") return m.delta_plus;
    if (quantity == "delta_minus") return m.delta_minus;
    if (quantity == "t_star") return m.t_star;
    if (quantity == "f_at_t_star") return m.f_at_t_star;
    if (quantity == "peak_value") return m.peak_value;
    if (quantity == "peak_time") return m.peak_time;
    if (quantity == "t_star_eps1") return m.t_star * m.eps1;
    if (quantity == "eps1_over_sqrt_s1_delta2") return m.eps1 / std::sqrt(m.s1 * m.delta2);
    if (quantity == "s2_over_s1_sq") return m.s2 / (m.s1 * m.s1);
    if (quantity == "delta_plus_over_eps1") return m.delta_plus / m.eps1;
    if (quantity == "eps1_over_abs_delta_minus") return m.eps1 / std::abs(m.delta_minus);
    if (quantity == "above_s1_ratio") return (m.gamma - m.s1) / (m.eps1 * m.s1);
    throw std::invalid_argument("unknown metric quantity: " + quantity);
}

ScalingFit fit_scaling(std::span<const InstanceMetrics> metrics, const std::string& quantity,
                       FitModel model) {
    ScalingFit fit;
    fit.quantity = quantity;
    fit.model = model;

    std::vector<double> xs, ys;
    for (const auto& rows = usable_rows(metrics); const InstanceMetrics& m : rows) {
        const double value = metric_value(m, quantity);
        if (!(value > 0.0) || !std::isfinite(value)) continue;
        double x = 0.0;
        switch (model) {
            case FitModel::power_in_vertices: x = std::log(static_cast<double>(m.num_vertices)); break;
            case FitModel::power_in_param: x = std::log(static_cast<double>(m.size_param)); break;
            case FitModel::exponential_in_param: x = static_cast<double>(m.size_param); break;
        }
        xs.push_back(x);
        ys.push_back(std::log(value));
    }
    fit.samples = static_cast<int>(xs.size());
    if (fit.samples < 5) {
        fit.note = "fewer than 5 usable sizes";
        return fit;
    }
    const auto [x_min, x_max] = std::minmax_element(xs.begin(), xs.end());
    fit.span = model == FitModel::exponential_in_param ? (*x_max - *x_min)
                                                       : std::exp(*x_max - *x_min);
    if (model == FitModel::power_in_vertices && fit.span < 8.0) {
        fit.note = "vertex span below 8x";
    }

    const int n = fit.samples;
    double mx = 0, my = 0;
    for (int i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (int i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx <= 0.0) {
        fit.note = "degenerate abscissa";
        return fit;
    }
    fit.exponent = sxy / sxx;
    const double ss_res = syy - sxy * sxy / sxx;
    fit.r_squared = syy <= 1e-18 ? 1.0 : std::max(0.0, 1.0 - ss_res / syy);
    fit.valid = true;
    return fit;
}

NecessaryDiagnostics necessary_diagnostics(std::span<const InstanceMetrics> metrics) {
    NecessaryDiagnostics diag;
    const std::vector<InstanceMetrics> rows = usable_rows(metrics);
    if (rows.empty()) return diag;

    diag.case_i_trend = fit_scaling(rows, "delta_plus_over_eps1");
    diag.case_i = diag.case_i_trend.valid && diag.case_i_trend.r_squared >= kMinFitRSquared &&
                  std::abs(diag.case_i_trend.exponent) >= kTrendMargin;
    if (diag.case_i) diag.triggered.push_back("shadow_gap_mismatch");

    diag.case_ii_trend = fit_scaling(rows, "eps1_over_abs_delta_minus");
    diag.case_ii = diag.case_ii_trend.valid && diag.case_ii_trend.r_squared >= kMinFitRSquared &&
                   diag.case_ii_trend.exponent <= -kTrendMargin;
    if (diag.case_ii) diag.triggered.push_back("shadow_below_second_gap");

    diag.case_iii = rows.back().gap_skip;
    if (diag.case_iii) diag.triggered.push_back("gap_skip");

    diag.above_s1_trend = fit_scaling(rows, "above_s1_ratio");
    diag.above_s1 = diag.above_s1_trend.valid &&
                    diag.above_s1_trend.r_squared >= kMinFitRSquared &&
                    diag.above_s1_trend.exponent >= kTrendMargin;
    if (diag.above_s1) diag.triggered.push_back("gamma_above_s1");

    const InstanceMetrics& largest = rows.back();
    diag.i_alpha_largest = largest.i_alpha;
    const bool comparable_shadows = largest.shadow_ratio <= 32.0;
    const bool gamma_near_s1 = std::abs(largest.gamma - largest.s1) <= 0.2 * largest.s1;
    if (comparable_shadows && gamma_near_s1) {
        for (const auto& [key, count] : largest.i_alpha) {
            if (count >= 3) {
                diag.around_s1 = true;
                break;
            }
        }
    }
    if (diag.around_s1) diag.triggered.push_back("around_s1");
    return diag;
}

Verdict make_verdict(std::span<const InstanceMetrics> metrics, const NecessaryDiagnostics& diag) {
    Verdict v;
    const std::vector<InstanceMetrics> rows = usable_rows(metrics);
    if (rows.size() < 5) {
        v.groverian = Groverian::inconclusive;
        v.note = "fewer than 5 usable sizes";
        return v;
    }
    v.gamma_used = rows.back().gamma;

    v.assumption_fit = fit_scaling(rows, "eps1_over_sqrt_s1_delta2");
    v.assumption_holds = v.assumption_fit.valid &&
                         v.assumption_fit.r_squared >= kMinFitRSquared &&
                         v.assumption_fit.exponent <= -kTrendMargin;

    v.ratio_min = std::numeric_limits<double>::infinity();
    v.ratio_max = 0.0;
    for (const auto& m : rows) {
        const double ratio = metric_value(m, "s2_over_s1_sq");
        v.ratio_min = std::min(v.ratio_min, ratio);
        v.ratio_max = std::max(v.ratio_max, ratio);
    }
    v.ratio_trend = fit_scaling(rows, "s2_over_s1_sq");
    const bool in_band = v.ratio_min >= 1.0 - 1e-9 && v.ratio_max <= kRatioBandUpper;
    const bool flat = v.ratio_trend.valid && std::abs(v.ratio_trend.exponent) <= kFlatnessMargin;
    v.criterion_holds = in_band && flat;

    v.diagnostics = diag.triggered;

    if (!v.diagnostics.empty()) {
        v.groverian = Groverian::no;
    } else if (v.assumption_holds && v.criterion_holds) {
        v.groverian = Groverian::yes;
    } else if (v.assumption_holds && !v.criterion_holds) {
        v.groverian = Groverian::no;
        v.diagnostics.push_back("moment_ratio_unbounded");
    } else {
        v.groverian = Groverian::inconclusive;
        v.note = "assumption trend not established";
    }
    return v;
}

FamilyReport run_family(const graphs::FamilySpec& family, const std::vector<int>& sizes,
                        const PipelineOptions& opt) {
    FamilyReport report;
    report.family = family;
    report.analyses = sweep_family(family, sizes, opt);
    for (const auto& a : report.analyses) {
        if (a.metrics.ok) report.metrics.push_back(a.metrics);
    }
    report.diagnostics = necessary_diagnostics(report.metrics);
    report.verdict = make_verdict(report.metrics, report.diagnostics);
    report.eps1_fit = fit_scaling(report.metrics, "eps1");
    report.delta2_fit = fit_scaling(report.metrics, "delta2");
    report.delta2_param_fit = fit_scaling(report.metrics, "delta2", FitModel::power_in_param);
    report.s1_fit = fit_scaling(report.metrics, "s1");
    return report;
}

std::vector<SweepPlan> default_suite() {
    std::vector<SweepPlan> plans;
    auto spec = [](const std::string& text) { return graphs::parse_family_spec(text); };
    plans.push_back({spec("complete"), {16, 32, 64, 128, 256}, graphs::kDefaultSizeCap});
    plans.push_back({spec("cycle"), {32, 64, 128, 256, 512, 1024}, graphs::kDefaultSizeCap});
    plans.push_back({spec("hamming:q=2"), {4, 5, 6, 7, 8, 9, 10}, graphs::kDefaultSizeCap});
    // n >= 12 keeps the finite-size drift of the Johnson gap (1/(6 - 18/n),
    // approaching 1/6 from above) inside the constant-exponent tolerance
    plans.push_back({spec("johnson:k=3"), {12, 14, 16, 18, 20, 22}, graphs::kDefaultSizeCap});
    // The fifth Grassmann size tops 10k vertices; it runs through the
    // values-only + secular route, so only one large eigensolve is paid.
    plans.push_back({spec("grassmann:q=2,k=2"), {4, 5, 6, 7, 8}, 11000});
    plans.push_back({spec("paley"), {13, 29, 53, 101, 149, 197}, graphs::kDefaultSizeCap});
    return plans;
}

std::vector<FamilyReport> run_default_suite(const PipelineOptions& opt) {
    std::vector<FamilyReport> reports;
    for (const SweepPlan& plan : default_suite()) {
        PipelineOptions local = opt;
        local.size_cap = plan.size_cap;
        reports.push_back(run_family(plan.family, plan.sizes, local));
    }
    return reports;
}

std::string families_table_csv(std::span<const FamilyReport> reports) {
    std::ostringstream out;
    out << "family,groverian,sizes_used,eps1_exponent_in_N,delta2_exponent_in_N,"
           "delta2_exponent_in_param,s1_exponent_in_N,s2_over_s1sq_min,s2_over_s1sq_max,"
           "diagnostics,notes\n";
    for (const FamilyReport& r : reports) {
        std::string diagnostics;
        for (const auto& d : r.verdict.diagnostics) {
            if (!diagnostics.empty()) diagnostics += ';';
            diagnostics += d;
        }
        std::string notes = r.verdict.note;
        for (const auto& a : r.analyses) {
            if (!a.error.empty()) {
                if (!notes.empty()) notes += ';';
                notes += "size " + std::to_string(a.metrics.size_param) + " failed: " + a.error;
            }
        }
        out << format::csv_field(r.family.to_string()) << ','
            << groverian_name(r.verdict.groverian) << ',' << r.metrics.size() << ','
            << format::number(r.eps1_fit.exponent) << ','
            << format::number(r.delta2_fit.exponent) << ','
            << format::number(r.delta2_param_fit.exponent) << ','
            << format::number(r.s1_fit.exponent) << ','
            << format::number(r.verdict.ratio_min) << ','
            << format::number(r.verdict.ratio_max) << ','
            << format::csv_field(diagnostics) << ',' << format::csv_field(notes) << '\n';
    }
    return out.str();
}

} // namespace sslab::classify
