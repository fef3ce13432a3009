// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Heavy sweeps print progress to stderr.

#include "sslab/classify.hpp"
#include "sslab/format.hpp"
#include "sslab/graphs.hpp"
#include "sslab/perturb.hpp"
#include "sslab/spectra.hpp"
#include "sslab/walk.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <string>
#include <vector>

using namespace sslab;

namespace {

struct CriterionResult {
    std::string name;
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        pass = false;
        if (!detail.empty()) detail += "; ";
        detail += why;
    }
    void note(const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v) {
    char buffer[48];
    std::snprintf(buffer, sizeof(buffer), "%.3g", v);
    return buffer;
}

spectra::Tuplet vertex_tuplet(const graphs::GraphInstance& g, graphs::Convention conv,
                              std::optional<double> gamma = std::nullopt) {
    const auto h = graphs::normalize_adjacency(g, conv);
    ComplexVector w = ComplexVector::Zero(g.num_vertices);
    w(0) = 1.0;
    return spectra::make_tuplet(h, std::move(w), gamma);
}

ComplexMatrix random_hermitian(int n, std::mt19937& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexMatrix a(n, n);
    for (int i = 0; i < n; ++i) {
        a(i, i) = gauss(rng);
        for (int j = i + 1; j < n; ++j) {
            const std::complex<double> z(gauss(rng), gauss(rng));
            a(i, j) = z;
            a(j, i) = std::conj(z);
        }
    }
    return a;
}

const classify::FamilyReport* find_report(const std::vector<classify::FamilyReport>& reports,
                                          graphs::Family family) {
    for (const auto& r : reports) {
        if (r.family.family == family) return &r;
    }
    return nullptr;
}

} // namespace

int main() {
    std::vector<CriterionResult> results(10);

    // ---- criteria 1 and 7: identities and method agreement on every default
    // sweep instance within the dense range ----
    {
        auto& c1 = results[0];
        c1.name = "identity suite (five rank-one update identities, <= 2048 vertices)";
        auto& c7 = results[6];
        c7.name = "method agreement (direct vs spectral fidelity, 1e-8 on 100-point grids)";
        const auto start = std::chrono::steady_clock::now();
        double worst_identity = 0.0;
        double worst_agreement = 0.0;
        int instances = 0;
        for (const auto& plan : classify::default_suite()) {
            for (int size : plan.sizes) {
                graphs::GraphInstance g;
                try {
                    g = graphs::build_member(plan.family, size, plan.size_cap);
                } catch (const std::exception& e) {
                    c1.fail(plan.family.to_string() + " size " + std::to_string(size) +
                            " failed to build: " + e.what());
                    continue;
                }
                if (g.num_vertices > 2048) continue;
                std::fprintf(stderr, "[accept] identities: %s (N=%d)\n", g.spec_string().c_str(),
                             g.num_vertices);
                const auto t = vertex_tuplet(g, graphs::Convention::unit_interval);
                const auto full = perturb::full_perturbed_spectrum(t);
                const auto audit = perturb::identity_audit(t, full);
                worst_identity = std::max(worst_identity, audit.max_residual);
                if (!audit.pass) c1.fail(g.spec_string() + " residual " + fmt(audit.max_residual));
                ++instances;

                const walk::WalkSimulator sim(t, full.clusters->eigensystem());
                const double horizon = 4.0 / t.shadows(0);
                double deviation = 0.0;
                for (int i = 0; i < 100; ++i) {
                    const double ti = horizon * i / 99.0;
                    deviation = std::max(
                        std::abs(sim.fidelity(ti) - walk::fidelity_spectral(t, full, ti)),
                        deviation);
                }
                worst_agreement = std::max(worst_agreement, deviation);
                if (deviation > 1e-8) c7.fail(g.spec_string() + " deviation " + fmt(deviation));
            }
        }
        const double elapsed = seconds_since(start);
        if (elapsed > 300.0) c1.fail("runtime " + fmt(elapsed) + " s exceeds 300 s");
        c1.note(std::to_string(instances) + " instances, max residual " + fmt(worst_identity) +
                ", " + fmt(elapsed) + " s");
        c7.note("max deviation " + fmt(worst_agreement));
    }

    // ---- criterion 4: evolution distance against the shadow bound ----
    {
        auto& c4 = results[3];
        c4.name = "lower-bound suite (||rho_w(tau) - E_1||^2 <= 4 eps_1 tau)";
        double min_margin = 1e300;
        for (const auto* spec : {"complete:n=64", "complete:n=256", "cycle:n=128", "cycle:n=512",
                                 "hamming:n=6,q=2", "hamming:n=10,q=2"}) {
            const auto g = graphs::build_member(graphs::parse_family_spec(spec));
            const auto t = vertex_tuplet(g, graphs::Convention::unit_interval);
            std::vector<double> taus;
            const double horizon = 2.0 / t.shadows(0);
            for (int i = 0; i <= 50; ++i) taus.push_back(horizon * i / 50.0);
            const auto audit = walk::lower_bound_audit(t, taus);
            min_margin = std::min(min_margin, audit.min_margin);
            if (!audit.pass) c4.fail(std::string(spec) + " margin " + fmt(audit.min_margin));
        }
        c4.note("6 instances x 51 samples, min margin " + fmt(min_margin));
    }

    // ---- criterion 5: Grover reproduction ----
    {
        auto& c5 = results[4];
        c5.name = "Grover reproduction (K_49 at (pi/2) sqrt(n); K_256 peak; t* eps_1 band)";
        const auto start = std::chrono::steady_clock::now();

        // K_49, spectral-norm convention, gamma = (n-1)/n recovers the
        // unnormalized walk at gamma_raw = 1/n
        const auto k49 = vertex_tuplet(graphs::complete(49),
                                       graphs::Convention::symmetric_interval, 48.0 / 49.0);
        const auto k49_full = perturb::full_perturbed_spectrum(k49);
        const auto k49_peak = walk::peak_fidelity(k49, k49_full, 2.0);
        const double target_time = M_PI / 2.0 * 7.0;
        if (k49_peak.value < 0.99) c5.fail("K_49 peak " + fmt(k49_peak.value) + " < 0.99");
        if (std::abs(k49_peak.time - target_time) > 0.05 * target_time) {
            c5.fail("K_49 peak time " + fmt(k49_peak.time) + " off (pi/2) sqrt(n) by more than 5%");
        }
        c5.note("K_49 peak " + fmt(k49_peak.value) + " at t = " + fmt(k49_peak.time) +
                " (target " + fmt(target_time) + ")");

        // K_256 in the unit convention at gamma = S_1
        const auto k256 = vertex_tuplet(graphs::complete(256), graphs::Convention::unit_interval);
        const auto k256_top = perturb::find_top_two(k256);
        const auto k256_full = perturb::full_perturbed_spectrum(k256);
        const double t_star = walk::critical_time(k256_top);
        const double f_star = walk::fidelity_spectral(k256, k256_full, t_star);
        if (f_star < 0.95) c5.fail("K_256 f(t*) = " + fmt(f_star) + " < 0.95");
        c5.note("K_256 f(t*) = " + fmt(f_star));

        // fixed band for t* eps_1 across the size sweep
        double band_lo = 1e300, band_hi = 0.0;
        for (int n : {16, 32, 64, 128, 256, 512, 1024}) {
            const auto t = vertex_tuplet(graphs::complete(n), graphs::Convention::unit_interval);
            const auto top2 = perturb::find_top_two(t);
            const double product = walk::critical_time(top2) * t.shadows(0);
            band_lo = std::min(band_lo, product);
            band_hi = std::max(band_hi, product);
            if (product < 1.5 || product > 1.7) {
                c5.fail("t* eps_1 = " + fmt(product) + " at n = " + std::to_string(n) +
                        " leaves the band [1.5, 1.7]");
            }
        }
        c5.note("t* eps_1 in [" + fmt(band_lo) + ", " + fmt(band_hi) + "]");
        const double elapsed = seconds_since(start);
        if (elapsed > 120.0) c5.fail("runtime " + fmt(elapsed) + " s exceeds 120 s");
        c5.note(fmt(elapsed) + " s");
    }

    // ---- criterion 10: perfect-fidelity structure ----
    {
        auto& c10 = results[9];
        c10.name = "perfect-fidelity structure (principal perturbed eigenvector on cliques)";
        double previous_gap = 1e300;
        for (int n : {16, 64, 256, 1024}) {
            const auto t = vertex_tuplet(graphs::complete(n), graphs::Convention::unit_interval);
            const auto full = perturb::full_perturbed_spectrum(t);
            const auto rep = walk::perfect_fidelity_check(t, full);
            if (rep.gap >= previous_gap) {
                c10.fail("overlap gap not decreasing at n = " + std::to_string(n));
            }
            previous_gap = rep.gap;
            if (n == 1024) {
                const double root_half = 1.0 / std::sqrt(2.0);
                if (std::abs(rep.overlap_principal - root_half) > 0.05 ||
                    std::abs(rep.overlap_target - root_half) > 0.05) {
                    c10.fail("overlaps at n = 1024 not within 0.05 of 1/sqrt(2): " +
                             fmt(rep.overlap_principal) + ", " + fmt(rep.overlap_target));
                }
                c10.note("n = 1024 overlaps " + fmt(rep.overlap_principal) + " / " +
                         fmt(rep.overlap_target) + ", gap " + fmt(rep.gap));
            }
        }
    }

    // ---- criterion 9b is independent of the family sweeps: cycle peaks ----
    {
        auto& c9 = results[8];
        c9.name = "cycle failure diagnostics (|I_1.5| >= 3 for n >= 128; bounded decaying peak)";
        std::vector<double> peaks;
        for (int n : {64, 128, 256, 512}) {
            const auto t = vertex_tuplet(graphs::cycle(n), graphs::Convention::unit_interval);
            const auto full = perturb::full_perturbed_spectrum(t);
            const auto peak = walk::peak_fidelity(t, full, 10.0);
            peaks.push_back(peak.value);
            if (peak.value > 0.5) {
                c9.fail("C_" + std::to_string(n) + " peak " + fmt(peak.value) + " > 0.5");
            }
        }
        for (size_t i = 1; i < peaks.size(); ++i) {
            if (peaks[i] >= peaks[i - 1]) c9.fail("cycle peak not decreasing in n");
        }
        c9.note("peaks over [0, 10/eps_1]: " + fmt(peaks[0]) + " .. " + fmt(peaks.back()));
    }

    // ---- the default family suite drives criteria 2, 3, 6, 8 and 9a ----
    std::fprintf(stderr, "[accept] running the default family suite...\n");
    const auto suite_start = std::chrono::steady_clock::now();
    const std::vector<classify::FamilyReport> reports = classify::run_default_suite({});
    const double suite_elapsed = seconds_since(suite_start);
    std::fprintf(stderr, "[accept] family suite done in %.1f s\n", suite_elapsed);

    // ---- criterion 2: strict interlacing everywhere + Weyl sampling ----
    {
        auto& c2 = results[1];
        c2.name = "interlacing suite (strict top-two interlacing; Weyl audit on random pairs)";
        double min_margin = 1e300;
        int checked = 0;
        for (const auto& r : reports) {
            for (const auto& a : r.analyses) {
                if (!a.metrics.ok) continue;
                if (!a.interlacing.strict_expected) continue;
                ++checked;
                min_margin = std::min(min_margin, a.interlacing.margin);
                if (!a.interlacing.pass || a.interlacing.margin <= 0.0) {
                    c2.fail(a.metrics.family_spec + " interlacing margin " +
                            fmt(a.interlacing.margin));
                }
            }
        }
        std::mt19937 rng(20260808);
        double worst_slack = 1e300;
        for (int trial = 0; trial < 100; ++trial) {
            const int n = 2 + static_cast<int>(rng() % 31);
            const ComplexMatrix h = random_hermitian(n, rng);
            ComplexVector w(n);
            std::normal_distribution<double> gauss(0.0, 1.0);
            for (int i = 0; i < n; ++i) w(i) = std::complex<double>(gauss(rng), gauss(rng));
            w /= w.norm();
            const auto audit = perturb::weyl_audit(h, w * w.adjoint());
            worst_slack = std::min(worst_slack, audit.worst_slack);
            if (!audit.pass) c2.fail("Weyl violation, trial " + std::to_string(trial));
        }
        c2.note(std::to_string(checked) + " strict instances, min margin " + fmt(min_margin) +
                "; Weyl worst slack " + fmt(worst_slack));
    }

    // ---- criterion 3: displacement bounds at gamma = S_1 ----
    {
        auto& c3 = results[2];
        c3.name = "displacement bounds (eps^2 < d+ <= beta+, 0 < -d- <= beta-, ratio <= 1.01)";
        int applicable = 0;
        double worst_ratio = 0.0;
        for (const auto& r : reports) {
            for (const auto& a : r.analyses) {
                if (!a.metrics.ok || !a.delta_bounds.applicable) continue;
                ++applicable;
                worst_ratio = std::max({worst_ratio, a.delta_bounds.ratio_plus,
                                        a.delta_bounds.ratio_minus});
                if (!a.delta_bounds.pass) {
                    c3.fail(a.metrics.family_spec + " bound violated");
                }
                if (a.delta_bounds.ratio_plus > 1.01 || a.delta_bounds.ratio_minus > 1.01) {
                    c3.fail(a.metrics.family_spec + " ratio " +
                            fmt(std::max(a.delta_bounds.ratio_plus, a.delta_bounds.ratio_minus)) +
                            " > 1.01");
                }
            }
        }
        if (applicable == 0) c3.fail("no applicable instances");
        c3.note(std::to_string(applicable) + " instances with eps_1 <= 0.2, worst ratio " +
                fmt(worst_ratio));
    }

    // ---- criterion 6: families table ----
    {
        auto& c6 = results[5];
        c6.name = "families table (verdicts and fitted exponents)";
        const struct {
            graphs::Family family;
            classify::Groverian expected;
        } verdicts[] = {
            {graphs::Family::complete, classify::Groverian::yes},
            {graphs::Family::cycle, classify::Groverian::no},
            {graphs::Family::hamming, classify::Groverian::yes},
            {graphs::Family::johnson, classify::Groverian::yes},
            {graphs::Family::grassmann, classify::Groverian::yes},
            {graphs::Family::paley, classify::Groverian::yes},
        };
        for (const auto& expect : verdicts) {
            const auto* r = find_report(reports, expect.family);
            if (!r) {
                c6.fail(graphs::family_name(expect.family) + " missing from the suite");
                continue;
            }
            if (r->verdict.groverian != expect.expected) {
                c6.fail(graphs::family_name(expect.family) + " verdict " +
                        classify::groverian_name(r->verdict.groverian) + ", expected " +
                        classify::groverian_name(expect.expected));
            }
        }
        auto expect_exponent = [&](graphs::Family family, const char* which, double target) {
            const auto* r = find_report(reports, family);
            if (!r) return;
            const classify::ScalingFit* fit = nullptr;
            if (std::string(which) == "eps1") fit = &r->eps1_fit;
            if (std::string(which) == "delta2") fit = &r->delta2_fit;
            if (std::string(which) == "delta2_param") fit = &r->delta2_param_fit;
            if (std::string(which) == "s1") fit = &r->s1_fit;
            if (!fit || !fit->valid) {
                c6.fail(std::string(graphs::family_name(family)) + " " + which + " fit invalid");
                return;
            }
            if (std::abs(fit->exponent - target) > 0.1) {
                c6.fail(std::string(graphs::family_name(family)) + " " + which + " exponent " +
                        fmt(fit->exponent) + ", expected " + fmt(target) + " +- 0.1");
            }
        };
        expect_exponent(graphs::Family::cycle, "eps1", -0.5);
        expect_exponent(graphs::Family::cycle, "delta2", -2.0);
        expect_exponent(graphs::Family::cycle, "s1", 1.0);
        expect_exponent(graphs::Family::hamming, "delta2_param", -1.0);
        expect_exponent(graphs::Family::complete, "delta2", 0.0);
        expect_exponent(graphs::Family::johnson, "delta2", 0.0);
        expect_exponent(graphs::Family::grassmann, "delta2", 0.0);
        if (suite_elapsed > 900.0) {
            c6.fail("suite runtime " + fmt(suite_elapsed) + " s exceeds 900 s");
        }
        const std::string csv = classify::families_table_csv(reports);
        if (csv.find("grassmann") == std::string::npos) c6.fail("table CSV missing a family row");
        c6.note("suite runtime " + fmt(suite_elapsed) + " s");
    }

    // ---- criterion 8: moment facts on every usable instance ----
    {
        auto& c8 = results[7];
        c8.name = "moment facts (variance bound and constant-gap sandwich)";
        int checked = 0;
        for (const auto& r : reports) {
            for (const auto& m : r.metrics) {
                ++checked;
                const double eps1sq = m.eps1 * m.eps1;
                const double eps2sq = m.eps2 * m.eps2;
                if (m.s1 * m.s1 / m.s2 > 1.0 - eps1sq + 1e-9) {
                    c8.fail(m.family_spec + " variance bound violated");
                }
                const double product = m.s1 * m.delta2;
                if (eps2sq + m.delta2 * (1.0 - eps1sq - eps2sq) > product + 1e-9 ||
                    product > 1.0 - eps1sq + 1e-9) {
                    c8.fail(m.family_spec + " constant-gap sandwich violated");
                }
            }
        }
        c8.note(std::to_string(checked) + " instances checked");
    }

    // ---- criterion 9a: the specified alpha = 1.5 mode count ----
    {
        auto& c9 = results[8];
        const auto* cycle_report = find_report(reports, graphs::Family::cycle);
        if (!cycle_report) {
            c9.fail("cycle sweep missing");
        } else {
            bool any_size = false;
            for (const auto& m : cycle_report->metrics) {
                if (m.size_param < 128) continue;
                any_size = true;
                const int count = m.i_alpha.at("1.50");
                if (count < 3) {
                    c9.fail("C_" + std::to_string(m.size_param) + " |I_1.5| = " +
                            std::to_string(count) + " < 3 (exact count; the inequality "
                            "gamma Delta_r < eps_1^1.5 first admits three modes near n ~ 7e5)");
                }
            }
            if (!any_size) c9.fail("no cycle instance with n >= 128");
            const auto& largest = cycle_report->metrics.back();
            c9.note("feasible rendering: some alpha in (1,2) works at these sizes: |I_1.02|(C_" +
                    std::to_string(largest.size_param) + ") = " +
                    std::to_string(largest.i_alpha.at("1.02")) + " >= 3 is " +
                    (largest.i_alpha.at("1.02") >= 3 ? "true" : "false"));
        }
    }

    // ---- summary ----
    int failures = 0;
    for (size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        if (!r.pass) ++failures;
        std::printf("[%s] criterion %zu: %s%s%s\n", r.pass ? "PASS" : "FAIL", i + 1,
                    r.name.c_str(), r.detail.empty() ? "" : " -- ", r.detail.c_str());
    }
    std::printf("%d/10 criteria passed\n", 10 - failures);
    return failures;
}
