#include "sslab/cli.hpp"

#include "sslab/classify.hpp"
#include "sslab/format.hpp"
#include "sslab/report.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace sslab::cli {

namespace {

using nlohmann::json;

struct CommonFlags {
    std::string convention = "unit";
    std::string gamma = "auto";
    double tolerance = spectra::kDefaultClusterTolerance;
    int target = 0;
    int size_cap = graphs::kDefaultSizeCap;
    int dense_threshold = 2048;
    long seed = 0; // reserved; pipelines are deterministic
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--convention", flags.convention, "Spectrum convention: unit or symmetric")
        ->check(CLI::IsMember({"unit", "symmetric"}));
    cmd->add_option("--gamma", flags.gamma, "Scaling factor: auto (= S_1) or a positive real");
    cmd->add_option("--tolerance", flags.tolerance, "Eigenvalue cluster tolerance");
    cmd->add_option("--target", flags.target, "Target vertex index");
    cmd->add_option("--size-cap", flags.size_cap, "Vertex count cap for generators");
    cmd->add_option("--dense-threshold", flags.dense_threshold,
                    "Largest dimension handled with dense perturbed spectra");
    cmd->add_option("--seed", flags.seed, "Reserved; pipelines are deterministic");
}

classify::PipelineOptions pipeline_options(const CommonFlags& flags) {
    classify::PipelineOptions opt;
    opt.convention = flags.convention == "unit" ? graphs::Convention::unit_interval
                                                : graphs::Convention::symmetric_interval;
    if (flags.gamma != "auto") {
        size_t used = 0;
        const double value = std::stod(flags.gamma, &used);
        if (used != flags.gamma.size() || value <= 0.0) {
            throw CLI::ValidationError("--gamma", "expected 'auto' or a positive real");
        }
        opt.gamma = value;
    }
    opt.target_vertex = flags.target;
    opt.cluster_tolerance = flags.tolerance;
    opt.size_cap = flags.size_cap;
    opt.dense_threshold = flags.dense_threshold;
    return opt;
}

bool has_findings(const classify::InstanceAnalysis& a) {
    if (!a.interlacing.pass) return true;
    if (a.identity_ran && !a.identity.pass) return true;
    if (a.delta_bounds.applicable && !a.delta_bounds.pass) return true;
    for (const auto& flag : a.metrics.audit_flags) {
        if (flag == "secular_dense_mismatch") return true;
    }
    return false;
}

std::vector<int> parse_sizes(const std::string& text) {
    std::vector<int> sizes;
    std::istringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        size_t used = 0;
        const int value = std::stoi(item, &used);
        if (used != item.size() || value < 1) {
            throw CLI::ValidationError("--sizes", "expected comma-separated positive integers");
        }
        sizes.push_back(value);
    }
    return sizes;
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open output file: " + path);
    file << text;
}

int cmd_analyze(const std::string& family_spec, const CommonFlags& flags, std::ostream& out) {
    const classify::PipelineOptions opt = pipeline_options(flags);
    const graphs::FamilySpec spec = graphs::parse_family_spec(family_spec);
    const graphs::GraphInstance g = graphs::build_member(spec, std::nullopt, opt.size_cap);
    const classify::InstanceAnalysis analysis = classify::analyze_graph(g, opt);
    json payload{{"kind", "instance_analysis"},
                 {"familySpec", analysis.metrics.family_spec},
                 {"analysis", report::to_json(analysis)}};
    out << report::envelope("analyze", std::move(payload)).dump(2) << '\n';
    return has_findings(analysis) ? kExitFindings : kExitOk;
}

int cmd_simulate(const std::string& family_spec, const CommonFlags& flags, double until_multiple,
                 int points, const std::string& csv_path, std::ostream& out) {
    if (points > 1000000) {
        throw CLI::ValidationError("--points", "time grid longer than 1e6 points");
    }
    const classify::PipelineOptions opt = pipeline_options(flags);
    const graphs::FamilySpec spec = graphs::parse_family_spec(family_spec);
    const graphs::GraphInstance g = graphs::build_member(spec, std::nullopt, opt.size_cap);

    const graphs::NormalizedHamiltonian h = graphs::normalize_adjacency(g, opt.convention);
    ComplexVector w = ComplexVector::Zero(g.num_vertices);
    if (opt.target_vertex < 0 || opt.target_vertex >= g.num_vertices) {
        throw CLI::ValidationError("--target", "target vertex out of range");
    }
    w(opt.target_vertex) = 1.0;
    spectra::Tuplet t = spectra::make_tuplet(h, std::move(w), std::nullopt, opt.cluster_tolerance,
                                             opt.dense_threshold);
    if (opt.gamma) t.gamma = *opt.gamma;
    const perturb::PerturbedSpectrum full = g.num_vertices <= opt.dense_threshold
                                                ? perturb::full_perturbed_spectrum(t)
                                                : perturb::secular_spectrum(t);
    const double t_max = until_multiple / t.shadows(0);
    const walk::FidelityCurve curve = walk::sample_curve(t, full, t_max, points);

    double max_deviation = 0.0;
    for (size_t i = 0; i < curve.times.size(); ++i) {
        max_deviation = std::max(max_deviation, std::abs(curve.direct[i] - curve.spectral[i]));
    }
    write_text(csv_path, report::curve_csv(curve), out);
    json payload{{"kind", "fidelity_curve"},
                 {"familySpec", g.spec_string()},
                 {"gamma", t.gamma},
                 {"eps1", t.shadows(0)},
                 {"tStar", curve.t_star},
                 {"fAtTStar", curve.f_at_t_star},
                 {"peakValue", curve.peak_value},
                 {"peakTime", curve.peak_time},
                 {"points", points},
                 {"tMax", t_max},
                 {"maxMethodDeviation", max_deviation},
                 {"csvPath", csv_path.empty() ? "-" : csv_path}};
    out << report::envelope("simulate", std::move(payload)).dump(2) << '\n';
    return max_deviation > 1e-8 ? kExitFindings : kExitOk;
}

int cmd_sweep(const std::string& family_spec, const std::string& sizes_text,
              const CommonFlags& flags, long fixed_q, long fixed_k, std::ostream& out) {
    const classify::PipelineOptions opt = pipeline_options(flags);
    graphs::FamilySpec spec = graphs::parse_family_spec(family_spec);
    if (fixed_q > 0) spec.params["q"] = fixed_q;
    if (fixed_k > 0) spec.params["k"] = fixed_k;
    const std::vector<int> sizes = parse_sizes(sizes_text);
    const classify::FamilyReport report = classify::run_family(spec, sizes, opt);
    json payload{{"kind", "family_report"},
                 {"familySpec", spec.to_string()},
                 {"report", report::to_json(report)}};
    out << report::envelope("sweep", std::move(payload)).dump(2) << '\n';
    if (report.verdict.groverian == classify::Groverian::inconclusive) return kExitInconclusive;
    for (const auto& a : report.analyses) {
        if (a.metrics.ok && has_findings(a)) return kExitFindings;
    }
    return kExitOk;
}

int cmd_families(const CommonFlags& flags, const std::string& csv_path,
                 const std::string& json_path, std::ostream& out) {
    const classify::PipelineOptions opt = pipeline_options(flags);
    const std::vector<classify::FamilyReport> reports = classify::run_default_suite(opt);
    const std::string csv = classify::families_table_csv(reports);
    write_text(csv_path, csv, out);
    if (!json_path.empty()) {
        json families = json::array();
        for (const auto& r : reports) families.push_back(report::to_json(r));
        json payload{{"kind", "families_table"}, {"families", families}, {"csv", csv}};
        const std::string text = report::envelope("families", std::move(payload)).dump(2) + "\n";
        write_text(json_path, text, out);
    }
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Optimal spatial search laboratory for continuous-time quantum walks"};
    app.name("spectral-search-lab");
    app.require_subcommand(1);

    CommonFlags flags;

    std::string analyze_spec;
    CLI::App* analyze = app.add_subcommand("analyze", "Full pipeline and audits on one instance");
    analyze->add_option("family", analyze_spec, "Family spec, e.g. complete:n=64")->required();
    add_common_flags(analyze, flags);

    std::string simulate_spec;
    double until_multiple = 2.0;
    int points = 1000;
    std::string csv_path;
    CLI::App* simulate = app.add_subcommand("simulate", "Fidelity curve by both methods");
    simulate->add_option("family", simulate_spec, "Family spec")->required();
    simulate->add_option("--until-multiple", until_multiple,
                         "Time horizon as a multiple of 1/eps_1");
    simulate->add_option("--points", points, "Grid points (max 1e6)");
    simulate->add_option("--csv", csv_path, "CSV output path ('-' for stdout)");
    add_common_flags(simulate, flags);

    std::string sweep_spec;
    std::string sizes_text;
    long sweep_q = 0, sweep_k = 0;
    CLI::App* sweep = app.add_subcommand("sweep", "Family sweep with scaling fits and verdict");
    sweep->add_option("family", sweep_spec, "Family spec without the size parameter")->required();
    sweep->add_option("--sizes", sizes_text, "Comma-separated size list")->required();
    sweep->add_option("--q", sweep_q, "Fixed family parameter q (same as :q= in the spec)");
    sweep->add_option("--k", sweep_k, "Fixed family parameter k (same as :k= in the spec)");
    add_common_flags(sweep, flags);

    std::string families_csv;
    std::string families_json;
    CLI::App* families = app.add_subcommand("families", "Built-in families table");
    families->add_option("--csv", families_csv, "CSV output path ('-' for stdout)");
    families->add_option("--json", families_json, "Also emit the JSON report to this path");
    add_common_flags(families, flags);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (analyze->parsed()) return cmd_analyze(analyze_spec, flags, out);
        if (simulate->parsed()) {
            return cmd_simulate(simulate_spec, flags, until_multiple, points, csv_path, out);
        }
        if (sweep->parsed()) return cmd_sweep(sweep_spec, sizes_text, flags, sweep_q, sweep_k, out);
        if (families->parsed()) return cmd_families(flags, families_csv, families_json, out);
    } catch (const CLI::ValidationError& e) {
        err << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitUsage;
}

} // namespace sslab::cli
