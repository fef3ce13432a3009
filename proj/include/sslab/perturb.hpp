#pragma once

#include "sslab/spectra.hpp"

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace sslab::perturb {

/// x is too close to a pole gamma*theta_r of the secular function.
struct PoleProximityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A root bracket failed to produce a sign change; carries diagnostics since
/// this signals a broken assumption rather than a numerical accident.
struct BracketError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double pole_guard(double gamma);

/// Spectrum of gamma*H + w w^dagger, clustered into distinct eigenvalues.
/// Stationary clusters (untouched eigenspace directions) carry zero overlap.
struct PerturbedSpectrum {
    double gamma = 0.0;
    std::vector<double> zeta;     // descending distinct eigenvalues
    std::vector<double> overlap;  // ||F_p w||^2 per cluster
    std::vector<int> multiplicity;
    bool full = false;            // whole spectrum vs top-two only
    bool second_strict = true;    // theta_2 was in the support, strict bracket used
    double top_residual = 0.0;    // |g(zeta_1)| when secular-located
    double second_residual = 0.0;

    // Set when computed from a dense eigendecomposition.
    std::shared_ptr<const spectra::SpectralDecomposition> clusters;

    double delta_plus() const { return zeta.at(0) - gamma; }
    double delta_minus() const { return zeta.at(1) - gamma; }
    double top_gap() const { return zeta.at(0) - zeta.at(1); }
};

/// g(x) = 1 - sum_r eps_r^2 / (x - gamma*theta_r); its zeros in pole-free
/// intervals are the eigenvalues the rank-one update moved.
double secular_eval(const spectra::Tuplet& t, double x);

/// Top two perturbed eigenvalues by bisection of the secular function.
/// When theta_2 has no shadow the second eigenvalue stays at gamma*theta_2
/// and the result is flagged non-strict.
PerturbedSpectrum find_top_two(const spectra::Tuplet& t);

/// Every moved root plus the stationary clusters, all from the secular
/// function; overlaps by inverting 1/||F_p w||^2 = sum_r eps_r^2/(zeta_p - gamma*theta_r)^2.
PerturbedSpectrum secular_spectrum(const spectra::Tuplet& t);

/// Dense eigendecomposition of gamma*H + w w^dagger; keeps the cluster
/// decomposition for projector access.
PerturbedSpectrum full_perturbed_spectrum(const spectra::Tuplet& t);

struct WeylAudit {
    double worst_slack = 0.0; // min over all inequalities of (bound - value)
    long inequalities_checked = 0;
    long violations = 0; // slack < -1e-9
    bool pass = true;
};

/// Checks lambda_i(A+B) <= lambda_{i-j}(A) + lambda_{j+1}(B) and
/// lambda_{i+j}(A) + lambda_{n-j}(B) <= lambda_i(A+B) over all valid (i, j).
WeylAudit weyl_audit(const ComplexMatrix& a, const ComplexMatrix& b);

struct IdentityResidual {
    std::string name;
    double residual = 0.0; // worst relative residual over clusters
    int clusters_checked = 0;
    int clusters_skipped = 0; // too close to a pole
};

struct IdentityAudit {
    std::vector<IdentityResidual> identities;
    double max_residual = 0.0;
    bool pass = true; // all residuals <= 1e-7
};

/// Evaluates the five rank-one update identities (overlap inversion, unity,
/// principal substitution, signed unity at t=0, trace flip) on a full
/// perturbed spectrum.
IdentityAudit identity_audit(const spectra::Tuplet& t, const PerturbedSpectrum& spec);

struct DeltaBoundAudit {
    bool applicable = false; // gamma = S_1, eps_1 <= 0.2, unit-interval spectrum
    std::string skip_reason;
    double delta_plus = 0.0;
    double delta_minus = 0.0;
    double beta_plus = 0.0;  // (eps^2 + sqrt(eps^4 + 4 S1 eps^2)) / 2
    double beta_minus = 0.0; // (-eps^2 + sqrt(eps^4 + 4 S1 eps^2)) / 2
    double ratio_plus = 0.0; // delta_plus / (sqrt(S1) eps)
    double ratio_minus = 0.0;
    bool lower_strict = false; // eps^2 < delta_plus
    bool upper_ok = false;     // delta_plus <= beta_plus
    bool minus_ok = false;     // 0 < -delta_minus <= beta_minus
    bool pass = false;
};

/// Quadratic-root bounds on the top eigenvalue displacements at gamma = S_1.
DeltaBoundAudit delta_bound_audit(const spectra::Tuplet& t, const PerturbedSpectrum& spec);

struct InterlacingAudit {
    bool strict_expected = true; // theta_2 in support
    double margin = 0.0;         // min of the three strict gaps
    bool pass = true;
    bool non_strict = false; // theta_2 unsupported: zeta_2 = gamma*theta_2 allowed
};

/// gamma*theta_2 < zeta_2 < gamma < zeta_1, strict when theta_2 is supported.
InterlacingAudit interlacing_audit(const spectra::Tuplet& t, const PerturbedSpectrum& spec);

} // namespace sslab::perturb
