#pragma once

#include "sslab/perturb.hpp"
#include "sslab/spectra.hpp"

#include <span>
#include <vector>

namespace sslab::walk {

/// Search-walk engine: evolves rho(0) = E_1 under gamma*H + w w^dagger using
/// a cached eigendecomposition, so each time sample costs O(n).
class WalkSimulator {
public:
    explicit WalkSimulator(const spectra::Tuplet& t);
    /// Reuses an already computed eigendecomposition of gamma*H + w w^dagger.
    WalkSimulator(const spectra::Tuplet& t, linalg::EigenSystem eig);

    /// Tr(w w^dagger rho(t))
    double fidelity(double t) const;

    /// ||rho(t) - E_1||_F^2
    double distance_squared(double t) const;

    const linalg::EigenSystem& eigensystem() const { return eig_; }

private:
    linalg::EigenSystem eig_;
    ComplexVector overlap_target_;    // (w^dagger u_j)(u_j^dagger z_1)
    RealVector weight_principal_;     // |u_j^dagger z_1|^2
};

/// One-shot direct fidelity through full density-matrix evolution; the
/// oracle-grade route for small instances.
double fidelity_direct(const spectra::Tuplet& t, double time);

/// Closed-form fidelity eps_1^2 |sum_p e^{-it zeta_p} ||F_p w||^2/(zeta_p - gamma)|^2.
/// Requires a full perturbed spectrum; throws PoleProximityError when a
/// contributing zeta_p sits within the pole guard of gamma.
double fidelity_spectral(const spectra::Tuplet& t, const perturb::PerturbedSpectrum& spec,
                         double time);

/// pi / (zeta_1 - zeta_2); throws std::domain_error when the gap collapses.
double critical_time(const perturb::PerturbedSpectrum& spec);

struct PeakResult {
    double time = 0.0;
    double value = 0.0;
    int grid_points = 0;
};

/// Grid scan of the spectral fidelity over [0, horizon_multiple/eps_1],
/// densified past min_points when the spectral bandwidth demands it, then
/// golden-section refinement around the best sample.
PeakResult peak_fidelity(const spectra::Tuplet& t, const perturb::PerturbedSpectrum& spec,
                         double horizon_multiple = 4.0, int min_points = 2000);

struct LowerBoundAudit {
    std::vector<double> tau;
    std::vector<double> lhs;  // ||rho_w(tau) - E_1||_F^2
    std::vector<double> rhs;  // 4 eps_1 tau
    double min_margin = 0.0;  // min(rhs - lhs)
    bool pass = true;         // lhs <= rhs + 1e-8 everywhere
};

LowerBoundAudit lower_bound_audit(const spectra::Tuplet& t, std::span<const double> taus);

struct PerfectFidelityReport {
    double overlap_principal = 0.0; // |<y_1|z_1>|
    double overlap_target = 0.0;    // |<y_1|w>|
    double gap = 0.0;               // | |<y_1|z_1>| - |<y_1|w>| |
};

/// Structure of the principal perturbed eigenvector: for families whose peak
/// fidelity approaches 1 it tends to an equal superposition of z_1 and w.
PerfectFidelityReport perfect_fidelity_check(const spectra::Tuplet& t,
                                             const perturb::PerturbedSpectrum& spec);

struct FidelityCurve {
    std::vector<double> times;
    std::vector<double> direct;
    std::vector<double> spectral;
    double t_star = 0.0;
    double f_at_t_star = 0.0;
    double peak_time = 0.0;
    double peak_value = 0.0;
};

/// Samples both fidelity routes on a uniform grid over [0, t_max].
FidelityCurve sample_curve(const spectra::Tuplet& t, const perturb::PerturbedSpectrum& spec,
                           double t_max, int points);

} // namespace sslab::walk
