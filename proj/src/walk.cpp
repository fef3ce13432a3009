#include "sslab/walk.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

namespace sslab::walk {

namespace {

linalg::EigenSystem perturbed_eigensystem(const spectra::Tuplet& t) {
    if (t.target_is_real()) {
        const RealVector w = t.target.real();
        RealMatrix ht = t.gamma * t.hamiltonian.matrix();
        ht.noalias() += w * w.transpose();
        return linalg::symmetric_eig(ht);
    }
    ComplexMatrix ht = t.gamma * t.hamiltonian.complex();
    ht.noalias() += t.target * t.target.adjoint();
    return linalg::hermitian_eig(ht);
}

} // namespace

WalkSimulator::WalkSimulator(const spectra::Tuplet& t)
    : WalkSimulator(t, perturbed_eigensystem(t)) {}

WalkSimulator::WalkSimulator(const spectra::Tuplet& t, linalg::EigenSystem eig)
    : eig_(std::move(eig)) {
    const ComplexVector z1 = t.decomposition.principal_vector();
    const ComplexVector uz = eig_.eigenvectors.adjoint() * z1;
    const ComplexVector uw = eig_.eigenvectors.adjoint() * t.target;
    const int n = eig_.dim();
    overlap_target_.resize(n);
    weight_principal_.resize(n);
    for (int j = 0; j < n; ++j) {
        overlap_target_(j) = std::conj(uw(j)) * uz(j);
        weight_principal_(j) = std::norm(uz(j));
    }
}

double WalkSimulator::fidelity(double t) const {
    // f(t) = |w^dagger U e^{-it Lambda} U^dagger z_1|^2
    std::complex<double> amp = 0.0;
    for (int j = 0; j < eig_.dim(); ++j) {
        amp += overlap_target_(j) * std::exp(std::complex<double>(0.0, -t * eig_.eigenvalues(j)));
    }
    return std::norm(amp);
}

double WalkSimulator::distance_squared(double t) const {
    // rho(t) and E_1 are rank-one with unit Frobenius norm, so
    // ||rho(t) - E_1||^2 = 2 - 2 |sum_j e^{-it lambda_j} |u_j^dagger z_1|^2|^2.
    std::complex<double> amp = 0.0;
    for (int j = 0; j < eig_.dim(); ++j) {
        amp += weight_principal_(j) * std::exp(std::complex<double>(0.0, -t * eig_.eigenvalues(j)));
    }
    return 2.0 - 2.0 * std::norm(amp);
}

double fidelity_direct(const spectra::Tuplet& t, double time) {
    const linalg::EigenSystem eig = perturbed_eigensystem(t);
    const ComplexMatrix rho0 = t.decomposition.projector(0);
    const ComplexMatrix rho = linalg::evolve_density(rho0, eig, time);
    return (t.target.adjoint() * rho * t.target).value().real();
}

double fidelity_spectral(const spectra::Tuplet& t, const perturb::PerturbedSpectrum& spec,
                         double time) {
    if (!spec.full) {
        throw std::invalid_argument("fidelity_spectral: needs the full perturbed spectrum");
    }
    const double guard = perturb::pole_guard(t.gamma);
    std::complex<double> sum = 0.0;
    for (size_t p = 0; p < spec.zeta.size(); ++p) {
        if (spec.overlap[p] <= 1e-14) continue;
        const double gap = spec.zeta[p] - spec.gamma;
        if (std::abs(gap) < guard) {
            throw perturb::PoleProximityError(
                "fidelity_spectral: perturbed eigenvalue coincides with gamma");
        }
        sum += std::exp(std::complex<double>(0.0, -time * spec.zeta[p])) * (spec.overlap[p] / gap);
    }
    const double eps1 = t.shadows(0);
    return eps1 * eps1 * std::norm(sum);
}

double critical_time(const perturb::PerturbedSpectrum& spec) {
    const double gap = spec.top_gap();
    if (gap < 1e-13) throw std::domain_error("critical_time: degenerate top gap");
    return M_PI / gap;
}

PeakResult peak_fidelity(const spectra::Tuplet& t, const perturb::PerturbedSpectrum& spec,
                         double horizon_multiple, int min_points) {
    if (horizon_multiple < 1.0) {
        throw std::invalid_argument("peak_fidelity: horizon multiple must be >= 1");
    }
    const double horizon = horizon_multiple / t.shadows(0);

    // Resolve the fastest oscillation: the amplitude mixes frequencies up to
    // the spectral width of the contributing eigenvalues.
    double z_lo = spec.zeta.front(), z_hi = spec.zeta.front();
    for (size_t p = 0; p < spec.zeta.size(); ++p) {
        if (spec.overlap[p] <= 1e-14) continue;
        z_lo = std::min(z_lo, spec.zeta[p]);
        z_hi = std::max(z_hi, spec.zeta[p]);
    }
    const double bandwidth = (z_hi - z_lo) / (2.0 * M_PI);
    int points = min_points;
    const double needed = horizon * bandwidth * 8.0;
    if (needed > points) points = static_cast<int>(std::min(needed, 4.0e6));

    double best_t = 0.0;
    double best_f = -1.0;
    for (int i = 0; i <= points; ++i) {
        const double ti = horizon * i / points;
        const double f = fidelity_spectral(t, spec, ti);
        if (f > best_f) {
            best_f = f;
            best_t = ti;
        }
    }

    // Golden-section refinement around the best sample.
    const double step = horizon / points;
    double a = std::max(0.0, best_t - step);
    double b = std::min(horizon, best_t + step);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = fidelity_spectral(t, spec, x1);
    double f2 = fidelity_spectral(t, spec, x2);
    while (b - a > 1e-6 * std::max(1.0, best_t)) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = fidelity_spectral(t, spec, x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = fidelity_spectral(t, spec, x1);
        }
    }
    const double mid = 0.5 * (a + b);
    const double fm = fidelity_spectral(t, spec, mid);
    PeakResult result;
    result.grid_points = points;
    if (fm >= best_f) {
        result.time = mid;
        result.value = fm;
    } else {
        result.time = best_t;
        result.value = best_f;
    }
    return result;
}

LowerBoundAudit lower_bound_audit(const spectra::Tuplet& t, std::span<const double> taus) {
    const WalkSimulator sim(t);
    const double eps1 = t.shadows(0);
    LowerBoundAudit audit;
    audit.min_margin = std::numeric_limits<double>::infinity();
    for (double tau : taus) {
        if (tau < 0.0) throw std::invalid_argument("lower_bound_audit: tau must be >= 0");
        const double lhs = sim.distance_squared(tau);
        const double rhs = 4.0 * eps1 * tau;
        audit.tau.push_back(tau);
        audit.lhs.push_back(lhs);
        audit.rhs.push_back(rhs);
        audit.min_margin = std::min(audit.min_margin, rhs - lhs);
        if (lhs > rhs + 1e-8) audit.pass = false;
    }
    return audit;
}

PerfectFidelityReport perfect_fidelity_check(const spectra::Tuplet& t,
                                             const perturb::PerturbedSpectrum& spec) {
    if (!spec.clusters || !spec.clusters->eigenvector_backed()) {
        throw std::invalid_argument("perfect_fidelity_check: needs a dense perturbed spectrum");
    }
    if (spec.clusters->multiplicity(0) != 1) {
        throw std::domain_error("perfect_fidelity_check: top perturbed eigenvalue degenerate");
    }
    const ComplexVector y1 = spec.clusters->eigensystem().eigenvectors.col(0);
    const ComplexVector z1 = t.decomposition.principal_vector();
    PerfectFidelityReport report;
    report.overlap_principal = std::abs((y1.adjoint() * z1).value());
    report.overlap_target = std::abs((y1.adjoint() * t.target).value());
    report.gap = std::abs(report.overlap_principal - report.overlap_target);
    return report;
}

FidelityCurve sample_curve(const spectra::Tuplet& t, const perturb::PerturbedSpectrum& spec,
                           double t_max, int points) {
    if (points < 2 || t_max <= 0.0) {
        throw std::invalid_argument("sample_curve: need t_max > 0 and at least two points");
    }
    const WalkSimulator sim(t);
    FidelityCurve curve;
    curve.times.reserve(points);
    curve.direct.reserve(points);
    curve.spectral.reserve(points);
    for (int i = 0; i < points; ++i) {
        const double ti = t_max * i / (points - 1);
        curve.times.push_back(ti);
        curve.direct.push_back(sim.fidelity(ti));
        curve.spectral.push_back(fidelity_spectral(t, spec, ti));
    }
    curve.t_star = critical_time(spec);
    curve.f_at_t_star = fidelity_spectral(t, spec, curve.t_star);
    const PeakResult peak = peak_fidelity(t, spec);
    curve.peak_time = peak.time;
    curve.peak_value = peak.value;
    return curve;
}

} // namespace sslab::walk
