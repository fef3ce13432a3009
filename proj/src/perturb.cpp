#include "sslab/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sslab::perturb {

namespace {

constexpr double kIdentityTolerance = 1e-7;
constexpr double kWeylSlack = -1e-9;
constexpr int kBisectIterCap = 200;
constexpr double kBisectTol = 1e-13;

struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double value) {
        const double y = value - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

double secular_unchecked(const spectra::Tuplet& t, double x) {
    const int d = t.decomposition.distinct_count();
    KahanSum sum;
    for (int r = d - 1; r >= 0; --r) {
        const double eps2 = t.shadows(r) * t.shadows(r);
        if (eps2 == 0.0) continue;
        sum.add(eps2 / (x - t.gamma * t.theta(r)));
    }
    return 1.0 - sum.sum;
}

// Bisection on [lo, hi] with g(lo) < 0 < g(hi); g is monotone between poles.
double bisect_root(const spectra::Tuplet& t, double lo, double hi, double* residual) {
    double mid = 0.5 * (lo + hi);
    for (int iter = 0; iter < kBisectIterCap; ++iter) {
        mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break; // interval collapsed to adjacent doubles
        const double g = secular_unchecked(t, mid);
        if (g == 0.0) break;
        if (g < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= kBisectTol) {
            mid = 0.5 * (lo + hi);
            break;
        }
    }
    if (residual) *residual = std::abs(secular_unchecked(t, mid));
    return mid;
}

double overlap_from_inversion(const spectra::Tuplet& t, double zeta) {
    const int d = t.decomposition.distinct_count();
    KahanSum sum;
    for (int r = d - 1; r >= 0; --r) {
        const double eps2 = t.shadows(r) * t.shadows(r);
        if (eps2 == 0.0) continue;
        const double gap = zeta - t.gamma * t.theta(r);
        sum.add(eps2 / (gap * gap));
    }
    return 1.0 / sum.sum;
}

// Bracket low end just above a pole: far enough in that the pole term
// dominates and g is negative.
double walk_in_low(const spectra::Tuplet& t, double pole, double eps2, double interval) {
    double step = std::min(1e-3 * eps2, 1e-2 * interval);
    step = std::max(step, pole_guard(t.gamma) * 1e-3);
    for (int i = 0; i < 200; ++i) {
        const double lo = pole + step;
        if (secular_unchecked(t, lo) < 0.0) return lo;
        step *= 0.25;
        if (step < std::numeric_limits<double>::min() * 8) break;
    }
    throw BracketError("secular bracket failed just above pole " + std::to_string(pole));
}

// Bracket high end just below a pole, where g tends to +infinity.
double walk_in_high(const spectra::Tuplet& t, double pole, double eps2, double interval) {
    double step = std::min(1e-3 * eps2, 1e-2 * interval);
    step = std::max(step, pole_guard(t.gamma) * 1e-3);
    for (int i = 0; i < 200; ++i) {
        const double hi = pole - step;
        if (secular_unchecked(t, hi) > 0.0) return hi;
        step *= 0.25;
        if (step < std::numeric_limits<double>::min() * 8) break;
    }
    throw BracketError("secular bracket failed just below pole " + std::to_string(pole));
}

// Root above the top pole: anchored by the quadratic-root displacement bound,
// expanded geometrically if the spectrum convention needs more room.
double top_root(const spectra::Tuplet& t, double* residual) {
    const double eps1 = t.shadows(0);
    const double eps2 = eps1 * eps1;
    const double top_pole = t.gamma * t.theta(0);
    const double beta_plus =
        0.5 * (eps2 + std::sqrt(eps2 * eps2 + 4.0 * t.gamma * eps2));
    const double lo = walk_in_low(t, top_pole, eps2, std::max(beta_plus, 1.0));
    double hi = top_pole + beta_plus * (1.0 + 1e-9) + pole_guard(t.gamma);
    int expansions = 0;
    while (secular_unchecked(t, hi) < 0.0) {
        hi = top_pole + 2.0 * (hi - top_pole);
        if (++expansions > 80) {
            throw BracketError("top secular root not bracketed below " + std::to_string(hi));
        }
    }
    return bisect_root(t, lo, hi, residual);
}

} // namespace

double pole_guard(double gamma) { return 1e-12 * std::max(1.0, gamma); }

double secular_eval(const spectra::Tuplet& t, double x) {
    const double guard = pole_guard(t.gamma);
    for (int r = 0; r < t.decomposition.distinct_count(); ++r) {
        if (t.shadows(r) <= t.support_threshold) continue;
        if (std::abs(x - t.gamma * t.theta(r)) < guard) {
            throw PoleProximityError("secular_eval: x within pole guard of gamma*theta_" +
                                     std::to_string(r + 1));
        }
    }
    return secular_unchecked(t, x);
}

PerturbedSpectrum find_top_two(const spectra::Tuplet& t) {
    if (t.decomposition.distinct_count() < 2) {
        throw std::domain_error("find_top_two: need at least two distinct eigenvalues");
    }
    PerturbedSpectrum spec;
    spec.gamma = t.gamma;
    spec.full = false;

    double res1 = 0.0;
    const double zeta1 = top_root(t, &res1);

    const double eps2sq = t.shadows(1) * t.shadows(1);
    double zeta2 = 0.0;
    double res2 = 0.0;
    if (t.shadows(1) <= t.support_threshold) {
        // theta_2 carries no shadow: the eigenvalue stays put.
        zeta2 = t.gamma * t.theta(1);
        spec.second_strict = false;
    } else {
        const double pole_low = t.gamma * t.theta(1);
        const double pole_high = t.gamma * t.theta(0);
        const double width = pole_high - pole_low;
        const double lo = walk_in_low(t, pole_low, eps2sq, width);
        const double hi = walk_in_high(t, pole_high, t.shadows(0) * t.shadows(0), width);
        if (lo >= hi) {
            std::ostringstream msg;
            msg << "find_top_two: second bracket degenerate, gamma=" << t.gamma
                << " width=" << width;
            throw BracketError(msg.str());
        }
        zeta2 = bisect_root(t, lo, hi, &res2);
        spec.second_strict = true;
    }

    spec.zeta = {zeta1, zeta2};
    spec.multiplicity = {1, 1};
    spec.overlap = {overlap_from_inversion(t, zeta1),
                    spec.second_strict ? overlap_from_inversion(t, zeta2) : 0.0};
    spec.top_residual = res1;
    spec.second_residual = res2;
    return spec;
}

PerturbedSpectrum secular_spectrum(const spectra::Tuplet& t) {
    const int d = t.decomposition.distinct_count();
    std::vector<int> support;
    for (int r = 0; r < d; ++r) {
        if (t.shadows(r) > t.support_threshold) support.push_back(r);
    }

    struct Entry {
        double zeta;
        double overlap;
        int mult;
    };
    std::vector<Entry> entries;
    entries.reserve(static_cast<size_t>(d) + support.size());

    double res1 = 0.0, res2 = 0.0;
    for (size_t i = 0; i < support.size(); ++i) {
        const int r = support[i];
        const double eps2 = t.shadows(r) * t.shadows(r);
        double root;
        double res = 0.0;
        if (i == 0) {
            root = top_root(t, &res);
            res1 = res;
        } else {
            const double pole_low = t.gamma * t.theta(r);
            const double pole_high = t.gamma * t.theta(support[i - 1]);
            const double width = pole_high - pole_low;
            const double eps2_high = t.shadows(support[i - 1]) * t.shadows(support[i - 1]);
            const double lo = walk_in_low(t, pole_low, eps2, width);
            const double hi = walk_in_high(t, pole_high, eps2_high, width);
            root = bisect_root(t, lo, hi, &res);
            if (i == 1) res2 = res;
        }
        entries.push_back({root, overlap_from_inversion(t, root), 1});
    }
    for (int r = 0; r < d; ++r) {
        const bool supported = t.shadows(r) > t.support_threshold;
        const int stationary = t.decomposition.multiplicity(r) - (supported ? 1 : 0);
        if (stationary > 0) {
            entries.push_back({t.gamma * t.theta(r), 0.0, stationary});
        }
    }
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.zeta > b.zeta; });

    PerturbedSpectrum spec;
    spec.gamma = t.gamma;
    spec.full = true;
    spec.second_strict = d >= 2 && t.shadows(1) > t.support_threshold;
    spec.top_residual = res1;
    spec.second_residual = res2;
    for (const Entry& e : entries) {
        spec.zeta.push_back(e.zeta);
        spec.overlap.push_back(e.overlap);
        spec.multiplicity.push_back(e.mult);
    }
    return spec;
}

PerturbedSpectrum full_perturbed_spectrum(const spectra::Tuplet& t) {
    linalg::EigenSystem eig;
    if (t.target_is_real()) {
        const RealVector w = t.target.real();
        RealMatrix ht = t.gamma * t.hamiltonian.matrix();
        ht.noalias() += w * w.transpose();
        eig = linalg::symmetric_eig(ht);
    } else {
        ComplexMatrix ht = t.gamma * t.hamiltonian.complex();
        ht.noalias() += t.target * t.target.adjoint();
        eig = linalg::hermitian_eig(ht);
    }
    auto clusters = std::make_shared<spectra::SpectralDecomposition>(
        spectra::SpectralDecomposition::from_eigensystem(std::move(eig),
                                                         t.decomposition.cluster_tolerance()));
    PerturbedSpectrum spec;
    spec.gamma = t.gamma;
    spec.full = true;
    spec.second_strict =
        t.decomposition.distinct_count() >= 2 && t.shadows(1) > t.support_threshold;
    const int p_count = clusters->distinct_count();
    spec.zeta.resize(p_count);
    spec.overlap.resize(p_count);
    spec.multiplicity.resize(p_count);
    for (int p = 0; p < p_count; ++p) {
        spec.zeta[p] = clusters->eigenvalue(p);
        spec.overlap[p] = clusters->apply(p, t.target).squaredNorm();
        spec.multiplicity[p] = clusters->multiplicity(p);
    }
    spec.clusters = std::move(clusters);
    return spec;
}

WeylAudit weyl_audit(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("weyl_audit: dimension mismatch");
    }
    const RealVector wa = linalg::hermitian_eigenvalues(a);
    const RealVector wb = linalg::hermitian_eigenvalues(b);
    const RealVector wab = linalg::hermitian_eigenvalues(a + b);
    const int n = static_cast<int>(wa.size());

    WeylAudit audit;
    audit.worst_slack = std::numeric_limits<double>::infinity();
    auto record = [&audit](double slack) {
        audit.worst_slack = std::min(audit.worst_slack, slack);
        ++audit.inequalities_checked;
        if (slack < kWeylSlack) ++audit.violations;
    };
    // lambda_i(A+B) <= lambda_{i-j}(A) + lambda_{j+1}(B), j = 0..i-1 (1-based)
    for (int i = 1; i <= n; ++i) {
        for (int j = 0; j <= i - 1; ++j) {
            record(wa(i - j - 1) + wb(j) - wab(i - 1));
        }
    }
    // lambda_{i+j}(A) + lambda_{n-j}(B) <= lambda_i(A+B), j = 0..n-i
    for (int i = 1; i <= n; ++i) {
        for (int j = 0; j <= n - i; ++j) {
            record(wab(i - 1) - wa(i + j - 1) - wb(n - j - 1));
        }
    }
    audit.pass = audit.violations == 0;
    return audit;
}

IdentityAudit identity_audit(const spectra::Tuplet& t, const PerturbedSpectrum& spec) {
    if (!spec.full || !spec.clusters) {
        throw std::invalid_argument("identity_audit: needs a dense full perturbed spectrum");
    }
    const double guard = pole_guard(t.gamma);
    const int d = t.decomposition.distinct_count();
    const int p_count = static_cast<int>(spec.zeta.size());

    IdentityAudit audit;
    IdentityResidual inv{"overlap_inversion", 0.0, 0, 0};
    IdentityResidual unity{"unity", 0.0, 0, 0};
    IdentityResidual subst{"principal_substitution", 0.0, 0, 0};
    IdentityResidual signed_unity{"signed_unity", 0.0, 0, 0};
    IdentityResidual flip{"trace_flip", 0.0, 0, 0};

    const ComplexVector z1 = t.decomposition.principal_vector();
    const ComplexVector e1w = t.decomposition.apply(0, t.target);

    auto near_pole = [&](double zeta) {
        for (int r = 0; r < d; ++r) {
            if (t.shadows(r) <= t.support_threshold) continue;
            if (std::abs(zeta - t.gamma * t.theta(r)) < guard) return true;
        }
        return false;
    };

    KahanSum signed_sum;
    for (int p = p_count - 1; p >= 0; --p) {
        if (spec.overlap[p] > 1e-14 && std::abs(spec.zeta[p] - t.gamma) > guard) {
            signed_sum.add(spec.overlap[p] / (spec.zeta[p] - t.gamma));
        }
    }
    signed_unity.residual = std::abs(std::abs(signed_sum.sum) - 1.0);
    signed_unity.clusters_checked = 1;

    for (int p = 0; p < p_count; ++p) {
        const double zeta = spec.zeta[p];
        const double overlap = spec.overlap[p];
        const bool stationary = overlap <= 1e-14;
        if (stationary || near_pole(zeta)) {
            ++inv.clusters_skipped;
            ++unity.clusters_skipped;
            ++subst.clusters_skipped;
            ++flip.clusters_skipped;
            continue;
        }

        // 1/||F_p w||^2 = sum_r eps_r^2 / (zeta_p - gamma theta_r)^2
        const double inv_lhs = 1.0 / overlap;
        const double inv_rhs = 1.0 / overlap_from_inversion(t, zeta);
        inv.residual = std::max(inv.residual, std::abs(inv_lhs - inv_rhs) / std::abs(inv_rhs));
        ++inv.clusters_checked;

        // 1 = sum_r eps_r^2 / (zeta_p - gamma theta_r)
        KahanSum unity_sum;
        for (int r = d - 1; r >= 0; --r) {
            const double eps2 = t.shadows(r) * t.shadows(r);
            if (eps2 == 0.0) continue;
            unity_sum.add(eps2 / (zeta - t.gamma * t.theta(r)));
        }
        unity.residual = std::max(unity.residual, std::abs(unity_sum.sum - 1.0));
        ++unity.clusters_checked;

        // E_1 F_p w = ||F_p w||^2 / (zeta_p - gamma) * E_1 w
        if (std::abs(zeta - t.gamma) > guard) {
            const ComplexVector fpw = spec.clusters->apply(p, t.target);
            const ComplexVector lhs = t.decomposition.apply(0, fpw);
            const ComplexVector rhs = (overlap / (zeta - t.gamma)) * e1w;
            const double scale = std::max(rhs.norm(), 1e-300);
            subst.residual = std::max(subst.residual, (lhs - rhs).norm() / scale);
            ++subst.clusters_checked;

            // eps_1^2 ||F_p w||^2 = (zeta_p - gamma)^2 <F_p, E_1>
            const double eps1sq = t.shadows(0) * t.shadows(0);
            const double lhs_flip = eps1sq * overlap;
            const double gap = zeta - t.gamma;
            const double fp_e1 = spec.clusters->apply(p, z1).squaredNorm();
            const double rhs_flip = gap * gap * fp_e1;
            flip.residual = std::max(flip.residual,
                                     std::abs(lhs_flip - rhs_flip) / std::max(lhs_flip, rhs_flip));
            ++flip.clusters_checked;
        } else {
            ++subst.clusters_skipped;
            ++flip.clusters_skipped;
        }
    }

    audit.identities = {inv, unity, subst, signed_unity, flip};
    for (const auto& id : audit.identities) {
        audit.max_residual = std::max(audit.max_residual, id.residual);
    }
    audit.pass = audit.max_residual <= kIdentityTolerance;
    return audit;
}

DeltaBoundAudit delta_bound_audit(const spectra::Tuplet& t, const PerturbedSpectrum& spec) {
    DeltaBoundAudit audit;
    const double s1 = spectra::moment_sk(t, 1);
    const double eps1 = t.shadows(0);
    if (t.hamiltonian.convention != graphs::Convention::unit_interval) {
        audit.skip_reason = "bounds require the unit-interval convention";
        return audit;
    }
    if (std::abs(t.gamma - s1) > 1e-9 * std::max(1.0, s1)) {
        audit.skip_reason = "gamma differs from S_1";
        return audit;
    }
    if (eps1 > 0.2) {
        audit.skip_reason = "principal shadow too large (eps_1 > 0.2)";
        return audit;
    }
    audit.applicable = true;
    const double eps2 = eps1 * eps1;
    const double disc = std::sqrt(eps2 * eps2 + 4.0 * s1 * eps2);
    audit.beta_plus = 0.5 * (eps2 + disc);
    audit.beta_minus = 0.5 * (-eps2 + disc);
    audit.delta_plus = spec.delta_plus();
    audit.delta_minus = spec.delta_minus();
    const double scale = std::sqrt(s1) * eps1;
    audit.ratio_plus = audit.delta_plus / scale;
    audit.ratio_minus = -audit.delta_minus / scale;
    audit.lower_strict = audit.delta_plus > eps2;
    audit.upper_ok = audit.delta_plus <= audit.beta_plus * (1.0 + 1e-12);
    if (spec.second_strict) {
        audit.minus_ok =
            audit.delta_minus < 0.0 && -audit.delta_minus <= audit.beta_minus * (1.0 + 1e-12);
    } else {
        audit.minus_ok = true; // bound only claimed when theta_2 is supported
    }
    audit.pass = audit.lower_strict && audit.upper_ok && audit.minus_ok;
    return audit;
}

InterlacingAudit interlacing_audit(const spectra::Tuplet& t, const PerturbedSpectrum& spec) {
    if (t.decomposition.distinct_count() < 2) {
        throw std::domain_error("interlacing_audit: need at least two distinct eigenvalues");
    }
    InterlacingAudit audit;
    audit.strict_expected = t.shadows(1) > t.support_threshold;
    const double zeta1 = spec.zeta.at(0);
    const double zeta2 = spec.zeta.at(1);
    const double lower_pole = t.gamma * t.theta(1);
    const double m_top = zeta1 - t.gamma;
    const double m_mid = t.gamma - zeta2;
    const double m_low = zeta2 - lower_pole;
    audit.margin = std::min({m_top, m_mid, m_low});
    if (audit.strict_expected) {
        audit.pass = m_top > 0.0 && m_mid > 0.0 && m_low > 0.0;
    } else {
        audit.non_strict = true;
        const double tol = 1e-9 * std::max(1.0, t.gamma);
        audit.pass = m_top > 0.0 && m_mid >= -tol && m_low >= -tol;
    }
    return audit;
}

} // namespace sslab::perturb
