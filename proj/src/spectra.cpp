#include "sslab/spectra.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sslab::spectra {

namespace {

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

} // namespace

void SpectralDecomposition::cluster_values(const RealVector& values_desc) {
    dim_ = static_cast<int>(values_desc.size());
    theta_.clear();
    mult_.clear();
    offset_.clear();
    int start = 0;
    for (int i = 1; i <= dim_; ++i) {
        const bool boundary = (i == dim_) || (values_desc(i - 1) - values_desc(i) > tolerance_);
        if (i < dim_) {
            const double gap = values_desc(i - 1) - values_desc(i);
            if (gap > 0.1 * tolerance_ && gap <= tolerance_) ambiguous_ = true;
        }
        if (boundary) {
            double mean = 0.0;
            for (int j = start; j < i; ++j) mean += values_desc(j);
            mean /= (i - start);
            theta_.push_back(mean);
            mult_.push_back(i - start);
            offset_.push_back(start);
            start = i;
        }
    }
}

SpectralDecomposition SpectralDecomposition::from_eigensystem(linalg::EigenSystem eig,
                                                              double cluster_tolerance) {
    SpectralDecomposition d;
    d.tolerance_ = cluster_tolerance;
    d.cluster_values(eig.eigenvalues);
    d.vectors_ = std::make_shared<linalg::EigenSystem>(std::move(eig));
    return d;
}

SpectralDecomposition SpectralDecomposition::from_operator(std::shared_ptr<const RealMatrix> h,
                                                           const RealVector& eigenvalues_desc,
                                                           double cluster_tolerance) {
    if (!h || h->rows() != eigenvalues_desc.size()) {
        throw std::invalid_argument("from_operator: operator/eigenvalue size mismatch");
    }
    SpectralDecomposition d;
    d.tolerance_ = cluster_tolerance;
    d.cluster_values(eigenvalues_desc);
    d.operator_ = std::move(h);
    return d;
}

const linalg::EigenSystem& SpectralDecomposition::eigensystem() const {
    if (!vectors_) throw std::logic_error("decomposition is not eigenvector-backed");
    return *vectors_;
}

ComplexVector SpectralDecomposition::apply(int r, const ComplexVector& x) const {
    if (r < 0 || r >= distinct_count()) throw std::out_of_range("projector index");
    if (vectors_) {
        const auto block =
            vectors_->eigenvectors.middleCols(offset_[r], mult_[r]);
        return block * (block.adjoint() * x);
    }
    // Lagrange form: prod_{s != r} (H - theta_s I) / (theta_r - theta_s)
    ComplexVector v = x;
    for (int s = 0; s < distinct_count(); ++s) {
        if (s == r) continue;
        ComplexVector hv(v.size());
        hv.real() = (*operator_) * v.real();
        hv.imag() = (*operator_) * v.imag();
        v = (hv - theta_[s] * v) / (theta_[r] - theta_[s]);
    }
    return v;
}

RealVector SpectralDecomposition::apply(int r, const RealVector& x) const {
    if (r < 0 || r >= distinct_count()) throw std::out_of_range("projector index");
    if (vectors_) {
        const auto block = vectors_->eigenvectors.middleCols(offset_[r], mult_[r]);
        return (block * (block.adjoint() * x.cast<std::complex<double>>())).real();
    }
    RealVector v = x;
    for (int s = 0; s < distinct_count(); ++s) {
        if (s == r) continue;
        v = ((*operator_) * v - theta_[s] * v) / (theta_[r] - theta_[s]);
    }
    return v;
}

ComplexMatrix SpectralDecomposition::projector(int r) const {
    if (r < 0 || r >= distinct_count()) throw std::out_of_range("projector index");
    if (vectors_) {
        const auto block = vectors_->eigenvectors.middleCols(offset_[r], mult_[r]);
        return block * block.adjoint();
    }
    ComplexMatrix e = ComplexMatrix::Identity(dim_, dim_);
    const ComplexMatrix h = operator_->cast<std::complex<double>>();
    for (int s = 0; s < distinct_count(); ++s) {
        if (s == r) continue;
        e = (h * e - theta_[s] * e) / (theta_[r] - theta_[s]);
    }
    return e;
}

ComplexVector SpectralDecomposition::principal_vector() const {
    if (mult_[0] != 1) throw std::logic_error("principal eigenvalue is not simple");
    if (vectors_) return vectors_->eigenvectors.col(0);
    // Extract z1 from E_1 applied to a basis vector with nonzero overlap.
    const int n = dim_;
    for (int seed = 0; seed < n; ++seed) {
        RealVector e = RealVector::Zero(n);
        e(seed) = 1.0;
        RealVector v = apply(0, e);
        const double norm = v.norm();
        if (norm > 1e-8) return (v / norm).cast<std::complex<double>>();
    }
    throw std::runtime_error("principal eigenvector extraction failed");
}

SpectralDecomposition decompose(linalg::EigenSystem eig, double cluster_tolerance) {
    return SpectralDecomposition::from_eigensystem(std::move(eig), cluster_tolerance);
}

bool Tuplet::target_is_real() const { return (target.imag().array() == 0.0).all(); }

Tuplet make_tuplet(graphs::NormalizedHamiltonian h, SpectralDecomposition decomp,
                   ComplexVector w, std::optional<double> gamma, double support_threshold) {
    if (w.size() != decomp.dim()) {
        throw std::invalid_argument("make_tuplet: target vector dimension mismatch");
    }
    if (std::abs(w.norm() - 1.0) > 1e-10) {
        throw std::invalid_argument("make_tuplet: target vector must have unit norm");
    }
    Tuplet t;
    t.hamiltonian = std::move(h);
    t.decomposition = std::move(decomp);
    t.target = std::move(w);
    t.support_threshold = support_threshold;

    const int d = t.decomposition.distinct_count();
    t.shadows.resize(d);
    t.gaps.resize(d);
    double parseval = 0.0;
    for (int r = 0; r < d; ++r) {
        t.shadows(r) = t.decomposition.apply(r, t.target).norm();
        t.gaps(r) = t.decomposition.eigenvalue(0) - t.decomposition.eigenvalue(r);
        parseval += t.shadows(r) * t.shadows(r);
    }
    if (std::abs(parseval - 1.0) > 1e-9) {
        throw std::invalid_argument("make_tuplet: shadows fail Parseval, sum = " +
                                    std::to_string(parseval));
    }
    if (t.shadows(0) <= support_threshold) {
        throw std::invalid_argument(
            "make_tuplet: target has no shadow on the principal eigenspace");
    }
    t.gamma = gamma ? *gamma : moment_sk(t, 1);
    if (t.gamma <= 0.0) throw std::invalid_argument("make_tuplet: gamma must be positive");
    return t;
}

Tuplet make_tuplet(const graphs::NormalizedHamiltonian& h, ComplexVector w,
                   std::optional<double> gamma, double cluster_tolerance, int dense_threshold) {
    SpectralDecomposition decomp =
        h.dim() <= dense_threshold
            ? SpectralDecomposition::from_eigensystem(linalg::symmetric_eig(h.matrix()),
                                                      cluster_tolerance)
            : SpectralDecomposition::from_operator(h.h, h.spectrum, cluster_tolerance);
    return make_tuplet(h, std::move(decomp), std::move(w), gamma);
}

std::set<int> eigenvalue_support(const Tuplet& t, double threshold) {
    std::set<int> support;
    for (int r = 0; r < t.decomposition.distinct_count(); ++r) {
        if (t.shadows(r) > threshold) support.insert(r);
    }
    return support;
}

double moment_sk(const Tuplet& t, int k) {
    if (k < 1 || k > 3) throw std::invalid_argument("moment_sk: k must be 1, 2 or 3");
    const int d = t.decomposition.distinct_count();
    if (d < 2) throw std::domain_error("moment_sk: no non-principal eigenvalue");
    // Sum in descending-gap order (smallest terms first) with compensation;
    // cycle spectra make the gaps span several orders of magnitude.
    KahanSum sum;
    for (int r = d - 1; r >= 1; --r) {
        sum.add(t.shadows(r) * t.shadows(r) / std::pow(t.gaps(r), k));
    }
    return sum.sum;
}

double gap_delta2(const SpectralDecomposition& decomp) {
    if (decomp.distinct_count() < 2) {
        throw std::domain_error("gap_delta2: single distinct eigenvalue");
    }
    return decomp.eigenvalue(0) - decomp.eigenvalue(1);
}

double shadow_eps1(const Tuplet& t) {
    if (t.shadows(0) <= t.support_threshold) {
        throw std::invalid_argument("shadow_eps1: principal shadow below support threshold");
    }
    return t.shadows(0);
}

} // namespace sslab::spectra
