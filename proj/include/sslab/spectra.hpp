#pragma once

#include "sslab/graphs.hpp"
#include "sslab/linalg.hpp"

#include <memory>
#include <optional>
#include <set>
#include <vector>

namespace sslab::spectra {

inline constexpr double kDefaultClusterTolerance = 1e-7;
inline constexpr double kDefaultSupportThreshold = 1e-10;

/// Distinct eigenvalues with orthogonal eigenprojectors. Projector actions are
/// backed either by eigenvector column blocks or, for large matrices whose
/// distinct-eigenvalue count is small, by Lagrange polynomials in the operator.
class SpectralDecomposition {
public:
    SpectralDecomposition() = default; // empty; fill via the factories

    static SpectralDecomposition from_eigensystem(linalg::EigenSystem eig,
                                                  double cluster_tolerance = kDefaultClusterTolerance);

    /// Values-only variant: `eigenvalues_desc` is the full descending spectrum
    /// of `h`. E_r x is evaluated as prod_{s != r} (h - theta_s) x / (theta_r - theta_s).
    static SpectralDecomposition from_operator(std::shared_ptr<const RealMatrix> h,
                                               const RealVector& eigenvalues_desc,
                                               double cluster_tolerance = kDefaultClusterTolerance);

    int distinct_count() const { return static_cast<int>(theta_.size()); }
    int dim() const { return dim_; }
    double eigenvalue(int r) const { return theta_[r]; }
    int multiplicity(int r) const { return mult_[r]; }
    double cluster_tolerance() const { return tolerance_; }

    /// Some inter-cluster gap fell inside [0.1 tol, tol]: clustering is
    /// reported as ambiguous but still usable.
    bool ambiguous_clustering() const { return ambiguous_; }

    ComplexVector apply(int r, const ComplexVector& x) const; // E_r x
    RealVector apply(int r, const RealVector& x) const;
    ComplexMatrix projector(int r) const; // dense E_r

    /// Unit eigenvector spanning the top eigenspace; requires multiplicity 1.
    ComplexVector principal_vector() const;

    bool eigenvector_backed() const { return vectors_ != nullptr; }
    const linalg::EigenSystem& eigensystem() const;

private:
    void cluster_values(const RealVector& values_desc);

    std::vector<double> theta_;
    std::vector<int> mult_;
    std::vector<int> offset_; // start of cluster r in the descending eigenvalue order
    int dim_ = 0;
    double tolerance_ = kDefaultClusterTolerance;
    bool ambiguous_ = false;
    std::shared_ptr<const linalg::EigenSystem> vectors_;
    std::shared_ptr<const RealMatrix> operator_;
};

/// The working triple: normalized Hamiltonian, unit target vector, positive
/// scaling. Caches the per-eigenspace shadows ||E_r w|| and top gaps.
struct Tuplet {
    graphs::NormalizedHamiltonian hamiltonian;
    SpectralDecomposition decomposition;
    ComplexVector target;
    double gamma = 0.0;
    RealVector shadows; // eps_r = ||E_r w||, indexed like the decomposition
    RealVector gaps;    // theta_1 - theta_r
    double support_threshold = kDefaultSupportThreshold;

    int dim() const { return decomposition.dim(); }
    double theta(int r) const { return decomposition.eigenvalue(r); }
    double shadow(int r) const { return shadows(r); }
    bool target_is_real() const;
};

/// Builds a tuplet; gamma defaults to the first spectral moment S_1.
/// Throws std::invalid_argument when ||w|| deviates from 1 beyond 1e-10, the
/// shadows fail Parseval, or the principal shadow is below the support
/// threshold.
Tuplet make_tuplet(graphs::NormalizedHamiltonian h, SpectralDecomposition decomp,
                   ComplexVector w, std::optional<double> gamma = std::nullopt,
                   double support_threshold = kDefaultSupportThreshold);

/// Convenience: decompose + make_tuplet, choosing the eigenvector or operator
/// backend by dimension.
Tuplet make_tuplet(const graphs::NormalizedHamiltonian& h, ComplexVector w,
                   std::optional<double> gamma = std::nullopt,
                   double cluster_tolerance = kDefaultClusterTolerance,
                   int dense_threshold = 2048);

SpectralDecomposition decompose(linalg::EigenSystem eig,
                                double cluster_tolerance = kDefaultClusterTolerance);

/// Indices r with eps_r above the threshold.
std::set<int> eigenvalue_support(const Tuplet& t, double threshold = kDefaultSupportThreshold);

/// S_k = sum_{r >= 2} eps_r^2 / (theta_1 - theta_r)^k for k in {1, 2, 3};
/// throws std::domain_error when there is no non-principal eigenvalue.
double moment_sk(const Tuplet& t, int k);

/// theta_1 - theta_2; throws std::domain_error when d = 1.
double gap_delta2(const SpectralDecomposition& decomp);

/// eps_1; throws std::invalid_argument when it sits below the threshold.
double shadow_eps1(const Tuplet& t);

} // namespace sslab::spectra
