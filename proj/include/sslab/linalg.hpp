#pragma once

#include <Eigen/Dense>
#include <complex>

namespace sslab {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

namespace linalg {

/// Full eigendecomposition of a Hermitian matrix.
/// Eigenvalues are real and sorted descending; eigenvector columns are
/// orthonormal and column j pairs with eigenvalues(j).
struct EigenSystem {
    RealVector eigenvalues;
    ComplexMatrix eigenvectors;

    int dim() const { return static_cast<int>(eigenvalues.size()); }
};

/// max_ij |a(i,j) - conj(a(j,i))|
double hermiticity_defect(const ComplexMatrix& a);

bool is_hermitian(const ComplexMatrix& a, double tol = 1e-12);

/// Eigendecomposition of a Hermitian matrix; throws std::invalid_argument on
/// non-square or non-Hermitian input. Real-symmetric inputs take a faster
/// real solver path.
EigenSystem hermitian_eig(const ComplexMatrix& h);
EigenSystem symmetric_eig(const RealMatrix& h);

/// Eigenvalues only (descending), without accumulating eigenvectors.
RealVector hermitian_eigenvalues(const ComplexMatrix& h);
RealVector symmetric_eigenvalues(const RealMatrix& h);

/// Unitary density-matrix evolution exp(-itH) rho0 exp(itH), with H given
/// through its eigendecomposition. rho0 must have unit trace (within 1e-8).
ComplexMatrix evolve_density(const ComplexMatrix& rho0, const EigenSystem& eig, double t);

/// sqrt(Tr(A^dagger A))
double frobenius_norm(const ComplexMatrix& a);

/// max |eigenvalue| of a Hermitian matrix.
double spectral_norm(const ComplexMatrix& a);
double spectral_norm(const RealMatrix& a);

} // namespace linalg
} // namespace sslab
