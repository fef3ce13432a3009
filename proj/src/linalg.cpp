#include "sslab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

extern "C" {
void dsyevd_(const char* jobz, const char* uplo, const int* n, double* a, const int* lda,
             double* w, double* work, const int* lwork, int* iwork, const int* liwork,
             int* info);
void zheevd_(const char* jobz, const char* uplo, const int* n, std::complex<double>* a,
             const int* lda, double* w, std::complex<double>* work, const int* lwork,
             double* rwork, const int* lrwork, int* iwork, const int* liwork, int* info);
}

namespace sslab::linalg {

namespace {

void require_square(const Eigen::Index rows, const Eigen::Index cols) {
    if (rows != cols || rows < 1) {
        throw std::invalid_argument("matrix must be square and non-empty");
    }
}

// LAPACK divide-and-conquer solver on a real symmetric matrix. Returns
// ascending eigenvalues; vectors (when requested) overwrite `a` columnwise.
void dsyevd_inplace(RealMatrix& a, RealVector& w, bool vectors) {
    const int n = static_cast<int>(a.rows());
    w.resize(n);
    const char jobz = vectors ? 'V' : 'N';
    const char uplo = 'L';
    int info = 0;
    int lwork = -1, liwork = -1;
    double wkopt = 0;
    int iwkopt = 0;
    dsyevd_(&jobz, &uplo, &n, a.data(), &n, w.data(), &wkopt, &lwork, &iwkopt, &liwork, &info);
    lwork = static_cast<int>(wkopt);
    liwork = iwkopt;
    std::vector<double> work(static_cast<size_t>(lwork));
    std::vector<int> iwork(static_cast<size_t>(liwork));
    dsyevd_(&jobz, &uplo, &n, a.data(), &n, w.data(), work.data(), &lwork, iwork.data(),
            &liwork, &info);
    if (info != 0) {
        throw std::runtime_error("dsyevd failed, info=" + std::to_string(info));
    }
}

void zheevd_inplace(ComplexMatrix& a, RealVector& w, bool vectors) {
    const int n = static_cast<int>(a.rows());
    w.resize(n);
    const char jobz = vectors ? 'V' : 'N';
    const char uplo = 'L';
    int info = 0;
    int lwork = -1, lrwork = -1, liwork = -1;
    std::complex<double> wkopt = 0;
    double rwkopt = 0;
    int iwkopt = 0;
    zheevd_(&jobz, &uplo, &n, a.data(), &n, w.data(), &wkopt, &lwork, &rwkopt, &lrwork,
            &iwkopt, &liwork, &info);
    lwork = static_cast<int>(wkopt.real());
    lrwork = static_cast<int>(rwkopt);
    liwork = iwkopt;
    std::vector<std::complex<double>> work(static_cast<size_t>(lwork));
    std::vector<double> rwork(static_cast<size_t>(lrwork));
    std::vector<int> iwork(static_cast<size_t>(liwork));
    zheevd_(&jobz, &uplo, &n, a.data(), &n, w.data(), work.data(), &lwork, rwork.data(),
            &lrwork, iwork.data(), &liwork, &info);
    if (info != 0) {
        throw std::runtime_error("zheevd failed, info=" + std::to_string(info));
    }
}

bool imaginary_part_is_zero(const ComplexMatrix& a) {
    return (a.imag().array() == 0.0).all();
}

} // namespace

double hermiticity_defect(const ComplexMatrix& a) {
    require_square(a.rows(), a.cols());
    double worst = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i <= j; ++i) {
            worst = std::max(worst, std::abs(a(i, j) - std::conj(a(j, i))));
        }
    }
    return worst;
}

bool is_hermitian(const ComplexMatrix& a, double tol) {
    if (a.rows() != a.cols() || a.rows() < 1) return false;
    return hermiticity_defect(a) <= tol * std::max(1.0, a.norm());
}

EigenSystem symmetric_eig(const RealMatrix& h) {
    require_square(h.rows(), h.cols());
    RealMatrix a = h;
    RealVector w;
    dsyevd_inplace(a, w, true);
    EigenSystem sys;
    sys.eigenvalues = w.reverse();
    sys.eigenvectors = a.rowwise().reverse().cast<std::complex<double>>();
    return sys;
}

EigenSystem hermitian_eig(const ComplexMatrix& h) {
    require_square(h.rows(), h.cols());
    if (!is_hermitian(h)) {
        throw std::invalid_argument("hermitian_eig: input is not Hermitian");
    }
    if (imaginary_part_is_zero(h)) {
        return symmetric_eig(h.real());
    }
    ComplexMatrix a = h;
    RealVector w;
    zheevd_inplace(a, w, true);
    EigenSystem sys;
    sys.eigenvalues = w.reverse();
    sys.eigenvectors = a.rowwise().reverse();
    return sys;
}

RealVector symmetric_eigenvalues(const RealMatrix& h) {
    require_square(h.rows(), h.cols());
    RealMatrix a = h;
    RealVector w;
    dsyevd_inplace(a, w, false);
    return w.reverse();
}

RealVector hermitian_eigenvalues(const ComplexMatrix& h) {
    require_square(h.rows(), h.cols());
    if (!is_hermitian(h)) {
        throw std::invalid_argument("hermitian_eigenvalues: input is not Hermitian");
    }
    if (imaginary_part_is_zero(h)) {
        return symmetric_eigenvalues(h.real());
    }
    ComplexMatrix a = h;
    RealVector w;
    zheevd_inplace(a, w, false);
    return w.reverse();
}

ComplexMatrix evolve_density(const ComplexMatrix& rho0, const EigenSystem& eig, double t) {
    require_square(rho0.rows(), rho0.cols());
    if (rho0.rows() != eig.dim()) {
        throw std::invalid_argument("evolve_density: dimension mismatch");
    }
    const double trace = rho0.trace().real();
    if (std::abs(trace - 1.0) > 1e-8 || std::abs(rho0.trace().imag()) > 1e-8) {
        throw std::invalid_argument("evolve_density: density matrix must have unit trace");
    }
    const int n = eig.dim();
    ComplexVector phases(n);
    for (int j = 0; j < n; ++j) {
        phases(j) = std::exp(std::complex<double>(0.0, -t * eig.eigenvalues(j)));
    }
    // Work in the eigenbasis: conjugation by a diagonal phase matrix.
    ComplexMatrix b = eig.eigenvectors.adjoint() * rho0 * eig.eigenvectors;
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            b(j, k) *= phases(j) * std::conj(phases(k));
        }
    }
    return eig.eigenvectors * b * eig.eigenvectors.adjoint();
}

double frobenius_norm(const ComplexMatrix& a) { return a.norm(); }

double spectral_norm(const ComplexMatrix& a) {
    if (a.rows() == 0) return 0.0;
    if (!is_hermitian(a)) {
        throw std::invalid_argument("spectral_norm: input is not Hermitian");
    }
    const RealVector w = hermitian_eigenvalues(a);
    return std::max(std::abs(w(0)), std::abs(w(w.size() - 1)));
}

double spectral_norm(const RealMatrix& a) {
    if (a.rows() == 0) return 0.0;
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, a.norm())) {
        throw std::invalid_argument("spectral_norm: input is not symmetric");
    }
    const RealVector w = symmetric_eigenvalues(a);
    return std::max(std::abs(w(0)), std::abs(w(w.size() - 1)));
}

} // namespace sslab::linalg
