#pragma once

#include "sslab/linalg.hpp"

#include <algorithm>
#include <random>
#include <vector>

namespace test_helpers {

using sslab::ComplexMatrix;
using sslab::ComplexVector;
using sslab::RealMatrix;
using sslab::RealVector;

inline ComplexMatrix random_hermitian(int n, std::mt19937& rng) {
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

inline ComplexVector random_unit_vector(int n, std::mt19937& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexVector v(n);
    for (int i = 0; i < n; ++i) v(i) = std::complex<double>(gauss(rng), gauss(rng));
    return v / v.norm();
}

inline ComplexMatrix random_density(int n, std::mt19937& rng) {
    // Normalized Gram matrix: positive semidefinite with unit trace.
    ComplexMatrix a = random_hermitian(n, rng);
    ComplexMatrix rho = a * a.adjoint();
    return rho / rho.trace().real();
}

/// Independent spectral oracle: compares sum_i lambda_i^k against Tr(A^k)
/// computed by direct matrix powers, for k = 1..max_power.
inline double moment_mismatch(const ComplexMatrix& a, const RealVector& eigenvalues,
                              int max_power = 4) {
    double worst = 0.0;
    ComplexMatrix pow = ComplexMatrix::Identity(a.rows(), a.cols());
    for (int k = 1; k <= max_power; ++k) {
        pow = (pow * a).eval();
        double moment = 0.0;
        for (int i = 0; i < eigenvalues.size(); ++i) moment += std::pow(eigenvalues(i), k);
        const double trace = pow.trace().real();
        worst = std::max(worst, std::abs(moment - trace) / std::max(1.0, std::abs(trace)));
    }
    return worst;
}

/// Sorted multiset comparison within a tolerance.
inline bool spectra_match(std::vector<double> a, std::vector<double> b, double tol) {
    if (a.size() != b.size()) return false;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    for (size_t i = 0; i < a.size(); ++i) {
        if (std::abs(a[i] - b[i]) > tol) return false;
    }
    return true;
}

inline std::vector<double> expand_spectrum(const std::vector<std::pair<double, int>>& compact) {
    std::vector<double> values;
    for (const auto& [value, mult] : compact) {
        for (int i = 0; i < mult; ++i) values.push_back(value);
    }
    return values;
}

inline std::vector<double> to_vector(const RealVector& v) {
    return {v.data(), v.data() + v.size()};
}

} // namespace test_helpers
