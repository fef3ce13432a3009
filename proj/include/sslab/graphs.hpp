#pragma once

#include "sslab/linalg.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sslab::graphs {

enum class Family {
    complete,
    cycle,
    hamming,
    johnson,
    grassmann,
    paley,
    cycle_inverse_matching,
};

std::string family_name(Family f);

/// A generated graph: dense 0/1 symmetric adjacency with zero diagonal, plus
/// the closed-form spectrum (value, multiplicity) when the family has one.
struct GraphInstance {
    Family family = Family::complete;
    std::map<std::string, long> params;
    int num_vertices = 0;
    int size_param = 0; // the parameter a family sweep varies (n or p)
    RealMatrix adjacency;
    std::vector<std::pair<double, int>> expected_spectrum; // descending; empty if none

    std::string spec_string() const;
};

inline constexpr int kDefaultSizeCap = 4096;

GraphInstance complete(int n);
GraphInstance cycle(int n);
GraphInstance hamming(int n, int q, int size_cap = kDefaultSizeCap);
GraphInstance johnson(int n, int k, int size_cap = kDefaultSizeCap);
GraphInstance grassmann(int q, int n, int k, int size_cap = kDefaultSizeCap);
GraphInstance paley(int p, int size_cap = kDefaultSizeCap);
GraphInstance cycle_inverse_matching(int p, int size_cap = kDefaultSizeCap);

enum class Convention { unit_interval, symmetric_interval };

std::string convention_name(Convention c);

/// Adjacency rescaled so the top eigenvalue is 1 and simple.
///   symmetric_interval: A / lambda_1(A), spectrum in [-1, 1]
///   unit_interval:      (A / lambda_1(A) + I) / 2, spectrum in [0, 1]
struct NormalizedHamiltonian {
    std::shared_ptr<const RealMatrix> h;
    Convention convention = Convention::unit_interval;
    double source_spectral_norm = 0.0;
    RealVector spectrum; // descending eigenvalues of matrix(), cached from normalization

    const RealMatrix& matrix() const { return *h; }
    int dim() const { return static_cast<int>(h->rows()); }
    ComplexMatrix complex() const { return h->cast<std::complex<double>>(); }
};

/// Throws std::invalid_argument when the top adjacency eigenvalue is not
/// simple (disconnected graph).
NormalizedHamiltonian normalize_adjacency(const GraphInstance& g, Convention convention);

/// A family plus its fixed parameters; the size parameter (n or p) may stay
/// unset for sweep use. Parsed from strings like "grassmann:q=2,n=4,k=2".
struct FamilySpec {
    Family family = Family::complete;
    std::map<std::string, long> params;

    std::string to_string() const;
};

/// Grammar: name(:key=value(,key=value)*)? with keys from {n, q, k, p}.
/// Throws std::invalid_argument on malformed input.
FamilySpec parse_family_spec(const std::string& text);

/// Instantiates a family member; `size` overrides the size parameter (n or p).
GraphInstance build_member(const FamilySpec& spec, std::optional<int> size = std::nullopt,
                           int size_cap = kDefaultSizeCap);

// Counting helpers used by the generators and their tests.
long binomial(int n, int k);
long gaussian_binomial(int n, int k, int q);
bool is_prime(int p);

} // namespace sslab::graphs
