#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "sslab/graphs.hpp"
#include "sslab/spectra.hpp"

#include <cmath>
#include <random>

using namespace sslab;
using namespace test_helpers;

namespace {

spectra::Tuplet vertex_tuplet(const graphs::GraphInstance& g,
                              graphs::Convention convention = graphs::Convention::unit_interval,
                              int vertex = 0) {
    const auto h = graphs::normalize_adjacency(g, convention);
    ComplexVector w = ComplexVector::Zero(g.num_vertices);
    w(vertex) = 1.0;
    return spectra::make_tuplet(h, std::move(w));
}

void check_projector_invariants(const spectra::SpectralDecomposition& d) {
    const int n = d.dim();
    ComplexMatrix sum = ComplexMatrix::Zero(n, n);
    int total_mult = 0;
    for (int r = 0; r < d.distinct_count(); ++r) {
        const ComplexMatrix er = d.projector(r);
        sum += er;
        total_mult += d.multiplicity(r);
        CHECK(std::abs(er.trace().real() - d.multiplicity(r)) < 1e-6);
        for (int s = 0; s < d.distinct_count(); ++s) {
            const ComplexMatrix prod = er * d.projector(s);
            if (r == s) {
                CHECK((prod - er).norm() < 1e-9);
            } else {
                CHECK(prod.norm() < 1e-9);
            }
        }
    }
    CHECK((sum - ComplexMatrix::Identity(n, n)).norm() < 1e-9);
    CHECK(total_mult == n);
    for (int r = 1; r < d.distinct_count(); ++r) {
        CHECK(d.eigenvalue(r - 1) - d.eigenvalue(r) > d.cluster_tolerance());
    }
}

} // namespace

TEST_CASE("decomposition of K4 in the unit convention") {
    const auto g = graphs::complete(4);
    const auto h = graphs::normalize_adjacency(g, graphs::Convention::unit_interval);
    const auto d = spectra::decompose(linalg::symmetric_eig(h.matrix()));
    REQUIRE(d.distinct_count() == 2);
    CHECK(d.eigenvalue(0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(d.eigenvalue(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
    CHECK(d.multiplicity(0) == 1);
    CHECK(d.multiplicity(1) == 3);
    check_projector_invariants(d);
}

TEST_CASE("decomposition of C4 in the unit convention") {
    const auto g = graphs::cycle(4);
    const auto h = graphs::normalize_adjacency(g, graphs::Convention::unit_interval);
    const auto d = spectra::decompose(linalg::symmetric_eig(h.matrix()));
    REQUIRE(d.distinct_count() == 3);
    CHECK(d.eigenvalue(0) == doctest::Approx(1.0));
    CHECK(d.eigenvalue(1) == doctest::Approx(0.5));
    CHECK(d.eigenvalue(2) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(d.multiplicity(0) == 1);
    CHECK(d.multiplicity(1) == 2);
    CHECK(d.multiplicity(2) == 1);
    check_projector_invariants(d);
}

TEST_CASE("diagonal matrix with distinct entries splits completely") {
    RealMatrix m = RealMatrix::Zero(5, 5);
    for (int i = 0; i < 5; ++i) m(i, i) = i * 0.2;
    const auto d = spectra::decompose(linalg::symmetric_eig(m));
    CHECK(d.distinct_count() == 5);
    for (int r = 0; r < 5; ++r) CHECK(d.multiplicity(r) == 1);
}

TEST_CASE("ambiguous clustering is flagged, not fatal") {
    RealMatrix m = RealMatrix::Zero(3, 3);
    m(0, 0) = 1.0;
    m(1, 1) = 0.5;
    m(2, 2) = 0.5 - 5e-8; // gap inside [0.1 tol, tol] for tol = 1e-7
    const auto d = spectra::decompose(linalg::symmetric_eig(m), 1e-7);
    CHECK(d.ambiguous_clustering());
}

TEST_CASE("operator-backed decomposition matches the eigenvector route") {
    const auto g = graphs::grassmann(2, 4, 2);
    const auto h = graphs::normalize_adjacency(g, graphs::Convention::unit_interval);
    const auto dense = spectra::decompose(linalg::symmetric_eig(h.matrix()));
    const auto poly = spectra::SpectralDecomposition::from_operator(h.h, h.spectrum);
    REQUIRE(dense.distinct_count() == poly.distinct_count());
    for (int r = 0; r < dense.distinct_count(); ++r) {
        CHECK(poly.eigenvalue(r) == doctest::Approx(dense.eigenvalue(r)).epsilon(1e-10));
        CHECK(poly.multiplicity(r) == dense.multiplicity(r));
    }
    std::mt19937 rng(2);
    const ComplexVector x = random_unit_vector(g.num_vertices, rng);
    for (int r = 0; r < dense.distinct_count(); ++r) {
        CHECK((poly.apply(r, x) - dense.apply(r, x)).norm() < 1e-9);
    }
    check_projector_invariants(poly);
}

TEST_CASE("tuplet shadows satisfy Parseval and the support threshold") {
    const auto t = vertex_tuplet(graphs::complete(16));
    CHECK(std::abs(t.target.norm() - 1.0) < 1e-12);
    CHECK(std::abs(t.shadows.squaredNorm() - 1.0) < 1e-9);
    CHECK(spectra::shadow_eps1(t) == doctest::Approx(0.25).epsilon(1e-9)); // 1/sqrt(16)

    // a target orthogonal to the principal eigenspace is rejected
    const auto g = graphs::complete(4);
    const auto h = graphs::normalize_adjacency(g, graphs::Convention::unit_interval);
    ComplexVector w(4);
    w << 1.0, -1.0, 0.0, 0.0;
    w /= w.norm();
    CHECK_THROWS_AS(spectra::make_tuplet(h, w), std::invalid_argument);

    ComplexVector long_w = ComplexVector::Zero(4);
    long_w(0) = 1.5;
    CHECK_THROWS_AS(spectra::make_tuplet(h, long_w), std::invalid_argument);
}

TEST_CASE("eigenvalue support") {
    const auto g = graphs::complete(8);
    const auto h = graphs::normalize_adjacency(g, graphs::Convention::unit_interval);

    // principal eigenvector: support is the top eigenvalue alone
    const auto eig = linalg::symmetric_eig(h.matrix());
    auto d = spectra::decompose(eig);
    const ComplexVector z1 = d.principal_vector();
    const auto t1 = spectra::make_tuplet(h, z1, 1.0);
    CHECK(spectra::eigenvalue_support(t1) == std::set<int>{0});

    // vertex target on a clique: both eigenvalues in support, eps2^2 = 1 - 1/n
    const auto t2 = vertex_tuplet(g);
    CHECK(spectra::eigenvalue_support(t2) == std::set<int>{0, 1});
    CHECK(t2.shadows(1) * t2.shadows(1) == doctest::Approx(1.0 - 1.0 / 8.0).epsilon(1e-10));

    // C4: target built to avoid the middle eigenspace
    const auto c4 = graphs::cycle(4);
    const auto hc = graphs::normalize_adjacency(c4, graphs::Convention::unit_interval);
    auto dc = spectra::decompose(linalg::symmetric_eig(hc.matrix()));
    ComplexVector mix = dc.projector(0).col(0) * 2.0 + dc.projector(2).col(0);
    mix /= mix.norm();
    const auto t3 = spectra::make_tuplet(hc, mix, 1.0);
    const auto support = spectra::eigenvalue_support(t3);
    CHECK(support.count(0) == 1);
    CHECK(support.count(1) == 0);
    CHECK(support.count(2) == 1);
}

TEST_CASE("moments on the clique match the closed form") {
    for (int n : {8, 16, 64}) {
        const auto t = vertex_tuplet(graphs::complete(n));
        const double expected_s1 = 2.0 * (n - 1.0) * (n - 1.0) / (static_cast<double>(n) * n);
        CHECK(spectra::moment_sk(t, 1) == doctest::Approx(expected_s1).epsilon(1e-10));
        // single non-principal eigenvalue: S_k = eps2^2 / Delta2^k
        const double delta2 = spectra::gap_delta2(t.decomposition);
        const double eps2sq = 1.0 - 1.0 / n;
        CHECK(spectra::moment_sk(t, 2) == doctest::Approx(eps2sq / (delta2 * delta2)).epsilon(1e-10));
        CHECK(spectra::moment_sk(t, 3) ==
              doctest::Approx(eps2sq / (delta2 * delta2 * delta2)).epsilon(1e-10));
    }
}

TEST_CASE("two-eigenvalue toy has equal moments when the gap is 1") {
    RealMatrix m = RealMatrix::Zero(3, 3);
    m(0, 0) = 1.0; // theta = {1, 0}, gap exactly 1
    graphs::NormalizedHamiltonian h;
    h.h = std::make_shared<RealMatrix>(m);
    h.convention = graphs::Convention::unit_interval;
    h.source_spectral_norm = 1.0;
    h.spectrum = linalg::symmetric_eigenvalues(m);
    const double s = 0.6;
    ComplexVector w(3);
    w << std::sqrt(1.0 - s * s), s, 0.0;
    const auto t = spectra::make_tuplet(h, w);
    CHECK(spectra::moment_sk(t, 1) == doctest::Approx(s * s).epsilon(1e-12));
    CHECK(spectra::moment_sk(t, 2) == doctest::Approx(s * s).epsilon(1e-12));
    CHECK(spectra::moment_sk(t, 3) == doctest::Approx(s * s).epsilon(1e-12));
    CHECK(t.gamma == doctest::Approx(s * s)); // gamma defaults to S_1
}

TEST_CASE("moments reject a single-eigenvalue decomposition") {
    RealMatrix m = RealMatrix::Identity(3, 3);
    graphs::NormalizedHamiltonian h;
    h.h = std::make_shared<RealMatrix>(m);
    h.convention = graphs::Convention::unit_interval;
    h.source_spectral_norm = 1.0;
    h.spectrum = linalg::symmetric_eigenvalues(m);
    ComplexVector w = ComplexVector::Zero(3);
    w(0) = 1.0;
    CHECK_THROWS_AS(spectra::make_tuplet(h, w), std::domain_error); // S_1 undefined
    const auto d = spectra::decompose(linalg::symmetric_eig(m));
    CHECK_THROWS_AS(spectra::gap_delta2(d), std::domain_error);
}

TEST_CASE("cycle S1 grows linearly") {
    double previous = 0.0;
    for (int n : {64, 128, 256, 512}) {
        const auto t = vertex_tuplet(graphs::cycle(n));
        const double s1 = spectra::moment_sk(t, 1);
        if (previous > 0.0) {
            CHECK(s1 / previous == doctest::Approx(2.0).epsilon(0.15));
        }
        previous = s1;
    }
}

TEST_CASE("spectral gap values") {
    const auto k4 = vertex_tuplet(graphs::complete(4));
    CHECK(spectra::gap_delta2(k4.decomposition) == doctest::Approx(2.0 / 3.0).epsilon(1e-10));

    // Johnson gap under A/lambda_1: (theta_0 - theta_1)/theta_0 = n/(k(n-k))
    const auto j83 = vertex_tuplet(graphs::johnson(8, 3), graphs::Convention::symmetric_interval);
    CHECK(spectra::gap_delta2(j83.decomposition) ==
          doctest::Approx(8.0 / (3.0 * 5.0)).epsilon(1e-10));

    const auto c64 = vertex_tuplet(graphs::cycle(64));
    const double expected = (1.0 - std::cos(2.0 * M_PI / 64.0)) / 2.0;
    CHECK(spectra::gap_delta2(c64.decomposition) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("shadows for vertex-transitive families") {
    const auto k25 = vertex_tuplet(graphs::complete(25));
    CHECK(spectra::shadow_eps1(k25) == doctest::Approx(0.2).epsilon(1e-10));

    for (int n : {4, 6}) {
        const auto t = vertex_tuplet(graphs::hamming(n, 2));
        CHECK(spectra::shadow_eps1(t) == doctest::Approx(std::pow(2.0, -n / 2.0)).epsilon(1e-9));
    }

    const auto h33 = vertex_tuplet(graphs::hamming(3, 3));
    CHECK(spectra::shadow_eps1(h33) == doctest::Approx(std::pow(3.0, -1.5)).epsilon(1e-9));
}

TEST_CASE("spectral facts hold on every built-in family instance") {
    for (const auto* spec :
         {"complete:n=16", "complete:n=64", "cycle:n=32", "cycle:n=128", "hamming:n=5,q=2",
          "hamming:n=2,q=3", "johnson:n=8,k=3", "grassmann:q=2,n=4,k=2", "paley:p=29",
          "cycle_inverse_matching:p=23"}) {
        CAPTURE(spec);
        const auto g = graphs::build_member(graphs::parse_family_spec(spec));
        const auto t = vertex_tuplet(g);
        const double eps1sq = t.shadows(0) * t.shadows(0);
        const double eps2sq = t.shadows(1) * t.shadows(1);
        const double s1 = spectra::moment_sk(t, 1);
        const double s2 = spectra::moment_sk(t, 2);
        const double s3 = spectra::moment_sk(t, 3);
        const double delta2 = spectra::gap_delta2(t.decomposition);

        // Parseval
        CHECK(std::abs(t.shadows.squaredNorm() - 1.0) < 1e-9);
        // variance bound: S1^2/S2 <= 1 - eps1^2
        CHECK(s1 * s1 / s2 <= 1.0 - eps1sq + 1e-9);
        // constant-gap sandwich
        CHECK(eps2sq + delta2 * (1.0 - eps1sq - eps2sq) <= s1 * delta2 + 1e-9);
        CHECK(s1 * delta2 <= 1.0 - eps1sq + 1e-9);
        // moment monotonicity under the unit convention (all gaps <= 1)
        CHECK(s1 <= s2 + 1e-12);
        CHECK(s2 <= s3 + 1e-12);
    }
}
