#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "latspec/latspec.hpp"
#include "support/oracles.hpp"

using latspec::BoundaryCondition;
using latspec::cdouble;
using latspec::LatticeModel;
using latspec::Spectrum;

TEST_CASE("fidelity: bounds, exactness, and scale invariance") {
    const std::vector<cdouble> u{{1.0, 0.0}, {0.0, 1.0}, {2.0, -1.0}};
    CHECK(latspec::fidelity(u, u) == 1.0);

    const std::vector<cdouble> v{{0.0, 1.0}, {1.0, 0.0}, {0.0, 0.0}};
    const std::vector<cdouble> w{{1.0, 0.0}, {0.0, 1.0}, {0.0, 0.0}};
    CHECK(latspec::fidelity(v, w) == 0.0);  // <v|w> = -i + i = 0 exactly

    std::mt19937_64 rng(0xabcdULL);
    std::uniform_real_distribution<double> un(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<cdouble> a(5), b(5);
        for (auto& z : a) z = cdouble{un(rng), un(rng)};
        for (auto& z : b) z = cdouble{un(rng), un(rng)};
        const double f = latspec::fidelity(a, b);
        CHECK(f >= 0.0);
        CHECK(f <= 1.0);
        // invariance under complex rescaling of either argument
        auto a2 = a;
        auto b2 = b;
        const cdouble alpha{un(rng), un(rng)}, beta{un(rng), un(rng)};
        for (auto& z : a2) z *= alpha;
        for (auto& z : b2) z *= beta;
        if (std::abs(alpha) > 1e-6 && std::abs(beta) > 1e-6)
            CHECK(std::abs(latspec::fidelity(a2, b2) - f) < 1e-12);
    }
    CHECK_THROWS_AS(latspec::fidelity(u, std::vector<cdouble>(2)), std::invalid_argument);
    CHECK_THROWS_AS(latspec::fidelity(u, std::vector<cdouble>(3)), std::invalid_argument);
}

TEST_CASE("hermitian_demo follows the rational closed form") {
    auto closed_form = [](double xi) {
        return 3.0 * (xi + 2.0) * (xi + 2.0) / (4.0 * (xi * xi + 3.0 * xi + 3.0));
    };
    for (int k = 0; k <= 200; ++k) {
        const double xi = -10.0 + 20.0 * static_cast<double>(k) / 200.0;
        const auto [c, f] = latspec::hermitian_demo(xi);
        CHECK(std::abs(f - closed_form(xi)) < 1e-12);
        CHECK(c.xi == xi);
    }
    CHECK(latspec::hermitian_demo(0.0).second == 1.0);   // identical vectors
    CHECK(latspec::hermitian_demo(-2.0).second == 0.0);  // exactly orthogonal
    // both family members really are eigenvectors of the demo matrix
    const auto [c, f] = latspec::hermitian_demo(0.7);
    (void)f;
    CHECK(c.v1.size() == 3);
    CHECK(c.v2[0] == Catch::Approx(1.7));
}

TEST_CASE("alternation defect is phase-aware") {
    using latspec::detail::alternation_defect;
    const std::vector<cdouble> a{{0.3, 0.1}, {-0.5, 0.2}, {0.7, 0.0}, {0.1, -0.4}};
    // b = s * (alternating a) for an arbitrary unit phase: defect ~ 0
    std::vector<cdouble> b(4);
    const cdouble s = std::polar(1.0, 1.234);
    for (std::size_t n = 0; n < 4; ++n) b[n] = s * (n % 2 ? -a[n] : a[n]);
    CHECK(alternation_defect(a, b) < 1e-15);
    // breaking one entry is detected: the optimal phase reabsorbs part of
    // the perturbation, but the defect stays at its scale
    b[2] += cdouble{0.0, 0.05};
    const double d = alternation_defect(a, b);
    CHECK(d > 0.01);
    CHECK(d < 0.1);
}

TEST_CASE("pairing holds across random gauge-eligible chains") {
    for (unsigned seed = 100; seed < 140; ++seed) {
        const auto m = oracle::certified_model(seed);
        const auto s = latspec::eigs(m);
        const auto rep = latspec::pairing_check(s, 1e-8);
        CHECK(rep.verdict);
        CHECK(rep.unpaired.empty());
        // multiset symmetry E <-> -E, directly
        std::vector<cdouble> negated;
        for (const auto& e : s.eigenvalues) negated.push_back(-e);
        CHECK(oracle::match_multisets(s.eigenvalues, negated) < 1e-10);
        if (m.n_sites % 2 == 1) {
            REQUIRE(rep.zero_mode_index.has_value());
            CHECK(std::abs(s.eigenvalues[*rep.zero_mode_index]) < 1e-10);
        } else {
            CHECK_FALSE(rep.zero_mode_index.has_value());
        }
        for (double d : rep.alternation_defects) CHECK(d < 1e-8);
        for (double d : rep.pair_sum_mismatch) CHECK(d < 1e-8);
        CHECK(rep.pairs.size() == m.n_sites / 2);
    }
}

TEST_CASE("pairing fails honestly off the symmetric class") {
    // gain/loss shifts the spectrum upward in Im: +E/-E symmetry is gone
    const auto m = LatticeModel::uniform(4, {1.0, 0.0}, {0.7, 0.0}, 0.9);
    const auto rep = latspec::pairing_check(latspec::eigs(m), 1e-8);
    CHECK_FALSE(rep.verdict);
    CHECK_THROWS_AS(latspec::pairing_check(latspec::eigs(m), 0.0), std::invalid_argument);
}

TEST_CASE("density rows square-sum the eigenvector components") {
    const auto m = oracle::certified_model(7);
    const auto s = latspec::eigs(m);
    const auto rows = latspec::density_curves(s);
    REQUIRE(rows.size() == m.n_sites);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        REQUIRE(rows[k].size() == m.n_sites);
        double sum = 0.0;
        for (std::size_t j = 0; j < m.n_sites; ++j) {
            CHECK(rows[k][j] == Catch::Approx(std::norm(s.eigenvectors[k][j])).margin(1e-15));
            sum += rows[k][j];
        }
        CHECK(sum == Catch::Approx(1.0).epsilon(1e-10));  // unit-norm vectors
    }
}

TEST_CASE("count_distinct_curves groups transitively at tolerance") {
    using rows_t = std::vector<std::vector<double>>;
    const rows_t rows{{0.5, 0.5}, {0.5 + 4e-9, 0.5 - 4e-9}, {0.1, 0.9}, {0.5 + 8e-9, 0.5}};
    // row 0 ~ row 1 ~ row 3 by chaining; row 2 stands alone
    const auto c = latspec::count_distinct_curves(rows, 1e-8);
    CHECK(c.n_distinct == 2);
    REQUIRE(c.groups.size() == 2);
    CHECK(c.groups[0] == std::vector<std::size_t>{0, 1, 3});
    CHECK(c.groups[1] == std::vector<std::size_t>{2});
    CHECK(c.tolerance == 1e-8);

    const auto strict = latspec::count_distinct_curves(rows, 1e-12);
    CHECK(strict.n_distinct == 4);

    CHECK_THROWS_AS(latspec::count_distinct_curves(rows_t{{1.0}, {1.0, 2.0}}, 1e-8),
                    std::invalid_argument);
    CHECK(latspec::count_distinct_curves({}, 1e-8).n_distinct == 0);
}

TEST_CASE("narrow-band chain collapses to N/2 density curves") {
    const auto m = LatticeModel::uniform(12, {0.1, 0.0}, {0.05, 0.0});
    const auto c = latspec::count_distinct_curves(latspec::density_curves(latspec::eigs(m)));
    CHECK(c.n_distinct == 6);
    for (const auto& g : c.groups) CHECK(g.size() == 2);  // +E with -E
}

TEST_CASE("fidelity_matrix dedups degenerate labels") {
    const auto ring = LatticeModel::uniform(3, {1.0, 0.0}, {1.0, 0.0}, 0.0,
                                            BoundaryCondition::Closed);
    const auto fm = latspec::fidelity_matrix(latspec::eigs(ring));
    REQUIRE(fm.labels.size() == 2);  // {-1 (twice), 2} -> two distinct labels
    CHECK(std::abs(fm.labels[0] - cdouble{-1.0, 0.0}) < 1e-9);
    CHECK(std::abs(fm.labels[1] - cdouble{2.0, 0.0}) < 1e-9);
    CHECK(fm.values[0][0] == 1.0);
    CHECK(fm.values[1][1] == 1.0);
    CHECK(fm.values[0][1] == Catch::Approx(fm.values[1][0]).margin(1e-15));
    CHECK(fm.values[0][1] < 1e-10);  // distinct eigenvectors of a Hermitian ring
}

TEST_CASE("Hermitian spectra have orthogonal eigenvectors after dedup") {
    for (unsigned seed = 0; seed < 8; ++seed) {
        const auto m = oracle::hermitian_model(seed + 40);
        const auto fm = latspec::fidelity_matrix(latspec::eigs(m));
        for (std::size_t i = 0; i < fm.labels.size(); ++i)
            for (std::size_t j = i + 1; j < fm.labels.size(); ++j)
                CHECK(fm.values[i][j] < 1e-10);
    }
}

TEST_CASE("ep_diagnostics separates degeneracy from coalescence") {
    // genuine 2-dimensional eigenspace: full rank, no alarm
    const auto ring = LatticeModel::uniform(3, {1.0, 0.0}, {1.0, 0.0}, 0.0,
                                            BoundaryCondition::Closed);
    const auto good = latspec::ep_diagnostics(latspec::eigs(ring));
    REQUIRE(good.clusters.size() == 1);
    CHECK(good.clusters[0].size() == 2);
    CHECK(good.geometric_multiplicity[0] == 2);
    CHECK_FALSE(good.ep_suspected);
    REQUIRE(good.cluster_singular_values[0].size() == 2);
    CHECK(good.cluster_singular_values[0][1] > 1e-4);  // genuinely independent

    // maximal Jordan block: five-fold eigenvalue, one direction
    const auto jordan = LatticeModel::uniform(5, {1.0, 0.0}, {0.0, 0.0});
    const auto bad = latspec::ep_diagnostics(latspec::eigs(jordan));
    REQUIRE(bad.clusters.size() == 1);
    CHECK(bad.clusters[0].size() == 5);
    CHECK(bad.geometric_multiplicity[0] == 1);
    CHECK(bad.ep_suspected);
    CHECK(bad.max_pairwise_fidelity > 1.0 - 1e-10);

    // well-separated spectrum: no clusters at all
    const auto plain = latspec::ep_diagnostics(latspec::eigs(
        LatticeModel::uniform(4, {1.0, 0.0}, {0.8, 0.0})));
    CHECK(plain.clusters.empty());
    CHECK_FALSE(plain.ep_suspected);
}

TEST_CASE("clustering_trend preserves order and parallelizes safely") {
    std::vector<LatticeModel> family;
    for (const double tp : {0.5, 0.1, 0.01, 0.001})
        family.push_back(LatticeModel::uniform(8, {1.0, 0.0}, {tp, 0.0}));

    const auto serial = latspec::clustering_trend(family);
    REQUIRE(serial.size() == 4);
    for (const auto& p : serial) {
        CHECK(p.ok);
        CHECK(p.error.empty());
        CHECK(p.min_fidelity <= p.max_fidelity);
    }
    // increasing asymmetry drives states together: max fidelity grows
    for (std::size_t i = 0; i + 1 < serial.size(); ++i)
        CHECK(serial[i].max_fidelity <= serial[i + 1].max_fidelity);
    CHECK(serial.back().max_fidelity > 0.9);

    const auto parallel = latspec::clustering_trend(family, 4);
    REQUIRE(parallel.size() == serial.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(parallel[i].max_fidelity == serial[i].max_fidelity);
        CHECK(parallel[i].min_fidelity == serial[i].min_fidelity);
        CHECK(parallel[i].ep_suspected == serial[i].ep_suspected);
    }

    // mixed families are rejected up front
    auto mixed = family;
    mixed.push_back(LatticeModel::uniform(9, {1.0, 0.0}, {0.5, 0.0}));
    CHECK_THROWS_AS(latspec::clustering_trend(mixed), std::invalid_argument);
    CHECK(latspec::clustering_trend({}).empty());
}
