#include <catch2/catch_amalgamated.hpp>

#include "latspec/latspec.hpp"
#include "support/oracles.hpp"

using latspec::BoundaryCondition;
using latspec::cdouble;
using latspec::LatticeModel;

TEST_CASE("complex values and vectors round trip exactly") {
    const cdouble z{1.25, -0.0625};
    CHECK(latspec::complex_from_json(latspec::complex_to_json(z)) == z);
    const std::vector<cdouble> v{{0.1, 0.2}, {-3.0, 0.0}, {0.0, 1e-300}};
    CHECK(latspec::complex_vector_from_json(latspec::complex_vector_to_json(v)) == v);
    CHECK_THROWS(latspec::complex_from_json(nlohmann::json::parse("[1, 2]")));
}

TEST_CASE("spectrum JSON round trip keeps path, values, vectors, residuals") {
    const auto m = oracle::general_model(3, BoundaryCondition::Closed);
    const auto s = latspec::eigs(m);
    const auto back = latspec::spectrum_from_json(latspec::spectrum_to_json(s));
    CHECK(back.path == s.path);
    CHECK(back.eigenvalues == s.eigenvalues);
    CHECK(back.eigenvectors == s.eigenvectors);
    CHECK(back.residuals == s.residuals);

    auto j = latspec::spectrum_to_json(s);
    j["path"] = "warp";
    CHECK_THROWS(latspec::spectrum_from_json(j));
}

TEST_CASE("matrix JSON round trip keeps structure tags") {
    for (const auto bc : {BoundaryCondition::Open, BoundaryCondition::Closed}) {
        const auto h = latspec::build_hamiltonian(oracle::general_model(5, bc));
        const auto back = latspec::matrix_from_json(latspec::matrix_to_json(h));
        CHECK(back.dim == h.dim);
        CHECK(back.structure == h.structure);
        CHECK(back.entries == h.entries);
    }
    CHECK(latspec::parse_structure("dense") == latspec::MatrixStructure::Dense);
    CHECK_FALSE(latspec::parse_structure("circulant").has_value());
}

TEST_CASE("certificate JSON round trips in both applicability states") {
    const auto yes = latspec::gauge_sequence(oracle::certified_model(2));
    const auto back = latspec::certificate_from_json(latspec::certificate_to_json(yes));
    CHECK(back.applicable);
    CHECK(back.q == yes.q);
    CHECK(back.log_q == yes.log_q);
    CHECK(back.symmetrized.entries == yes.symmetrized.entries);
    CHECK(back.max_asymmetry == yes.max_asymmetry);

    const auto no = latspec::gauge_sequence(
        LatticeModel::uniform(4, {1.0, 0.0}, {0.5, 0.0}, 0.3));
    const auto back2 = latspec::certificate_from_json(latspec::certificate_to_json(no));
    CHECK_FALSE(back2.applicable);
    CHECK(back2.reason == no.reason);
    CHECK(back2.symmetrized.dim == 0);
}

TEST_CASE("analysis reports round trip") {
    const auto m = oracle::certified_model(9);
    const auto s = latspec::eigs(m);

    const auto fm = latspec::fidelity_matrix(s);
    const auto fm2 = latspec::fidelity_matrix_from_json(latspec::fidelity_matrix_to_json(fm));
    CHECK(fm2.labels == fm.labels);
    CHECK(fm2.values == fm.values);

    const auto pr = latspec::pairing_check(s, 1e-8);
    const auto pr2 = latspec::pairing_from_json(latspec::pairing_to_json(pr));
    CHECK(pr2.tol == pr.tol);
    CHECK(pr2.pairs == pr.pairs);
    CHECK(pr2.alternation_defects == pr.alternation_defects);
    CHECK(pr2.pair_sum_mismatch == pr.pair_sum_mismatch);
    CHECK(pr2.zero_mode_index == pr.zero_mode_index);
    CHECK(pr2.unpaired == pr.unpaired);
    CHECK(pr2.verdict == pr.verdict);

    const auto cc = latspec::count_distinct_curves(latspec::density_curves(s), 1e-8);
    const auto cc2 = latspec::curve_count_from_json(latspec::curve_count_to_json(cc));
    CHECK(cc2.n_distinct == cc.n_distinct);
    CHECK(cc2.groups == cc.groups);
    CHECK(cc2.tolerance == cc.tolerance);

    const auto ep = latspec::ep_diagnostics(s);
    const auto ep2 = latspec::ep_report_from_json(latspec::ep_report_to_json(ep));
    CHECK(ep2.cluster_radius == ep.cluster_radius);
    CHECK(ep2.clusters == ep.clusters);
    CHECK(ep2.geometric_multiplicity == ep.geometric_multiplicity);
    CHECK(ep2.cluster_singular_values == ep.cluster_singular_values);
    CHECK(ep2.min_pairwise_fidelity == ep.min_pairwise_fidelity);
    CHECK(ep2.max_pairwise_fidelity == ep.max_pairwise_fidelity);
    CHECK(ep2.ep_suspected == ep.ep_suspected);

    latspec::TrendPoint tp;
    tp.ok = false;
    tp.error = "solver failed";
    const auto tp2 = latspec::trend_point_from_json(latspec::trend_point_to_json(tp));
    CHECK_FALSE(tp2.ok);
    CHECK(tp2.error == tp.error);
}

TEST_CASE("demo case serializes its vectors and fidelity") {
    const auto [c, f] = latspec::hermitian_demo(0.5);
    const auto j = latspec::demo_case_to_json(c, f);
    CHECK(j["xi"].get<double>() == 0.5);
    CHECK(j["fidelity"].get<double>() == f);
    CHECK(j["v2"][0].get<double>() == 1.5);
}
