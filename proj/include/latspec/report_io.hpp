#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "latspec/analysis.hpp"
#include "latspec/spectrum.hpp"
#include "latspec/symmetrize.hpp"

#include "json.hpp"

namespace latspec {

using ojson = nlohmann::ordered_json;

inline ojson complex_to_json(cdouble z) { return ojson{{"re", z.real()}, {"im", z.imag()}}; }

inline cdouble complex_from_json(const nlohmann::json& j) {
    return cdouble{j.at("re").get<double>(), j.at("im").get<double>()};
}

inline ojson complex_vector_to_json(const std::vector<cdouble>& v) {
    ojson a = ojson::array();
    for (const auto& z : v) a.push_back(complex_to_json(z));
    return a;
}

inline std::vector<cdouble> complex_vector_from_json(const nlohmann::json& j) {
    std::vector<cdouble> v;
    for (const auto& e : j) v.push_back(complex_from_json(e));
    return v;
}

inline ojson spectrum_to_json(const Spectrum& s) {
    ojson j;
    j["path"] = to_string(s.path);
    j["eigenvalues"] = complex_vector_to_json(s.eigenvalues);
    j["residuals"] = s.residuals;
    ojson vecs = ojson::array();
    for (const auto& v : s.eigenvectors) vecs.push_back(complex_vector_to_json(v));
    j["eigenvectors"] = vecs;
    return j;
}

inline Spectrum spectrum_from_json(const nlohmann::json& j) {
    Spectrum s;
    const auto path = parse_solver_path(j.at("path").get<std::string>());
    if (!path) throw std::invalid_argument("spectrum_from_json: unknown path tag");
    s.path = *path;
    s.eigenvalues = complex_vector_from_json(j.at("eigenvalues"));
    s.residuals = j.at("residuals").get<std::vector<double>>();
    for (const auto& v : j.at("eigenvectors")) s.eigenvectors.push_back(complex_vector_from_json(v));
    return s;
}

inline ojson matrix_to_json(const ComplexMatrix& m) {
    ojson j;
    j["dim"] = m.dim;
    j["structure"] = to_string(m.structure);
    ojson rows = ojson::array();
    for (std::size_t r = 0; r < m.dim; ++r) {
        ojson row = ojson::array();
        for (std::size_t c = 0; c < m.dim; ++c) row.push_back(complex_to_json(m(r, c)));
        rows.push_back(row);
    }
    j["entries"] = rows;
    return j;
}

inline ComplexMatrix matrix_from_json(const nlohmann::json& j) {
    ComplexMatrix m;
    m.dim = j.at("dim").get<std::size_t>();
    const auto st = parse_structure(j.at("structure").get<std::string>());
    if (!st) throw std::invalid_argument("matrix_from_json: unknown structure tag");
    m.structure = *st;
    m.entries.assign(m.dim * m.dim, cdouble{});
    std::size_t r = 0;
    for (const auto& row : j.at("entries")) {
        std::size_t c = 0;
        for (const auto& e : row) m.entries[r * m.dim + c++] = complex_from_json(e);
        ++r;
    }
    return m;
}

inline ojson certificate_to_json(const GaugeCertificate& c) {
    ojson j;
    j["applicable"] = c.applicable;
    j["reason"] = c.reason;
    j["q"] = c.q;
    j["log_q"] = c.log_q;
    j["max_asymmetry"] = c.max_asymmetry;
    if (c.applicable) j["symmetrized"] = matrix_to_json(c.symmetrized);
    return j;
}

inline GaugeCertificate certificate_from_json(const nlohmann::json& j) {
    GaugeCertificate c;
    c.applicable = j.at("applicable").get<bool>();
    c.reason = j.at("reason").get<std::string>();
    c.q = j.at("q").get<std::vector<double>>();
    c.log_q = j.at("log_q").get<std::vector<double>>();
    c.max_asymmetry = j.at("max_asymmetry").get<double>();
    if (c.applicable) c.symmetrized = matrix_from_json(j.at("symmetrized"));
    return c;
}

inline ojson fidelity_matrix_to_json(const FidelityMatrix& fm) {
    ojson j;
    j["labels"] = complex_vector_to_json(fm.labels);
    j["values"] = fm.values;
    return j;
}

inline FidelityMatrix fidelity_matrix_from_json(const nlohmann::json& j) {
    FidelityMatrix fm;
    fm.labels = complex_vector_from_json(j.at("labels"));
    fm.values = j.at("values").get<std::vector<std::vector<double>>>();
    return fm;
}

inline ojson pairing_to_json(const PairingReport& r) {
    ojson j;
    j["tol"] = r.tol;
    ojson pairs = ojson::array();
    for (const auto& [a, b] : r.pairs) pairs.push_back(ojson::array({a, b}));
    j["pairs"] = pairs;
    j["pair_sum_mismatch"] = r.pair_sum_mismatch;
    j["alternation_defects"] = r.alternation_defects;
    if (r.zero_mode_index) j["zero_mode_index"] = *r.zero_mode_index;
    else j["zero_mode_index"] = nullptr;
    j["unpaired"] = r.unpaired;
    j["verdict"] = r.verdict;
    return j;
}

inline PairingReport pairing_from_json(const nlohmann::json& j) {
    PairingReport r;
    r.tol = j.at("tol").get<double>();
    for (const auto& p : j.at("pairs"))
        r.pairs.emplace_back(p.at(0).get<std::size_t>(), p.at(1).get<std::size_t>());
    r.pair_sum_mismatch = j.at("pair_sum_mismatch").get<std::vector<double>>();
    r.alternation_defects = j.at("alternation_defects").get<std::vector<double>>();
    if (!j.at("zero_mode_index").is_null())
        r.zero_mode_index = j.at("zero_mode_index").get<std::size_t>();
    r.unpaired = j.at("unpaired").get<std::vector<std::size_t>>();
    r.verdict = j.at("verdict").get<bool>();
    return r;
}

inline ojson curve_count_to_json(const CurveCount& c) {
    ojson j;
    j["n_distinct"] = c.n_distinct;
    j["groups"] = c.groups;
    j["tolerance"] = c.tolerance;
    return j;
}

inline CurveCount curve_count_from_json(const nlohmann::json& j) {
    CurveCount c;
    c.n_distinct = j.at("n_distinct").get<std::size_t>();
    c.groups = j.at("groups").get<std::vector<std::vector<std::size_t>>>();
    c.tolerance = j.at("tolerance").get<double>();
    return c;
}

inline ojson ep_report_to_json(const EPReport& r) {
    ojson j;
    j["cluster_radius"] = r.cluster_radius;
    j["clusters"] = r.clusters;
    j["geometric_multiplicity"] = r.geometric_multiplicity;
    j["cluster_singular_values"] = r.cluster_singular_values;
    j["min_pairwise_fidelity"] = r.min_pairwise_fidelity;
    j["max_pairwise_fidelity"] = r.max_pairwise_fidelity;
    j["ep_suspected"] = r.ep_suspected;
    return j;
}

inline EPReport ep_report_from_json(const nlohmann::json& j) {
    EPReport r;
    r.cluster_radius = j.at("cluster_radius").get<double>();
    r.clusters = j.at("clusters").get<std::vector<std::vector<std::size_t>>>();
    r.geometric_multiplicity = j.at("geometric_multiplicity").get<std::vector<std::size_t>>();
    r.cluster_singular_values =
        j.at("cluster_singular_values").get<std::vector<std::vector<double>>>();
    r.min_pairwise_fidelity = j.at("min_pairwise_fidelity").get<double>();
    r.max_pairwise_fidelity = j.at("max_pairwise_fidelity").get<double>();
    r.ep_suspected = j.at("ep_suspected").get<bool>();
    return r;
}

inline ojson trend_point_to_json(const TrendPoint& p) {
    ojson j;
    j["ok"] = p.ok;
    j["min_fidelity"] = p.min_fidelity;
    j["max_fidelity"] = p.max_fidelity;
    j["ep_suspected"] = p.ep_suspected;
    j["error"] = p.error;
    return j;
}

inline TrendPoint trend_point_from_json(const nlohmann::json& j) {
    TrendPoint p;
    p.ok = j.at("ok").get<bool>();
    p.min_fidelity = j.at("min_fidelity").get<double>();
    p.max_fidelity = j.at("max_fidelity").get<double>();
    p.ep_suspected = j.at("ep_suspected").get<bool>();
    p.error = j.at("error").get<std::string>();
    return p;
}

inline ojson demo_case_to_json(const HermitianDemoCase& c, double f) {
    ojson j;
    j["xi"] = c.xi;
    j["v1"] = c.v1;
    j["v2"] = c.v2;
    j["fidelity"] = f;
    return j;
}

}  // namespace latspec
