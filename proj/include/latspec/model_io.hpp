#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "latspec/model.hpp"

namespace latspec {

/// Malformed model file: message carries file, line and field context.
class ModelParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::size_t line_of_byte(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

inline cdouble parse_complex(const nlohmann::json& j, const std::string& field,
                             const std::string& origin) {
    if (j.is_number()) return cdouble{j.get<double>(), 0.0};
    if (j.is_object() && j.contains("re") && j.contains("im") && j["re"].is_number() &&
        j["im"].is_number())
        return cdouble{j["re"].get<double>(), j["im"].get<double>()};
    throw ModelParseError(origin + ": field '" + field +
                          "' must be a number or an object {re, im}");
}

}  // namespace detail

/// Parse the model file schema. Fields: n_sites (required), boundary
/// ("open"|"closed", default open), forward_hops/backward_hops (arrays of
/// numbers or {re, im} objects) or uniform_t/uniform_tp shorthands, gains
/// (array of reals) or uniform_gamma. Shorthands expand to constant
/// sequences of the length the boundary requires.
inline LatticeModel parse_model(std::string_view text, const std::string& origin = "<string>") {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ModelParseError(origin + ":" + std::to_string(detail::line_of_byte(text, e.byte)) +
                              ": " + e.what());
    }
    if (!j.is_object()) throw ModelParseError(origin + ": top level must be an object");

    LatticeModel m;
    if (!j.contains("n_sites")) throw ModelParseError(origin + ": missing field 'n_sites'");
    if (!j["n_sites"].is_number_unsigned())
        throw ModelParseError(origin + ": field 'n_sites' must be a positive integer");
    m.n_sites = j["n_sites"].get<std::size_t>();

    if (j.contains("boundary")) {
        const std::string b = j["boundary"].is_string() ? j["boundary"].get<std::string>() : "";
        if (b == "open")
            m.boundary = BoundaryCondition::Open;
        else if (b == "closed")
            m.boundary = BoundaryCondition::Closed;
        else
            throw ModelParseError(origin + ": field 'boundary' must be \"open\" or \"closed\"");
    }

    const std::size_t hops =
        m.boundary == BoundaryCondition::Open ? (m.n_sites > 0 ? m.n_sites - 1 : 0) : m.n_sites;

    auto read_hops = [&](const char* field, const char* uniform_field) {
        std::vector<cdouble> out;
        if (j.contains(field)) {
            if (!j[field].is_array())
                throw ModelParseError(origin + ": field '" + field + "' must be an array");
            for (const auto& e : j[field]) out.push_back(detail::parse_complex(e, field, origin));
        } else if (j.contains(uniform_field)) {
            out.assign(hops, detail::parse_complex(j[uniform_field], uniform_field, origin));
        } else {
            throw ModelParseError(origin + ": missing field '" + field + "' (or '" +
                                  uniform_field + "')");
        }
        return out;
    };
    m.forward_hops = read_hops("forward_hops", "uniform_t");
    m.backward_hops = read_hops("backward_hops", "uniform_tp");

    if (j.contains("gains")) {
        if (!j["gains"].is_array())
            throw ModelParseError(origin + ": field 'gains' must be an array");
        for (const auto& e : j["gains"]) {
            if (!e.is_number())
                throw ModelParseError(origin + ": field 'gains' entries must be real numbers");
            m.gains.push_back(e.get<double>());
        }
    } else if (j.contains("uniform_gamma")) {
        if (!j["uniform_gamma"].is_number())
            throw ModelParseError(origin + ": field 'uniform_gamma' must be a real number");
        m.gains.assign(m.n_sites, j["uniform_gamma"].get<double>());
    } else {
        throw ModelParseError(origin + ": missing field 'gains' (or 'uniform_gamma')");
    }
    return m;
}

/// Canonical JSON form: explicit per-site arrays, {re, im} pairs. The same
/// object is embedded in CLI reports as the model echo.
inline nlohmann::ordered_json model_to_json(const LatticeModel& m) {
    nlohmann::ordered_json j;
    j["n_sites"] = m.n_sites;
    j["boundary"] = to_string(m.boundary);
    auto hop_array = [](const std::vector<cdouble>& hs) {
        nlohmann::ordered_json a = nlohmann::ordered_json::array();
        for (const auto& h : hs) a.push_back({{"re", h.real()}, {"im", h.imag()}});
        return a;
    };
    j["forward_hops"] = hop_array(m.forward_hops);
    j["backward_hops"] = hop_array(m.backward_hops);
    j["gains"] = m.gains;
    return j;
}

/// Round-trips losslessly: load(save(m)) == m exactly.
inline std::string format_model(const LatticeModel& m) {
    return model_to_json(m).dump(2) + "\n";
}

inline LatticeModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ModelParseError(path.string() + ": cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    LatticeModel m = parse_model(ss.str(), path.string());
    require_valid(m);
    return m;
}

inline void save_model(const LatticeModel& m, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path.string() + ": cannot open file for writing");
    out << format_model(m);
    if (!out) throw std::runtime_error(path.string() + ": write failed");
}

}  // namespace latspec
