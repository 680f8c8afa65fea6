// lattice-spectra: command-line front end over the latspec headers.
// Subcommands: spectrum | densities | fidelity | pairing | symmetrize | demo | sweep.
// Exit codes: 0 ok, 1 usage error, 2 invalid model, 3 solver failure.
// All output is buffered and written only on success; errors go to standard
// error as one-line JSON.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "latspec/latspec.hpp"

namespace {

using latspec::cdouble;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string subcommand;
    std::string model_path;  // empty -> inline flags
    long n = 0;
    double t = 0.0, tp = 0.0, gamma = 0.0;
    bool t_given = false, tp_given = false, gamma_given = false;
    std::string bc = "open";
    std::string format = "csv";
    std::string out_path;  // empty -> stdout
    double curve_tol = 1e-8;
    double pairing_tol = 1e-8;
    std::vector<double> xi;
    // sweep grid
    std::string param;
    double from = 0.0, to = 0.0;
    long count = 1;
    bool log_spacing = false;
};

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

const char* fmt(bool b) { return b ? "true" : "false"; }

latspec::LatticeModel model_from_config(const RunConfig& c) {
    const bool inline_given = c.n != 0 || c.t_given || c.tp_given || c.gamma_given;
    if (!c.model_path.empty() && inline_given)
        throw UsageError("give either --model or inline flags (--n/--t/--tp/--gamma), not both");
    if (!c.model_path.empty()) return latspec::load_model(c.model_path);
    if (c.n == 0) throw UsageError("a model is required: --model PATH or --n with --t/--tp");
    if (!c.t_given || !c.tp_given)
        throw UsageError("inline models need both --t and --tp (per-site values need a file)");
    if (c.n < 0) throw UsageError("--n must be positive");
    const auto bc = c.bc == "closed" ? latspec::BoundaryCondition::Closed
                                     : latspec::BoundaryCondition::Open;
    latspec::LatticeModel m = latspec::LatticeModel::uniform(
        static_cast<std::size_t>(c.n), cdouble{c.t, 0.0}, cdouble{c.tp, 0.0}, c.gamma, bc);
    latspec::require_valid(m);
    return m;
}

void emit(const RunConfig& c, const std::string& payload) {
    if (c.out_path.empty()) {
        std::fwrite(payload.data(), 1, payload.size(), stdout);
        return;
    }
    std::ofstream out(c.out_path, std::ios::binary);
    if (!out) throw std::runtime_error(c.out_path + ": cannot open for writing");
    out << payload;
    if (!out) throw std::runtime_error(c.out_path + ": write failed");
}

std::string cmd_spectrum(const RunConfig& c) {
    const latspec::LatticeModel m = model_from_config(c);
    const latspec::Spectrum s = latspec::eigs(m);
    if (c.format == "json") {
        latspec::ojson j;
        j["model"] = latspec::model_to_json(m);
        j["spectrum"] = latspec::spectrum_to_json(s);
        return j.dump(2) + "\n";
    }
    std::ostringstream os;
    os << "k,re,im,residual,path\n";
    for (std::size_t k = 0; k < s.eigenvalues.size(); ++k)
        os << k << ',' << fmt(s.eigenvalues[k].real()) << ',' << fmt(s.eigenvalues[k].imag())
           << ',' << fmt(s.residuals[k]) << ',' << to_string(s.path) << '\n';
    return os.str();
}

std::string cmd_densities(const RunConfig& c) {
    const latspec::LatticeModel m = model_from_config(c);
    const latspec::Spectrum s = latspec::eigs(m);
    const auto rows = latspec::density_curves(s);
    const latspec::CurveCount count = latspec::count_distinct_curves(rows, c.curve_tol);
    if (c.format == "json") {
        latspec::ojson j;
        j["model"] = latspec::model_to_json(m);
        j["eigenvalues"] = latspec::complex_vector_to_json(s.eigenvalues);
        j["densities"] = rows;  // one row per eigenpair
        j["curve_count"] = latspec::curve_count_to_json(count);
        return j.dump(2) + "\n";
    }
    std::ostringstream os;
    os << "site";
    for (std::size_t k = 0; k < rows.size(); ++k) os << ",k" << k;
    os << '\n';
    for (std::size_t site = 0; site < m.n_sites; ++site) {
        os << (site + 1);
        for (const auto& row : rows) os << ',' << fmt(row[site]);
        os << '\n';
    }
    os << "distinct_curves=" << count.n_distinct << '\n';
    return os.str();
}

std::string cmd_fidelity(const RunConfig& c) {
    const latspec::LatticeModel m = model_from_config(c);
    const latspec::Spectrum s = latspec::eigs(m);
    const latspec::FidelityMatrix fm = latspec::fidelity_matrix(s);
    if (c.format == "json") {
        latspec::ojson j;
        j["model"] = latspec::model_to_json(m);
        j["fidelity_matrix"] = latspec::fidelity_matrix_to_json(fm);
        return j.dump(2) + "\n";
    }
    std::ostringstream os;
    os << "re_e,im_e";
    for (std::size_t k = 0; k < fm.labels.size(); ++k) os << ",f" << k;
    os << '\n';
    for (std::size_t i = 0; i < fm.labels.size(); ++i) {
        os << fmt(fm.labels[i].real()) << ',' << fmt(fm.labels[i].imag());
        for (double v : fm.values[i]) os << ',' << fmt(v);
        os << '\n';
    }
    return os.str();
}

std::string cmd_pairing(const RunConfig& c) {
    const latspec::LatticeModel m = model_from_config(c);
    const latspec::Spectrum s = latspec::eigs(m);
    const latspec::PairingReport rep = latspec::pairing_check(s, c.pairing_tol);
    if (c.format == "json") {
        latspec::ojson j;
        j["model"] = latspec::model_to_json(m);
        j["pairing"] = latspec::pairing_to_json(rep);
        return j.dump(2) + "\n";
    }
    std::ostringstream os;
    os << "i,j,re_ei,im_ei,re_ej,im_ej,sum_mismatch,alternation_defect\n";
    for (std::size_t p = 0; p < rep.pairs.size(); ++p) {
        const auto [i, j] = rep.pairs[p];
        os << i << ',' << j << ',' << fmt(s.eigenvalues[i].real()) << ','
           << fmt(s.eigenvalues[i].imag()) << ',' << fmt(s.eigenvalues[j].real()) << ','
           << fmt(s.eigenvalues[j].imag()) << ',' << fmt(rep.pair_sum_mismatch[p]) << ','
           << fmt(rep.alternation_defects[p]) << '\n';
    }
    if (rep.zero_mode_index) os << "zero_mode=" << *rep.zero_mode_index << '\n';
    else os << "zero_mode=none\n";
    for (std::size_t u : rep.unpaired) os << "unpaired=" << u << '\n';
    os << "verdict=" << fmt(rep.verdict) << '\n';
    return os.str();
}

std::string cmd_symmetrize(const RunConfig& c) {
    const latspec::LatticeModel m = model_from_config(c);
    const latspec::GaugeCertificate cert = latspec::gauge_sequence(m);
    if (c.format == "json") {
        latspec::ojson j;
        j["model"] = latspec::model_to_json(m);
        j["certificate"] = latspec::certificate_to_json(cert);
        return j.dump(2) + "\n";
    }
    std::ostringstream os;
    os << "site,q,log_q,sym_offdiag\n";
    if (cert.applicable) {
        for (std::size_t n = 0; n < cert.q.size(); ++n) {
            os << (n + 1) << ',' << fmt(cert.q[n]) << ',' << fmt(cert.log_q[n]);
            if (n + 1 < cert.q.size()) os << ',' << fmt(cert.symmetrized(n, n + 1).real());
            else os << ',';
            os << '\n';
        }
    }
    os << "applicable=" << fmt(cert.applicable) << '\n';
    os << "reason=" << cert.reason << '\n';
    os << "max_asymmetry=" << fmt(cert.max_asymmetry) << '\n';
    return os.str();
}

std::string cmd_demo(const RunConfig& c) {
    if (c.xi.empty()) throw UsageError("demo needs --xi with at least one value");
    if (c.format == "json") {
        latspec::ojson cases = latspec::ojson::array();
        for (double xi : c.xi) {
            const auto [dc, f] = latspec::hermitian_demo(xi);
            cases.push_back(latspec::demo_case_to_json(dc, f));
        }
        latspec::ojson j;
        j["cases"] = cases;
        return j.dump(2) + "\n";
    }
    std::ostringstream os;
    os << "xi,fidelity\n";
    for (double xi : c.xi) {
        const auto [dc, f] = latspec::hermitian_demo(xi);
        (void)dc;
        os << fmt(xi) << ',' << fmt(f) << '\n';
    }
    return os.str();
}

std::size_t sweep_threads(std::size_t points) {
    std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("LATTICE_SPECTRA_THREADS")) {
        char* end = nullptr;
        const unsigned long cap = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && cap >= 1) threads = std::min<std::size_t>(threads, cap);
        else threads = 1;
    }
    return std::min(threads, points);
}

std::string cmd_sweep(const RunConfig& c) {
    if (c.param != "t" && c.param != "tp" && c.param != "gamma")
        throw UsageError("--param must be one of t, tp, gamma");
    if (c.count < 1) throw UsageError("--count must be at least 1");
    if (c.n == 0) throw UsageError("sweep needs an inline base model (--n plus hop flags)");
    if (c.param != "t" && !c.t_given) throw UsageError("sweep needs --t unless sweeping t");
    if (c.param != "tp" && !c.tp_given) throw UsageError("sweep needs --tp unless sweeping tp");

    std::vector<double> grid(static_cast<std::size_t>(c.count));
    if (c.count == 1) {
        grid[0] = c.from;
    } else if (c.log_spacing) {
        if (c.from == 0.0 || c.to == 0.0 || (c.from < 0.0) != (c.to < 0.0))
            throw UsageError("--log needs nonzero endpoints of the same sign");
        const double sgn = c.from < 0.0 ? -1.0 : 1.0;
        const double la = std::log(std::abs(c.from)), lb = std::log(std::abs(c.to));
        for (long i = 0; i < c.count; ++i)
            grid[static_cast<std::size_t>(i)] =
                sgn * std::exp(la + (lb - la) * static_cast<double>(i) /
                                        static_cast<double>(c.count - 1));
    } else {
        for (long i = 0; i < c.count; ++i)
            grid[static_cast<std::size_t>(i)] =
                c.from + (c.to - c.from) * static_cast<double>(i) /
                             static_cast<double>(c.count - 1);
    }

    const auto bc = c.bc == "closed" ? latspec::BoundaryCondition::Closed
                                     : latspec::BoundaryCondition::Open;
    std::vector<latspec::LatticeModel> family;
    family.reserve(grid.size());
    for (double v : grid) {
        const double t = c.param == "t" ? v : c.t;
        const double tp = c.param == "tp" ? v : c.tp;
        const double g = c.param == "gamma" ? v : c.gamma;
        latspec::LatticeModel m = latspec::LatticeModel::uniform(
            static_cast<std::size_t>(c.n), cdouble{t, 0.0}, cdouble{tp, 0.0}, g, bc);
        latspec::require_valid(m);
        family.push_back(std::move(m));
    }

    const std::vector<latspec::TrendPoint> points =
        latspec::clustering_trend(family, sweep_threads(family.size()));

    if (c.format == "json") {
        latspec::ojson j;
        j["param"] = c.param;
        j["grid"] = grid;
        j["spacing"] = c.log_spacing ? "log" : "linear";
        j["model_base"] = latspec::model_to_json(family.front());
        latspec::ojson arr = latspec::ojson::array();
        for (std::size_t i = 0; i < points.size(); ++i) {
            latspec::ojson p = latspec::trend_point_to_json(points[i]);
            p["value"] = grid[i];
            arr.push_back(p);
        }
        j["points"] = arr;
        return j.dump(2) + "\n";
    }
    std::ostringstream os;
    os << c.param << ",min_fidelity,max_fidelity,ep_suspected,error\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        os << fmt(grid[i]) << ',';
        if (p.ok) os << fmt(p.min_fidelity) << ',' << fmt(p.max_fidelity) << ','
                     << fmt(p.ep_suspected) << ',';
        else os << ",,,";
        os << p.error << '\n';
    }
    return os.str();
}

void add_model_flags(CLI::App* cmd, RunConfig& c) {
    cmd->add_option("--model", c.model_path, "model file (JSON, .model)");
    cmd->add_option("--n", c.n, "site count for an inline uniform model");
    cmd->add_option("--t", c.t, "uniform forward hop");
    cmd->add_option("--tp", c.tp, "uniform backward hop");
    cmd->add_option("--gamma", c.gamma, "uniform gain/loss");
    cmd->add_option("--bc", c.bc, "boundary condition")
        ->check(CLI::IsMember({"open", "closed"}));
}

void add_output_flags(CLI::App* cmd, RunConfig& c) {
    cmd->add_option("--format", c.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", c.out_path, "write output to this file instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    CLI::App app{"non-Hermitian 1D lattice spectra and eigenstate diagnostics"};
    app.require_subcommand(1);

    CLI::App* sub_spectrum = app.add_subcommand("spectrum", "eigenvalues and residuals");
    CLI::App* sub_densities = app.add_subcommand("densities", "site densities per eigenpair");
    CLI::App* sub_fidelity = app.add_subcommand("fidelity", "pairwise fidelity matrix");
    CLI::App* sub_pairing = app.add_subcommand("pairing", "E <-> -E pairing report");
    CLI::App* sub_symmetrize = app.add_subcommand("symmetrize", "gauge sequence and certificate");
    CLI::App* sub_demo = app.add_subcommand("demo", "degenerate 3x3 fidelity family");
    CLI::App* sub_sweep = app.add_subcommand("sweep", "fidelity extremes along a parameter grid");

    for (CLI::App* cmd : {sub_spectrum, sub_densities, sub_fidelity, sub_pairing, sub_symmetrize})
        add_model_flags(cmd, cfg);
    for (CLI::App* cmd :
         {sub_spectrum, sub_densities, sub_fidelity, sub_pairing, sub_symmetrize, sub_demo,
          sub_sweep})
        add_output_flags(cmd, cfg);

    sub_densities->add_option("--curve-tol", cfg.curve_tol, "distinct-curve tolerance");
    sub_demo->add_option("--xi", cfg.xi, "comma-separated parameter list")->delimiter(',');

    sub_sweep->add_option("--param", cfg.param, "swept parameter: t | tp | gamma")->required();
    sub_sweep->add_option("--from", cfg.from, "grid start")->required();
    sub_sweep->add_option("--to", cfg.to, "grid end")->required();
    sub_sweep->add_option("--count", cfg.count, "grid point count")->required();
    sub_sweep->add_flag("--log", cfg.log_spacing, "logarithmic spacing");
    sub_sweep->add_option("--n", cfg.n, "site count")->required();
    sub_sweep->add_option("--t", cfg.t, "uniform forward hop");
    sub_sweep->add_option("--tp", cfg.tp, "uniform backward hop");
    sub_sweep->add_option("--gamma", cfg.gamma, "uniform gain/loss");
    sub_sweep->add_option("--bc", cfg.bc, "boundary condition")
        ->check(CLI::IsMember({"open", "closed"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "{\"error\": " << latspec::ojson(e.what()).dump() << ", \"exit\": 1}\n";
        return 1;
    }

    // needed-flag bookkeeping: CLI11 counts tell us which were given
    auto given = [&](CLI::App* cmd, const std::string& name) {
        const CLI::Option* o = cmd->get_option_no_throw(name);
        return o != nullptr && o->count() > 0;
    };
    CLI::App* active = app.get_subcommands().front();
    cfg.subcommand = active->get_name();
    cfg.t_given = given(active, "--t");
    cfg.tp_given = given(active, "--tp");
    cfg.gamma_given = given(active, "--gamma");

    int exit_code = 0;
    std::string payload;
    try {
        if (cfg.subcommand == "spectrum") payload = cmd_spectrum(cfg);
        else if (cfg.subcommand == "densities") payload = cmd_densities(cfg);
        else if (cfg.subcommand == "fidelity") payload = cmd_fidelity(cfg);
        else if (cfg.subcommand == "pairing") payload = cmd_pairing(cfg);
        else if (cfg.subcommand == "symmetrize") payload = cmd_symmetrize(cfg);
        else if (cfg.subcommand == "demo") payload = cmd_demo(cfg);
        else if (cfg.subcommand == "sweep") payload = cmd_sweep(cfg);
        else throw UsageError("unknown subcommand");
    } catch (const latspec::SolverError& e) {
        exit_code = 3;
        std::cerr << "{\"error\": " << latspec::ojson(e.what()).dump()
                  << ", \"worst_residual\": " << e.worst_residual << ", \"exit\": 3}\n";
    } catch (const latspec::ModelValidationError& e) {
        exit_code = 2;
        std::cerr << "{\"error\": " << latspec::ojson(e.what()).dump() << ", \"exit\": 2}\n";
    } catch (const latspec::ModelParseError& e) {
        exit_code = 2;
        std::cerr << "{\"error\": " << latspec::ojson(e.what()).dump() << ", \"exit\": 2}\n";
    } catch (const UsageError& e) {
        exit_code = 1;
        std::cerr << "{\"error\": " << latspec::ojson(e.what()).dump() << ", \"exit\": 1}\n";
    } catch (const std::exception& e) {
        exit_code = 1;
        std::cerr << "{\"error\": " << latspec::ojson(e.what()).dump() << ", \"exit\": 1}\n";
    }
    if (exit_code != 0) return exit_code;

    try {
        emit(cfg, payload);
    } catch (const std::exception& e) {
        std::cerr << "{\"error\": " << latspec::ojson(e.what()).dump() << ", \"exit\": 1}\n";
        return 1;
    }
    return 0;
}
