// End-to-end checks of the lattice-spectra binary. The executable path comes
// in through the LATSPEC_CLI_PATH compile definition; each invocation runs
// through the shell with stdout/stderr captured to per-call temp files.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run_cli(const std::string& args, const std::string& env_prefix = "") {
    static int counter = 0;
    const auto dir = std::filesystem::temp_directory_path();
    const auto tag = std::to_string(++counter);
    const auto out_path = dir / ("latspec_cli_out_" + tag);
    const auto err_path = dir / ("latspec_cli_err_" + tag);
    const std::string cmd = env_prefix + (env_prefix.empty() ? "" : " ") +
                            std::string(LATSPEC_CLI_PATH) + " " + args + " > " +
                            out_path.string() + " 2> " + err_path.string();
    const int raw = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    std::filesystem::remove(out_path);
    std::filesystem::remove(err_path);
    return r;
}

std::size_t line_count(const std::string& s) {
    std::size_t n = 0;
    for (char c : s)
        if (c == '\n') ++n;
    return n;
}

}  // namespace

TEST_CASE("spectrum: csv layout and json model echo") {
    const auto csv = run_cli("spectrum --n 4 --t 1 --tp 0.25");
    REQUIRE(csv.exit_code == 0);
    CHECK(csv.err.empty());
    CHECK(csv.out.rfind("k,re,im,residual,path\n", 0) == 0);
    CHECK(line_count(csv.out) == 5);  // header + one row per eigenvalue
    CHECK(csv.out.find("symmetric_tridiagonal") != std::string::npos);

    const auto js = run_cli("spectrum --n 4 --t 1 --tp 0.25 --format json");
    REQUIRE(js.exit_code == 0);
    const auto j = nlohmann::json::parse(js.out);
    CHECK(j["model"]["n_sites"] == 4);
    CHECK(j["model"]["boundary"] == "open");
    CHECK(j["model"]["forward_hops"].size() == 3);
    CHECK(j["spectrum"]["eigenvalues"].size() == 4);
    CHECK(j["spectrum"]["path"] == "symmetric_tridiagonal");
}

TEST_CASE("spectrum: model file input equals inline flags") {
    const auto dir = std::filesystem::temp_directory_path();
    const auto model_path = dir / "latspec_cli_model.model";
    std::ofstream(model_path) << R"({"n_sites": 4, "uniform_t": 1.0, "uniform_tp": 0.25,
                                     "uniform_gamma": 0.0})";
    const auto from_file = run_cli("spectrum --model " + model_path.string());
    const auto inline_flags = run_cli("spectrum --n 4 --t 1 --tp 0.25");
    REQUIRE(from_file.exit_code == 0);
    CHECK(from_file.out == inline_flags.out);

    // both sources at once is a usage error
    const auto both = run_cli("spectrum --model " + model_path.string() + " --n 4 --t 1 --tp 1");
    CHECK(both.exit_code == 1);
    CHECK(both.out.empty());
    std::filesystem::remove(model_path);
}

TEST_CASE("exit codes: usage 1, invalid model 2, nothing on stdout") {
    const auto nohop = run_cli("spectrum --n 4");
    CHECK(nohop.exit_code == 1);
    CHECK(nohop.out.empty());
    const auto errj = nlohmann::json::parse(nohop.err);
    CHECK(errj["exit"] == 1);
    CHECK(errj["error"].is_string());

    const auto badsub = run_cli("spectrify --n 4 --t 1 --tp 1");
    CHECK(badsub.exit_code == 1);

    const auto dir = std::filesystem::temp_directory_path();
    const auto bad_path = dir / "latspec_cli_bad.model";
    std::ofstream(bad_path) << R"({"n_sites": 4, "uniform_t": 1.0})";
    const auto bad = run_cli("spectrum --model " + bad_path.string());
    CHECK(bad.exit_code == 2);
    CHECK(bad.out.empty());
    CHECK(nlohmann::json::parse(bad.err)["exit"] == 2);
    std::filesystem::remove(bad_path);

    const auto missing = run_cli("spectrum --model /definitely/not/here.model");
    CHECK(missing.exit_code == 2);
}

TEST_CASE("densities: site-major csv with a distinct-curve trailer") {
    const auto r = run_cli("densities --n 12 --t 0.1 --tp 0.05");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.rfind("site,k0,k1,", 0) == 0);
    CHECK(r.out.find("\ndistinct_curves=6\n") != std::string::npos);
    CHECK(line_count(r.out) == 14);  // header + 12 sites + trailer

    const auto strict =
        run_cli("densities --n 12 --t 0.1 --tp 0.05 --curve-tol 1e-16 --format json");
    REQUIRE(strict.exit_code == 0);
    CHECK(nlohmann::json::parse(strict.out)["curve_count"]["tolerance"] == 1e-16);

    const auto js = run_cli("densities --n 12 --t 0.1 --tp 0.05 --format json");
    const auto j = nlohmann::json::parse(js.out);
    CHECK(j["curve_count"]["n_distinct"] == 6);
    CHECK(j["densities"].size() == 12);
}

TEST_CASE("pairing: rows plus verdict trailer") {
    const auto even = run_cli("pairing --n 6 --t 0.8 --tp 0.3");
    REQUIRE(even.exit_code == 0);
    CHECK(even.out.rfind("i,j,", 0) == 0);
    CHECK(even.out.find("zero_mode=none\n") != std::string::npos);
    CHECK(even.out.find("verdict=true\n") != std::string::npos);

    const auto odd = run_cli("pairing --n 5 --t 0.8 --tp 0.3");
    CHECK(odd.out.find("zero_mode=2\n") != std::string::npos);

    const auto broken = run_cli("pairing --n 4 --t 1 --tp 0.6 --gamma 0.5");
    REQUIRE(broken.exit_code == 0);
    CHECK(broken.out.find("verdict=false\n") != std::string::npos);
}

TEST_CASE("symmetrize: per-site gauge table or refusal reason") {
    const auto ok = run_cli("symmetrize --n 4 --t 1 --tp 0.25");
    REQUIRE(ok.exit_code == 0);
    CHECK(ok.out.rfind("site,q,log_q,sym_offdiag\n", 0) == 0);
    CHECK(ok.out.find("applicable=true\n") != std::string::npos);
    CHECK(ok.out.find("\n2,0.5,") != std::string::npos);

    const auto no = run_cli("symmetrize --n 4 --t 1 --tp 0.25 --bc closed");
    REQUIRE(no.exit_code == 0);
    CHECK(no.out.find("applicable=false\n") != std::string::npos);
    CHECK(no.out.find("reason=") != std::string::npos);

    const auto js = run_cli("symmetrize --n 4 --t 1 --tp 0.25 --format json");
    const auto j = nlohmann::json::parse(js.out);
    CHECK(j["certificate"]["applicable"] == true);
    CHECK(j["certificate"]["q"].size() == 4);
}

TEST_CASE("demo: xi list in, fidelity column out") {
    const auto r = run_cli("demo --xi 0,-2,1");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.rfind("xi,fidelity\n", 0) == 0);
    CHECK(r.out.find("\n0,1\n") != std::string::npos);
    CHECK(r.out.find("\n-2,0\n") != std::string::npos);
    CHECK(r.out.find("\n1,0.9642857142857143") != std::string::npos);  // 27/28
    CHECK(line_count(r.out) == 4);

    const auto none = run_cli("demo");
    CHECK(none.exit_code == 1);

    const auto js = run_cli("demo --xi 0.5 --format json");
    const auto j = nlohmann::json::parse(js.out);
    REQUIRE(j["cases"].size() == 1);
    CHECK(j["cases"][0]["xi"] == 0.5);
}

TEST_CASE("sweep: grid rows with error isolation") {
    const auto r = run_cli("sweep --param tp --from 0.5 --to 0.001 --count 4 --log "
                           "--n 8 --t 1");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.rfind("tp,min_fidelity,max_fidelity,ep_suspected,error\n", 0) == 0);
    CHECK(line_count(r.out) == 5);
    CHECK(r.out.find("0.5,") != std::string::npos);

    const auto js = run_cli("sweep --param gamma --from 0 --to 1 --count 3 "
                            "--n 5 --t 1 --tp 0.5 --format json");
    REQUIRE(js.exit_code == 0);
    const auto j = nlohmann::json::parse(js.out);
    CHECK(j["param"] == "gamma");
    REQUIRE(j["grid"].size() == 3);
    CHECK(j["grid"][1] == 0.5);
    CHECK(j["points"].size() == 3);
    CHECK(j["points"][0]["ok"] == true);

    const auto badlog = run_cli("sweep --param tp --from -1 --to 1 --count 3 --log --n 4 --t 1");
    CHECK(badlog.exit_code == 1);
    const auto badparam = run_cli("sweep --param mass --from 0 --to 1 --count 3 --n 4 --t 1 --tp 1");
    CHECK(badparam.exit_code == 1);
}

TEST_CASE("--out writes the same payload to a file") {
    const auto dir = std::filesystem::temp_directory_path();
    const auto out_path = dir / "latspec_cli_payload.csv";
    const auto direct = run_cli("spectrum --n 3 --t 1 --tp 1");
    const auto filed = run_cli("spectrum --n 3 --t 1 --tp 1 --out " + out_path.string());
    REQUIRE(filed.exit_code == 0);
    CHECK(filed.out.empty());
    CHECK(slurp(out_path) == direct.out);
    std::filesystem::remove(out_path);
}

TEST_CASE("thread cap variable is honored") {
    const auto r = run_cli("sweep --param tp --from 0.5 --to 0.1 --count 3 --n 6 --t 1");
    const auto capped = run_cli("sweep --param tp --from 0.5 --to 0.1 --count 3 --n 6 --t 1",
                                "env LATTICE_SPECTRA_THREADS=1");
    REQUIRE(r.exit_code == 0);
    REQUIRE(capped.exit_code == 0);
    CHECK(capped.out == r.out);
}
