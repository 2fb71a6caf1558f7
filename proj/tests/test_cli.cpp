#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "gkpmod/core.hpp"

using namespace gkpmod;
using namespace gkpmod::cli;
namespace fs = std::filesystem;

namespace {

std::string binary() {
    const char* p = std::getenv("GKPMOD_BIN");
    return p ? p : "";
}

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("gkpmod_cli_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run(const std::string& args, const fs::path& err_file) {
    std::string cmd = binary() + " " + args + " > /dev/null 2> " + err_file.string();
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_CASE("defaults and overrides") {
    Json d = default_config();
    CHECK(resolve_config("", {}) == d);
    CHECK(get_int(d, "target_dim") == 500);
    CHECK(get_int(d, "ancilla_cutoff") == 20);
    CHECK(get_int(d, "fig_scaling.shots") == 200);
    CHECK(get_doubles(d, "fig_scaling.nbar") == std::vector<double>{1, 2, 3, 4});
    CHECK(get_double(d, "fig_cubic.strength_ratio") == 1e-3);
    CHECK(get_bool(d, "counter_displacement"));

    Json c = resolve_config("", {"fig_scaling.shots=50", "release.nbar=2.5", "counter_displacement=false",
                                 "appd.nbar=[1,2]"});
    CHECK(get_int(c, "fig_scaling.shots") == 50);
    CHECK(get_double(c, "release.nbar") == 2.5);
    CHECK_FALSE(get_bool(c, "counter_displacement"));
    CHECK(get_doubles(c, "appd.nbar") == std::vector<double>{1, 2});

    CHECK_THROWS_AS(resolve_config("", {"fig_scaling.nope=1"}), ConfigError);
    CHECK_THROWS_AS(resolve_config("", {"fig_scaling.shots=abc"}), ConfigError);
    CHECK_THROWS_AS(resolve_config("", {"fig_scaling.shots=[1]"}), ConfigError);
    CHECK_THROWS_AS(resolve_config("", {"=3"}), ConfigError);
    CHECK_THROWS_AS(resolve_config("", {"seed"}), ConfigError);
    CHECK_THROWS_AS(resolve_config("", {"fig_scaling..shots=3"}), ConfigError);
    CHECK_THROWS_AS(get_int(resolve_config("", {"fig_scaling.shots=2.5"}), "fig_scaling.shots"), ConfigError);
    CHECK_THROWS_AS(get_double(d, "missing.key"), ConfigError);
    CHECK_THROWS_AS(get_bool(d, "seed"), ConfigError);
}

TEST_CASE("config files") {
    auto dir = scratch("files");
    {
        std::ofstream(dir / "ok.json") << R"({"seed": 7, "drive": {"n_harmonics": 2}})";
        std::ofstream(dir / "unknown.json") << R"({"drive": {"harmonics": 2}})";
        std::ofstream(dir / "broken.json") << R"({"seed": )";
        std::ofstream(dir / "array.json") << R"([1, 2])";
    }
    Json c = resolve_config((dir / "ok.json").string(), {"drive.n_harmonics=3"});
    CHECK(c["seed"] == 7);
    CHECK(get_int(c, "drive.n_harmonics") == 3);
    CHECK(get_double(c, "drive.epsilon") == 0.1);
    CHECK_THROWS_AS(resolve_config((dir / "unknown.json").string(), {}), ConfigError);
    CHECK_THROWS_AS(resolve_config((dir / "broken.json").string(), {}), ConfigError);
    CHECK_THROWS_AS(resolve_config((dir / "array.json").string(), {}), ConfigError);
    CHECK_THROWS_AS(resolve_config((dir / "absent.json").string(), {}), ConfigError);
}

TEST_CASE("exit codes by error kind") {
    CHECK(exit_code_for(ConfigError("x")) == 2);
    CHECK(exit_code_for(std::invalid_argument("x")) == 2);
    CHECK(exit_code_for(RegimeError("x")) == 3);
    CHECK(exit_code_for(TruncationError("x")) == 3);
    CHECK(exit_code_for(std::runtime_error("x")) == 1);
    CHECK(command_names().size() == 7);
}

TEST_CASE("binary: outputs, manifest and determinism") {
    REQUIRE_FALSE(binary().empty());
    auto a = scratch("params_a"), b = scratch("params_b");
    CHECK(run("params --out " + a.string(), a / "err.txt") == 0);
    CHECK(run("params --out " + b.string(), b / "err.txt") == 0);
    CHECK(first_line(slurp(a / "table_report.csv")) == "quantity,value,unit,band_lo,band_hi,pass,informational");
    CHECK(slurp(a / "table_report.csv") == slurp(b / "table_report.csv"));
    CHECK(slurp(a / "potential_minimum.csv") == slurp(b / "potential_minimum.csv"));

    Json m = Json::parse(slurp(a / "manifest.json"));
    CHECK(m["schema_version"] == kManifestSchema);
    CHECK(m["command"] == "params");
    CHECK(m["version"] == kVersion);
    CHECK(m["seed"] == 1);
    CHECK(m["outputs"] == Json::array({"table_report.csv", "potential_minimum.csv"}));
    CHECK(m["config"]["params"]["E_J_hz"] == 10e9);
    CHECK(m["wall_clock_seconds"].is_number());

    // shot loops agree across thread counts and repeat byte for byte
    std::string rel = "release --set release.target_dim=100 --set release.shots=12 --set release.kappa_t=3 --seed 9";
    auto r1 = scratch("rel1"), r2 = scratch("rel2"), r3 = scratch("rel3");
    CHECK(run(rel + " --threads 1 --out " + r1.string(), r1 / "err.txt") == 0);
    CHECK(run(rel + " --threads 3 --out " + r2.string(), r2 / "err.txt") == 0);
    CHECK(run(rel + " --threads 1 --out " + r3.string(), r3 / "err.txt") == 0);
    for (const char* f : {"release_shots.csv", "direct_shots.csv", "release_summary.csv"}) {
        CHECK(slurp(r1 / f) == slurp(r2 / f));
        CHECK(slurp(r1 / f) == slurp(r3 / f));
    }
    CHECK(first_line(slurp(r1 / "release_shots.csv")) == "shot,I_out,Q_out,phi_out,K_eff,delta_q,delta_p");
    CHECK(Json::parse(slurp(r2 / "manifest.json"))["config"]["threads"] == 3);
    CHECK(Json::parse(slurp(r1 / "manifest.json"))["seed"] == 9);

    auto d = scratch("drive");
    CHECK(run("drive --set drive.samples=201 --out " + d.string(), d / "err.txt") == 0);
    for (const char* f : {"waveform_delta1.csv", "waveform_delta0p5.csv", "coeffs_delta1.csv", "synthesis.csv"})
        CHECK(fs::exists(d / f));
    CHECK(first_line(slurp(d / "coeffs_delta1.csv")) == "n,omega_n,b_n");
}

TEST_CASE("binary: scaling columns") {
    auto s = scratch("scaling");
    CHECK(run("fig-scaling --set target_dim=150 --set fig_scaling.shots=4 --set fig_scaling.nbar=[2] --out " + s.string(),
              s / "err.txt") == 0);
    std::string text = slurp(s / "scaling.csv");
    CHECK(first_line(text) == "nbar,mc_mean,mc_std,mc_se,villain,estimate,lower_bound");
    std::stringstream row(text.substr(text.find('\n') + 1));
    std::vector<double> cells;
    for (std::string cell; std::getline(row, cell, ',');) cells.push_back(std::stod(cell));
    REQUIRE(cells.size() == 7);
    CHECK(cells[5] == doctest::Approx(1 / std::sqrt(4 * kPi * 2.0)).epsilon(1e-14));
    CHECK(cells[6] < cells[5]);
    CHECK(fs::exists(s / "shots_nbar2.csv"));
}

TEST_CASE("binary: error exits") {
    auto e = scratch("errors");
    CHECK(run("params --set params.bogus=1 --out " + e.string(), e / "config.txt") == 2);
    CHECK(run("nonsense --out " + e.string(), e / "command.txt") == 2);
    CHECK(run("--threads 2", e / "missing.txt") == 2);
    CHECK(run("release --set release.steps=1 --set release.kappa_t=1 --set release.target_dim=60 --out " + e.string(),
              e / "regime.txt") == 3);
    CHECK(run("fig-wigner --set target_dim=10 --out " + e.string(), e / "trunc.txt") == 3);

    Json err = Json::parse(slurp(e / "regime.txt"));
    CHECK(err["exit_code"] == 3);
    CHECK(err["command"] == "release");
    CHECK(err["error"].get<std::string>().find("kappa dt") != std::string::npos);
    CHECK(Json::parse(slurp(e / "config.txt"))["exit_code"] == 2);
    CHECK_FALSE(fs::exists(e / "manifest.json"));
}
