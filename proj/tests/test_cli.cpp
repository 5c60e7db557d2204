#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "platoon/io.hpp"

namespace fs = std::filesystem;
using platoon::Json;

namespace {

const std::string kBin = PLATOON_DSS_BIN;
const std::string kData = PLATOON_DSS_DATA;

int run(const std::string& args) {
    const std::string cmd = kBin + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("platoon_cli_" + name);
    fs::remove_all(dir);
    return dir;
}

std::vector<std::string> read_lines(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

}  // namespace

TEST_CASE("verify exit code follows the certificate") {
    const auto dir = scratch("verify");
    const int code = run("verify --gains " + kData + "/published_gains.json --out " + dir.string());
    REQUIRE(fs::exists(dir / "certificate.json"));
    const Json cert = platoon::read_json_file(dir / "certificate.json");
    CHECK(code == (cert["valid"].get<bool>() ? 0 : 2));
    for (const char* key : {"c_sq", "b", "c_bar_sq", "K_cond"}) CHECK(cert.contains(key));
}

TEST_CASE("verify rejects zero gains") {
    CHECK(run("verify --gains " + kData + "/zero_gains.json") == 2);
}

TEST_CASE("configuration errors exit with 1") {
    CHECK(run("verify --scenario " + kData + "/malformed.json") == 1);
    CHECK(run("verify --scenario /nonexistent.json") == 1);
    CHECK(run("simulate --controller c9") == 1);
    CHECK(run("simulate --n ten") == 1);
    CHECK(run("bogus") == 1);
    CHECK(run("") == 1);
}

TEST_CASE("simulate writes the CSV set and a manifest") {
    const auto dir = scratch("simulate");
    CHECK(run("simulate --scenario " + kData + "/scenario.json --out " + dir.string()) == 0);
    const std::vector<std::pair<std::string, std::string>> expected{
        {"norms.csv", "t,sup_err_l2_physical,sup_err_inf_physical,sup_err_l2_shifted,bound_eq13,bound_eq14,bound_eq12"},
        {"displacements.csv", "t,e_2"},
        {"states.csv", "t,v_2,f_2"},
        {"bounds.csv", "t,bound_eq12,bound_eq13,bound_eq14"},
        {"control.csv", "t,zeta_2,u_2"},
    };
    for (const auto& [name, header] : expected) {
        const auto lines = read_lines(dir / name);
        REQUIRE(lines.size() > 2);
        CHECK(lines[0].rfind("# units:", 0) == 0);
        CHECK(lines[1] == header);
    }
    CHECK(read_lines(dir / "norms.csv").size() == 10001 + 2);

    const Json m = platoon::read_json_file(dir / "manifest.json");
    CHECK(m["seed"] == 42);
    CHECK(m["dt_s"] == 0.01);
    CHECK(m.contains("gains"));
    CHECK(m.contains("certificate"));
    CHECK(m["diverged"] == false);
}

TEST_CASE("overrides are applied") {
    const auto dir = scratch("override");
    CHECK(run("simulate --n 3 --seed 7 --horizon 2 --dt 0.02 --controller c2 --out " + dir.string()) == 0);
    const Json m = platoon::read_json_file(dir / "manifest.json");
    CHECK(m["seed"] == 7);
    CHECK(m["scenario"]["n"] == 3);
    CHECK(m["controller"] == "c2");
    CHECK(m["gains"]["k"] == 0.0);
    CHECK(read_lines(dir / "norms.csv").size() == 101 + 2);
}

TEST_CASE("sweep-n writes one summary row per N") {
    const auto dir = scratch("sweep_n");
    CHECK(run("sweep-n --ns 10 50 --horizon 20 --out " + dir.string()) == 0);
    const auto lines = read_lines(dir / "summary.csv");
    REQUIRE(lines.size() == 4);
    CHECK(lines[2].rfind("10,", 0) == 0);
    CHECK(lines[3].rfind("50,", 0) == 0);
}

TEST_CASE("sweep-tau flags the slow actuator rule") {
    const auto dir = scratch("sweep_tau");
    const int code = run("sweep-tau --tau-rule scaled:1.5 --out " + dir.string());
    CHECK((code == 0 || code == 3));
    const Json m = platoon::read_json_file(dir / "manifest.json");
    CHECK((m["diverged"] == true || m["condition_failed"] == true));
    CHECK(code == (m["diverged"] == true ? 3 : 0));
    CHECK(read_lines(dir / "summary.csv").size() == 3);
}
