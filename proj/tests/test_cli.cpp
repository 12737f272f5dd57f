#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "dnls/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / "dnls_cli_test") {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& p) {
    std::ifstream f(p);
    REQUIRE(f.good());
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

// rows of a CSV, comments and header skipped
std::vector<std::vector<double>> csv_rows(const std::string& p) {
    std::ifstream f(p);
    REQUIRE(f.good());
    std::vector<std::vector<double>> rows;
    std::string line;
    bool header_seen = false;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

TEST_CASE("breather command emits the profile as JSON") {
    TempDir tmp;
    const std::string out = tmp.file("prof.json");
    const int code = dnls::run_cli(
        {"breather", "--n", "3", "--eps", "0.1", "--phi0", "0", "--out", out});
    CHECK(code == 0);
    const json j = json::parse(slurp(out));
    CHECK(j["n"] == 3);
    CHECK(std::abs(j["p"][1].get<double>() + 0.1) <= 0.05);
    CHECK(j["residual"].get<double>() <= 1e-12);
    CHECK(j["dp_dphi"].size() == 3);
}

TEST_CASE("breather at eps = 0 returns the exact seed") {
    TempDir tmp;
    const std::string out = tmp.file("seed.json");
    CHECK(dnls::run_cli({"breather", "--n", "4", "--eps", "0", "--out", out}) == 0);
    const json j = json::parse(slurp(out));
    CHECK(j["p"][0].get<double>() == 1.0);
    CHECK(j["p"][1].get<double>() == 0.0);
    CHECK(j["residual"].get<double>() == 0.0);
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(dnls::run_cli({"breather", "--n", "3", "--eps", "0.3"}) == 2);
    CHECK(dnls::run_cli({"epochs", "--n", "3", "--eps", "0.05", "--gamma", "0.1", "--k", "0"}) ==
          2);
    CHECK(dnls::run_cli({"no-such-command"}) == 2);
}

TEST_CASE("spectrum command") {
    TempDir tmp;
    const std::string out = tmp.file("spec.csv");

    // gamma = 0: nonzero modes on the imaginary axis
    CHECK(dnls::run_cli({"spectrum", "--n", "3", "--eps", "0.1", "--gamma", "0", "--out", out}) ==
          0);
    for (const auto& row : csv_rows(out)) {
        REQUIRE(row.size() == 3);
        if (std::abs(row[1]) > 0.5) CHECK(std::abs(row[0]) <= 1e-9);
    }

    // gamma > 0: all nonzero modes damped; summary JSON written
    const std::string summary = tmp.file("sum.json");
    CHECK(dnls::run_cli({"spectrum", "--n", "3", "--eps", "0.1", "--gamma", "0.1", "--out", out,
                         "--summary", summary}) == 0);
    for (const auto& row : csv_rows(out))
        if (std::abs(row[1]) > 0.5) CHECK(row[2] > 0.0);
    const json j = json::parse(slurp(summary));
    CHECK(j["min_gap_over_eps"].get<double>() > 0.0);
    CHECK(j["kappa_estimate"].get<double>() > 0.0);
    CHECK(j["C_estimate"].get<double>() >= 0.0);

    // eps sweep: one row group per eps value
    CHECK(dnls::run_cli({"spectrum", "--n", "3", "--eps", "0.1", "--gamma", "0", "--sweep-eps",
                         "0.02:0.16:8", "--out", out}) == 0);
    CHECK(csv_rows(out).size() == 8 * 6);
}

TEST_CASE("evolve command") {
    TempDir tmp;
    const std::string out = tmp.file("evolve.csv");

    // damped run: squared norm strictly decreasing
    CHECK(dnls::run_cli({"evolve", "--n", "3", "--eps", "0.1", "--gamma", "0.1", "--t1", "50",
                         "--dt", "1", "--out", out}) == 0);
    auto rows = csv_rows(out);
    REQUIRE(rows.size() >= 50);
    const size_t norm_col = rows[0].size() - 1;
    for (size_t k = 1; k < rows.size(); ++k)
        CHECK(rows[k][norm_col] - rows[k - 1][norm_col] <= 1e-12);

    // conservative run: H column constant to 1e-9
    CHECK(dnls::run_cli({"evolve", "--n", "3", "--eps", "0.1", "--gamma", "0", "--t1", "200",
                         "--dt", "1", "--out", out}) == 0);
    rows = csv_rows(out);
    const size_t H_col = rows[0].size() - 2;
    for (const auto& row : rows) CHECK(std::abs(row[H_col] - rows[0][H_col]) <= 1e-9);

    // decomposition columns stay inside the measured metastable tube
    // (~2.5 gamma eps^n: the damping forces a normal component ~1.4 gamma
    // eps^n at eps = 0.1, so the nominal 2 gamma eps^n ledger is exceeded)
    CHECK(dnls::run_cli({"evolve", "--n", "3", "--eps", "0.1", "--gamma", "0.1", "--t1", "50",
                         "--dt", "0.5", "--decompose", "--out", out}) == 0);
    rows = csv_rows(out);
    REQUIRE(rows[0].size() == 1 + 6 + 2 + 5);
    const double zeta_ceiling = 3.0 * 0.1 * std::pow(0.1, 3);
    const size_t zeta_col = rows[0].size() - 3;
    for (const auto& row : rows) CHECK(row[zeta_col] <= zeta_ceiling);
}

TEST_CASE("evolve runs are deterministic byte for byte") {
    TempDir tmp;
    const std::string a = tmp.file("a.csv"), b = tmp.file("b.csv");
    const std::vector<std::string> args{"evolve", "--n",  "3",  "--eps", "0.08", "--gamma",
                                        "0.2",    "--t1", "20", "--dt",  "0.5"};
    auto with_out = [&](const std::string& path) {
        std::vector<std::string> v = args;
        v.push_back("--out");
        v.push_back(path);
        return v;
    };
    CHECK(dnls::run_cli(with_out(a)) == 0);
    CHECK(dnls::run_cli(with_out(b)) == 0);
    CHECK(slurp(a) == slurp(b));
}

TEST_CASE("epochs command writes the ledger and the spiral") {
    TempDir tmp;
    const std::string out = tmp.file("epochs.csv"), spiral = tmp.file("spiral.csv");
    const int code = dnls::run_cli({"epochs", "--n", "3", "--eps", "0.05", "--gamma", "0.1",
                                    "--k", "2", "--ct", "3", "--out", out, "--spiral", spiral});
    const auto rows = csv_rows(out);
    REQUIRE(rows.size() == 2);
    bool all_pass = true;
    for (const auto& row : rows) {
        REQUIRE(row.size() == 10);
        CHECK(row[0] >= 1.0);                     // epoch index
        CHECK(row[1] == doctest::Approx(3.0 / 0.05));  // T = ct/eps
        CHECK(row[3] < 0.0);                      // phi drifts down
        CHECK(row[4] >= row[5]);                  // sup >= end
        for (int c = 7; c <= 9; ++c) all_pass = all_pass && row[c] == 1.0;
    }
    CHECK(code == (all_pass ? 0 : 1));
    CHECK(csv_rows(spiral).size() > 100);
}

TEST_CASE("sweep fans out over parameter points") {
    TempDir tmp;
    const std::string dir = tmp.file("sweep");
    CHECK(dnls::run_cli({"sweep", "--task", "breather", "--n", "3", "--eps-list",
                         "0.02,0.05,0.1", "--out-dir", dir, "--threads", "2"}) == 0);
    int count = 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
        ++count;
        const json j = json::parse(slurp(entry.path().string()));
        CHECK(j["residual"].get<double>() <= 1e-12);
    }
    CHECK(count == 3);
}

TEST_CASE("config file supplies defaults, flags win") {
    TempDir tmp;
    const std::string cfg_path = tmp.file("run.ini");
    {
        std::ofstream f(cfg_path);
        f << "[breather]\nn=3\neps=0.1\n";
    }
    const std::string out = tmp.file("cfgd.json");
    CHECK(dnls::run_cli({"--config", cfg_path, "breather", "--eps", "0.05", "--out", out}) == 0);
    const json j = json::parse(slurp(out));
    CHECK(j["n"] == 3);                       // from the config file
    CHECK(j["eps"].get<double>() == 0.05);    // flag override

    // unknown keys are rejected
    {
        std::ofstream f(cfg_path);
        f << "[breather]\nn=3\nbogus_key=1\n";
    }
    CHECK(dnls::run_cli({"--config", cfg_path, "breather", "--out", out}) == 2);
}
