#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "vmma/grid_io.hpp"
#include "vmma/report.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(VMMA_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("vmma_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("simulate then estimate") {
    const auto dir = scratch("sim");
    REQUIRE(run("simulate --n 61 --seed 3 --replicates 2 --with-gma --out-dir " + dir.string()) == 0);
    for (const char* f : {"y_3.csv", "y_4.csv", "sigma2_3.csv", "gma_4.csv"}) CHECK(fs::exists(dir / f));
    const auto y = vmma::read_field_csv((dir / "y_3.csv").string());
    CHECK(y.rows() == 61);
    CHECK(y.spacing() == 0.05);
    const auto report = dir / "r.json";
    REQUIRE(run("estimate --input " + (dir / "y_3.csv").string() + " --q-max 41 --report " + report.string()) == 0);
    const auto r = vmma::report_from_json(vmma::read_json(report.string()));
    CHECK(r.ok());
    CHECK(r.eta_hat.has_value());
}

TEST_CASE("config file values apply unless a flag overrides them") {
    const auto dir = scratch("cfg");
    {
        std::ofstream cfg(dir / "run.cfg");
        cfg << "[model]\nn = 31\nkernel = { kind = \"gaussian\", rate = 4.0, p = 10 }\n[simulate]\nseed = 8\n"
               "[estimate]\nfit = lsq:5\n";
    }
    REQUIRE(run("--config " + (dir / "run.cfg").string() + " simulate --seed 2 --out-dir " + dir.string()) == 0);
    CHECK(fs::exists(dir / "y_2.csv"));
    CHECK_FALSE(fs::exists(dir / "y_8.csv"));
    CHECK(vmma::read_field_csv((dir / "sigma2_2.csv").string()).rows() == 51);
    {
        std::ofstream cfg(dir / "bad.cfg");
        cfg << "[simulate]\nwobble = 3\n";
    }
    CHECK(run("--config " + (dir / "bad.cfg").string() + " simulate --out-dir " + dir.string()) == 1);
}

TEST_CASE("mse-bound writes one row per spacing") {
    const auto dir = scratch("mse");
    const auto out = dir / "b.csv";
    REQUIRE(run("mse-bound --lambda 4 --eta 4 --a 1 --delta-schedule 0.1,0.05,0.025 --k 0.075 --out " + out.string()) == 0);
    std::istringstream in(slurp(out));
    std::string line;
    std::getline(in, line);
    CHECK(line == "delta,p,ptilde,t2,t4,t5,bound");
    double prev = 1e300;
    int rows = 0;
    while (std::getline(in, line)) {
        const double bound = std::stod(line.substr(line.rfind(',') + 1));
        CHECK(bound < prev);
        prev = bound;
        ++rows;
    }
    CHECK(rows == 3);
}

TEST_CASE("exit codes") {
    const auto dir = scratch("codes");
    CHECK(run("") == 1);
    CHECK(run("simulate --bogus 1") == 1);
    CHECK(run("simulate --lambda -1 --out-dir " + dir.string()) == 1);
    CHECK(run("estimate --input /nonexistent/y.csv") == 2);
    {
        std::ofstream f(dir / "flat.csv");
        for (int i = 0; i < 30; ++i) {
            for (int j = 0; j < 30; ++j) f << (j ? "," : "") << 1.0;
            f << '\n';
        }
    }
    CHECK(run("estimate --input " + (dir / "flat.csv").string() + " --report " + (dir / "r.json").string()) == 3);
    CHECK(run("mse-bound --delta-schedule 0.05,0.1,0.2") == 1);
    CHECK(run("--help") == 0);
}
