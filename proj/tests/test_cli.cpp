#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct CliResult {
    int status = -1;
    std::string output;  // stdout + stderr
};

CliResult run_cli(const std::string& args) {
    const auto out_path = std::filesystem::temp_directory_path() / "tsks_cli_out.txt";
    const std::string cmd =
        std::string(TSKS_CLI_PATH) + " " + args + " > " + out_path.string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    CliResult r;
    r.status = rc == -1 ? -1 : WEXITSTATUS(rc);
    std::ifstream in(out_path);
    std::ostringstream os;
    os << in.rdbuf();
    r.output = os.str();
    return r;
}

} // namespace

TEST_CASE("--help prints usage and exits zero") {
    const auto r = run_cli("--help");
    CHECK(r.status == 0);
    CHECK(r.output.find("simulate") != std::string::npos);
    CHECK(r.output.find("bounds") != std::string::npos);
}

TEST_CASE("simulate --help prints usage and exits zero") {
    const auto r = run_cli("simulate --help");
    CHECK(r.status == 0);
    CHECK(r.output.find("--horizon") != std::string::npos);
}

TEST_CASE("unknown subcommand fails with usage text") {
    const auto r = run_cli("frobnicate");
    CHECK(r.status != 0);
}

TEST_CASE("unknown flag fails nonzero") {
    const auto r = run_cli("simulate --no-such-flag 3");
    CHECK(r.status != 0);
}

TEST_CASE("bounds reproduces the chained worked example") {
    const auto r = run_cli("bounds");  // defaults are the worked-example inputs
    CHECK(r.status == 0);
    CHECK(r.output.find("test_window=34") != std::string::npos);
    CHECK(r.output.find("estimate_window=185") != std::string::npos);
    CHECK(r.output.find("warmup_plays=5634") != std::string::npos);
    CHECK(r.output.find("t_ref=0.2329") != std::string::npos);
    CHECK(r.output.find("max_change_rate=1.858") != std::string::npos);
    CHECK(r.output.find("regret_bound") != std::string::npos);
}

TEST_CASE("simulate runs a small experiment and reports per-policy regret") {
    const auto r = run_cli("simulate --horizon 300 --replications 2 --seed 3 --policies TS,TS-KS");
    CHECK(r.status == 0);
    CHECK(r.output.find("TS-KS") != std::string::npos);
    CHECK(r.output.find("regret@300") != std::string::npos);
}

TEST_CASE("config file drives the run and flags win over it") {
    const auto cfg = std::filesystem::temp_directory_path() / "tsks_cli_cfg.cfg";
    {
        std::ofstream out(cfg);
        out << "[experiment]\nhorizon = 100\nreplications = 1\npolicies = TS\n";
    }
    auto r = run_cli("simulate -c " + cfg.string());
    CHECK(r.status == 0);
    CHECK(r.output.find("regret@100") != std::string::npos);
    r = run_cli("simulate -c " + cfg.string() + " --horizon 150");
    CHECK(r.status == 0);
    CHECK(r.output.find("regret@150") != std::string::npos);
    std::filesystem::remove(cfg);
}

TEST_CASE("simulate -o writes the result files") {
    const auto dir = std::filesystem::temp_directory_path() / "tsks_cli_outdir";
    std::filesystem::remove_all(dir);
    const auto r = run_cli("simulate --horizon 50 --replications 1 --policies TS -o " +
                           dir.string());
    CHECK(r.status == 0);
    CHECK(std::filesystem::exists(dir / "steps.csv"));
    CHECK(std::filesystem::exists(dir / "summary.csv"));
    CHECK(std::filesystem::exists(dir / "manifest.txt"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("delay subcommand reports both detectors") {
    const auto r = run_cli("delay --shift 1.5 --sigma 0.1 --replications 20");
    CHECK(r.status == 0);
    CHECK(r.output.find("ks_mean_delay=") != std::string::npos);
    CHECK(r.output.find("mean_shift_mean_delay=") != std::string::npos);
    CHECK(r.output.find("delay_difference") != std::string::npos);
}

TEST_CASE("edge subcommand runs") {
    const auto r = run_cli("edge --horizon 200 --replications 1 --policies TS,TS-KS");
    CHECK(r.status == 0);
    CHECK(r.output.find("TS-KS") != std::string::npos);
}

TEST_CASE("portfolio with a missing prices file is a clean diagnostic") {
    const auto r = run_cli("portfolio --prices definitely_missing.csv");
    CHECK(r.status != 0);
    CHECK(r.output.find("error:") != std::string::npos);
    CHECK(r.output.find("cannot open") != std::string::npos);
}

TEST_CASE("portfolio runs on the built-in synthetic price set") {
    const auto r = run_cli("portfolio --replications 1 --policies TS --window 14");
    CHECK(r.status == 0);
    CHECK(r.output.find("TS") != std::string::npos);
}
