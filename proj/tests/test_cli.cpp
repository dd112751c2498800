#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

// Exercises the installed command surface through real process invocations:
// exit codes, artifacts on disk, and byte determinism.

namespace {

namespace fs = std::filesystem;

struct CommandResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path unique_dir(const std::string& tag) {
    static int counter = 0;
    const fs::path dir =
        fs::temp_directory_path() / ("unitrig_cli_" + tag + "_" + std::to_string(counter++));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

CommandResult run_cli(const std::string& args, const fs::path& workdir) {
    const fs::path out_file = workdir / "stdout.txt";
    const fs::path err_file = workdir / "stderr.txt";
    const std::string command = std::string("cd ") + workdir.string() + " && " + UNITRIG_BIN +
                                " " + args + " > " + out_file.string() + " 2> " +
                                err_file.string();
    const int status = std::system(command.c_str());
    CommandResult result;
    result.exit_code = WEXITSTATUS(status);
    result.out = slurp(out_file);
    result.err = slurp(err_file);
    return result;
}

}  // namespace

TEST_CASE("dc --preset baseline prints the calibrated metrics") {
    const fs::path dir = unique_dir("dc");
    const CommandResult r = run_cli("dc --preset baseline -o .", dir);
    INFO(r.err);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("i_th_high=349.99 pA") != std::string::npos);
    CHECK(r.out.find("i_th_low=150.01 pA") != std::string::npos);
    CHECK(r.out.find("bistable=yes") != std::string::npos);
    CHECK(fs::exists(dir / "baseline_dc.csv"));
    CHECK(fs::exists(dir / "baseline_dc_metrics.json"));
    CHECK(!fs::exists(dir / "baseline_dc.csv.tmp"));
}

TEST_CASE("validate reports every diagnostic and exits 1") {
    const fs::path dir = unique_dir("validate");
    {
        std::ofstream bad(dir / "bad.scn");
        bad << "version 1\n";
        bad << "block source in constant level 0 pA\n";
        bad << "block schmitt st i_gain 486 pA i_thresh 368 pA i_width 400 pA\n";
        bad << "block probe out\n";
        bad << "net in -> st\n";
        bad << "net ghost -> out\n";
        bad << "analysis transient t_stop 1 ms dt 5 us\n";
    }
    const CommandResult r = run_cli("validate bad.scn", dir);
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("bistability") != std::string::npos);
    CHECK(r.err.find("ghost") != std::string::npos);

    const CommandResult json = run_cli("validate bad.scn --json-diag", dir);
    CHECK(json.exit_code == 1);
    const nlohmann::json parsed = nlohmann::json::parse(json.err);
    REQUIRE(parsed.is_array());
    CHECK(parsed.size() == 2);
    CHECK(parsed[0].contains("line"));
}

TEST_CASE("validate accepts a correct scenario") {
    const fs::path dir = unique_dir("validate_ok");
    {
        std::ofstream ok(dir / "ok.scn");
        ok << "version 1\n";
        ok << "block source in constant level 0 pA\n";
        ok << "block schmitt st i_gain 486 pA i_thresh 368 pA i_width 216 pA cal default\n";
        ok << "block probe out\n";
        ok << "net in -> st\n";
        ok << "net st -> out\n";
        ok << "analysis dc_sweep lo 0 pA hi 500 pA steps 50\n";
    }
    const CommandResult r = run_cli("validate ok.scn", dir);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("ok") != std::string::npos);
}

TEST_CASE("unknown figures and presets are usage errors") {
    const fs::path dir = unique_dir("usage");
    CHECK(run_cli("repro fig9", dir).exit_code == 2);
    CHECK(run_cli("dc --preset nosuch", dir).exit_code == 2);
    CHECK(run_cli("dc", dir).exit_code == 2);
    CHECK(run_cli("bogus", dir).exit_code == 2);
    // --seed belongs to mc and repro only.
    CHECK(run_cli("dc --preset baseline --seed 7", dir).exit_code == 2);
    // Subcommand and scenario analysis type must agree.
    CHECK(run_cli("dc --preset fig2a", dir).exit_code == 2);
}

TEST_CASE("repro fig3a grades the gain sweep against the reference") {
    const fs::path dir = unique_dir("fig3a");
    const CommandResult r = run_cli("repro fig3a -o .", dir);
    INFO(r.err);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("fig3a: pass") != std::string::npos);
    const nlohmann::json metrics = nlohmann::json::parse(slurp(dir / "fig3a_metrics.json"));
    CHECK(metrics.at("pass").get<bool>());
    CHECK(metrics.at("checks")[0].at("value").get<double>() == Catch::Approx(0.028).margin(0.003));
    CHECK(fs::exists(dir / "fig3a.csv"));
}

TEST_CASE("mc runs are byte-deterministic per seed") {
    const fs::path dir = unique_dir("mc");
    fs::create_directories(dir / "a");
    fs::create_directories(dir / "b");
    const CommandResult ra = run_cli("mc --preset fig2c --seed 7 --runs 50 -o a", dir);
    INFO(ra.err);
    CHECK(ra.exit_code == 0);
    const CommandResult rb = run_cli("mc --preset fig2c --seed 7 --runs 50 -o b", dir);
    CHECK(rb.exit_code == 0);
    CHECK(slurp(dir / "a" / "fig2c_mc.csv") == slurp(dir / "b" / "fig2c_mc.csv"));
    CHECK(slurp(dir / "a" / "fig2c_mc_metrics.json") == slurp(dir / "b" / "fig2c_mc_metrics.json"));
    CHECK(ra.out.substr(ra.out.find("monte_carlo:")) == rb.out.substr(rb.out.find("monte_carlo:")));

    const CommandResult rc = run_cli("mc --preset fig2c --seed 8 --runs 50 -o b", dir);
    CHECK(rc.exit_code == 0);
    CHECK(slurp(dir / "a" / "fig2c_mc.csv") != slurp(dir / "b" / "fig2c_mc.csv"));
}

TEST_CASE("gate subcommand reports a passing truth table") {
    const fs::path dir = unique_dir("gate");
    const CommandResult r = run_cli("gate --kind nor --preset fig5 -o .", dir);
    INFO(r.err);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("gate nor:") != std::string::npos);
    CHECK(r.out.find("segments pass") != std::string::npos);
    CHECK(r.out.find("MISMATCH") == std::string::npos);
    CHECK(fs::exists(dir / "fig5_gate_nor.csv"));
    CHECK(fs::exists(dir / "fig5_gate_nor.json"));
}

TEST_CASE("UNITRIG_OUT_DIR provides the default output directory") {
    const fs::path dir = unique_dir("envdir");
    fs::create_directories(dir / "envout");
    const fs::path out_file = dir / "stdout.txt";
    const std::string command = std::string("cd ") + dir.string() + " && UNITRIG_OUT_DIR=envout " +
                                UNITRIG_BIN + " dc --preset baseline > " + out_file.string() +
                                " 2>&1";
    const int status = std::system(command.c_str());
    CHECK(WEXITSTATUS(status) == 0);
    CHECK(fs::exists(dir / "envout" / "baseline_dc.csv"));
}

TEST_CASE("run dispatches on the scenario analysis type") {
    const fs::path dir = unique_dir("run");
    const CommandResult r = run_cli("run --preset fig2a -o .", dir);
    INFO(r.err);
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(dir / "fig2a_trace.csv"));
    const std::string csv = slurp(dir / "fig2a_trace.csv");
    CHECK(csv.rfind("time_s,vin,out\n", 0) == 0);
}
