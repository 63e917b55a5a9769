#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "doctest.h"
#include "gyro/errors.hpp"
#include "gyro/scenario.hpp"

using namespace gyro;
namespace fs = std::filesystem;

namespace {

std::string config_invalid_field(const std::string& text)
{
    try {
        parse_config_text(text);
    } catch (const ConfigInvalid& e) {
        return e.field();
    }
    return "<accepted>";
}

fs::path scratch_dir()
{
    static const fs::path dir = [] {
        fs::path p = fs::temp_directory_path() / ("gyro_test_" + std::to_string(::getpid()));
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CliResult {
    int status = -1;
    std::string out;
};

CliResult run_cli(const std::string& args)
{
    const char* exe = std::getenv("GYRO_CLI");
    REQUIRE_MESSAGE(exe != nullptr, "GYRO_CLI is not set");
    const std::string cmd = "cd '" + scratch_dir().string() + "' && '" + exe + "' " + args + " 2>&1";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult res;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) {
        res.out.append(buf, n);
    }
    const int raw = ::pclose(pipe);
    res.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return res;
}

void write_config(const std::string& name, const std::string& text)
{
    std::ofstream(scratch_dir() / name) << text;
}

}  // namespace

TEST_CASE("config errors name the offending field")
{
    CHECK(config_invalid_field("{") == "config");
    CHECK(config_invalid_field("[]") == "config");
    CHECK(config_invalid_field(R"({"scenario":"thomas-circle"})") == "schema");
    CHECK(config_invalid_field(R"({"schema":2,"scenario":"thomas-circle"})") == "schema");
    CHECK(config_invalid_field(R"({"schema":1})") == "scenario");
    CHECK(config_invalid_field(R"({"schema":1,"scenario":"frisbee"})") == "scenario");
    CHECK(config_invalid_field(R"({"schema":1,"scenario":"custom","colour":1})") == "colour");
    CHECK(config_invalid_field(R"({"schema":1,"scenario":"custom","omega":-1})") == "omega");
    CHECK(config_invalid_field(R"({"schema":1,"scenario":"custom","omega":"fast"})") == "omega");
    CHECK(config_invalid_field(R"({"schema":1,"scenario":"custom","d_norm":2})") == "d_norm");
    CHECK(config_invalid_field(R"({"schema":1,"scenario":"custom","profile":"nope"})") == "profile");
    CHECK(config_invalid_field(R"({"schema":1,"scenario":"custom","profile":{"alpha":"1 +","beta":"1"}})") ==
          "profile.alpha");
    CHECK(config_invalid_field(R"({"schema":1,"scenario":"custom","profile":{"alpha":"2","beta":"1"}})") ==
          "profile");
    CHECK(config_invalid_field(R"({"schema":1,"scenario":"custom","profile":"const-alpha","d_norm":0})") ==
          "d_norm");
    CHECK(config_invalid_field(R"({"schema":1,"scenario":"custom","gamma_twist":[1,2]})") == "gamma_twist");
    CHECK(config_invalid_field(R"({"schema":1,"scenario":"custom","integrator":{"step":0}})") ==
          "integrator.step");
    CHECK(config_invalid_field(R"({"schema":1,"scenario":"custom","integrator":{"rk":4}})") == "integrator.rk");
    CHECK(config_invalid_field(R"({"schema":1,"scenario":"custom","samples":1})") == "samples");
    CHECK(config_invalid_field(R"({"schema":1,"scenario":"custom","tolerances":{"ode":0}})") == "tolerances.ode");
    CHECK(config_invalid_field(R"({"schema":1,"scenario":"custom","output":{"format":"xml"}})") ==
          "output.format");
    CHECK(config_invalid_field(R"({"schema":1,"scenario":"herrera-resolution","d_norm":0})") == "d_norm");
    CHECK(config_invalid_field(R"({"schema":1,"scenario":"custom"})") == "<accepted>");
}

TEST_CASE("config defaults round trip")
{
    const ScenarioConfig cfg = parse_config_text(R"({"schema":1,"scenario":"gamma-twist"})");
    CHECK(cfg.omega == 0.6);
    CHECK(cfg.path == "gamma-twist.csv");
    CHECK(cfg.format == OutputFormat::Csv);
    const ScenarioConfig back = parse_config(nlohmann::json::parse(config_to_json(cfg).dump()));
    CHECK(back.path == cfg.path);
    CHECK(back.samples == cfg.samples);
    CHECK(back.profile.preset == cfg.profile.preset);
}

TEST_CASE("thomas-circle summary")
{
    const ScenarioReport rep = run_scenario(parse_config_text(R"({"schema":1,"scenario":"thomas-circle"})"));
    const double oracle = 2.0 * std::numbers::pi * (1.25 - 1.0);
    CHECK(rep.summary["thomas_angle"].get<double>() == doctest::Approx(oracle).epsilon(1e-6));
    CHECK(rep.summary["precession_integral"].get<double>() == doctest::Approx(oracle).epsilon(1e-8));
    CHECK(rep.summary["trace"] == "fermi-walker");
    REQUIRE(rep.trace.size() == 64);
    CHECK(rep.trace.front().s == 0.0);
    // the transported vector turns backwards by the Thomas angle within one revolution
    CHECK(rep.trace.back().angle_accum == doctest::Approx(-oracle).epsilon(1e-6));
}

TEST_CASE("herrera flags depend only on the rim speed")
{
    const double rim = 0.6;
    for (double omega : {0.2, 0.3, 0.6, 0.75, 1.2}) {
        CAPTURE(omega);
        std::ostringstream text;
        text << R"({"schema":1,"scenario":"herrera-resolution","samples":8,"omega":)" << omega
             << R"(,"d_norm":)" << rim / omega << "}";
        const ScenarioReport rep = run_scenario(parse_config_text(text.str()));
        const auto& m = rep.summary["meaningful"];
        CHECK(m["conventional"] == true);
        CHECK(m["tt"] == false);
        CHECK(m["sqrt"] == false);
        CHECK(m["const-alpha"] == false);
        CHECK(rep.summary["residuals"]["conventional"].get<double>() < 1e-10);
        CHECK(rep.summary["spin_deviation"].get<double>() < 1e-10);
    }
}

TEST_CASE("expression profile in a custom run")
{
    const ScenarioReport expr = run_scenario(parse_config_text(
        R"j({"schema":1,"scenario":"custom","samples":8,"profile":{"alpha":"1/sqrt(1-k)","beta":"1/sqrt(1-k)"}})j"));
    const ScenarioReport preset =
        run_scenario(parse_config_text(R"({"schema":1,"scenario":"custom","samples":8,"profile":"conventional"})"));
    CHECK(expr.summary["meaningful"] == true);
    CHECK(expr.trace_kind == "foucault");
    CHECK(expr.summary["foucault_angle"].get<double>() ==
          doctest::Approx(preset.summary["foucault_angle"].get<double>()).epsilon(1e-12));

    const ScenarioReport tt =
        run_scenario(parse_config_text(R"({"schema":1,"scenario":"custom","samples":8,"profile":"tt"})"));
    CHECK(tt.summary["meaningful"] == false);
    CHECK(tt.trace_kind == "fermi-walker");
    CHECK(tt.trace.back().residual > 1e-3);
}

TEST_CASE("outputs are deterministic")
{
    const ScenarioConfig cfg = parse_config_text(R"({"schema":1,"scenario":"gamma-twist","samples":12,
        "gamma_twist":[0.3,0,0]})");
    const std::string a = to_csv(run_scenario(cfg));
    const std::string b = to_csv(run_scenario(cfg));
    CHECK(a == b);
    CHECK(a.substr(0, a.find('\n')) == "s,t_u,zx,zy,zz,residual,angle_accum,winding");

    ScenarioConfig file_cfg = cfg;
    file_cfg.path = (scratch_dir() / "nested" / "twist.csv").string();
    write_report(run_scenario(file_cfg), file_cfg);
    const std::string first = read_file(file_cfg.path);
    write_report(run_scenario(file_cfg), file_cfg);
    CHECK(read_file(file_cfg.path) == first);
    CHECK(first == a);

    const std::string js = to_json(run_scenario(cfg));
    const auto doc = nlohmann::json::parse(js);
    CHECK(doc["scenario"] == "gamma-twist");
    CHECK(doc["tables"]["trace"]["rows"].size() == 12);
    CHECK(doc["config"]["schema"] == 1);
}

TEST_CASE("angle bookkeeping and number format")
{
    CHECK(reduced_angle(-1.0) == doctest::Approx(1.0));
    CHECK(reduced_angle(7.0) == doctest::Approx(7.0 - 2 * std::numbers::pi));
    CHECK(winding_number(-7.0) == 1);
    CHECK(winding_number(0.5) == 0);
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(-2.0) == "-2");
    CHECK(std::stod(format_number(std::numbers::pi)) == std::numbers::pi);
}

TEST_CASE("sweep specifications")
{
    const SweepSpec s = parse_sweep("omega=0.1:0.5:0.1");
    REQUIRE(s.values.size() == 5);
    CHECK(s.values[2] == 0.3);
    CHECK(s.values.back() == 0.5);
    for (const std::string bad : {"omega", "=1:2:1", "colour=1:2:1", "omega=1:2", "omega=2:1:0.1", "omega=0:1:0",
                                  "omega=a:1:0.1"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(parse_sweep(bad), ConfigInvalid);
    }
    ScenarioConfig cfg = parse_config_text(R"({"schema":1,"scenario":"custom","output":{"path":"out/run.csv"}})");
    const ScenarioConfig p = sweep_point(cfg, "integrator.step", 0.002);
    CHECK(p.step == 0.002);
    CHECK(p.path == "out/run.integrator.step=0.002.csv");
}

TEST_CASE("command line")
{
    const CliResult list = run_cli("list");
    CHECK(list.status == 0);
    for (const char* name : {"thomas-circle", "herrera-resolution", "noang-counterexample", "gamma-twist", "custom"}) {
        CHECK(list.out.find(name) != std::string::npos);
    }

    write_config("ok.json", R"({"schema":1,"scenario":"thomas-circle","samples":8,"output":{"path":"out/ok.csv"}})");
    const CliResult ok = run_cli("run ok.json");
    CHECK(ok.status == 0);
    CHECK(ok.out.find("wrote out/ok.csv") != std::string::npos);
    CHECK(fs::exists(scratch_dir() / "out" / "ok.csv"));

    write_config("bad.json", R"({"schema":1,"scenario":"thomas-circle","omega":0})");
    const CliResult bad = run_cli("run bad.json");
    CHECK(bad.status == 2);
    CHECK(bad.out.find("omega") != std::string::npos);
    CHECK(run_cli("run missing.json").status == 2);

    write_config("coarse.json",
                 R"({"schema":1,"scenario":"thomas-circle","integrator":{"step":0.5},"output":{"path":"out/c.csv"}})");
    CHECK(run_cli("run coarse.json").status == 3);

    const CliResult sweep = run_cli("sweep ok.json --param omega=0.2:0.4:0.1");
    CHECK(sweep.status == 0);
    for (const char* v : {"0.2", "0.3", "0.4"}) {
        CHECK(fs::exists(scratch_dir() / "out" / ("ok.omega=" + std::string(v) + ".csv")));
    }
    CHECK(run_cli("sweep ok.json --param colour=1:2:1").status == 2);
    CHECK(run_cli("frobnicate").status != 0);
}
