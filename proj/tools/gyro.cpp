// gyro: scenario runner.
//
//   gyro run <config>
//   gyro list
//   gyro sweep <config> --param omega=0.1:0.9:0.1
//
// Exit status: 0 success, 2 invalid configuration, 3 numerical failure,
// 1 anything else (I/O).

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "gyro/errors.hpp"
#include "gyro/scenario.hpp"

namespace {

int run_one(const gyro::ScenarioConfig& cfg)
{
    const gyro::ScenarioReport report = gyro::run_scenario(cfg);
    gyro::write_report(report, cfg);
    std::cout << gyro::summary_text(report) << "wrote " << cfg.path << "\n";
    return 0;
}

template <class F>
int guarded(F&& body)
{
    try {
        return body();
    } catch (const gyro::ConfigInvalid& e) {
        std::cerr << "gyro: invalid config: " << e.what() << "\n";
        return 2;
    } catch (const gyro::NumericalError& e) {
        std::cerr << "gyro: numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "gyro: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Relativistic gyroscope scenarios: Thomas rotation and Foucault precession"};
    app.require_subcommand(1);

    std::string config;
    std::string param;

    CLI::App* run = app.add_subcommand("run", "Run the scenario described by a config file");
    run->add_option("config", config, "JSON config (schema 1)")->required();

    app.add_subcommand("list", "List the built-in scenarios");

    CLI::App* sweep = app.add_subcommand("sweep", "Run a config over a parameter grid");
    sweep->add_option("config", config, "JSON config (schema 1)")->required();
    sweep->add_option("--param", param, "name=start:stop:step")->required();

    CLI11_PARSE(app, argc, argv);

    if (app.got_subcommand("list")) {
        std::cout << gyro::list_scenarios();
        return 0;
    }
    if (app.got_subcommand("run")) {
        return guarded([&] { return run_one(gyro::load_config(config)); });
    }
    return guarded([&] {
        const gyro::ScenarioConfig base = gyro::load_config(config);
        const gyro::SweepSpec spec = gyro::parse_sweep(param);
        for (const double v : spec.values) {
            const gyro::ScenarioConfig cfg = gyro::sweep_point(base, spec.param, v);
            run_one(cfg);
        }
        return 0;
    });
}
