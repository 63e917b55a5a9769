#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace gyro {

inline constexpr int kConfigSchema = 1;

enum class OutputFormat { Csv, Json };

struct ProfileConfig {
    std::string preset = "conventional";
    /// (alpha, beta) expression sources; overrides `preset` when present.
    std::optional<std::pair<std::string, std::string>> expression;
};

struct ScenarioConfig {
    std::string scenario;
    double omega = 0.6;
    double d_norm = 1.0;
    ProfileConfig profile;
    double h = 1.0;
    double const_alpha = 1.25;
    /// Twist axis times magnitude, in the rest triad of r'(0).
    std::array<double, 3> gamma_twist{0.0, 0.0, 0.0};
    double step = 1e-3;
    bool reproject = false;
    int samples = 64;
    double tol_meaningful = 1e-8;
    double tol_ode = 1e-6;
    OutputFormat format = OutputFormat::Csv;
    std::string path;
};

/// Throws ConfigInvalid naming the offending field.
ScenarioConfig parse_config(const nlohmann::json& doc);
ScenarioConfig parse_config_text(const std::string& text);
ScenarioConfig load_config(const std::string& file);

/// Full config with defaults filled in.
nlohmann::ordered_json config_to_json(const ScenarioConfig& cfg);

struct ScenarioInfo {
    std::string name;
    std::string fields;
    std::string reproduces;
};

/// The built-in scenarios (custom excluded).
const std::vector<ScenarioInfo>& builtin_scenarios();
std::string list_scenarios();

/// Columns of every trace table, in order.
const std::vector<std::string>& trace_columns();

struct TraceRow {
    double s = 0.0;
    double t_u = 0.0;
    double zx = 0.0;
    double zy = 0.0;
    double zz = 0.0;
    double residual = 0.0;
    double angle_accum = 0.0;
    long winding = 0;
};

struct ScenarioReport {
    std::string scenario;
    nlohmann::ordered_json config;
    nlohmann::ordered_json summary;
    std::string trace_kind;
    std::vector<TraceRow> trace;
};

/// Runs the scenario; numerical failures propagate as NumericalError with the
/// scenario name prepended. Deterministic for a fixed config.
ScenarioReport run_scenario(const ScenarioConfig& cfg);

/// |accum| mod 2π in [0, 2π) and floor(|accum|/2π).
double reduced_angle(double accum);
long winding_number(double accum);

/// Locale-independent general form at 17 significant digits.
std::string format_number(double v);

std::string to_csv(const ScenarioReport& report);
/// Floats at 17 significant digits; throws NumericalError on non-finite values.
std::string to_json(const ScenarioReport& report);
std::string summary_text(const ScenarioReport& report);

/// Writes `contents` to a sibling temporary file, then renames it over `path`.
void write_atomic(const std::string& path, const std::string& contents);

/// Writes the report to cfg.path in cfg.format.
void write_report(const ScenarioReport& report, const ScenarioConfig& cfg);

struct SweepSpec {
    std::string param;
    std::vector<double> values;
};

/// Parses `name=a:b:step`. Throws ConfigInvalid("--param", ...).
SweepSpec parse_sweep(const std::string& spec);

/// A copy of cfg with the parameter set and the output path suffixed by
/// `.<param>=<value>` before the extension.
ScenarioConfig sweep_point(const ScenarioConfig& cfg, const std::string& param, double value);

}  // namespace gyro
