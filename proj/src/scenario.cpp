#include "gyro/scenario.hpp"

#include <chrono>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numbers>
#include <set>
#include <sstream>

#include <unistd.h>

#include "gyro/errors.hpp"
#include "gyro/foucault.hpp"
#include "gyro/gyroscope.hpp"
#include "gyro/observers.hpp"
#include "gyro/profiles.hpp"

namespace gyro {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

const std::set<std::string> kScenarios = {"thomas-circle", "herrera-resolution", "noang-counterexample", "gamma-twist",
                                          "custom"};
const std::set<std::string> kPresetNames = {"conventional", "h-family", "tt", "sqrt", "const-alpha"};

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed, const std::string& prefix)
{
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) {
            throw ConfigInvalid(prefix + key, "unknown field");
        }
    }
}

const json* member(const json& obj, const char* key) { return obj.contains(key) ? &obj.at(key) : nullptr; }

double read_number(const json& obj, const char* key, const std::string& field, double fallback)
{
    const json* v = member(obj, key);
    if (!v) {
        return fallback;
    }
    if (!v->is_number()) {
        throw ConfigInvalid(field, "expected a number");
    }
    const double x = v->get<double>();
    if (!std::isfinite(x)) {
        throw ConfigInvalid(field, "must be finite");
    }
    return x;
}

const json& read_object(const json& obj, const char* key, const std::string& field)
{
    static const json empty = json::object();
    const json* v = member(obj, key);
    if (!v) {
        return empty;
    }
    if (!v->is_object()) {
        throw ConfigInvalid(field, "expected an object");
    }
    return *v;
}

std::string read_string(const json& obj, const char* key, const std::string& field, const std::string& fallback)
{
    const json* v = member(obj, key);
    if (!v) {
        return fallback;
    }
    if (!v->is_string()) {
        throw ConfigInvalid(field, "expected a string");
    }
    return v->get<std::string>();
}

std::shared_ptr<const Profile> build_profile(const ScenarioConfig& cfg)
{
    if (cfg.profile.expression) {
        return std::make_shared<ExpressionProfile>(cfg.profile.expression->first, cfg.profile.expression->second);
    }
    return make_profile(cfg.profile.preset, cfg.h, cfg.const_alpha);
}

double profile_h(const ScenarioConfig& cfg)
{
    if (cfg.profile.expression) {
        return 0.0;
    }
    if (cfg.profile.preset == "conventional") {
        return 1.0;
    }
    return cfg.profile.preset == "h-family" ? cfg.h : 0.0;
}

void validate(const ScenarioConfig& cfg)
{
    if (!(cfg.omega > 0.0)) {
        throw ConfigInvalid("omega", "must be positive");
    }
    if (!(cfg.d_norm >= 0.0)) {
        throw ConfigInvalid("d_norm", "must be non-negative");
    }
    if (!(cfg.h > 0.0)) {
        throw ConfigInvalid("h", "must be positive");
    }
    if (!(cfg.const_alpha > 1.0)) {
        throw ConfigInvalid("const_alpha", "must be greater than 1");
    }
    if (!(cfg.step > 0.0)) {
        throw ConfigInvalid("integrator.step", "must be positive");
    }
    if (cfg.samples < 2 || cfg.samples > 100000) {
        throw ConfigInvalid("samples", "must be an integer in [2, 100000]");
    }
    if (!(cfg.tol_meaningful > 0.0)) {
        throw ConfigInvalid("tolerances.meaningful", "must be positive");
    }
    if (!(cfg.tol_ode > 0.0)) {
        throw ConfigInvalid("tolerances.ode", "must be positive");
    }

    const double rim = cfg.omega * cfg.d_norm;
    const double h = profile_h(cfg);
    if (h > 0.0 && !(h * rim < 1.0)) {
        throw ConfigInvalid("d_norm", "h * omega * d_norm must be below 1 for the " + cfg.profile.preset + " profile");
    }
    if (!cfg.profile.expression && cfg.profile.preset == "const-alpha" && !(cfg.d_norm > 0.0)) {
        throw ConfigInvalid("d_norm", "the const-alpha profile is undefined on the axis (d_norm = 0)");
    }
    if (cfg.profile.expression) {
        const auto p = build_profile(cfg);
        if (!p->in_domain(rim * rim)) {
            throw ConfigInvalid("profile", "expressions are not finite and positive at k = (omega d_norm)^2");
        }
        if (std::abs(normalization_defect(*p, rim * rim)) > 1e-9) {
            throw ConfigInvalid("profile", "alpha^2 - beta^2 k != 1 at k = (omega d_norm)^2");
        }
    }
    if (cfg.scenario == "herrera-resolution") {
        if (!(rim < 1.0)) {
            throw ConfigInvalid("d_norm", "omega * d_norm must be below 1 (conventional observer)");
        }
        if (!(cfg.d_norm > 0.0)) {
            throw ConfigInvalid("d_norm", "must be positive (const-alpha observer)");
        }
    }
}

FourVector e_x() { return FourVector(0.0, 1.0, 0.0, 0.0); }

struct Setup {
    std::shared_ptr<const Profile> profile;
    std::shared_ptr<const RotatingObserver> observer;
    std::shared_ptr<const CircularWorldLine> orbit;
    std::vector<double> samples;
    std::array<FourVector, 3> triad;
};

Setup make_setup(const ScenarioConfig& cfg, std::shared_ptr<const Profile> profile)
{
    Setup s;
    s.profile = std::move(profile);
    s.observer = std::make_shared<RotatingObserver>(RotatingObserver::standard(cfg.omega, s.profile));
    s.orbit = std::make_shared<CircularWorldLine>(s.observer->integral_curve(cfg.d_norm * e_x()));
    s.samples = revolution_samples(*s.orbit, static_cast<std::size_t>(cfg.samples));
    s.triad = rest_triad(s.orbit->velocity(0.0));
    return s;
}

double wrap_pi(double a)
{
    a = std::remainder(a, kTwoPi);
    return a <= -std::numbers::pi ? a + kTwoPi : a;
}

/// Fills zx, zy, zz and the unwrapped angle about the third triad axis.
void fill_angles(std::vector<TraceRow>& rows)
{
    double accum = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double theta = std::atan2(rows[i].zy, rows[i].zx);
        if (i > 0) {
            accum += wrap_pi(theta - prev);
        }
        prev = theta;
        rows[i].angle_accum = accum;
        rows[i].winding = winding_number(accum);
    }
}

std::vector<TraceRow> foucault_trace(const FoucaultReport& report, const Setup& st)
{
    std::vector<TraceRow> rows;
    const AbsoluteVelocity u = st.observer->axis_velocity();
    for (std::size_t i = 0; i < report.samples.size(); ++i) {
        const FourVector z = report.evolve(i, st.triad[0]);
        TraceRow r;
        r.s = report.samples[i].s;
        r.t_u = u_time(u, *st.orbit, r.s);
        r.zx = lorentz_dot(z, st.triad[0]);
        r.zy = lorentz_dot(z, st.triad[1]);
        r.zz = lorentz_dot(z, st.triad[2]);
        r.residual = report.samples[i].residual;
        rows.push_back(r);
    }
    fill_angles(rows);
    return rows;
}

/// Fermi-Walker gyroscope seen from the axis frame u via the boost ṙ(s) → u.
/// The residual column holds the transport defect max(||z| - 1|, |ṙ.z|).
std::vector<TraceRow> fermi_walker_trace(const Setup& st, const ScenarioConfig& cfg,
                                         const std::vector<double>* foucault_residuals = nullptr)
{
    const AbsoluteVelocity u = st.observer->axis_velocity();
    const CircularWorldLine& w = *st.orbit;
    TransportOptions opt{cfg.step, cfg.reproject, cfg.tol_ode};

    std::vector<TraceRow> rows;
    FourVector z = st.triad[0];
    double s_prev = 0.0;
    for (std::size_t i = 0; i < st.samples.size(); ++i) {
        const double s = st.samples[i];
        if (s > s_prev) {
            z = fermi_walker_transport(w, z, s_prev, s, opt).z;
        }
        s_prev = s;
        const AbsoluteVelocity v = w.velocity(s);
        const FourVector zu = boost(v, u) * z;
        TraceRow r;
        r.s = s;
        r.t_u = u_time(u, w, s);
        r.zx = zu[1];
        r.zy = zu[2];
        r.zz = zu[3];
        r.residual = foucault_residuals ? (*foucault_residuals)[i]
                                        : std::max(std::abs(std::sqrt(lorentz_dot(z, z)) - 1.0),
                                                   std::abs(lorentz_dot(v.vector(), z)));
        rows.push_back(r);
    }
    fill_angles(rows);
    return rows;
}

ordered_json vec3(const FourVector& v, const std::array<FourVector, 3>& triad)
{
    return ordered_json::array({lorentz_dot(v, triad[0]), lorentz_dot(v, triad[1]), lorentz_dot(v, triad[2])});
}

void put_trace_summary(ordered_json& summary, const std::vector<TraceRow>& trace)
{
    const double accum = trace.empty() ? 0.0 : trace.back().angle_accum;
    summary["trace_angle_accum"] = accum;
    summary["trace_angle"] = reduced_angle(accum);
    summary["trace_winding"] = winding_number(accum);
}

void put_thomas(ordered_json& summary, const Setup& st, const ScenarioConfig& cfg)
{
    const CircularWorldLine& w = *st.orbit;
    const double T = w.period();
    const RotationSummary rot = thomas_rotation(w, 0.0, T, cfg.step, st.triad);
    summary["thomas_angle"] = rot.angle;
    summary["thomas_angle_closed"] = std::fmod(T * corotating_generator(w).rate(), kTwoPi);
    summary["thomas_axis"] = vec3(rot.axis, st.triad);
}

ScenarioReport run_thomas_circle(const ScenarioConfig& cfg)
{
    const Setup st = make_setup(cfg, build_profile(cfg));
    const CircularWorldLine& w = *st.orbit;
    const AbsoluteVelocity u = st.observer->axis_velocity();

    ScenarioReport rep;
    rep.trace_kind = "fermi-walker";
    ordered_json& sm = rep.summary;
    sm["profile"] = st.profile->name();
    sm["gamma"] = -lorentz_dot(u, w.velocity(0.0));
    sm["proper_period"] = w.period();
    const double u_period = u_time(u, w, w.period());
    sm["u_period"] = u_period;
    put_thomas(sm, st, cfg);
    sm["precession_rate"] = thomas_precession_omega(u, w, 0.0).omega_u.rate();
    sm["precession_integral"] = precession_angle_integral(u, w, 0.0, u_period, cfg.step);
    rep.trace = fermi_walker_trace(st, cfg);
    put_trace_summary(sm, rep.trace);
    return rep;
}

ScenarioReport run_herrera(const ScenarioConfig& cfg)
{
    ScenarioReport rep;
    rep.trace_kind = "foucault";
    ordered_json meaningful = ordered_json::object();
    ordered_json residuals = ordered_json::object();
    ordered_json criterion = ordered_json::object();
    std::optional<Setup> conventional;
    std::optional<FoucaultReport> conventional_report;

    for (const std::string name : {"conventional", "tt", "sqrt", "const-alpha"}) {
        const Setup st = make_setup(cfg, make_profile(name, 1.0, cfg.const_alpha));
        const FoucaultReport r =
            foucault_analyze(ClosedRotatingSource(st.observer, *st.orbit, cfg.step), st.samples, cfg.tol_meaningful);
        meaningful[name] = r.meaningful;
        residuals[name] = r.max_residual;
        const CriterionDefect d = profile_criterion(*st.profile, st.orbit->k0());
        criterion[name] = ordered_json::array({d.alpha, d.beta});
        if (name == "conventional") {
            conventional = st;
            conventional_report = r;
        }
    }
    ordered_json& sm = rep.summary;
    sm["meaningful"] = meaningful;
    sm["residuals"] = residuals;
    sm["criterion_defects"] = criterion;
    if (conventional_report->meaningful) {
        sm["foucault_angle"] = conventional_report->rotation(conventional_report->samples.size() - 1).angle;
        sm["spin_deviation"] = foucault_vs_spin(*conventional_report);
        rep.trace = foucault_trace(*conventional_report, *conventional);
    }
    put_thomas(sm, *conventional, cfg);
    put_trace_summary(sm, rep.trace);
    return rep;
}

double max_rate(const ObserverField& field, const CircularWorldLine& w, const std::vector<double>& samples, bool min)
{
    double out = min ? 1e300 : 0.0;
    for (const double s : samples) {
        const double r = observer_angular_velocity(field, w.eval(s)).matrix().norm();
        out = min ? std::min(out, r) : std::max(out, r);
    }
    return out;
}

ScenarioReport run_noang(const ScenarioConfig& cfg)
{
    const Setup st = make_setup(cfg, build_profile(cfg));
    auto fw = std::make_shared<TwistedComovingObserver>(st.orbit, TransportFamily::FermiWalker);
    auto bst = std::make_shared<TwistedComovingObserver>(st.orbit, TransportFamily::Boost);

    ScenarioReport rep;
    rep.trace_kind = "foucault";
    ordered_json& sm = rep.summary;
    sm["profile"] = st.profile->name();
    sm["omega_fermi_walker_max"] = max_rate(*fw, *st.orbit, st.samples, false);
    sm["omega_boost_max"] = max_rate(*bst, *st.orbit, st.samples, false);
    sm["omega_rotating_min"] = max_rate(*st.observer, *st.orbit, st.samples, true);
    sm["omega_rotating_max"] = max_rate(*st.observer, *st.orbit, st.samples, false);

    const FoucaultReport rfw =
        foucault_analyze(VariationalSource(fw, st.orbit, cfg.step), st.samples, cfg.tol_meaningful);
    const FoucaultReport rb =
        foucault_analyze(VariationalSource(bst, st.orbit, cfg.step), st.samples, cfg.tol_meaningful);
    sm["meaningful"] = ordered_json{{"fermi-walker", rfw.meaningful}, {"boost", rb.meaningful}};
    sm["residuals"] = ordered_json{{"fermi-walker", rfw.max_residual}, {"boost", rb.max_residual}};
    if (rfw.meaningful) {
        sm["spin_deviation_fermi_walker"] = foucault_vs_spin(rfw);
        sm["foucault_angle"] = rfw.rotation(rfw.samples.size() - 1).angle;
        rep.trace = foucault_trace(rfw, st);
    }
    if (rb.meaningful) {
        sm["spin_deviation_boost"] = foucault_vs_spin(rb);
    }
    put_thomas(sm, st, cfg);
    put_trace_summary(sm, rep.trace);
    return rep;
}

ScenarioReport run_gamma_twist(const ScenarioConfig& cfg)
{
    const Setup st = make_setup(cfg, build_profile(cfg));
    const AbsoluteVelocity v0 = st.orbit->velocity(0.0);
    const FourVector axis =
        cfg.gamma_twist[0] * st.triad[0] + cfg.gamma_twist[1] * st.triad[1] + cfg.gamma_twist[2] * st.triad[2];
    const AntisymMap gamma = rotation_generator(v0, axis);

    auto field = std::make_shared<TwistedComovingObserver>(st.orbit, TransportFamily::Corotating, gamma);
    const FoucaultReport r =
        foucault_analyze(VariationalSource(field, st.orbit, cfg.step), st.samples, cfg.tol_meaningful);
    const TwistAngle angle = gamma_twist_angle(*st.orbit, gamma, st.orbit->period(), cfg.step);

    ScenarioReport rep;
    rep.trace_kind = "foucault";
    ordered_json& sm = rep.summary;
    sm["profile"] = st.profile->name();
    sm["gamma_norm"] = gamma.rate();
    sm["meaningful"] = r.meaningful;
    sm["max_residual"] = r.max_residual;
    put_thomas(sm, st, cfg);
    sm["foucault_angle"] = angle.numeric;
    sm["foucault_angle_closed"] = angle.closed;
    sm["foucault_minus_thomas"] = angle.numeric - sm["thomas_angle"].get<double>();
    if (r.meaningful) {
        rep.trace = foucault_trace(r, st);
    }
    put_trace_summary(sm, rep.trace);
    return rep;
}

ScenarioReport run_custom(const ScenarioConfig& cfg)
{
    const Setup st = make_setup(cfg, build_profile(cfg));
    const FoucaultReport r =
        foucault_analyze(ClosedRotatingSource(st.observer, *st.orbit, cfg.step), st.samples, cfg.tol_meaningful);

    ScenarioReport rep;
    ordered_json& sm = rep.summary;
    sm["profile"] = st.profile->name();
    sm["k0"] = st.orbit->k0();
    sm["alpha0"] = st.orbit->alpha0();
    sm["beta0"] = st.orbit->beta0();
    const CriterionDefect d = profile_criterion(*st.profile, st.orbit->k0());
    sm["criterion_defects"] = ordered_json::array({d.alpha, d.beta});
    sm["meaningful"] = r.meaningful;
    sm["max_residual"] = r.max_residual;
    put_thomas(sm, st, cfg);
    if (r.meaningful) {
        sm["foucault_angle"] = r.rotation(r.samples.size() - 1).angle;
        sm["spin_deviation"] = foucault_vs_spin(r);
        rep.trace_kind = "foucault";
        rep.trace = foucault_trace(r, st);
    } else {
        std::vector<double> residuals;
        for (const FoucaultSample& smp : r.samples) {
            residuals.push_back(smp.residual);
        }
        rep.trace_kind = "fermi-walker";
        rep.trace = fermi_walker_trace(st, cfg, &residuals);
    }
    put_trace_summary(sm, rep.trace);
    return rep;
}

void emit(std::string& out, const ordered_json& v, int indent)
{
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string pad_in(static_cast<std::size_t>(indent + 1) * 2, ' ');
    switch (v.type()) {
    case json::value_t::object: {
        if (v.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (const auto& [key, value] : v.items()) {
            out += first ? "" : ",\n";
            first = false;
            out += pad_in + json(key).dump() + ": ";
            emit(out, value, indent + 1);
        }
        out += "\n" + pad + "}";
        return;
    }
    case json::value_t::array: {
        if (v.empty()) {
            out += "[]";
            return;
        }
        bool scalar = true;
        for (const auto& e : v) {
            scalar = scalar && !e.is_structured();
        }
        out += scalar ? "[" : "[\n";
        bool first = true;
        for (const auto& e : v) {
            out += first ? "" : (scalar ? ", " : ",\n");
            first = false;
            if (!scalar) {
                out += pad_in;
            }
            emit(out, e, indent + 1);
        }
        out += scalar ? "]" : "\n" + pad + "]";
        return;
    }
    case json::value_t::number_float: {
        const double x = v.get<double>();
        if (!std::isfinite(x)) {
            throw NumericalError("non-finite value in report");
        }
        out += format_number(x);
        return;
    }
    default:
        out += v.dump();
    }
}

std::string emit(const ordered_json& v)
{
    std::string out;
    emit(out, v, 0);
    out += "\n";
    return out;
}

}  // namespace

ScenarioConfig parse_config(const json& doc)
{
    if (!doc.is_object()) {
        throw ConfigInvalid("config", "expected a JSON object");
    }
    reject_unknown_keys(doc,
                        {"schema", "scenario", "omega", "d_norm", "profile", "h", "const_alpha", "gamma_twist",
                         "integrator", "samples", "tolerances", "output"},
                        "");

    const json* schema = member(doc, "schema");
    if (!schema) {
        throw ConfigInvalid("schema", "missing (expected 1)");
    }
    if (!schema->is_number_integer() || schema->get<long>() != kConfigSchema) {
        throw ConfigInvalid("schema", "unsupported schema version (expected 1)");
    }

    ScenarioConfig cfg;
    const json* scenario = member(doc, "scenario");
    if (!scenario || !scenario->is_string()) {
        throw ConfigInvalid("scenario", "missing or not a string");
    }
    cfg.scenario = scenario->get<std::string>();
    if (!kScenarios.count(cfg.scenario)) {
        throw ConfigInvalid("scenario", "unknown scenario '" + cfg.scenario + "'");
    }

    cfg.omega = read_number(doc, "omega", "omega", cfg.omega);
    cfg.d_norm = read_number(doc, "d_norm", "d_norm", cfg.d_norm);
    cfg.h = read_number(doc, "h", "h", cfg.h);
    cfg.const_alpha = read_number(doc, "const_alpha", "const_alpha", cfg.const_alpha);

    if (const json* p = member(doc, "profile")) {
        if (p->is_string()) {
            cfg.profile.preset = p->get<std::string>();
            if (!kPresetNames.count(cfg.profile.preset)) {
                throw ConfigInvalid("profile", "unknown preset '" + cfg.profile.preset + "'");
            }
        } else if (p->is_object()) {
            reject_unknown_keys(*p, {"alpha", "beta"}, "profile.");
            if (!p->contains("alpha") || !p->contains("beta")) {
                throw ConfigInvalid("profile", "expression profiles need both alpha and beta");
            }
            const std::string a = read_string(*p, "alpha", "profile.alpha", "");
            const std::string b = read_string(*p, "beta", "profile.beta", "");
            for (const auto& [field, src] : {std::pair{"profile.alpha", a}, std::pair{"profile.beta", b}}) {
                try {
                    Expression::parse(src);
                } catch (const ExpressionError& e) {
                    throw ConfigInvalid(field, e.what());
                }
            }
            cfg.profile.preset = "expression";
            cfg.profile.expression = std::pair{a, b};
        } else {
            throw ConfigInvalid("profile", "expected a preset name or {\"alpha\": ..., \"beta\": ...}");
        }
    }

    if (const json* g = member(doc, "gamma_twist")) {
        if (!g->is_array() || g->size() != 3) {
            throw ConfigInvalid("gamma_twist", "expected an array of 3 numbers");
        }
        for (std::size_t i = 0; i < 3; ++i) {
            if (!(*g)[i].is_number() || !std::isfinite((*g)[i].get<double>())) {
                throw ConfigInvalid("gamma_twist", "expected an array of 3 finite numbers");
            }
            cfg.gamma_twist[i] = (*g)[i].get<double>();
        }
    }

    const json& integ = read_object(doc, "integrator", "integrator");
    reject_unknown_keys(integ, {"step", "reproject"}, "integrator.");
    cfg.step = read_number(integ, "step", "integrator.step", cfg.step);
    if (const json* r = member(integ, "reproject")) {
        if (!r->is_boolean()) {
            throw ConfigInvalid("integrator.reproject", "expected true or false");
        }
        cfg.reproject = r->get<bool>();
    }

    if (const json* n = member(doc, "samples")) {
        if (!n->is_number_integer()) {
            throw ConfigInvalid("samples", "expected an integer");
        }
        const long v = n->get<long>();
        cfg.samples = v > 100000 || v < 0 ? -1 : static_cast<int>(v);
    }

    const json& tol = read_object(doc, "tolerances", "tolerances");
    reject_unknown_keys(tol, {"meaningful", "ode"}, "tolerances.");
    cfg.tol_meaningful = read_number(tol, "meaningful", "tolerances.meaningful", cfg.tol_meaningful);
    cfg.tol_ode = read_number(tol, "ode", "tolerances.ode", cfg.tol_ode);

    const json& out = read_object(doc, "output", "output");
    reject_unknown_keys(out, {"format", "path"}, "output.");
    const std::string format = read_string(out, "format", "output.format", "csv");
    if (format == "csv") {
        cfg.format = OutputFormat::Csv;
    } else if (format == "json") {
        cfg.format = OutputFormat::Json;
    } else {
        throw ConfigInvalid("output.format", "expected \"csv\" or \"json\"");
    }
    cfg.path = read_string(out, "path", "output.path", cfg.scenario + (cfg.format == OutputFormat::Csv ? ".csv" : ".json"));
    if (cfg.path.empty()) {
        throw ConfigInvalid("output.path", "must not be empty");
    }

    validate(cfg);
    return cfg;
}

ScenarioConfig parse_config_text(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigInvalid("config", std::string("malformed JSON: ") + e.what());
    }
    return parse_config(doc);
}

ScenarioConfig load_config(const std::string& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw ConfigInvalid("config", "cannot read '" + file + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

ordered_json config_to_json(const ScenarioConfig& cfg)
{
    ordered_json j;
    j["schema"] = kConfigSchema;
    j["scenario"] = cfg.scenario;
    j["omega"] = cfg.omega;
    j["d_norm"] = cfg.d_norm;
    if (cfg.profile.expression) {
        j["profile"] = ordered_json{{"alpha", cfg.profile.expression->first}, {"beta", cfg.profile.expression->second}};
    } else {
        j["profile"] = cfg.profile.preset;
    }
    j["h"] = cfg.h;
    j["const_alpha"] = cfg.const_alpha;
    j["gamma_twist"] = ordered_json::array({cfg.gamma_twist[0], cfg.gamma_twist[1], cfg.gamma_twist[2]});
    j["integrator"] = ordered_json{{"step", cfg.step}, {"reproject", cfg.reproject}};
    j["samples"] = cfg.samples;
    j["tolerances"] = ordered_json{{"meaningful", cfg.tol_meaningful}, {"ode", cfg.tol_ode}};
    j["output"] = ordered_json{{"format", cfg.format == OutputFormat::Csv ? "csv" : "json"}, {"path", cfg.path}};
    return j;
}

const std::vector<ScenarioInfo>& builtin_scenarios()
{
    static const std::vector<ScenarioInfo> list = {
        {"thomas-circle", "omega, d_norm [, profile, integrator.step]",
         "Thomas rotation of a Fermi-Walker gyroscope after one revolution; precession integral over one period"},
        {"herrera-resolution", "omega, d_norm [, const_alpha, samples]",
         "Foucault meaningfulness of the conventional, TT, sqrt and const-alpha rotating observers"},
        {"noang-counterexample", "omega, d_norm [, profile]",
         "comoving observers on one circle with zero and nonzero angular velocity at the orbit"},
        {"gamma-twist", "omega, d_norm, gamma_twist [, profile]",
         "Foucault angle after one revolution for twisted corotating frames versus the Thomas angle"},
    };
    return list;
}

std::string list_scenarios()
{
    std::ostringstream out;
    for (const ScenarioInfo& s : builtin_scenarios()) {
        out << s.name << "\n  fields:  " << s.fields << "\n  shows:   " << s.reproduces << "\n";
    }
    out << "(scenario \"custom\" runs any preset or {alpha, beta} expression profile)\n";
    return out.str();
}

const std::vector<std::string>& trace_columns()
{
    static const std::vector<std::string> cols = {"s",  "t_u",      "zx",          "zy",
                                                  "zz", "residual", "angle_accum", "winding"};
    return cols;
}

ScenarioReport run_scenario(const ScenarioConfig& cfg)
{
    const auto start = std::chrono::steady_clock::now();
    ScenarioReport rep;
    try {
        if (cfg.scenario == "thomas-circle") {
            rep = run_thomas_circle(cfg);
        } else if (cfg.scenario == "herrera-resolution") {
            rep = run_herrera(cfg);
        } else if (cfg.scenario == "noang-counterexample") {
            rep = run_noang(cfg);
        } else if (cfg.scenario == "gamma-twist") {
            rep = run_gamma_twist(cfg);
        } else if (cfg.scenario == "custom") {
            rep = run_custom(cfg);
        } else {
            throw ConfigInvalid("scenario", "unknown scenario '" + cfg.scenario + "'");
        }
    } catch (const NumericalError& e) {
        throw NumericalError(cfg.scenario + ": " + e.what());
    }
    rep.scenario = cfg.scenario;
    rep.config = config_to_json(cfg);
    rep.summary["trace"] = rep.trace_kind;
    rep.summary["runtime_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

double reduced_angle(double accum) { return std::fmod(std::abs(accum), kTwoPi); }

long winding_number(double accum) { return static_cast<long>(std::floor(std::abs(accum) / kTwoPi)); }

std::string format_number(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string to_csv(const ScenarioReport& report)
{
    std::string out;
    const auto& cols = trace_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) {
        out += (i ? "," : "") + cols[i];
    }
    out += "\n";
    for (const TraceRow& r : report.trace) {
        for (const double v : {r.s, r.t_u, r.zx, r.zy, r.zz, r.residual, r.angle_accum}) {
            if (!std::isfinite(v)) {
                throw NumericalError("non-finite value in trace");
            }
            out += format_number(v) + ",";
        }
        out += std::to_string(r.winding) + "\n";
    }
    return out;
}

std::string to_json(const ScenarioReport& report)
{
    ordered_json rows = ordered_json::array();
    for (const TraceRow& r : report.trace) {
        rows.push_back(ordered_json::array({r.s, r.t_u, r.zx, r.zy, r.zz, r.residual, r.angle_accum, r.winding}));
    }
    ordered_json doc;
    doc["scenario"] = report.scenario;
    doc["config"] = report.config;
    doc["summary"] = report.summary;
    doc["tables"] = ordered_json{{"trace", ordered_json{{"columns", trace_columns()}, {"rows", rows}}}};
    return emit(doc);
}

std::string summary_text(const ScenarioReport& report)
{
    ordered_json doc;
    doc["scenario"] = report.scenario;
    doc["summary"] = report.summary;
    return emit(doc);
}

void write_atomic(const std::string& path, const std::string& contents)
{
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) {
        fs::create_directories(target.parent_path());
    }
    const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << contents;
        out.flush();
        if (!out) {
            throw Error("cannot write '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error("cannot rename onto '" + path + "': " + ec.message());
    }
}

void write_report(const ScenarioReport& report, const ScenarioConfig& cfg)
{
    write_atomic(cfg.path, cfg.format == OutputFormat::Csv ? to_csv(report) : to_json(report));
}

SweepSpec parse_sweep(const std::string& spec)
{
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigInvalid("--param", "expected name=start:stop:step");
    }
    SweepSpec out;
    out.param = spec.substr(0, eq);
    static const std::set<std::string> sweepable = {"omega", "d_norm", "h", "const_alpha", "integrator.step"};
    if (!sweepable.count(out.param)) {
        throw ConfigInvalid("--param", "cannot sweep '" + out.param + "'");
    }
    double range[3];
    std::size_t pos = eq + 1;
    for (int i = 0; i < 3; ++i) {
        const std::size_t end = i < 2 ? spec.find(':', pos) : spec.size();
        if (end == std::string::npos) {
            throw ConfigInvalid("--param", "expected name=start:stop:step");
        }
        const char* b = spec.data() + pos;
        const char* e = spec.data() + end;
        const auto res = std::from_chars(b, e, range[i]);
        if (res.ec != std::errc() || res.ptr != e || !std::isfinite(range[i])) {
            throw ConfigInvalid("--param", "bad number '" + spec.substr(pos, end - pos) + "'");
        }
        pos = end + 1;
    }
    const double a = range[0], b = range[1], st = range[2];
    if (!(st > 0.0) || b < a) {
        throw ConfigInvalid("--param", "need stop >= start and step > 0");
    }
    const double n = std::floor((b - a) / st + 1e-9) + 1.0;
    if (n > 10000.0) {
        throw ConfigInvalid("--param", "too many sweep points");
    }
    for (int i = 0; i < static_cast<int>(n); ++i) {
        // round to 12 significant digits so 0.1 + 2*0.1 reads 0.3
        char buf[64];
        const auto res = std::to_chars(buf, buf + sizeof buf, a + i * st, std::chars_format::general, 12);
        double v = 0.0;
        std::from_chars(buf, res.ptr, v);
        out.values.push_back(v);
    }
    return out;
}

ScenarioConfig sweep_point(const ScenarioConfig& cfg, const std::string& param, double value)
{
    ordered_json j = config_to_json(cfg);
    if (param == "integrator.step") {
        j["integrator"]["step"] = value;
    } else {
        j[param] = value;
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    const std::string tag = "." + param + "=" + std::string(buf, res.ptr);

    const std::filesystem::path p(cfg.path);
    const std::string path = (p.parent_path() / (p.stem().string() + tag + p.extension().string())).string();
    j["output"]["path"] = path;
    return parse_config(json::parse(j.dump()));
}

}  // namespace gyro
