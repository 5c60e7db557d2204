#include "platoon/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace platoon {

namespace {

template <typename T>
T field(const Json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(where + ": field '" + key + "' has the wrong type");
    }
}

template <typename T>
T field_or(const Json& j, const char* key, T fallback, const std::string& where) {
    return j.contains(key) ? field<T>(j, key, where) : fallback;
}

void require_object(const Json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
}

void reject_unknown(const Json& j, std::initializer_list<const char*> known, const std::string& where) {
    for (const auto& [key, _] : j.items()) {
        if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; }))
            throw ConfigError(where + ": unknown field '" + key + "'");
    }
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json to_json(const GainSet& g) {
    return Json{{"kp1", g.kp1}, {"kp2", g.kp2}, {"kv", g.kv},   {"kp0", g.kp0}, {"kv0", g.kv0}, {"k", g.k},
                {"gp1", g.gp1}, {"gp2", g.gp2}, {"gv", g.gv},   {"gp0", g.gp0}, {"gv0", g.gv0}};
}

GainSet gains_from_json(const Json& j) {
    const std::string where = "gains";
    require_object(j, where);
    reject_unknown(j, {"kp1", "kp2", "kv", "kp0", "kv0", "k", "gp1", "gp2", "gv", "gp0", "gv0"}, where);
    GainSet g;
    g.kp1 = field<double>(j, "kp1", where);
    g.kp2 = field<double>(j, "kp2", where);
    g.kv = field<double>(j, "kv", where);
    g.kp0 = field<double>(j, "kp0", where);
    g.kv0 = field<double>(j, "kv0", where);
    g.k = field<double>(j, "k", where);
    g.gp1 = field<double>(j, "gp1", where);
    g.gp2 = field<double>(j, "gp2", where);
    g.gv = field<double>(j, "gv", where);
    g.gp0 = field<double>(j, "gp0", where);
    g.gv0 = field<double>(j, "gv0", where);
    return g;
}

Json to_json(const TransformParams& a) { return Json::array({a.alpha1, a.alpha2, a.alpha3, a.alpha4}); }

TransformParams alphas_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 4 || !std::all_of(j.begin(), j.end(), [](const Json& v) { return v.is_number(); }))
        throw ConfigError("alphas: expected an array of 4 numbers");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

Json to_json(const Scenario& s) {
    Json j{
        {"n", s.n},
        {"horizon_s", s.horizon},
        {"dt_s", s.dt},
        {"seed", s.seed},
        {"delta_m", s.delta},
        {"q0_0_m", s.q0_0},
        {"v0_mps", s.v0},
        {"mass_kg", s.mass},
        {"epsilon", s.epsilon},
        {"tau_rule", {{"kind", s.tau_rule.kind == TauRule::Kind::constant ? "constant" : "scaled"},
                      {"value", s.tau_rule.value}}},
        {"controller", {{"variant", to_string(s.controller)}, {"gains", to_json(s.gains)}}},
        {"alphas", to_json(s.alphas)},
        {"disturbances", {{"time_varying", s.time_varying}, {"constant", s.constant}}},
        {"first_vehicle", to_string(s.first_vehicle)},
        {"zeta0", s.zeta0},
        {"record_stride", s.record_stride},
    };
    if (s.gammas) j["gammas"] = *s.gammas;
    return j;
}

Scenario scenario_from_json(const Json& j) {
    const std::string where = "scenario";
    require_object(j, where);
    reject_unknown(j,
                   {"n", "horizon_s", "dt_s", "seed", "delta_m", "q0_0_m", "v0_mps", "mass_kg", "epsilon", "tau_rule",
                    "controller", "alphas", "disturbances", "first_vehicle", "zeta0", "record_stride", "gammas"},
                   where);
    Scenario s;
    s.n = field_or<std::size_t>(j, "n", s.n, where);
    s.horizon = field_or<double>(j, "horizon_s", s.horizon, where);
    s.dt = field_or<double>(j, "dt_s", s.dt, where);
    s.seed = field_or<std::uint64_t>(j, "seed", s.seed, where);
    s.delta = field_or<double>(j, "delta_m", s.delta, where);
    s.q0_0 = field_or<double>(j, "q0_0_m", s.q0_0, where);
    s.v0 = field_or<double>(j, "v0_mps", s.v0, where);
    s.mass = field_or<double>(j, "mass_kg", s.mass, where);
    s.epsilon = field_or<double>(j, "epsilon", s.epsilon, where);
    s.zeta0 = field_or<double>(j, "zeta0", s.zeta0, where);
    s.record_stride = field_or<std::size_t>(j, "record_stride", s.record_stride, where);

    if (j.contains("tau_rule")) {
        const Json& t = j.at("tau_rule");
        require_object(t, "scenario.tau_rule");
        reject_unknown(t, {"kind", "value"}, "scenario.tau_rule");
        const auto kind = field<std::string>(t, "kind", "scenario.tau_rule");
        s.tau_rule = TauRule::parse(kind + ":" + std::to_string(field<double>(t, "value", "scenario.tau_rule")));
        s.tau_rule.value = field<double>(t, "value", "scenario.tau_rule");
    }
    if (j.contains("controller")) {
        const Json& c = j.at("controller");
        require_object(c, "scenario.controller");
        reject_unknown(c, {"variant", "gains"}, "scenario.controller");
        s.controller = parse_controller(field_or<std::string>(c, "variant", "c1", "scenario.controller"));
        if (c.contains("gains")) s.gains = gains_from_json(c.at("gains"));
    }
    if (j.contains("alphas")) s.alphas = alphas_from_json(j.at("alphas"));
    if (j.contains("disturbances")) {
        const Json& d = j.at("disturbances");
        require_object(d, "scenario.disturbances");
        reject_unknown(d, {"time_varying", "constant"}, "scenario.disturbances");
        s.time_varying = field_or<bool>(d, "time_varying", s.time_varying, "scenario.disturbances");
        s.constant = field_or<bool>(d, "constant", s.constant, "scenario.disturbances");
    }
    if (j.contains("first_vehicle"))
        s.first_vehicle = parse_first_vehicle(field<std::string>(j, "first_vehicle", where));
    if (j.contains("gammas")) s.gammas = field<std::vector<double>>(j, "gammas", where);
    s.validate();
    return s;
}

Json to_json(const DssCertificate& c) {
    return Json{
        {"c_sq", c.c_sq},
        {"b", c.b},
        {"c_bar_sq", c.c_bar_sq},
        {"K_cond", c.K_cond},
        {"max_eps", c.max_eps},
        {"margins",
         {{"c1", c.margins.c1},
          {"c2_mu", c.margins.c2_mu},
          {"c2_b", c.margins.c2_b},
          {"c3", number_or_null(c.margins.c3)},
          {"c_bar", c.margins.c_bar}}},
        {"per_vehicle", {{"worst_mu2", c.worst_mu2_vehicle}, {"worst_b", c.worst_b_vehicle}}},
        {"valid", c.valid()},
    };
}

Json to_json(const HeteroReport& r) {
    Json vehicles = Json::array();
    for (const auto& v : r.vehicles)
        vehicles.push_back(
            {{"index", v.index}, {"tau", v.tau}, {"mass", v.mass}, {"mu2", v.mu2}, {"b", v.b}, {"c2_pass", v.c2_pass()}});
    return Json{{"certificate", to_json(r.certificate)}, {"c2_failing", r.failing}, {"vehicles", vehicles}};
}

Json to_json(const SynthesisProblem& p) {
    return Json{
        {"design", {{"tau", p.design.tau}, {"mass", p.design.mass}, {"epsilon", p.design.epsilon}}},
        {"alphas", to_json(p.alphas)},
        {"search_alphas", p.search_alphas},
        {"alpha_box", {p.alpha_lower, p.alpha_upper}},
        {"lower", to_json(p.lower)},
        {"upper", to_json(p.upper)},
    };
}

Json to_json(const SearchConfig& c) {
    return Json{{"seed", c.seed},
                {"restarts", c.restarts},
                {"max_iterations", c.max_iterations},
                {"penalty", c.penalty},
                {"initial_step", c.initial_step},
                {"reflection", c.reflection},
                {"expansion", c.expansion},
                {"contraction", c.contraction},
                {"shrink", c.shrink},
                {"tolerance", c.tolerance}};
}

Json to_json(const SynthesisResult& r) {
    return Json{{"feasible", r.feasible},
                {"objective", r.objective},
                {"iterations", r.iterations},
                {"best_restart", r.best_restart},
                {"gains", to_json(r.gains)},
                {"alphas", to_json(r.alphas)},
                {"certificate", to_json(r.certificate)}};
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        // e.byte is a 1-based offset; translate it into line/column for the message.
        in.clear();
        in.seekg(0);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError(path.string() + ":" + std::to_string(line) + ":" + std::to_string(col) +
                          ": JSON syntax error");
    }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

// ============================================================================
// CSV
// ============================================================================

std::vector<std::size_t> figure_vehicles(std::size_t n) {
    std::vector<std::size_t> out;
    for (std::size_t i : {2u, 100u, 250u, 400u, 500u})
        if (i <= n) out.push_back(i);
    if (out.empty()) out.push_back(n);
    return out;
}

std::string csv_number(double v) {
    if (!std::isfinite(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

EnvelopeSet envelope_inputs(const SimResult& run, const Scenario& scenario, const GainSet& gains) {
    const PlatoonModel& m = run.model;
    const auto initial = init_scenario(scenario);
    const Mat4 T = build_T(scenario.alphas);
    const auto params = scenario.vehicle_params();

    EnvelopeSet env;
    if (gains.k != 0.0) env.integral = check_conditions(params, GainBounds::exact(gains), T);
    env.no_integral = check_conditions(params, GainBounds::exact(gains.without_integral()), T);

    double phys0 = 0.0, shifted0 = 0.0, xi0 = 0.0, w_sup = 0.0, d_sup = 0.0;
    for (std::size_t i = 1; i <= initial.size(); ++i) {
        const VehicleState desired = desired_configuration(i, 0.0, m.reference, m.spacing);
        const VehicleState& x = initial[i - 1];
        const double w_bar = m.disturbance.constant_part(i);
        phys0 = std::max(phys0, norm2(Vec4{x.q - desired.q, x.v - desired.v, x.f, 0.0}));
        if (gains.k != 0.0) {
            shifted0 = std::max(shifted0, norm2(shifted_error(x, w_bar, gains.k, desired)));
            xi0 = std::max(xi0, std::abs(x.zeta + w_bar / gains.k));
        }
        w_sup = std::max(w_sup, m.disturbance.time_varying_sup(i));
        d_sup = std::max(d_sup, m.disturbance.time_varying_sup(i) + w_bar);
    }
    env.eq12 = {phys0, d_sup, 0.0};
    env.eq13 = {shifted0, w_sup, 0.0};
    env.eq14 = {phys0, w_sup, xi0};
    return env;
}

double envelope_or_nan(const std::optional<DssCertificate>& cert, const BoundInputs& in, BoundVariant v, double t) {
    if (!cert || !cert->valid()) return std::numeric_limits<double>::quiet_NaN();
    return bound_value(*cert, in, v, t);
}

void write_norms_csv(std::ostream& os, const SimResult& run, const EnvelopeSet& env) {
    os << "# units: t [s]; sup_err_* [mixed state units: m, m/s, N, N*s]; bound_* [same]; nan = no valid "
          "certificate\n";
    os << "t,sup_err_l2_physical,sup_err_inf_physical,sup_err_l2_shifted,bound_eq13,bound_eq14,bound_eq12\n";
    for (std::size_t k = 0; k < run.times.size(); ++k) {
        const double t = run.times[k];
        os << csv_number(t) << ',' << csv_number(run.sup_l2_physical[k]) << ','
           << csv_number(run.sup_inf_physical[k]) << ',' << csv_number(run.sup_l2_shifted[k]) << ','
           << csv_number(envelope_or_nan(env.integral, env.eq13, BoundVariant::eq13, t)) << ','
           << csv_number(envelope_or_nan(env.integral, env.eq14, BoundVariant::eq14, t)) << ','
           << csv_number(envelope_or_nan(env.no_integral, env.eq12, BoundVariant::eq12, t)) << '\n';
    }
}

void write_bounds_csv(std::ostream& os, const SimResult& run, const EnvelopeSet& env) {
    os << "# units: t [s]; bound_* [mixed state units]; nan = no valid certificate\n";
    os << "t,bound_eq12,bound_eq13,bound_eq14\n";
    for (double t : run.record_times.empty() ? run.times : run.record_times) {
        os << csv_number(t) << ',' << csv_number(envelope_or_nan(env.no_integral, env.eq12, BoundVariant::eq12, t))
           << ',' << csv_number(envelope_or_nan(env.integral, env.eq13, BoundVariant::eq13, t)) << ','
           << csv_number(envelope_or_nan(env.integral, env.eq14, BoundVariant::eq14, t)) << '\n';
    }
}

void write_displacements_csv(std::ostream& os, const SimResult& run) {
    const auto ids = figure_vehicles(run.model.size());
    os << "# units: t [s]; e_i [m], e_i = q_{i-1} - q_i - delta_{i,i-1}\n";
    os << 't';
    for (auto i : ids) os << ",e_" << i;
    os << '\n';
    std::vector<std::vector<double>> cols;
    for (auto i : ids) cols.push_back(run.displacement(i));
    for (std::size_t k = 0; k < run.record_times.size(); ++k) {
        os << csv_number(run.record_times[k]);
        for (const auto& c : cols) os << ',' << csv_number(c[k]);
        os << '\n';
    }
}

void write_states_csv(std::ostream& os, const SimResult& run) {
    const auto ids = figure_vehicles(run.model.size());
    os << "# units: t [s]; v_i [m/s]; f_i [N]\n";
    os << 't';
    for (auto i : ids) os << ",v_" << i;
    for (auto i : ids) os << ",f_" << i;
    os << '\n';
    for (std::size_t k = 0; k < run.record_times.size(); ++k) {
        os << csv_number(run.record_times[k]);
        for (auto i : ids) os << ',' << csv_number(run.states[k][i - 1].v);
        for (auto i : ids) os << ',' << csv_number(run.states[k][i - 1].f);
        os << '\n';
    }
}

void write_control_csv(std::ostream& os, const SimResult& run) {
    const auto ids = figure_vehicles(run.model.size());
    os << "# units: t [s]; zeta_i [N*s]; u_i [N]\n";
    os << 't';
    for (auto i : ids) os << ",zeta_" << i;
    for (auto i : ids) os << ",u_" << i;
    os << '\n';
    for (std::size_t k = 0; k < run.record_times.size(); ++k) {
        os << csv_number(run.record_times[k]);
        for (auto i : ids) os << ',' << csv_number(run.states[k][i - 1].zeta);
        for (auto i : ids) os << ',' << csv_number(run.inputs[k][i - 1]);
        os << '\n';
    }
}

void write_sweep_n_csv(std::ostream& os, const std::vector<SweepNRow>& rows) {
    os << "# units: n [vehicles]; max_sup_* and final_* [mixed state units]; final_sup_position [m]\n";
    os << "n,max_sup_l2_physical,max_sup_inf_physical,max_sup_l2_shifted,final_sup_l2_physical,final_sup_position,"
          "diverged\n";
    for (const auto& r : rows)
        os << r.n << ',' << csv_number(r.max_sup_l2_physical) << ',' << csv_number(r.max_sup_inf_physical) << ','
           << csv_number(r.max_sup_l2_shifted) << ',' << csv_number(r.final_sup_l2_physical) << ','
           << csv_number(r.final_sup_position) << ',' << (r.diverged ? 1 : 0) << '\n';
}

void write_sweep_tau_csv(std::ostream& os, const std::vector<TauReport>& rows) {
    os << "# units: rule [tau in s]; c_sq, b, c_bar_sq [1/s]; sup errors [mixed state units, inf-norm unless noted]\n";
    os << "rule,conditions_pass,c2_failing_vehicles,c_sq,b,c_bar_sq,diverged,max_sup,sup_at_10s,final_sup,"
          "max_sup_l2\n";
    for (const auto& r : rows)
        os << r.rule.label() << ',' << (r.conditions_pass ? 1 : 0) << ',' << r.c2_failing.size() << ','
           << csv_number(r.certificate.c_sq) << ',' << csv_number(r.certificate.b) << ','
           << csv_number(r.certificate.c_bar_sq) << ',' << (r.diverged ? 1 : 0) << ',' << csv_number(r.max_sup)
           << ',' << csv_number(r.sup_at_10s) << ',' << csv_number(r.final_sup) << ',' << csv_number(r.max_sup_l2)
           << '\n';
}

}  // namespace platoon
