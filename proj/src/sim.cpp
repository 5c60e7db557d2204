#include "platoon/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <thread>

#include "platoon/tolerances.hpp"

namespace platoon {

double TauRule::tau_for(double gamma) const {
    return kind == Kind::constant ? value : value * (1.1 - gamma);
}

std::string TauRule::label() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s:%g", kind == Kind::constant ? "const" : "scaled", value);
    return buf;
}

TauRule TauRule::parse(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ConfigError("tau rule '" + text + "' must look like const:V or scaled:V");
    const std::string kind = text.substr(0, colon);
    TauRule r;
    if (kind == "const" || kind == "constant") {
        r.kind = Kind::constant;
    } else if (kind == "scaled") {
        r.kind = Kind::scaled;
    } else {
        throw ConfigError("unknown tau rule kind '" + kind + "'");
    }
    try {
        std::size_t used = 0;
        r.value = std::stod(text.substr(colon + 1), &used);
        if (used != text.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw ConfigError("tau rule value in '" + text + "' is not a number");
    }
    if (!(r.value > 0.0)) throw ConfigError("tau rule value must be positive");
    return r;
}

const char* to_string(ControllerVariant v) { return v == ControllerVariant::c1 ? "c1" : "c2"; }

ControllerVariant parse_controller(const std::string& text) {
    if (text == "c1") return ControllerVariant::c1;
    if (text == "c2") return ControllerVariant::c2;
    throw ConfigError("controller must be c1 or c2, got '" + text + "'");
}

const char* to_string(FirstVehicleCoupling c) {
    return c == FirstVehicleCoupling::leader_only ? "leader_only" : "reference_as_predecessor";
}

FirstVehicleCoupling parse_first_vehicle(const std::string& text) {
    if (text == "leader_only") return FirstVehicleCoupling::leader_only;
    if (text == "reference_as_predecessor") return FirstVehicleCoupling::reference_as_predecessor;
    throw ConfigError("first_vehicle must be leader_only or reference_as_predecessor, got '" + text + "'");
}

void Scenario::validate() const {
    if (n < 1) throw ConfigError("n must be at least 1");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
    if (!(horizon >= dt) || !std::isfinite(horizon)) throw ConfigError("horizon must be at least dt");
    if (!(delta > 0.0)) throw ConfigError("delta must be positive");
    if (!std::isfinite(q0_0) || !std::isfinite(v0)) throw ConfigError("reference must be finite");
    if (!gains.all_finite()) throw ConfigError("gains must be finite");
    if (controller == ControllerVariant::c1 && gains.k == 0.0)
        throw ConfigError("controller c1 needs a nonzero integral gain k");
    if (gammas && gammas->size() != n)
        throw ConfigError("gammas has " + std::to_string(gammas->size()) + " entries, expected " + std::to_string(n));
    for (const auto& p : vehicle_params()) p.validate();
}

std::size_t Scenario::steps() const { return static_cast<std::size_t>(std::llround(horizon / dt)); }

std::vector<double> Scenario::resolve_gammas() const { return gammas ? *gammas : vehicle_gammas(seed, n); }

std::vector<VehicleParams> Scenario::vehicle_params() const {
    const auto g = resolve_gammas();
    std::vector<VehicleParams> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = {mass, tau_rule.tau_for(g[i]), epsilon};
    return out;
}

GainSet Scenario::effective_gains(const GainSet& g) const {
    return controller == ControllerVariant::c1 ? g : g.without_integral();
}

PlatoonModel make_model(const Scenario& s, const GainSet& gains) {
    s.validate();
    PlatoonModel m;
    m.params = s.vehicle_params();
    m.spacing = SpacingPolicy::uniform(s.n, s.delta);
    m.reference = {s.q0_0, s.v0};
    m.disturbance.gammas = s.resolve_gammas();
    m.disturbance.time_varying = s.time_varying;
    m.disturbance.constant = s.constant;
    m.gains = s.effective_gains(gains);
    m.first_vehicle = s.first_vehicle;
    return m;
}

std::vector<VehicleState> init_scenario(const Scenario& s) {
    s.validate();
    const auto gammas = s.resolve_gammas();
    const ReferenceTrajectory ref{s.q0_0, s.v0};
    const auto spacing = SpacingPolicy::uniform(s.n, s.delta);
    std::vector<VehicleState> out(s.n);
    for (std::size_t i = 1; i <= s.n; ++i) {
        VehicleState x = desired_configuration(i, 0.0, ref, spacing);
        x.q += gammas[i - 1];
        x.v += gammas[i - 1];
        x.zeta = s.zeta0;
        out[i - 1] = x;
    }
    return out;
}

double SimResult::at_time(const std::vector<double>& series, double t) const {
    if (series.empty()) return std::numeric_limits<double>::quiet_NaN();
    const auto k = static_cast<std::size_t>(std::llround(t / dt));
    return series[std::min(k, series.size() - 1)];
}

std::vector<double> SimResult::displacement(std::size_t i) const {
    std::vector<double> out;
    out.reserve(states.size());
    for (std::size_t k = 0; k < states.size(); ++k) {
        const double q_prev = i == 1 ? model.reference.position(record_times[k]) : states[k][i - 2].q;
        out.push_back(q_prev - states[k][i - 1].q - model.spacing.gap(i));
    }
    return out;
}

namespace {

void axpy(std::vector<VehicleState>& out, const std::vector<VehicleState>& x, double h,
          const std::vector<VehicleState>& dx) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i].q = x[i].q + h * dx[i].q;
        out[i].v = x[i].v + h * dx[i].v;
        out[i].f = x[i].f + h * dx[i].f;
        out[i].zeta = x[i].zeta + h * dx[i].zeta;
    }
}

bool bounded(const std::vector<VehicleState>& x) {
    for (const auto& s : x)
        for (double v : {s.q, s.v, s.f, s.zeta})
            if (!std::isfinite(v) || std::abs(v) > tol::kDivergence) return false;
    return true;
}

void record_metrics(SimResult& r, const std::vector<VehicleState>& x, double t) {
    const auto& m = r.model;
    r.times.push_back(t);
    r.sup_l2_physical.push_back(sup_error(m, x, t, ErrorCoordinate::physical, ErrorNorm::l2));
    r.sup_inf_physical.push_back(sup_error(m, x, t, ErrorCoordinate::physical, ErrorNorm::inf));
    r.sup_l2_shifted.push_back(sup_error(m, x, t, ErrorCoordinate::shifted, ErrorNorm::l2));
    r.sup_inf_shifted.push_back(sup_error(m, x, t, ErrorCoordinate::shifted, ErrorNorm::inf));
    r.sup_position.push_back(sup_position_error(m, x, t));
}

void record_snapshot(SimResult& r, const std::vector<VehicleState>& x, double t) {
    const auto& m = r.model;
    std::vector<double> u(x.size());
    for (std::size_t i = 1; i <= x.size(); ++i)
        u[i - 1] = control_input(m.view(x, i, t), m.gains, m.params[i - 1].epsilon, m.spacing).u_bar;
    r.record_times.push_back(t);
    r.states.push_back(x);
    r.inputs.push_back(std::move(u));
}

}  // namespace

SimResult integrate_from(const PlatoonModel& model, std::vector<VehicleState> x, double horizon, double dt,
                         std::size_t record_stride) {
    model.validate();
    if (x.size() != model.size()) throw ConfigError("initial state length differs from platoon size");
    if (!(dt > 0.0) || !(horizon >= dt)) throw ConfigError("need dt > 0 and horizon >= dt");

    SimResult r;
    r.model = model;
    r.dt = dt;
    const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
    r.times.reserve(steps + 1);

    const auto n = x.size();
    std::vector<VehicleState> k1(n), k2(n), k3(n), k4(n), stage(n);

    record_metrics(r, x, 0.0);
    if (record_stride > 0) record_snapshot(r, x, 0.0);

    for (std::size_t step = 1; step <= steps; ++step) {
        // Time from the step index avoids accumulated rounding in t.
        const double t = static_cast<double>(step - 1) * dt;
        closed_loop_derivative(model, x, t, k1);
        axpy(stage, x, 0.5 * dt, k1);
        closed_loop_derivative(model, stage, t + 0.5 * dt, k2);
        axpy(stage, x, 0.5 * dt, k2);
        closed_loop_derivative(model, stage, t + 0.5 * dt, k3);
        axpy(stage, x, dt, k3);
        closed_loop_derivative(model, stage, t + dt, k4);
        for (std::size_t i = 0; i < n; ++i) {
            x[i].q += dt / 6.0 * (k1[i].q + 2.0 * k2[i].q + 2.0 * k3[i].q + k4[i].q);
            x[i].v += dt / 6.0 * (k1[i].v + 2.0 * k2[i].v + 2.0 * k3[i].v + k4[i].v);
            x[i].f += dt / 6.0 * (k1[i].f + 2.0 * k2[i].f + 2.0 * k3[i].f + k4[i].f);
            x[i].zeta += dt / 6.0 * (k1[i].zeta + 2.0 * k2[i].zeta + 2.0 * k3[i].zeta + k4[i].zeta);
        }
        const double t_next = static_cast<double>(step) * dt;
        if (!bounded(x)) {
            r.diverged = true;
            r.diverged_at = t_next;
            break;
        }
        record_metrics(r, x, t_next);
        if (record_stride > 0 && step % record_stride == 0) record_snapshot(r, x, t_next);
    }
    return r;
}

SimResult integrate(const Scenario& scenario, const GainSet& gains) {
    const PlatoonModel model = make_model(scenario, gains);
    return integrate_from(model, init_scenario(scenario), scenario.horizon, scenario.dt, scenario.record_stride);
}

SimResult integrate(const Scenario& scenario) { return integrate(scenario, scenario.gains); }

std::size_t worker_count() {
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("PLATOON_DSS_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) n = std::min(n, static_cast<std::size_t>(cap));
    }
    return n;
}

namespace {

// Runs job(i) for i in [0, count) on up to worker_count() threads. Each job
// writes only its own slot, so results do not depend on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& job) {
    const std::size_t workers = std::min(worker_count(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::vector<std::exception_ptr> errors(count);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) {
                try {
                    job(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

}  // namespace

std::vector<SweepNRow> sweep_n(const Scenario& base, const std::vector<std::size_t>& ns, const GainSet& gains) {
    std::vector<SweepNRow> rows(ns.size());
    parallel_for(ns.size(), [&](std::size_t j) {
        Scenario s = base;
        s.n = ns[j];
        s.gammas.reset();
        s.record_stride = 0;
        const SimResult r = integrate(s, gains);
        SweepNRow& row = rows[j];
        row.n = ns[j];
        row.max_sup_l2_physical = max_of(r.sup_l2_physical);
        row.max_sup_inf_physical = max_of(r.sup_inf_physical);
        row.max_sup_l2_shifted = max_of(r.sup_l2_shifted);
        row.final_sup_l2_physical = r.sup_l2_physical.back();
        row.final_sup_position = r.sup_position.back();
        row.diverged = r.diverged;
    });
    return rows;
}

std::vector<TauReport> sweep_tau(const Scenario& base, const std::vector<TauRule>& rules, const GainSet& gains) {
    std::vector<TauReport> out(rules.size());
    parallel_for(rules.size(), [&](std::size_t j) {
        Scenario s = base;
        s.tau_rule = rules[j];
        s.record_stride = 0;
        TauReport& rep = out[j];
        rep.rule = rules[j];
        const auto params = s.vehicle_params();
        const HeteroReport hetero =
            check_conditions_hetero(params, GainBounds::exact(s.effective_gains(gains)), build_T(s.alphas));
        rep.certificate = hetero.certificate;
        rep.c2_failing = hetero.failing;
        rep.conditions_pass = hetero.certificate.valid() && hetero.all_c2_pass();

        const SimResult r = integrate(s, gains);
        rep.diverged = r.diverged;
        rep.max_sup = max_of(r.sup_inf_physical);
        rep.max_sup_l2 = max_of(r.sup_l2_physical);
        rep.sup_at_10s = r.at_time(r.sup_inf_physical, 10.0);
        rep.final_sup = r.sup_inf_physical.back();
    });
    return out;
}

}  // namespace platoon
