#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "platoon/controller.hpp"
#include "platoon/dss.hpp"
#include "platoon/model.hpp"

namespace platoon {

/// Actuator time constant per vehicle: either a constant, or value * (1.1 - Gamma_i).
struct TauRule {
    enum class Kind { constant, scaled };
    Kind kind = Kind::constant;
    double value = 1.0;

    [[nodiscard]] double tau_for(double gamma) const;
    /// "const:1" or "scaled:0.5".
    [[nodiscard]] std::string label() const;
    static TauRule parse(const std::string& text);

    friend bool operator==(const TauRule&, const TauRule&) = default;
};

enum class ControllerVariant {
    c1,  // integral controller
    c2,  // same h-couplings, no integral action
};

const char* to_string(ControllerVariant v);
ControllerVariant parse_controller(const std::string& text);
const char* to_string(FirstVehicleCoupling c);
FirstVehicleCoupling parse_first_vehicle(const std::string& text);

struct Scenario {
    std::size_t n = 10;
    double horizon = 100.0;  // s
    double dt = 0.01;        // s
    std::uint64_t seed = 42;
    double delta = 10.0;  // m
    double q0_0 = 0.0;    // m
    double v0 = 20.0;     // m/s
    TauRule tau_rule;
    double mass = 1.0;
    double epsilon = 1.0;
    ControllerVariant controller = ControllerVariant::c1;
    GainSet gains = GainSet::published();
    TransformParams alphas = TransformParams::published();
    bool time_varying = true;
    bool constant = true;
    FirstVehicleCoupling first_vehicle = FirstVehicleCoupling::leader_only;
    double zeta0 = 0.0;
    /// Store full platoon snapshots every this many steps; 0 stores none.
    std::size_t record_stride = 10;
    /// Explicit Gamma_i, overriding the seeded draw.
    std::optional<std::vector<double>> gammas;

    /// Throws ConfigError.
    void validate() const;
    [[nodiscard]] std::size_t steps() const;
    [[nodiscard]] std::vector<double> resolve_gammas() const;
    [[nodiscard]] std::vector<VehicleParams> vehicle_params() const;
    /// Gains as applied by the selected controller variant.
    [[nodiscard]] GainSet effective_gains(const GainSet& gains) const;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

PlatoonModel make_model(const Scenario& scenario, const GainSet& gains);

/// x_i(0) = (q0(0) - delta_{i,0} + Gamma_i, v0 + Gamma_i, 0), zeta_i(0) = zeta0.
std::vector<VehicleState> init_scenario(const Scenario& scenario);

struct SimResult {
    PlatoonModel model;
    double dt = 0.0;

    // One entry per integration step, including t = 0.
    std::vector<double> times;
    std::vector<double> sup_l2_physical;
    std::vector<double> sup_inf_physical;
    std::vector<double> sup_l2_shifted;
    std::vector<double> sup_inf_shifted;
    std::vector<double> sup_position;

    // Snapshots every record_stride steps.
    std::vector<double> record_times;
    std::vector<std::vector<VehicleState>> states;
    std::vector<std::vector<double>> inputs;  // u_bar_i

    bool diverged = false;
    double diverged_at = 0.0;

    [[nodiscard]] std::size_t steps() const { return times.size(); }
    /// Value of a per-step series at the step closest to t.
    [[nodiscard]] double at_time(const std::vector<double>& series, double t) const;
    /// e_{i,i-1} = q_{i-1} - q_i - delta_{i,i-1} per snapshot; vehicle 1 measures against the reference.
    [[nodiscard]] std::vector<double> displacement(std::size_t i) const;
};

/// Classical fixed-step RK4 from the given initial platoon.
SimResult integrate_from(const PlatoonModel& model, std::vector<VehicleState> initial, double horizon, double dt,
                         std::size_t record_stride);

SimResult integrate(const Scenario& scenario, const GainSet& gains);
SimResult integrate(const Scenario& scenario);

/// Worker count for sweeps; PLATOON_DSS_THREADS caps it.
std::size_t worker_count();

struct SweepNRow {
    std::size_t n = 0;
    double max_sup_l2_physical = 0.0;
    double max_sup_inf_physical = 0.0;
    double max_sup_l2_shifted = 0.0;
    double final_sup_l2_physical = 0.0;
    double final_sup_position = 0.0;
    bool diverged = false;
};

/// Vehicle i uses Gamma drawn from seed + i, so platoons of different length
/// share their leading vehicles' disturbances.
std::vector<SweepNRow> sweep_n(const Scenario& base, const std::vector<std::size_t>& ns, const GainSet& gains);

struct TauReport {
    TauRule rule;
    DssCertificate certificate;
    std::vector<std::size_t> c2_failing;  // 1-based
    bool conditions_pass = false;
    bool diverged = false;
    double max_sup = 0.0;     // physical inf-norm
    double sup_at_10s = 0.0;  // physical inf-norm
    double final_sup = 0.0;   // physical inf-norm
    double max_sup_l2 = 0.0;

    [[nodiscard]] double growth_ratio() const { return sup_at_10s > 0.0 ? final_sup / sup_at_10s : 0.0; }
};

std::vector<TauReport> sweep_tau(const Scenario& base, const std::vector<TauRule>& rules, const GainSet& gains);

}  // namespace platoon
