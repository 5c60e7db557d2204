#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace platoon {

struct ConfigError : std::invalid_argument {
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Per-vehicle physical parameters.
struct VehicleParams {
    double mass = 1.0;     // kg
    double tau = 1.0;      // s, actuator time constant
    double epsilon = 1.0;  // follower-coupling weight

    /// Throws ConfigError unless mass > 0, tau > 0, epsilon >= 0.
    void validate() const;
    friend bool operator==(const VehicleParams&, const VehicleParams&) = default;
};

/// Physical state of one vehicle plus its controller integrator.
struct VehicleState {
    double q = 0.0;     // m
    double v = 0.0;     // m/s
    double f = 0.0;     // N
    double zeta = 0.0;  // N*s

    friend bool operator==(const VehicleState&, const VehicleState&) = default;
};

/// Virtual leader moving at constant speed.
struct ReferenceTrajectory {
    double q0_initial = 0.0;  // m
    double v0 = 20.0;         // m/s

    [[nodiscard]] double position(double t) const { return q0_initial + v0 * t; }
};

/// Constant-spacing policy. gaps[j] is the desired distance between vehicle j
/// and vehicle j+1, with vehicle 0 being the reference.
class SpacingPolicy {
public:
    SpacingPolicy() = default;
    explicit SpacingPolicy(std::vector<double> gaps);
    static SpacingPolicy uniform(std::size_t n, double delta);

    [[nodiscard]] std::size_t size() const { return gaps_.size(); }
    /// delta_{i,i-1}, for 1 <= i <= size().
    [[nodiscard]] double gap(std::size_t i) const;
    /// delta_{i,0}: cumulative distance from the reference, for 0 <= i <= size().
    [[nodiscard]] double to_reference(std::size_t i) const;
    [[nodiscard]] const std::vector<double>& gaps() const { return gaps_; }

private:
    std::vector<double> gaps_;
    std::vector<double> cumulative_{0.0};
};

/// Disturbance per vehicle: time-varying w_i(t) = Gamma_i sin(exp(-0.1 t)) and
/// constant w_bar_i = 1 + Gamma_i. Either part can be switched off.
struct DisturbanceModel {
    std::vector<double> gammas;
    bool time_varying = true;
    bool constant = true;

    struct Sample {
        double w = 0.0;      // m/s^2
        double w_bar = 0.0;  // m/s^2
    };

    /// Vehicle index i is 1-based.
    [[nodiscard]] Sample at(std::size_t i, double t) const;
    /// Constant part only; independent of time.
    [[nodiscard]] double constant_part(std::size_t i) const;
    /// Analytic bound on sup_t |w_i(t)|.
    [[nodiscard]] double time_varying_sup(std::size_t i) const;
};

DisturbanceModel::Sample disturbance_at(const DisturbanceModel& model, std::size_t i, double t);

// ============================================================================
// Deterministic random numbers
// ============================================================================

/// 64-bit LCG: state' = a*state + c (mod 2^64), output (state' >> 11) / 2^53.
class Lcg64 {
public:
    static constexpr std::uint64_t kMultiplier = 6364136223846793005ULL;
    static constexpr std::uint64_t kIncrement = 1442695040888963407ULL;

    explicit Lcg64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_raw() {
        state_ = kMultiplier * state_ + kIncrement;
        return state_;
    }
    /// Uniform in [0, 1).
    double next_unit() { return static_cast<double>(next_raw() >> 11) * 0x1.0p-53; }
    [[nodiscard]] std::uint64_t state() const { return state_; }

private:
    std::uint64_t state_;
};

/// N consecutive draws from one generator seeded with `seed`.
std::vector<double> draw_gammas(std::uint64_t seed, std::size_t n);

/// Gamma_i = first draw of a generator seeded with seed + i, i = 1..n. Vehicle i
/// sees the same value whatever the platoon length.
std::vector<double> vehicle_gammas(std::uint64_t seed, std::size_t n);

// ============================================================================
// Dynamics
// ============================================================================

/// Open-loop vehicle dynamics. The zeta slot of the result is left at zero for
/// the caller to fill with the integrator law.
VehicleState open_loop_derivative(const VehicleState& s, const VehicleParams& p, double u_bar, double d_bar);

/// x*_i(t) = (q0(t) - delta_{i,0}, v0, 0); integral target 0. i is 1-based.
VehicleState desired_configuration(std::size_t i, double t, const ReferenceTrajectory& ref,
                                   const SpacingPolicy& spacing);

}  // namespace platoon
