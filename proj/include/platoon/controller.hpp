#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "platoon/linalg.hpp"
#include "platoon/model.hpp"

namespace platoon {

/**
 * Gains of the linear coupling instantiation.
 *
 * The K-gains shape the force command u_bar (functions h), the G-gains the
 * integrator law zeta_dot (functions g). Suffix 1 is the predecessor coupling,
 * 2 the follower coupling, 0 the reference coupling.
 */
struct GainSet {
    double kp1 = 0.0;  // N/m
    double kp2 = 0.0;  // N/m
    double kv = 0.0;   // N*s/m
    double kp0 = 0.0;  // N/m
    double kv0 = 0.0;  // N*s/m
    double k = 0.0;    // integral gain
    double gp1 = 0.0;
    double gp2 = 0.0;
    double gv = 0.0;
    double gp0 = 0.0;
    double gv0 = 0.0;

    static constexpr std::size_t kSize = 11;

    /// Published design: integral controller synthesised for tau = m = eps = 1.
    static GainSet published();
    /// The same h-gains without integral action (k = 0, g = 0).
    [[nodiscard]] GainSet without_integral() const;

    [[nodiscard]] bool all_finite() const;
    [[nodiscard]] bool has_integral() const { return k != 0.0; }

    [[nodiscard]] std::array<double, kSize> to_array() const;
    static GainSet from_array(const std::array<double, kSize>& a);

    friend bool operator==(const GainSet&, const GainSet&) = default;
};

/// Lower and upper Jacobian-bound corners. Linear couplings give lower == upper.
struct GainBounds {
    GainSet lower;
    GainSet upper;

    static GainBounds exact(const GainSet& g) { return {g, g}; }
};

struct TransformParams {
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double alpha3 = 0.0;
    double alpha4 = 0.0;

    static TransformParams published() { return {0.8, 1.0, 0.7, -0.5}; }
    friend bool operator==(const TransformParams&, const TransformParams&) = default;
};

/// What vehicle 1 treats as its predecessor.
enum class FirstVehicleCoupling {
    leader_only,              // no predecessor term; the reference enters once, via the leader coupling
    reference_as_predecessor  // the reference is also coupled through the predecessor gains
};

/// Local information available to vehicle i.
struct NeighborView {
    std::size_t index = 1;  // 1-based
    VehicleState own;
    std::optional<VehicleState> predecessor;
    std::optional<VehicleState> follower;
    double q0 = 0.0;  // reference position at the current time
    double v0 = 0.0;
};

struct Couplings {
    double pred = 0.0;
    double foll = 0.0;
    double leader = 0.0;
};

Couplings coupling_h(const NeighborView& view, const GainSet& gains, const SpacingPolicy& spacing);
Couplings coupling_g(const NeighborView& view, const GainSet& gains, const SpacingPolicy& spacing);

struct ControlOutput {
    double u_bar = 0.0;     // N
    double zeta_dot = 0.0;  // N
};

ControlOutput control_input(const NeighborView& view, const GainSet& gains, double eps,
                            const SpacingPolicy& spacing);

Mat4 build_T(const TransformParams& alphas);
Mat4 build_phi(const VehicleParams& params);

struct JacobianBlocks {
    Mat4 own;   // J_{i,i}
    Mat4 pred;  // J_{i,i-1}
    Mat4 foll;  // J_{i,i+1}, without the eps weight
};

/// Jacobian blocks of the transformed closed loop, conjugated by T.
/// State order is (q, v, f + w_bar, zeta + w_bar/k).
JacobianBlocks jacobian_blocks(const VehicleParams& params, const GainSet& gains, double eps, const Mat4& T);

/// Everything the closed-loop vector field needs besides the states.
struct PlatoonModel {
    std::vector<VehicleParams> params;
    SpacingPolicy spacing;
    ReferenceTrajectory reference;
    DisturbanceModel disturbance;
    GainSet gains;
    FirstVehicleCoupling first_vehicle = FirstVehicleCoupling::leader_only;

    [[nodiscard]] std::size_t size() const { return params.size(); }
    /// Throws ConfigError if the per-vehicle inputs disagree on N.
    void validate() const;
    [[nodiscard]] NeighborView view(std::span<const VehicleState> states, std::size_t i, double t) const;
};

/// Physical-coordinate derivatives of all vehicles.
void closed_loop_derivative(const PlatoonModel& model, std::span<const VehicleState> states, double t,
                            std::span<VehicleState> out);
std::vector<VehicleState> closed_loop_derivative(const PlatoonModel& model,
                                                 std::span<const VehicleState> states, double t);

/// (q - q*, v - v*, f + w_bar, zeta + w_bar/k). With k == 0 the integrator is
/// not shifted.
Vec4 shifted_error(const VehicleState& state, double w_bar, double k, const VehicleState& desired);

/// T * shifted_error. Requires k != 0.
Vec4 to_transformed(const VehicleState& state, double w_bar, const GainSet& gains, const Mat4& T,
                    const VehicleState& desired);

}  // namespace platoon
