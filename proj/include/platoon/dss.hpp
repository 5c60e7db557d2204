#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "platoon/controller.hpp"
#include "platoon/linalg.hpp"
#include "platoon/model.hpp"

namespace platoon {

struct SingularTransform : std::domain_error {
    explicit SingularTransform(const std::string& what) : std::domain_error(what) {}
};

struct InvalidCertificate : std::domain_error {
    explicit InvalidCertificate(const std::string& what) : std::domain_error(what) {}
};

/// Slack of each sufficient condition; positive means satisfied.
struct ConditionMargins {
    bool c1 = false;      // couplings vanish at the desired configuration
    double c2_mu = 0.0;   // -max_i mu2(J_ii), i.e. c^2
    double c2_b = 0.0;    // b; must be positive
    double c3 = 0.0;      // min_i (c^2/b - 1 - eps_i)
    double c_bar = 0.0;   // c^2 - b(1 + max eps)
};

/**
 * Scalars extracted from the sufficient conditions.
 *
 * c_sq is the tightest admissible value, -max_i mu2(J_ii), over every vehicle
 * and both gain corners; b is the largest neighbour-block spectral norm.
 * K_cond = sigma_max(T) / sigma_min(T) converts transformed-coordinate bounds
 * back to the original coordinates.
 */
struct DssCertificate {
    double c_sq = 0.0;
    double b = 0.0;
    double c_bar_sq = 0.0;
    double K_cond = 1.0;
    double max_eps = 0.0;
    ConditionMargins margins;
    std::size_t worst_mu2_vehicle = 0;  // 1-based
    std::size_t worst_b_vehicle = 0;    // 1-based

    [[nodiscard]] bool valid() const;
};

DssCertificate check_conditions(std::span<const VehicleParams> vehicles, const GainBounds& gains, const Mat4& T);
DssCertificate check_conditions(std::span<const VehicleParams> vehicles, const GainBounds& gains,
                                const TransformParams& alphas);

struct VehicleCondition {
    std::size_t index = 0;  // 1-based
    double tau = 0.0;
    double mass = 0.0;
    double mu2 = 0.0;  // worst corner
    double b = 0.0;
    [[nodiscard]] bool c2_pass() const { return mu2 < 0.0 && b > 0.0; }
};

struct HeteroReport {
    std::vector<VehicleCondition> vehicles;
    std::vector<std::size_t> failing;  // 1-based indices failing C2
    DssCertificate certificate;

    [[nodiscard]] bool all_c2_pass() const { return failing.empty(); }
};

/// C2 per vehicle with each vehicle's own tau and mass.
HeteroReport check_conditions_hetero(std::span<const VehicleParams> vehicles, const GainBounds& gains,
                                     const Mat4& T);

// ============================================================================
// Analytical envelopes
// ============================================================================

enum class BoundVariant {
    eq12,  // no integral action: K = 1, full disturbance as input
    eq13,  // transformed coordinates, time-varying disturbance only
    eq14,  // original coordinates, extra initial-integrator term
};

const char* to_string(BoundVariant v);

struct BoundInputs {
    double initial_sup = 0.0;  // sup_i |error_i(0)|_2
    double w_sup = 0.0;        // sup_i ||disturbance_i||_inf
    double xi0_sup = 0.0;      // sup_i |zeta_i(0) + w_bar_i/k|, eq14 only
};

struct BoundEnvelope {
    BoundVariant variant = BoundVariant::eq13;
    std::vector<double> times;
    std::vector<double> values;
};

/// Throws InvalidCertificate if c_bar_sq <= 0.
double bound_value(const DssCertificate& cert, const BoundInputs& in, BoundVariant variant, double t);
BoundEnvelope bound_envelope(const DssCertificate& cert, const BoundInputs& in, BoundVariant variant,
                             std::span<const double> times);

// ============================================================================
// Trajectory metric
// ============================================================================

enum class ErrorCoordinate { physical, shifted };
enum class ErrorNorm { l2, inf };

/// sup_i |error_i(t)| for one time instant. Physical error is (q - q*, v - v*, f);
/// shifted error adds the integrator and offsets force by the constant disturbance.
double sup_error(const PlatoonModel& model, std::span<const VehicleState> states, double t,
                 ErrorCoordinate coordinate, ErrorNorm norm);

/// sup_i |q_i - q*_i|.
double sup_position_error(const PlatoonModel& model, std::span<const VehicleState> states, double t);

/// Time series of sup_error over a recorded trajectory.
std::vector<double> dss_metric(const PlatoonModel& model, std::span<const double> times,
                               std::span<const std::vector<VehicleState>> states, ErrorCoordinate coordinate,
                               ErrorNorm norm = ErrorNorm::l2);

}  // namespace platoon
