#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "platoon/controller.hpp"
#include "platoon/dss.hpp"
#include "platoon/model.hpp"

namespace platoon {

/// Gain search at a single design point. Gains are shared by all vehicles.
struct SynthesisProblem {
    VehicleParams design;  // tau, mass, eps the gains are designed for
    TransformParams alphas = TransformParams::published();
    bool search_alphas = false;
    double alpha_lower = -2.0;
    double alpha_upper = 2.0;
    GainSet lower;  // box constraints, per gain
    GainSet upper;

    /// Box [0, 1] on every gain except k, which gets [0.01, 1].
    static SynthesisProblem default_box(const VehicleParams& design);
    /// Throws ConfigError on non-finite or inverted bounds.
    void validate() const;
};

struct SearchConfig {
    std::uint64_t seed = 1;
    std::size_t restarts = 16;
    std::size_t max_iterations = 2000;  // per restart
    double penalty = 1e3;
    double initial_step = 0.1;  // simplex edge as a fraction of the box width
    double reflection = 1.0;
    double expansion = 2.0;
    double contraction = 0.5;
    double shrink = 0.5;
    double tolerance = 1e-12;  // spread of simplex objective values
    std::optional<GainSet> warm_start;
    std::optional<TransformParams> warm_alphas;
};

struct SynthesisResult {
    GainSet gains;
    TransformParams alphas;
    DssCertificate certificate;
    std::size_t iterations = 0;  // summed over restarts
    std::size_t best_restart = 0;
    double objective = 0.0;
    bool feasible = false;
};

/// One slack per constraint, in the order
/// [J_ii,L]_s <= -c^2 I, [J_ii,U]_s <= -c^2 I, then ||J|| <= b for
/// (pred, L), (pred, U), (foll, L), (foll, U). Non-negative means satisfied.
/// The block constraint [[bI, J], [J^T, bI]] >= 0 has smallest eigenvalue
/// b - sigma_max(J), which is the slack reported.
std::array<double, 6> lmi_residuals(const GainBounds& gains, const TransformParams& alphas,
                                    const SynthesisProblem& problem, double c_sq, double b);
/// Same, at the tightest (c^2, b) of the gains' own certificate.
std::array<double, 6> lmi_residuals(const GainBounds& gains, const TransformParams& alphas,
                                    const SynthesisProblem& problem);

/// Penalised objective: -c_bar^2 + penalty * (max(0, -c^2)^2 + max(0, -c_bar^2)^2).
double synthesis_objective(const GainSet& gains, const TransformParams& alphas, const SynthesisProblem& problem,
                           double penalty);

SynthesisResult synthesize(const SynthesisProblem& problem, const SearchConfig& config = {});

// ============================================================================
// Derivative-free minimiser
// ============================================================================

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    std::size_t iterations = 0;
};

/// Nelder-Mead from an axis-aligned simplex around x0. The returned point is
/// the best vertex seen, so its value never exceeds f(x0).
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                             const std::vector<double>& step, const SearchConfig& config);

}  // namespace platoon
