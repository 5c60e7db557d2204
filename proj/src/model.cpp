#include "platoon/model.hpp"

#include <cmath>

namespace platoon {

void VehicleParams::validate() const {
    if (!(mass > 0.0) || !std::isfinite(mass)) throw ConfigError("vehicle mass must be positive");
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("actuator time constant must be positive");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ConfigError("follower weight must be non-negative");
}

SpacingPolicy::SpacingPolicy(std::vector<double> gaps) : gaps_(std::move(gaps)) {
    cumulative_.reserve(gaps_.size() + 1);
    for (double g : gaps_) {
        if (!(g > 0.0) || !std::isfinite(g)) throw ConfigError("spacing gaps must be positive");
        cumulative_.push_back(cumulative_.back() + g);
    }
}

SpacingPolicy SpacingPolicy::uniform(std::size_t n, double delta) {
    return SpacingPolicy(std::vector<double>(n, delta));
}

double SpacingPolicy::gap(std::size_t i) const {
    if (i == 0 || i > gaps_.size()) throw std::out_of_range("SpacingPolicy::gap index");
    return gaps_[i - 1];
}

double SpacingPolicy::to_reference(std::size_t i) const {
    if (i >= cumulative_.size()) throw std::out_of_range("SpacingPolicy::to_reference index");
    return cumulative_[i];
}

DisturbanceModel::Sample DisturbanceModel::at(std::size_t i, double t) const {
    const double gamma = gammas.at(i - 1);
    Sample s;
    if (time_varying) s.w = gamma * std::sin(std::exp(-0.1 * t));
    if (constant) s.w_bar = 1.0 + gamma;
    return s;
}

double DisturbanceModel::constant_part(std::size_t i) const {
    return constant ? 1.0 + gammas.at(i - 1) : 0.0;
}

double DisturbanceModel::time_varying_sup(std::size_t i) const {
    // exp(-0.1 t) sweeps (0, 1] for t >= 0 and sin is increasing there.
    return time_varying ? std::abs(gammas.at(i - 1)) * std::sin(1.0) : 0.0;
}

DisturbanceModel::Sample disturbance_at(const DisturbanceModel& model, std::size_t i, double t) {
    return model.at(i, t);
}

std::vector<double> draw_gammas(std::uint64_t seed, std::size_t n) {
    Lcg64 rng(seed);
    std::vector<double> out(n);
    for (auto& g : out) g = rng.next_unit();
    return out;
}

std::vector<double> vehicle_gammas(std::uint64_t seed, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = Lcg64(seed + i + 1).next_unit();
    return out;
}

VehicleState open_loop_derivative(const VehicleState& s, const VehicleParams& p, double u_bar, double d_bar) {
    VehicleState d;
    d.q = s.v;
    d.v = (s.f + d_bar) / p.mass;
    d.f = (u_bar - s.f) / p.tau;
    return d;
}

VehicleState desired_configuration(std::size_t i, double t, const ReferenceTrajectory& ref,
                                   const SpacingPolicy& spacing) {
    if (i == 0) throw std::out_of_range("desired_configuration: vehicle index starts at 1");
    VehicleState x;
    x.q = ref.position(t) - spacing.to_reference(i);
    x.v = ref.v0;
    return x;
}

}  // namespace platoon
