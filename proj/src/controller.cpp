#include "platoon/controller.hpp"

#include <cmath>

namespace platoon {

GainSet GainSet::published() {
    GainSet g;
    g.kp1 = 0.001;
    g.kp2 = 0.001;
    g.kv = 0.001;
    g.kp0 = 0.4631;
    g.kv0 = 0.7;
    g.k = 0.1436;
    g.gp1 = 0.001;
    g.gp2 = 0.001;
    g.gv = 0.001;
    g.gp0 = 0.1430;
    g.gv0 = 0.3082;
    return g;
}

GainSet GainSet::without_integral() const {
    GainSet g = *this;
    g.k = 0.0;
    g.gp1 = g.gp2 = g.gv = g.gp0 = g.gv0 = 0.0;
    return g;
}

std::array<double, GainSet::kSize> GainSet::to_array() const {
    return {kp1, kp2, kv, kp0, kv0, k, gp1, gp2, gv, gp0, gv0};
}

GainSet GainSet::from_array(const std::array<double, kSize>& a) {
    GainSet g;
    g.kp1 = a[0];
    g.kp2 = a[1];
    g.kv = a[2];
    g.kp0 = a[3];
    g.kv0 = a[4];
    g.k = a[5];
    g.gp1 = a[6];
    g.gp2 = a[7];
    g.gv = a[8];
    g.gp0 = a[9];
    g.gv0 = a[10];
    return g;
}

bool GainSet::all_finite() const {
    for (double v : to_array())
        if (!std::isfinite(v)) return false;
    return true;
}

namespace {

// Position and velocity errors shared by the h and g couplings.
struct RelativeErrors {
    double pred_q = 0.0, pred_v = 0.0;
    double foll_q = 0.0, foll_v = 0.0;
    double lead_q = 0.0, lead_v = 0.0;
    bool has_pred = false, has_foll = false;
};

RelativeErrors relative_errors(const NeighborView& view, const SpacingPolicy& spacing) {
    RelativeErrors e;
    const auto i = view.index;
    if (view.predecessor) {
        e.has_pred = true;
        e.pred_q = view.predecessor->q - view.own.q - spacing.gap(i);
        e.pred_v = view.predecessor->v - view.own.v;
    }
    if (view.follower) {
        e.has_foll = true;
        e.foll_q = view.follower->q - view.own.q + spacing.gap(i + 1);
        e.foll_v = view.follower->v - view.own.v;
    }
    e.lead_q = view.q0 - view.own.q - spacing.to_reference(i);
    e.lead_v = view.v0 - view.own.v;
    return e;
}

Couplings linear_couplings(const RelativeErrors& e, double p1, double p2, double v, double p0, double v0) {
    Couplings c;
    if (e.has_pred) c.pred = p1 * e.pred_q + v * e.pred_v;
    if (e.has_foll) c.foll = p2 * e.foll_q + v * e.foll_v;
    c.leader = p0 * e.lead_q + v0 * e.lead_v;
    return c;
}

Mat4 transform_inverse(const Mat4& t) {
    try {
        return unit_triangular_inverse(t);
    } catch (const NotUnitTriangular&) {
        return inverse(t);
    }
}

}  // namespace

Couplings coupling_h(const NeighborView& view, const GainSet& g, const SpacingPolicy& spacing) {
    return linear_couplings(relative_errors(view, spacing), g.kp1, g.kp2, g.kv, g.kp0, g.kv0);
}

Couplings coupling_g(const NeighborView& view, const GainSet& g, const SpacingPolicy& spacing) {
    return linear_couplings(relative_errors(view, spacing), g.gp1, g.gp2, g.gv, g.gp0, g.gv0);
}

ControlOutput control_input(const NeighborView& view, const GainSet& gains, double eps,
                            const SpacingPolicy& spacing) {
    const RelativeErrors e = relative_errors(view, spacing);
    const Couplings h = linear_couplings(e, gains.kp1, gains.kp2, gains.kv, gains.kp0, gains.kv0);
    const Couplings g = linear_couplings(e, gains.gp1, gains.gp2, gains.gv, gains.gp0, gains.gv0);
    ControlOutput out;
    out.u_bar = h.pred + eps * h.foll + h.leader + gains.k * view.own.zeta;
    out.zeta_dot = g.pred + eps * g.foll + g.leader;
    return out;
}

Mat4 build_T(const TransformParams& a) {
    Mat4 t = Mat4::identity();
    t(0, 1) = a.alpha1;
    t(1, 2) = a.alpha2;
    t(1, 3) = a.alpha3;
    t(2, 3) = a.alpha4;
    if (!t.all_finite()) throw NonFinite("build_T: non-finite alpha");
    return t;
}

Mat4 build_phi(const VehicleParams& p) {
    p.validate();
    Mat4 phi;
    phi(0, 1) = 1.0;
    phi(1, 2) = 1.0 / p.mass;
    phi(2, 2) = -1.0 / p.tau;
    return phi;
}

JacobianBlocks jacobian_blocks(const VehicleParams& params, const GainSet& g, double eps, const Mat4& T) {
    const double inv_tau = 1.0 / params.tau;

    Mat4 own = build_phi(params);
    own(2, 0) -= inv_tau * (g.kp1 + eps * g.kp2 + g.kp0);
    own(2, 1) -= inv_tau * (g.kv * (1.0 + eps) + g.kv0);
    own(2, 3) += inv_tau * g.k;
    own(3, 0) -= g.gp1 + eps * g.gp2 + g.gp0;
    own(3, 1) -= g.gv * (1.0 + eps) + g.gv0;

    Mat4 pred;
    pred(2, 0) = inv_tau * g.kp1;
    pred(2, 1) = inv_tau * g.kv;
    pred(3, 0) = g.gp1;
    pred(3, 1) = g.gv;

    Mat4 foll;
    foll(2, 0) = inv_tau * g.kp2;
    foll(2, 1) = inv_tau * g.kv;
    foll(3, 0) = g.gp2;
    foll(3, 1) = g.gv;

    const Mat4 t_inv = transform_inverse(T);
    return {T * own * t_inv, T * pred * t_inv, T * foll * t_inv};
}

void PlatoonModel::validate() const {
    const auto n = params.size();
    if (n == 0) throw ConfigError("platoon needs at least one vehicle");
    if (spacing.size() != n)
        throw ConfigError("spacing has " + std::to_string(spacing.size()) + " gaps for " + std::to_string(n) +
                          " vehicles");
    if (disturbance.gammas.size() != n)
        throw ConfigError("disturbance has " + std::to_string(disturbance.gammas.size()) + " entries for " +
                          std::to_string(n) + " vehicles");
    for (const auto& p : params) p.validate();
    if (!gains.all_finite()) throw ConfigError("gains must be finite");
}

NeighborView PlatoonModel::view(std::span<const VehicleState> states, std::size_t i, double t) const {
    NeighborView v;
    v.index = i;
    v.own = states[i - 1];
    v.q0 = reference.position(t);
    v.v0 = reference.v0;
    if (i > 1) {
        v.predecessor = states[i - 2];
    } else if (first_vehicle == FirstVehicleCoupling::reference_as_predecessor) {
        v.predecessor = VehicleState{v.q0, v.v0, 0.0, 0.0};
    }
    if (i < states.size()) v.follower = states[i];
    return v;
}

void closed_loop_derivative(const PlatoonModel& model, std::span<const VehicleState> states, double t,
                            std::span<VehicleState> out) {
    const auto n = model.size();
    if (states.size() != n || out.size() != n) throw ConfigError("state array length differs from platoon size");
    for (std::size_t i = 1; i <= n; ++i) {
        const auto& p = model.params[i - 1];
        const NeighborView view = model.view(states, i, t);
        const ControlOutput c = control_input(view, model.gains, p.epsilon, model.spacing);
        const auto d = model.disturbance.at(i, t);
        VehicleState dx = open_loop_derivative(view.own, p, c.u_bar, d.w + d.w_bar);
        dx.zeta = c.zeta_dot;
        out[i - 1] = dx;
    }
}

std::vector<VehicleState> closed_loop_derivative(const PlatoonModel& model, std::span<const VehicleState> states,
                                                 double t) {
    model.validate();
    std::vector<VehicleState> out(states.size());
    closed_loop_derivative(model, states, t, out);
    return out;
}

Vec4 shifted_error(const VehicleState& s, double w_bar, double k, const VehicleState& desired) {
    const double xi = k != 0.0 ? s.zeta + w_bar / k : s.zeta;
    return {s.q - desired.q, s.v - desired.v, s.f + w_bar - desired.f, xi - desired.zeta};
}

Vec4 to_transformed(const VehicleState& state, double w_bar, const GainSet& gains, const Mat4& T,
                    const VehicleState& desired) {
    if (gains.k == 0.0) throw std::invalid_argument("to_transformed: integral gain must be nonzero");
    return T * shifted_error(state, w_bar, gains.k, desired);
}

}  // namespace platoon
