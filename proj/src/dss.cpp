#include "platoon/dss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "platoon/tolerances.hpp"

namespace platoon {

bool DssCertificate::valid() const {
    return margins.c1 && c_sq > 0.0 && b > 0.0 && c_bar_sq > 0.0 && margins.c3 > 0.0 && std::isfinite(c_bar_sq);
}

namespace {

struct Extremes {
    double mu2 = -std::numeric_limits<double>::infinity();
    double b = 0.0;
};

Extremes vehicle_extremes(const VehicleParams& p, const GainBounds& gains, const Mat4& T) {
    Extremes e;
    for (const GainSet* g : {&gains.lower, &gains.upper}) {
        const JacobianBlocks j = jacobian_blocks(p, *g, p.epsilon, T);
        e.mu2 = std::max(e.mu2, mu2(j.own));
        e.b = std::max({e.b, spectral_norm(j.pred), spectral_norm(j.foll)});
    }
    return e;
}

double require_invertible(const Mat4& T) {
    const Vec4 s = singular_values(T);
    if (!(s[0] > tol::kSingular * std::max(1.0, s[3]))) throw SingularTransform("transform T is not invertible");
    return s[3] / s[0];
}

}  // namespace

DssCertificate check_conditions(std::span<const VehicleParams> vehicles, const GainBounds& gains, const Mat4& T) {
    return check_conditions_hetero(vehicles, gains, T).certificate;
}

DssCertificate check_conditions(std::span<const VehicleParams> vehicles, const GainBounds& gains,
                                const TransformParams& alphas) {
    return check_conditions(vehicles, gains, build_T(alphas));
}

HeteroReport check_conditions_hetero(std::span<const VehicleParams> vehicles, const GainBounds& gains,
                                     const Mat4& T) {
    if (vehicles.empty()) throw ConfigError("check_conditions needs at least one vehicle");
    const double k_cond = require_invertible(T);

    HeteroReport report;
    report.vehicles.reserve(vehicles.size());
    DssCertificate& cert = report.certificate;
    double worst_mu2 = -std::numeric_limits<double>::infinity();

    for (std::size_t i = 0; i < vehicles.size(); ++i) {
        const VehicleParams& p = vehicles[i];
        p.validate();
        const Extremes e = vehicle_extremes(p, gains, T);
        VehicleCondition vc{i + 1, p.tau, p.mass, e.mu2, e.b};
        if (!vc.c2_pass()) report.failing.push_back(i + 1);
        report.vehicles.push_back(vc);

        // Strict comparisons keep the lowest index on ties.
        if (e.mu2 > worst_mu2) {
            worst_mu2 = e.mu2;
            cert.worst_mu2_vehicle = i + 1;
        }
        if (i == 0 || e.b > cert.b) {
            cert.b = e.b;
            cert.worst_b_vehicle = i + 1;
        }
        cert.max_eps = std::max(cert.max_eps, p.epsilon);
    }

    cert.c_sq = -worst_mu2;
    cert.c_bar_sq = cert.c_sq - cert.b * (1.0 + cert.max_eps);
    cert.K_cond = k_cond;

    // Linear couplings of relative errors with no offsets vanish at the desired
    // configuration for every gain value.
    cert.margins.c1 = true;
    cert.margins.c2_mu = cert.c_sq;
    cert.margins.c2_b = cert.b;
    cert.margins.c_bar = cert.c_bar_sq;
    cert.margins.c3 = cert.b > 0.0 ? cert.c_sq / cert.b - 1.0 - cert.max_eps
                                   : -std::numeric_limits<double>::infinity();
    return report;
}

const char* to_string(BoundVariant v) {
    switch (v) {
        case BoundVariant::eq12: return "eq12";
        case BoundVariant::eq13: return "eq13";
        case BoundVariant::eq14: return "eq14";
    }
    return "?";
}

double bound_value(const DssCertificate& cert, const BoundInputs& in, BoundVariant variant, double t) {
    const double rate = cert.c_bar_sq;
    if (!(rate > 0.0) || !std::isfinite(rate))
        throw InvalidCertificate("bound envelope needs c_bar_sq > 0 (got " + std::to_string(rate) + ")");
    const double decay = std::exp(-rate * t);
    // -expm1 keeps (1 - e^{-rt}) accurate for small rt.
    const double growth = -std::expm1(-rate * t) / rate;
    switch (variant) {
        case BoundVariant::eq12:
            return decay * in.initial_sup + growth * in.w_sup;
        case BoundVariant::eq13:
            return cert.K_cond * (decay * in.initial_sup + growth * in.w_sup);
        case BoundVariant::eq14:
            return cert.K_cond * (decay * (in.initial_sup + in.xi0_sup) + growth * in.w_sup);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

BoundEnvelope bound_envelope(const DssCertificate& cert, const BoundInputs& in, BoundVariant variant,
                             std::span<const double> times) {
    BoundEnvelope env;
    env.variant = variant;
    env.times.assign(times.begin(), times.end());
    env.values.reserve(times.size());
    for (double t : times) env.values.push_back(bound_value(cert, in, variant, t));
    return env;
}

double sup_error(const PlatoonModel& model, std::span<const VehicleState> states, double t,
                 ErrorCoordinate coordinate, ErrorNorm norm) {
    double sup = 0.0;
    for (std::size_t i = 1; i <= states.size(); ++i) {
        const VehicleState desired = desired_configuration(i, t, model.reference, model.spacing);
        const VehicleState& s = states[i - 1];
        Vec4 e{};
        if (coordinate == ErrorCoordinate::physical) {
            e = {s.q - desired.q, s.v - desired.v, s.f - desired.f, 0.0};
        } else {
            e = shifted_error(s, model.disturbance.constant_part(i), model.gains.k, desired);
        }
        sup = std::max(sup, norm == ErrorNorm::l2 ? norm2(e) : norm_inf(e));
    }
    return sup;
}

double sup_position_error(const PlatoonModel& model, std::span<const VehicleState> states, double t) {
    double sup = 0.0;
    for (std::size_t i = 1; i <= states.size(); ++i)
        sup = std::max(sup, std::abs(states[i - 1].q - desired_configuration(i, t, model.reference, model.spacing).q));
    return sup;
}

std::vector<double> dss_metric(const PlatoonModel& model, std::span<const double> times,
                               std::span<const std::vector<VehicleState>> states, ErrorCoordinate coordinate,
                               ErrorNorm norm) {
    if (times.size() != states.size()) throw ConfigError("dss_metric: times and states differ in length");
    std::vector<double> out;
    out.reserve(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) out.push_back(sup_error(model, states[k], times[k], coordinate, norm));
    return out;
}

}  // namespace platoon
