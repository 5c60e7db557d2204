#include "platoon/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "platoon/sim.hpp"

namespace platoon {

SynthesisProblem SynthesisProblem::default_box(const VehicleParams& design) {
    SynthesisProblem p;
    p.design = design;
    p.lower = GainSet::from_array({0, 0, 0, 0, 0, 0.01, 0, 0, 0, 0, 0});
    p.upper = GainSet::from_array({1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1});
    return p;
}

void SynthesisProblem::validate() const {
    design.validate();
    const auto lo = lower.to_array();
    const auto hi = upper.to_array();
    for (std::size_t i = 0; i < GainSet::kSize; ++i)
        if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || lo[i] > hi[i])
            throw ConfigError("gain box bound " + std::to_string(i) + " is not a finite interval");
    if (!std::isfinite(alpha_lower) || !std::isfinite(alpha_upper) || alpha_lower > alpha_upper)
        throw ConfigError("alpha box is not a finite interval");
}

std::array<double, 6> lmi_residuals(const GainBounds& gains, const TransformParams& alphas,
                                    const SynthesisProblem& problem, double c_sq, double b) {
    const Mat4 T = build_T(alphas);
    const double eps = problem.design.epsilon;
    const JacobianBlocks lo = jacobian_blocks(problem.design, gains.lower, eps, T);
    const JacobianBlocks hi = jacobian_blocks(problem.design, gains.upper, eps, T);
    return {
        -c_sq - mu2(lo.own),
        -c_sq - mu2(hi.own),
        b - spectral_norm(lo.pred),
        b - spectral_norm(hi.pred),
        b - spectral_norm(lo.foll),
        b - spectral_norm(hi.foll),
    };
}

std::array<double, 6> lmi_residuals(const GainBounds& gains, const TransformParams& alphas,
                                    const SynthesisProblem& problem) {
    const std::vector<VehicleParams> design{problem.design};
    const DssCertificate cert = check_conditions(design, gains, alphas);
    return lmi_residuals(gains, alphas, problem, cert.c_sq, cert.b);
}

double synthesis_objective(const GainSet& gains, const TransformParams& alphas, const SynthesisProblem& problem,
                           double penalty) {
    const std::vector<VehicleParams> design{problem.design};
    const DssCertificate cert = check_conditions(design, GainBounds::exact(gains), alphas);
    const double v1 = std::max(0.0, -cert.c_sq);
    const double v2 = std::max(0.0, -cert.c_bar_sq);
    return -cert.c_bar_sq + penalty * (v1 * v1 + v2 * v2);
}

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                             const std::vector<double>& step, const SearchConfig& cfg) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> simplex(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step[i];
    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i <= n; ++i) values[i] = f(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);
    std::size_t it = 0;
    for (; it < cfg.max_iterations; ++it) {
        std::iota(order.begin(), order.end(), 0);
        // Ties broken by vertex index so the run is reproducible.
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return values[a] < values[b] || (values[a] == values[b] && a < b);
        });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[n - 1];
        if (std::abs(values[worst] - values[best]) <= cfg.tolerance) break;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t v = 0; v <= n; ++v)
            if (v != worst)
                for (std::size_t d = 0; d < n; ++d) centroid[d] += simplex[v][d] / static_cast<double>(n);

        for (std::size_t d = 0; d < n; ++d)
            trial[d] = centroid[d] + cfg.reflection * (centroid[d] - simplex[worst][d]);
        const double f_reflect = f(trial);

        if (f_reflect < values[best]) {
            for (std::size_t d = 0; d < n; ++d)
                trial2[d] = centroid[d] + cfg.expansion * (trial[d] - centroid[d]);
            const double f_expand = f(trial2);
            if (f_expand < f_reflect) {
                simplex[worst] = trial2;
                values[worst] = f_expand;
            } else {
                simplex[worst] = trial;
                values[worst] = f_reflect;
            }
            continue;
        }
        if (f_reflect < values[second]) {
            simplex[worst] = trial;
            values[worst] = f_reflect;
            continue;
        }
        // Contraction: outside if the reflected point improved on the worst, inside otherwise.
        const bool outside = f_reflect < values[worst];
        const auto& toward = outside ? trial : simplex[worst];
        for (std::size_t d = 0; d < n; ++d) trial2[d] = centroid[d] + cfg.contraction * (toward[d] - centroid[d]);
        const double f_contract = f(trial2);
        if (f_contract < (outside ? f_reflect : values[worst])) {
            simplex[worst] = trial2;
            values[worst] = f_contract;
            continue;
        }
        for (std::size_t v = 0; v <= n; ++v) {
            if (v == best) continue;
            for (std::size_t d = 0; d < n; ++d)
                simplex[v][d] = simplex[best][d] + cfg.shrink * (simplex[v][d] - simplex[best][d]);
            values[v] = f(simplex[v]);
        }
    }

    std::size_t best = 0;
    for (std::size_t v = 1; v <= n; ++v)
        if (values[v] < values[best]) best = v;
    return {simplex[best], values[best], it};
}

namespace {

struct Decoder {
    const SynthesisProblem& problem;

    [[nodiscard]] std::size_t dims() const { return GainSet::kSize + (problem.search_alphas ? 4 : 0); }

    // Points outside the box are projected back onto it.
    [[nodiscard]] std::pair<GainSet, TransformParams> decode(const std::vector<double>& x) const {
        const auto lo = problem.lower.to_array();
        const auto hi = problem.upper.to_array();
        std::array<double, GainSet::kSize> g{};
        for (std::size_t i = 0; i < GainSet::kSize; ++i) g[i] = std::clamp(x[i], lo[i], hi[i]);
        TransformParams a = problem.alphas;
        if (problem.search_alphas) {
            auto clip = [&](double v) { return std::clamp(v, problem.alpha_lower, problem.alpha_upper); };
            a = {clip(x[11]), clip(x[12]), clip(x[13]), clip(x[14])};
        }
        return {GainSet::from_array(g), a};
    }

    [[nodiscard]] std::vector<double> encode(const GainSet& g, const TransformParams& a) const {
        const auto arr = g.to_array();
        std::vector<double> x(arr.begin(), arr.end());
        if (problem.search_alphas) x.insert(x.end(), {a.alpha1, a.alpha2, a.alpha3, a.alpha4});
        return x;
    }

    [[nodiscard]] std::vector<double> widths() const {
        const auto lo = problem.lower.to_array();
        const auto hi = problem.upper.to_array();
        std::vector<double> w(dims());
        for (std::size_t i = 0; i < GainSet::kSize; ++i) w[i] = hi[i] - lo[i];
        for (std::size_t i = GainSet::kSize; i < w.size(); ++i) w[i] = problem.alpha_upper - problem.alpha_lower;
        return w;
    }

    [[nodiscard]] std::vector<double> random_point(Lcg64& rng) const {
        const auto lo = problem.lower.to_array();
        const auto w = widths();
        std::vector<double> x(dims());
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double base = i < GainSet::kSize ? lo[i] : problem.alpha_lower;
            x[i] = base + w[i] * rng.next_unit();
        }
        return x;
    }
};

}  // namespace

SynthesisResult synthesize(const SynthesisProblem& problem, const SearchConfig& cfg) {
    problem.validate();
    const Decoder dec{problem};
    const auto objective = [&](const std::vector<double>& x) {
        const auto [g, a] = dec.decode(x);
        return synthesis_objective(g, a, problem, cfg.penalty);
    };

    std::vector<double> step = dec.widths();
    for (double& s : step) s = std::max(s * cfg.initial_step, 0.0);

    // Restarts are independent; the reduction keeps the lowest objective and,
    // on ties, the lowest restart index.
    const std::size_t restarts = std::max<std::size_t>(cfg.restarts, 1);
    SynthesisResult out;
    std::optional<NelderMeadResult> best;
    for (std::size_t r = 0; r < restarts; ++r) {
        std::vector<double> x0;
        if (r == 0 && cfg.warm_start) {
            x0 = dec.encode(*cfg.warm_start, cfg.warm_alphas.value_or(problem.alphas));
        } else {
            Lcg64 rng(cfg.seed + r);
            x0 = dec.random_point(rng);
        }
        NelderMeadResult res = nelder_mead(objective, std::move(x0), step, cfg);
        out.iterations += res.iterations;
        if (!best || res.value < best->value) {
            best = std::move(res);
            out.best_restart = r;
        }
    }

    const auto [gains, alphas] = dec.decode(best->x);
    out.gains = gains;
    out.alphas = alphas;
    out.objective = best->value;
    const std::vector<VehicleParams> design{problem.design};
    out.certificate = check_conditions(design, GainBounds::exact(gains), alphas);
    out.feasible = out.certificate.valid();
    return out;
}

}  // namespace platoon
