// platoon-dss: certificate checks, gain synthesis and platoon simulations.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "platoon/io.hpp"

namespace fs = std::filesystem;
using namespace platoon;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitDiverged = 3;

struct Options {
    std::string scenario_path;
    std::string gains_path;
    std::string out_dir;
    std::optional<std::size_t> n;
    std::optional<std::uint64_t> seed;
    std::optional<double> dt;
    std::optional<double> horizon;
    std::optional<std::string> controller;
    std::vector<std::string> tau_rules;
    std::string norm = "l2";

    std::vector<std::size_t> ns{10, 50, 100};
    std::size_t restarts = SearchConfig{}.restarts;
    std::size_t iterations = SearchConfig{}.max_iterations;
    bool search_alphas = false;
};

// A gains file holds either a bare gain object or {"gains": {...}, "alphas": [...]}.
void load_gains(const std::string& path, GainSet& gains, TransformParams& alphas) {
    const Json j = read_json_file(path);
    if (j.is_object() && j.contains("gains")) {
        gains = gains_from_json(j.at("gains"));
        if (j.contains("alphas")) alphas = alphas_from_json(j.at("alphas"));
    } else {
        gains = gains_from_json(j);
    }
}

Scenario load_scenario(const Options& o) {
    Scenario s;
    if (!o.scenario_path.empty()) s = scenario_from_json(read_json_file(o.scenario_path));
    if (!o.gains_path.empty()) load_gains(o.gains_path, s.gains, s.alphas);
    if (o.n) {
        s.n = *o.n;
        s.gammas.reset();
    }
    if (o.seed) s.seed = *o.seed;
    if (o.dt) s.dt = *o.dt;
    if (o.horizon) s.horizon = *o.horizon;
    if (o.controller) s.controller = parse_controller(*o.controller);
    if (o.tau_rules.size() == 1) s.tau_rule = TauRule::parse(o.tau_rules.front());
    return s;
}

fs::path output_dir(const Options& o) {
    const fs::path dir = o.out_dir.empty() ? fs::path(".") : fs::path(o.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir)) throw ConfigError("cannot create output directory " + dir.string());
    return dir;
}

template <typename Writer>
void write_file(const fs::path& path, Writer&& writer) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    writer(out);
}

void print_certificate(const DssCertificate& c) {
    std::printf("c^2      = %.12g\n", c.c_sq);
    std::printf("b        = %.12g\n", c.b);
    std::printf("c_bar^2  = %.12g\n", c.c_bar_sq);
    std::printf("K        = %.12g\n", c.K_cond);
    std::printf("C1 %s, C2 %s, C3 %s\n", c.margins.c1 ? "pass" : "FAIL",
                c.c_sq > 0.0 && c.b > 0.0 ? "pass" : "FAIL", c.margins.c3 > 0.0 ? "pass" : "FAIL");
    std::printf("certificate %s\n", c.valid() ? "VALID" : "INVALID");
}

Json manifest_base(const char* command, const Scenario& s, const GainSet& gains) {
    return Json{{"command", command},
                {"seed", s.seed},
                {"dt_s", s.dt},
                {"horizon_s", s.horizon},
                {"controller", to_string(s.controller)},
                {"gains", to_json(gains)},
                {"alphas", to_json(s.alphas)},
                {"scenario", to_json(s)}};
}

int cmd_verify(const Options& o) {
    const Scenario s = load_scenario(o);
    const GainSet gains = s.effective_gains(s.gains);
    const auto params = s.vehicle_params();
    const HeteroReport rep = check_conditions_hetero(params, GainBounds::exact(gains), build_T(s.alphas));
    print_certificate(rep.certificate);
    if (!rep.failing.empty()) std::printf("vehicles failing C2: %zu of %zu\n", rep.failing.size(), params.size());

    const Json cert = to_json(rep.certificate);
    if (o.out_dir.empty()) {
        std::cout << cert.dump(2) << '\n';
    } else {
        const fs::path dir = output_dir(o);
        write_json_file(dir / "certificate.json", cert);
        Json manifest = manifest_base("verify", s, gains);
        manifest["certificate"] = to_json(rep);
        manifest["condition_failed"] = !(rep.certificate.valid() && rep.all_c2_pass());
        write_json_file(dir / "manifest.json", manifest);
    }
    return rep.certificate.valid() && rep.all_c2_pass() ? kExitOk : kExitInvalid;
}

int cmd_synthesize(const Options& o) {
    const Scenario s = load_scenario(o);
    SynthesisProblem problem = SynthesisProblem::default_box({s.mass, s.tau_rule.value, s.epsilon});
    problem.alphas = s.alphas;
    problem.search_alphas = o.search_alphas;
    SearchConfig cfg;
    if (o.seed) cfg.seed = *o.seed;
    cfg.restarts = o.restarts;
    cfg.max_iterations = o.iterations;

    const SynthesisResult r = synthesize(problem, cfg);
    print_certificate(r.certificate);
    std::printf("best restart %zu, %zu iterations, objective %.6g\n", r.best_restart, r.iterations, r.objective);

    const fs::path dir = output_dir(o);
    write_json_file(dir / "gains.json", Json{{"gains", to_json(r.gains)}, {"alphas", to_json(r.alphas)}});
    write_json_file(dir / "certificate.json", to_json(r.certificate));
    write_json_file(dir / "manifest.json", Json{{"command", "synthesize"},
                                                {"seed", cfg.seed},
                                                {"problem", to_json(problem)},
                                                {"search", to_json(cfg)},
                                                {"result", to_json(r)},
                                                {"condition_failed", !r.feasible}});
    return r.feasible ? kExitOk : kExitInvalid;
}

int cmd_simulate(const Options& o) {
    Scenario s = load_scenario(o);
    s.validate();
    const ErrorNorm norm = o.norm == "inf" ? ErrorNorm::inf : ErrorNorm::l2;
    const GainSet applied = s.effective_gains(s.gains);
    const HeteroReport rep = check_conditions_hetero(s.vehicle_params(), GainBounds::exact(applied), build_T(s.alphas));

    const SimResult run = integrate(s);
    const EnvelopeSet env = envelope_inputs(run, s, s.gains);

    const fs::path dir = output_dir(o);
    write_file(dir / "norms.csv", [&](std::ostream& os) { write_norms_csv(os, run, env); });
    write_file(dir / "bounds.csv", [&](std::ostream& os) { write_bounds_csv(os, run, env); });
    write_file(dir / "displacements.csv", [&](std::ostream& os) { write_displacements_csv(os, run); });
    write_file(dir / "states.csv", [&](std::ostream& os) { write_states_csv(os, run); });
    write_file(dir / "control.csv", [&](std::ostream& os) { write_control_csv(os, run); });

    const auto& series = norm == ErrorNorm::l2 ? run.sup_l2_physical : run.sup_inf_physical;
    Json manifest = manifest_base("simulate", s, applied);
    manifest["certificate"] = to_json(rep);
    manifest["condition_failed"] = !(rep.certificate.valid() && rep.all_c2_pass());
    manifest["diverged"] = run.diverged;
    if (run.diverged) manifest["diverged_at_s"] = run.diverged_at;
    manifest["norm"] = o.norm;
    manifest["final_sup_error"] = series.back();
    manifest["final_sup_position_m"] = run.sup_position.back();
    write_json_file(dir / "manifest.json", manifest);

    std::printf("t = %g s: sup error (%s) %.6g, sup position error %.6g m%s\n", run.times.back(), o.norm.c_str(),
                series.back(), run.sup_position.back(), run.diverged ? " [diverged]" : "");
    return run.diverged ? kExitDiverged : kExitOk;
}

int cmd_sweep_n(const Options& o) {
    Scenario s = load_scenario(o);
    s.validate();
    const auto rows = sweep_n(s, o.ns, s.gains);
    const fs::path dir = output_dir(o);
    write_file(dir / "summary.csv", [&](std::ostream& os) { write_sweep_n_csv(os, rows); });

    bool diverged = false;
    Json per_n = Json::array();
    for (const auto& r : rows) {
        diverged = diverged || r.diverged;
        per_n.push_back({{"n", r.n}, {"diverged", r.diverged}, {"max_sup_l2_physical", r.max_sup_l2_physical}});
        std::printf("N = %zu: max sup error %.6g%s\n", r.n, r.max_sup_l2_physical, r.diverged ? " [diverged]" : "");
    }
    Json manifest = manifest_base("sweep-n", s, s.effective_gains(s.gains));
    manifest["runs"] = per_n;
    manifest["diverged"] = diverged;
    write_json_file(dir / "manifest.json", manifest);
    return diverged ? kExitDiverged : kExitOk;
}

int cmd_sweep_tau(const Options& o) {
    Options base = o;
    base.tau_rules.clear();
    Scenario s = load_scenario(base);
    s.validate();
    std::vector<TauRule> rules;
    for (const auto& text : o.tau_rules) rules.push_back(TauRule::parse(text));
    if (rules.empty()) rules = {TauRule::parse("scaled:0.5"), TauRule::parse("scaled:1.5")};

    const auto reports = sweep_tau(s, rules, s.gains);
    const fs::path dir = output_dir(o);
    write_file(dir / "summary.csv", [&](std::ostream& os) { write_sweep_tau_csv(os, reports); });

    bool diverged = false, failed = false;
    Json per_rule = Json::array();
    for (const auto& r : reports) {
        diverged = diverged || r.diverged;
        failed = failed || !r.conditions_pass;
        per_rule.push_back({{"rule", r.rule.label()},
                            {"conditions_pass", r.conditions_pass},
                            {"c2_failing", r.c2_failing},
                            {"certificate", to_json(r.certificate)},
                            {"diverged", r.diverged},
                            {"sup_at_10s", r.sup_at_10s},
                            {"final_sup", r.final_sup},
                            {"growth_ratio", r.growth_ratio()}});
        std::printf("%s: conditions %s, %zu vehicles fail C2, growth x%.3g%s\n", r.rule.label().c_str(),
                    r.conditions_pass ? "pass" : "fail", r.c2_failing.size(), r.growth_ratio(),
                    r.diverged ? " [diverged]" : "");
    }
    Json manifest = manifest_base("sweep-tau", s, s.effective_gains(s.gains));
    manifest["runs"] = per_rule;
    manifest["diverged"] = diverged;
    manifest["condition_failed"] = failed;
    write_json_file(dir / "manifest.json", manifest);
    return diverged ? kExitDiverged : kExitOk;
}

void add_scenario_flags(CLI::App* cmd, Options& o, bool tau_list) {
    cmd->add_option("--scenario", o.scenario_path, "Scenario JSON file")->check(CLI::ExistingFile);
    cmd->add_option("--gains", o.gains_path, "Gains JSON file")->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out_dir, "Output directory");
    cmd->add_option("--n", o.n, "Platoon length")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "Disturbance seed");
    cmd->add_option("--dt", o.dt, "Integration step [s]")->check(CLI::PositiveNumber);
    cmd->add_option("--horizon", o.horizon, "Simulation horizon [s]")->check(CLI::PositiveNumber);
    cmd->add_option("--controller", o.controller, "Controller variant")->check(CLI::IsMember({"c1", "c2"}));
    auto* tau = cmd->add_option("--tau-rule", o.tau_rules, "Actuator lag rule, const:V or scaled:V");
    if (!tau_list) tau->expected(1);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Disturbance string stability analysis for vehicle platoons"};
    app.require_subcommand(1);
    Options o;

    auto* verify = app.add_subcommand("verify", "Check the sufficient conditions and print the certificate");
    add_scenario_flags(verify, o, false);

    auto* synth = app.add_subcommand("synthesize", "Search for gains that satisfy the conditions");
    add_scenario_flags(synth, o, false);
    synth->add_option("--restarts", o.restarts, "Random restarts")->check(CLI::PositiveNumber);
    synth->add_option("--iterations", o.iterations, "Iterations per restart")->check(CLI::PositiveNumber);
    synth->add_flag("--search-alphas", o.search_alphas, "Also search the transformation parameters");

    auto* sim = app.add_subcommand("simulate", "Simulate one scenario and write CSV outputs");
    add_scenario_flags(sim, o, false);
    sim->add_option("--norm", o.norm, "Norm reported in the summary")->check(CLI::IsMember({"l2", "inf"}));

    auto* sweep_n_cmd = app.add_subcommand("sweep-n", "Simulate several platoon lengths");
    add_scenario_flags(sweep_n_cmd, o, false);
    sweep_n_cmd->add_option("--ns", o.ns, "Platoon lengths")->check(CLI::PositiveNumber);

    auto* sweep_tau_cmd = app.add_subcommand("sweep-tau", "Simulate several actuator lag rules");
    add_scenario_flags(sweep_tau_cmd, o, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        if (*verify) return cmd_verify(o);
        if (*synth) return cmd_synthesize(o);
        if (*sim) return cmd_simulate(o);
        if (*sweep_n_cmd) return cmd_sweep_n(o);
        if (*sweep_tau_cmd) return cmd_sweep_tau(o);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitError;
    }
    return kExitError;
}
