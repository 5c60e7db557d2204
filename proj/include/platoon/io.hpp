#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "platoon/controller.hpp"
#include "platoon/dss.hpp"
#include "platoon/sim.hpp"
#include "platoon/synthesis.hpp"

namespace platoon {

using Json = nlohmann::ordered_json;

// JSON mappings. Parsing throws ConfigError naming the offending field.
Json to_json(const GainSet& g);
GainSet gains_from_json(const Json& j);

Json to_json(const TransformParams& a);
TransformParams alphas_from_json(const Json& j);

Json to_json(const Scenario& s);
Scenario scenario_from_json(const Json& j);

Json to_json(const DssCertificate& c);
Json to_json(const HeteroReport& r);
Json to_json(const SynthesisProblem& p);
Json to_json(const SearchConfig& c);
Json to_json(const SynthesisResult& r);

/// Parses a JSON file; syntax errors become ConfigError with line/column.
Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

// ============================================================================
// CSV output
// ============================================================================

/// Vehicles shown in per-vehicle figures: {2, 100, 250, 400, 500} clipped to n.
std::vector<std::size_t> figure_vehicles(std::size_t n);

/// Inputs for the analytical envelopes of a simulated run.
struct EnvelopeSet {
    std::optional<DssCertificate> integral;     // certificate of the integral controller
    std::optional<DssCertificate> no_integral;  // certificate of the h-only controller
    BoundInputs eq12;
    BoundInputs eq13;
    BoundInputs eq14;
};

/// Envelope inputs derived from the run's initial condition and disturbance model.
EnvelopeSet envelope_inputs(const SimResult& run, const Scenario& scenario, const GainSet& gains);

/// Evaluates the envelope or NaN when the certificate is missing or invalid.
double envelope_or_nan(const std::optional<DssCertificate>& cert, const BoundInputs& in, BoundVariant v, double t);

void write_norms_csv(std::ostream& os, const SimResult& run, const EnvelopeSet& env);
void write_bounds_csv(std::ostream& os, const SimResult& run, const EnvelopeSet& env);
void write_displacements_csv(std::ostream& os, const SimResult& run);
void write_states_csv(std::ostream& os, const SimResult& run);
void write_control_csv(std::ostream& os, const SimResult& run);
void write_sweep_n_csv(std::ostream& os, const std::vector<SweepNRow>& rows);
void write_sweep_tau_csv(std::ostream& os, const std::vector<TauReport>& rows);

/// Formats a double for CSV; non-finite values become "nan".
std::string csv_number(double v);

}  // namespace platoon
