#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <anj/energy_chain.hpp>
#include <anj/params.hpp>

namespace anj::cli {

/// Malformed config text or override. The message carries "source:line: ".
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SweepSpec {
    std::string axis;                 ///< empty: single evaluation
    std::vector<std::string> values;  ///< raw tokens: numbers, start:stop:step, or n_t/n_r

    bool operator==(const SweepSpec&) const = default;
};

struct McConfig {
    bool enabled = true;
    std::uint64_t blocks = 1'000'000;
    std::uint64_t seed = 1;
    int batches = 16;
    int threads = 0;         ///< 0: hardware concurrency; never changes results
    double target_se = 0;    ///< warn when a standard error ends up above this
    std::string batch_csv;   ///< per-batch counters, written next to the main output

    bool operator==(const McConfig&) const = default;
};

/// Candidate jamming powers: `count` points evenly spaced in dBm.
struct PjGrid {
    double start_dbm = -10;
    double stop_dbm = 20;
    int count = 60;

    std::vector<double> watts() const;
    bool operator==(const PjGrid&) const = default;
};

struct OutputConfig {
    std::string path;  ///< empty: standard output
    std::string format = "csv";

    bool operator==(const OutputConfig&) const = default;
};

struct ExperimentConfig {
    /// Link gains inside are ignored; they follow from `topology`.
    SystemParams params = default_params();
    Topology topology = default_topology();
    /// Unset: sigma_E^2 = sigma_D^2 and sigma_err^2 = Omega_JD.
    std::optional<double> sigma2_e;
    std::optional<double> sigma2_err;
    StorageSizing storage;
    SweepSpec sweep;
    McConfig mc;
    PjGrid pj_grid;
    OutputConfig output;

    bool operator==(const ExperimentConfig&) const = default;
};

/// Parses `key = value` lines. '#' and ';' start comments; blank lines and
/// [section] headers are ignored. Later keys override earlier ones.
ExperimentConfig parse_config(std::string_view text, const std::string& source = "config");

/// Applies one `key=value` override on top of cfg.
void apply_override(ExperimentConfig& cfg, std::string_view assignment,
                    const std::string& source = "--set");

/// Canonical text form (watts, 17 significant digits); parse_config inverts it exactly.
std::string serialize(const ExperimentConfig& cfg);

/// Same content on one line, for CSV comment headers.
std::string serialize_inline(const ExperimentConfig& cfg);

/// Topology-derived gains and noise defaults folded into SystemParams.
SystemParams resolve_params(const ExperimentConfig& cfg);

/// One sweep point: the label written to CSV and the resolved inputs.
struct SweepPoint {
    std::string label;
    SystemParams params;
    StorageSizing storage;
};

/// Expands the sweep (or yields the single base point) and validates every
/// point. Throws ParseError for bad tokens and DomainError for values that
/// break a parameter invariant.
std::vector<SweepPoint> expand_sweep(const ExperimentConfig& cfg);

/// "start:stop:step" (inclusive) or a single number.
std::vector<double> parse_range(std::string_view token);

/// printf "%.17g": enough digits for any double to read back exactly.
std::string format_double(double v);

}  // namespace anj::cli
