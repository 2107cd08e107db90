#pragma once

// Scenario configs, sweeps, figure presets and CSV emission behind the dfrelay tool.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "dfrelay/channel.hpp"
#include "dfrelay/metrics.hpp"
#include "dfrelay/montecarlo.hpp"

namespace dfrelay::cli {

using channel::NetworkScenario;
using channel::Scheme;
using metrics::ModulationSpec;

/// Schema violation: the offending field and the reason.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& reason)
        : std::runtime_error(field + ": " + reason), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

inline constexpr int kMaxRelays = 12;

struct RelayConfig {
    double m_first = 1.0;
    double m_second = 1.0;
    double snr_first_db = 0.0;
    double snr_second_db = 0.0;
    bool operator==(const RelayConfig&) const = default;
};

/// Decay profile: relay k has average SNR gammab_db − k·δ·10/ln 10 dB on both hops
/// (γ̄_b·e^(−kδ) in linear terms) and fading figure m; the direct link is (m0, gamma0_db).
struct ProfileConfig {
    double gamma0_db = 0.0;
    std::optional<double> gammab_db;  ///< defaults to gamma0_db
    double delta = 0.0;
    double m = 1.0;
    std::optional<double> m0;  ///< defaults to m
};

struct ScenarioConfig {
    Scheme scheme = Scheme::PureRS;
    int relay_count = 0;
    double rate = 1.0;
    double direct_m = 1.0;
    double direct_snr_db = 0.0;
    std::vector<RelayConfig> relays;
    std::optional<ProfileConfig> profile;

    /// Expands the profile (if any) into explicit per-relay values.
    ScenarioConfig resolved() const;
    /// Built from the resolved explicit values; dB → linear happens here only.
    NetworkScenario build() const;
};

enum class Metric { OP, ASEP, ABEP, DecodeProb, DirectOP };
std::string to_string(Metric metric);
Metric metric_from_string(const std::string& name);

struct MetricRequest {
    Metric metric = Metric::OP;
    std::optional<ModulationSpec> modulation;  ///< ASEP/ABEP only
};

struct McSettings {
    std::int64_t trials = 1'000'000;
    std::uint64_t seed = 1;
};

enum class Axis { None, L, Gamma0Db, GammabDb, M, Delta };
std::string to_string(Axis axis);
Axis axis_from_string(const std::string& name);

struct SweepSpec {
    std::string name;
    ScenarioConfig base;
    std::vector<Scheme> schemes;  ///< defaults to base.scheme
    Axis axis = Axis::None;
    std::vector<double> values;
    std::vector<MetricRequest> metrics;
    std::optional<McSettings> mc;

    /// Throws ConfigError on an empty or invalid axis, missing metrics, or guard violations.
    void validate() const;
};

struct ResultRow {
    std::string sweep;
    ScenarioConfig scenario;  ///< resolved, explicit relays
    Axis axis = Axis::None;
    double axis_value = 0.0;
    MetricRequest metric;
    double analytic = 0.0;
    std::string method;
    std::optional<double> mc_mean;
    std::optional<double> mc_stderr;
    std::optional<double> z_score;
};

struct AnalyticValue {
    double value;
    std::string method;
};

/// Analytic evaluation of one metric for one scenario.
using AnalyticFn = std::function<AnalyticValue(const NetworkScenario&, const MetricRequest&)>;
AnalyticValue evaluate_analytic(const NetworkScenario& scenario, const MetricRequest& request);

ScenarioConfig parse_scenario(const nlohmann::json& j);
std::vector<MetricRequest> parse_metrics(const nlohmann::json& j);
/// A single-point config (analyze/validate): scenario, metrics, optional schemes and mc blocks.
SweepSpec parse_config(const nlohmann::json& j);
/// A sweep config: as parse_config plus axis and values.
SweepSpec parse_sweep(const nlohmann::json& j);
nlohmann::json load_json(const std::string& path);

/// One row per (axis value × scheme × metric), in that order. DIRECT_OP does not depend on
/// the scheme and is emitted once per axis value, with the first scheme.
std::vector<ResultRow> run_sweep(const SweepSpec& spec, const AnalyticFn& analytic = evaluate_analytic);

/// The figure's sweeps, one per curve family of the caption.
std::vector<SweepSpec> figure_preset(const std::string& name);
std::vector<std::string> figure_names();

std::string format_double(double value);
std::vector<std::string> csv_header();
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows, bool header = true);
std::vector<ResultRow> read_csv(std::istream& in);

struct ValidationReport {
    std::vector<ResultRow> rows;
    double max_abs_z = 0.0;
    int failures = 0;
    bool passed() const { return failures == 0; }
};

/// Runs the sweep with MC attached and flags rows whose |z| exceeds the limit.
ValidationReport validate(SweepSpec spec, const McSettings& mc, double z_limit = 3.0,
                          const AnalyticFn& analytic = evaluate_analytic);

}  // namespace dfrelay::cli
