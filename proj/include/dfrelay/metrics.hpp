#pragma once

// Outage probability and average symbol/bit error probability evaluators.

#include <functional>
#include <string>
#include <vector>

#include "dfrelay/schemes.hpp"

namespace dfrelay::metrics {

using channel::NetworkScenario;
using schemes::EndToEndStats;
using schemes::RateSelectiveStats;

enum class Family { NBFSK, DBPSK, MPSK, MQAM };

struct ModulationSpec {
    Family family = Family::DBPSK;
    int order = 2;

    static ModulationSpec nbfsk() { return {Family::NBFSK, 2}; }
    static ModulationSpec dbpsk() { return {Family::DBPSK, 2}; }
    static ModulationSpec mpsk(int m) { return {Family::MPSK, m}; }
    static ModulationSpec mqam(int m) { return {Family::MQAM, m}; }

    /// Throws std::invalid_argument unless M is a power of two (and a perfect square for QAM).
    void validate() const;
    int bits_per_symbol() const;
    /// "dbpsk", "nbfsk", "mpsk", "mqam"
    std::string family_name() const;

    bool operator==(const ModulationSpec&) const = default;
};

ModulationSpec modulation_from_string(const std::string& family, int order);

enum class MetricKind { OP, ASEP, ABEP };
enum class Method { ClosedForm, Quadrature, ConditionedQuadrature };

std::string to_string(MetricKind kind);
std::string to_string(Method method);

struct PerformanceResult {
    MetricKind kind = MetricKind::OP;
    double value = 0.0;
    Method method = Method::ClosedForm;
    int nodes = 0;              ///< quadrature nodes behind the value (0 for closed forms)
    double error_estimate = 0;  ///< |I_n − I_{n/2}| for node doubling
};

inline constexpr double kDefaultTolerance = 1e-9;

// ---------------------------------------------------------------------------
// Quadrature

struct GaussLegendreRule {
    std::vector<double> nodes;    ///< on (−1, 1)
    std::vector<double> weights;
};

/// Cached n-point rule, nodes from Newton iteration on the Legendre recurrence.
const GaussLegendreRule& gauss_legendre(int n);

struct QuadratureResult {
    double value;
    double error_estimate;
    int nodes;
};

/// ∫_a^b f by Gauss–Legendre with node doubling 64 → 128 → … → 1024; the difference
/// of the last two levels is the error estimate. Throws ConvergenceError if it never
/// drops below tol.
QuadratureResult integrate_doubling(const std::function<double(double)>& f, double a, double b, double tol);

// ---------------------------------------------------------------------------
// Outage

/// P[g0 < 2^R − 1], outage with no relaying at all.
double direct_outage(const NetworkScenario& scenario);

/// Repetitive: F_end(2^((L+1)R) − 1); pure RS: F_end(2^(2R) − 1). Falls back to direct
/// products (SD), the equal-C mixture (MRD) or conditioning on g0 (pure RS) when the
/// closed-form CDF needs integer m that the scenario does not have.
PerformanceResult outage(const EndToEndStats& stats, const NetworkScenario& scenario);

/// The printed product F_g0(2^R − 1)·F_best(2^(2R) − 1). Any real m.
PerformanceResult outage_rate_selective(const RateSelectiveStats& rs, const NetworkScenario& scenario);

/// Exact outage of the selection rule: P[g0 < 2^R − 1 and g0 + g_best < 2^(2R) − 1]
/// = ∫_0^{2^R−1} f_g0(x)·F_best(2^(2R) − 1 − x) dx.
PerformanceResult outage_rate_selective_exact(const RateSelectiveStats& rs, const NetworkScenario& scenario);

// ---------------------------------------------------------------------------
// Error probabilities

/// Exact conditional SEP at instantaneous SNR γ.
double conditional_sep(const ModulationSpec& modulation, double snr);

/// 0.5·M(0.5) for NBFSK, 0.5·M(1) for DBPSK.
PerformanceResult abep_point(const EndToEndStats& stats, const ModulationSpec& modulation);
PerformanceResult asep_mpsk(const EndToEndStats& stats, int order, double tol = kDefaultTolerance);
PerformanceResult asep_mqam(const EndToEndStats& stats, int order, double tol = kDefaultTolerance);

/// ASEP of any modulation from an MGF s ↦ E[exp(−s·γ)].
PerformanceResult asep_from_mgf(const std::function<double(double)>& mgf, const ModulationSpec& modulation,
                                double tol = kDefaultTolerance);
PerformanceResult asep(const EndToEndStats& stats, const ModulationSpec& modulation, double tol = kDefaultTolerance);
/// ASEP / log2 M (Gray mapping) for M > 2; equal to the ASEP for the binary families.
PerformanceResult abep(const EndToEndStats& stats, const ModulationSpec& modulation, double tol = kDefaultTolerance);

/// E[exp(−s·g_sel)] of the selected SNR, by conditioning on g0:
/// ∫ f_g0(x)·e^(−sx)·[F_best(x² + x) + ∫_{x²+x}^∞ f_best(y) e^(−sy) dy] dx.
double rate_selective_mgf(const RateSelectiveStats& rs, double s);
PerformanceResult asep_rate_selective(const RateSelectiveStats& rs, const ModulationSpec& modulation,
                                      double tol = kDefaultTolerance);
PerformanceResult abep_rate_selective(const RateSelectiveStats& rs, const ModulationSpec& modulation,
                                      double tol = kDefaultTolerance);

/// The exact conditioned ASEP beside two readings of the deterministic-α MGF:
/// α fixed at E[g0² + 2g0], and the α-averaged expression (inverse-sampling reading).
struct AlphaReadings {
    double exact;
    double at_mean_alpha;
    double alpha_averaged;
    double mean_alpha;
};

AlphaReadings rate_selective_alpha_readings(const NetworkScenario& scenario, const ModulationSpec& modulation,
                                            double tol = kDefaultTolerance);

}  // namespace dfrelay::metrics
