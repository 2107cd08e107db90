#pragma once

// Monte Carlo oracle: draws link SNRs, forms decoding sets, applies each
// scheme's combining rule and averages outage indicators or conditional SEPs.
// Uses only channel sampling and the conditional error formulas.

#include <cstdint>
#include <vector>

#include "dfrelay/channel.hpp"
#include "dfrelay/metrics.hpp"

namespace dfrelay::montecarlo {

using channel::NetworkScenario;
using channel::RandomStream;
using channel::Scheme;
using metrics::ModulationSpec;

struct EstimateWithCI {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::int64_t n_trials = 0;
    std::uint64_t seed = 0;

    /// (analytic − mean) / stderr; 0 when both agree exactly with zero spread.
    double z_score(double analytic) const;
    bool within(double analytic, double sigmas = 3.0) const;
};

/// z-score of an indicator estimate. When no event (or no miss) was observed the sample
/// spread is zero, and the binomial spread under the analytic value is used instead.
double binomial_z(const EstimateWithCI& estimate, double analytic);

struct TrialDraw {
    double g0 = 0.0;
    std::vector<double> first_hop;
    std::vector<double> second_hop;
    std::vector<bool> decoded;  ///< k ∈ 𝔹
};

/// log2(1 + γ) ≥ α·ℛ, with α = L + 1 for repetitive schemes and 2 otherwise.
int decoding_alpha(const NetworkScenario& scenario);

TrialDraw draw_trial(const NetworkScenario& scenario, RandomStream& rng);

struct Combined {
    double snr = 0.0;          ///< SNR the destination detects on
    double combined_snr = 0.0;  ///< the scheme's combined output (pure-RS output for rate-selective)
    bool relay_branch = true;   ///< rate-selective only: false when the direct branch is chosen
};

Combined combine(const TrialDraw& trial, Scheme scheme);

/// Outage event for one trial: combined SNR below 2^((L+1)ℛ) − 1 (repetitive) or 2^(2ℛ) − 1 (pure RS);
/// for rate-selective, max(½·log2(1 + g_end), log2(1 + g0)) < ℛ.
bool in_outage(const NetworkScenario& scenario, const Combined& combined, double g0);

struct SimulationRequest {
    std::int64_t n_trials = 1'000'000;
    std::uint64_t seed = 1;
    std::vector<ModulationSpec> modulations;
};

struct SimulationResult {
    EstimateWithCI outage;
    EstimateWithCI direct_outage;       ///< g0 < 2^ℛ − 1 on the same draws
    std::vector<EstimateWithCI> decoded;  ///< per relay, Pr[k ∈ 𝔹]
    std::vector<EstimateWithCI> asep;     ///< one per requested modulation
};

/// Trials are split into fixed chunks, each with its own substream of the seed, and
/// reduced in chunk order, so results do not depend on how chunks are scheduled.
inline constexpr std::int64_t kChunkTrials = 1 << 16;
inline constexpr std::int64_t kMinTrials = 10'000;

SimulationResult simulate(const NetworkScenario& scenario, const SimulationRequest& request);

EstimateWithCI estimate_outage(const NetworkScenario& scenario, std::int64_t n_trials, std::uint64_t seed);
EstimateWithCI estimate_asep(const NetworkScenario& scenario, const ModulationSpec& modulation, std::int64_t n_trials,
                             std::uint64_t seed);

}  // namespace dfrelay::montecarlo
