#include "dfrelay/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dfrelay::montecarlo {

double EstimateWithCI::z_score(double analytic) const {
    const double diff = analytic - mean;
    if (stderr_ > 0.0) return diff / stderr_;
    return diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff);
}

bool EstimateWithCI::within(double analytic, double sigmas) const {
    return std::abs(z_score(analytic)) <= sigmas;
}

double binomial_z(const EstimateWithCI& estimate, double analytic) {
    if (estimate.stderr_ > 0.0) return estimate.z_score(analytic);
    EstimateWithCI e = estimate;
    e.stderr_ = std::sqrt(analytic * (1.0 - analytic) / static_cast<double>(estimate.n_trials));
    return e.z_score(analytic);
}

int decoding_alpha(const NetworkScenario& scenario) {
    return channel::is_repetitive(scenario.scheme) ? scenario.relay_count() + 1 : 2;
}

TrialDraw draw_trial(const NetworkScenario& scenario, RandomStream& rng) {
    const int L = scenario.relay_count();
    const double decode_threshold = std::exp2(decoding_alpha(scenario) * scenario.rate) - 1.0;
    TrialDraw t;
    t.g0 = channel::sample_snr(scenario.direct, rng);
    t.first_hop.resize(L);
    t.second_hop.resize(L);
    t.decoded.resize(L);
    for (int k = 0; k < L; ++k) {
        t.first_hop[k] = channel::sample_snr(scenario.first_hop[k], rng);
        t.second_hop[k] = channel::sample_snr(scenario.second_hop[k], rng);
        t.decoded[k] = t.first_hop[k] >= decode_threshold;
    }
    return t;
}

Combined combine(const TrialDraw& trial, Scheme scheme) {
    double sum = 0.0, best = 0.0;
    for (std::size_t k = 0; k < trial.second_hop.size(); ++k) {
        if (!trial.decoded[k]) continue;
        sum += trial.second_hop[k];
        best = std::max(best, trial.second_hop[k]);
    }
    Combined c;
    switch (scheme) {
        case Scheme::RepetitiveMRD: c.combined_snr = trial.g0 + sum; break;
        case Scheme::RepetitiveSD: c.combined_snr = std::max(trial.g0, best); break;
        case Scheme::PureRS: c.combined_snr = trial.g0 + best; break;
        case Scheme::RateSelectiveRS:
            c.combined_snr = trial.g0 + best;
            // ½·log2(1 + g_end) > log2(1 + g0)  ⇔  g_end > g0² + 2·g0
            c.relay_branch = c.combined_snr > trial.g0 * trial.g0 + 2.0 * trial.g0;
            c.snr = c.relay_branch ? c.combined_snr : trial.g0;
            return c;
    }
    c.snr = c.combined_snr;
    return c;
}

bool in_outage(const NetworkScenario& scenario, const Combined& combined, double g0) {
    const double R = scenario.rate;
    switch (scenario.scheme) {
        case Scheme::RepetitiveMRD:
        case Scheme::RepetitiveSD:
            return combined.combined_snr < std::exp2((scenario.relay_count() + 1) * R) - 1.0;
        case Scheme::PureRS: return combined.combined_snr < std::exp2(2.0 * R) - 1.0;
        case Scheme::RateSelectiveRS:
            return std::max(0.5 * std::log2(1.0 + combined.combined_snr), std::log2(1.0 + g0)) < R;
    }
    return false;
}

namespace {

// Running sums for one estimator. Chunk partials are merged with Chan's update.
struct Moments {
    std::int64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }
    void merge(const Moments& o) {
        if (o.n == 0) return;
        const std::int64_t total = n + o.n;
        const double d = o.mean - mean;
        mean += d * o.n / total;
        m2 += o.m2 + d * d * static_cast<double>(n) * o.n / total;
        n = total;
    }
};

EstimateWithCI indicator_estimate(const Moments& m, std::uint64_t seed) {
    const double p = m.mean;
    return {p, std::sqrt(p * (1.0 - p) / m.n), m.n, seed};
}

EstimateWithCI sample_estimate(const Moments& m, std::uint64_t seed) {
    const double var = m.n > 1 ? m.m2 / (m.n - 1) : 0.0;
    return {m.mean, std::sqrt(var / m.n), m.n, seed};
}

}  // namespace

SimulationResult simulate(const NetworkScenario& scenario, const SimulationRequest& request) {
    scenario.validate();
    if (request.n_trials < kMinTrials) throw std::invalid_argument("simulate: need at least 10^4 trials");
    for (const auto& mod : request.modulations) mod.validate();
    const int L = scenario.relay_count();
    const std::size_t n_mod = request.modulations.size();
    const double direct_threshold = std::exp2(scenario.rate) - 1.0;

    Moments outage, direct;
    std::vector<Moments> decoded(L), sep(n_mod);
    const std::int64_t chunks = (request.n_trials + kChunkTrials - 1) / kChunkTrials;
    for (std::int64_t chunk = 0; chunk < chunks; ++chunk) {
        const std::int64_t count = std::min(kChunkTrials, request.n_trials - chunk * kChunkTrials);
        RandomStream rng(request.seed, static_cast<std::uint64_t>(chunk));
        Moments c_out, c_dir;
        std::vector<Moments> c_dec(L), c_sep(n_mod);
        for (std::int64_t i = 0; i < count; ++i) {
            const TrialDraw t = draw_trial(scenario, rng);
            const Combined c = combine(t, scenario.scheme);
            c_out.add(in_outage(scenario, c, t.g0) ? 1.0 : 0.0);
            c_dir.add(t.g0 < direct_threshold ? 1.0 : 0.0);
            for (int k = 0; k < L; ++k) c_dec[k].add(t.decoded[k] ? 1.0 : 0.0);
            for (std::size_t j = 0; j < n_mod; ++j) c_sep[j].add(metrics::conditional_sep(request.modulations[j], c.snr));
        }
        outage.merge(c_out);
        direct.merge(c_dir);
        for (int k = 0; k < L; ++k) decoded[k].merge(c_dec[k]);
        for (std::size_t j = 0; j < n_mod; ++j) sep[j].merge(c_sep[j]);
    }

    SimulationResult r;
    r.outage = indicator_estimate(outage, request.seed);
    r.direct_outage = indicator_estimate(direct, request.seed);
    for (const auto& d : decoded) r.decoded.push_back(indicator_estimate(d, request.seed));
    for (const auto& s : sep) r.asep.push_back(sample_estimate(s, request.seed));
    return r;
}

EstimateWithCI estimate_outage(const NetworkScenario& scenario, std::int64_t n_trials, std::uint64_t seed) {
    return simulate(scenario, {n_trials, seed, {}}).outage;
}

EstimateWithCI estimate_asep(const NetworkScenario& scenario, const ModulationSpec& modulation, std::int64_t n_trials,
                             std::uint64_t seed) {
    return simulate(scenario, {n_trials, seed, {modulation}}).asep.front();
}

}  // namespace dfrelay::montecarlo
