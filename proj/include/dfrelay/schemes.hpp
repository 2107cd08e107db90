#pragma once

// End-to-end SNR statistics of the four DF relaying schemes, built
// mechanically from per-path mixture laws, plus literal evaluators of the
// nested-sum closed forms used to cross-check the generic construction.

#include <optional>
#include <string>

#include "dfrelay/algebra.hpp"
#include "dfrelay/channel.hpp"

namespace dfrelay::schemes {

using algebra::ExpPolySum;
using algebra::PoleSum;
using channel::DecodingProfile;
using channel::LinkSpec;
using channel::NetworkScenario;
using channel::Scheme;

/// L + 1 for repetitive schemes, 2 for relay selection.
int slot_factor(Scheme scheme, int relay_count);
DecodingProfile build_decoding_profile(const NetworkScenario& scenario);

/// SNR below which the scheme is in outage: 2^(αR) − 1 with α = L + 1 (repetitive) or 2 (pure RS).
double outage_threshold(const NetworkScenario& scenario);

/// MGF of one path: P + (1 − P)·C^m·(s + C)^(−m). Any real m.
PoleSum path_mgf(const LinkSpec& link, double p_fail);
/// CDF of one path as an exponential-polynomial sum (integer m only).
ExpPolySum path_cdf_sum(const LinkSpec& link, double p_fail);

class EndToEndStats {
public:
    EndToEndStats(Scheme scheme, DecodingProfile decoding, std::optional<PoleSum> mgf,
                  std::optional<ExpPolySum> cdf, std::optional<ExpPolySum> pdf, std::string limitation = {});

    Scheme scheme() const { return scheme_; }
    const DecodingProfile& decoding() const { return decoding_; }

    bool has_mgf() const { return mgf_.has_value(); }
    bool has_cdf() const { return cdf_.has_value(); }
    /// Each accessor throws IntegralityError, naming the offending link, when the form is unavailable.
    const PoleSum& mgf() const;
    const ExpPolySum& cdf() const;
    const ExpPolySum& pdf() const;
    /// Why a closed form is missing (empty when all three are available).
    const std::string& limitation() const { return limitation_; }

private:
    Scheme scheme_;
    DecodingProfile decoding_;
    std::optional<PoleSum> mgf_;
    std::optional<ExpPolySum> cdf_;
    std::optional<ExpPolySum> pdf_;
    std::string limitation_;
};

EndToEndStats build_repetitive_mrd(const NetworkScenario& scenario);
/// Statistics of g_best = max over decoding relays (0 when none decodes).
EndToEndStats build_best_relay(const NetworkScenario& scenario);
EndToEndStats build_repetitive_sd(const NetworkScenario& scenario);
EndToEndStats build_pure_rs(const NetworkScenario& scenario);
/// Dispatches on scenario.scheme; RateSelectiveRS yields the underlying pure-RS statistics.
EndToEndStats build_stats(const NetworkScenario& scenario);

enum class Branch { Direct, Relay };

/// Relay iff ½·log2(1 + g_end) > log2(1 + g0), i.e. g_end > g0² + 2·g0. Ties pick Direct.
Branch rate_selective_choice(double g0, double g_end);

struct RateSelectiveStats {
    LinkSpec direct;
    EndToEndStats best;
    EndToEndStats pure_rs;

    /// Largest g_best for which Direct is still chosen given g0 = x: x² + x.
    static double threshold(double x) { return x * x + x; }
};

RateSelectiveStats build_rate_selective(const NetworkScenario& scenario);

// ---------------------------------------------------------------------------
// Literal nested-sum evaluators. They share no code path with the builders
// above beyond the channel primitives; residues come from a direct Leibniz
// expansion rather than the engine's recursion.

/// Largest L the literal evaluators accept.
inline constexpr int kLiteralMaxRelays = 5;

double literal_cdf_rep_mrd_distinct(const NetworkScenario& scenario, double x);
/// Equal C on the direct and all second-hop links; any real m.
double literal_cdf_rep_mrd_equal_c(const NetworkScenario& scenario, double x);
double literal_mgf_gbest_distinct(const NetworkScenario& scenario, double s);
/// IID relays (equal m and C on every second hop, equal decoding probability).
double literal_mgf_gbest_equal_c(const NetworkScenario& scenario, double s);
double literal_cdf_pure_rs(const NetworkScenario& scenario, double x);
/// IID direct and relay links.
double literal_cdf_pure_rs_equal_c(const NetworkScenario& scenario, double x);

/// True when the direct and every second-hop link share m and C and all first-hop links are identical.
bool is_iid(const NetworkScenario& scenario);

/// M0(s)·F_end(α) + M_end(s)·(1 − F_end(α)) for a caller-chosen deterministic α,
/// with F_end and M_end the literal pure-RS forms (IID or distinct branch as applicable).
double literal_mgf_rate_selective(const NetworkScenario& scenario, double s, double alpha);

}  // namespace dfrelay::schemes
