#pragma once

// Nakagami-m link statistics: the gamma law of the instantaneous SNR,
// the relay decoding-failure probability and the per-path mixture law
// (point mass at zero for a relay that failed to decode).

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dfrelay/special.hpp"

namespace dfrelay::channel {

/// One Nakagami-m link, parameterized by its fading figure and average SNR (linear).
class LinkSpec {
public:
    LinkSpec(double m, double gamma_bar);

    double m() const { return m_; }
    double gamma_bar() const { return gamma_bar_; }
    /// Rate constant of the gamma SNR law, m / gamma_bar.
    double c() const { return c_; }
    bool integer_m() const;

    bool operator==(const LinkSpec&) const = default;

private:
    double m_;
    double gamma_bar_;
    double c_;
};

enum class Scheme { RepetitiveMRD, RepetitiveSD, PureRS, RateSelectiveRS };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);
bool is_repetitive(Scheme scheme);

/// Direct link, L first-hop (S->R_k) links, L second-hop (R_k->D) links.
struct NetworkScenario {
    double rate = 1.0;  ///< bps/Hz
    LinkSpec direct{1.0, 1.0};
    std::vector<LinkSpec> first_hop;
    std::vector<LinkSpec> second_hop;
    Scheme scheme = Scheme::PureRS;

    int relay_count() const { return static_cast<int>(second_hop.size()); }
    /// Throws std::invalid_argument on size mismatch or a non-positive rate.
    void validate() const;
};

/// Slot factor and per-relay decoding-failure probabilities.
struct DecodingProfile {
    int alpha = 2;
    std::vector<double> p_fail;
};

bool is_integer(double value);

double gamma_pdf(const LinkSpec& link, double x);
double gamma_cdf(const LinkSpec& link, double x);
double gamma_mgf(const LinkSpec& link, double s);

/// Pr[log2(1 + gamma) < alpha * rate] for the first-hop link.
double decode_failure_prob(const LinkSpec& first_hop_link, double rate, int alpha);
/// 1 − decode_failure_prob from the upper incomplete gamma, so tiny values do not round to 0.
double decode_success_prob(const LinkSpec& first_hop_link, double rate, int alpha);

/// Mixture law of one path: atom of mass p_fail at zero, (1 - p_fail) * gamma law elsewhere.
struct PathDensity {
    double atom_mass;
    double continuous;
};

PathDensity path_pdf(const LinkSpec& link, double p_fail, double x);
double path_cdf(const LinkSpec& link, double p_fail, double x);

/// Seedable stream; a (seed, substream) pair always yields the same sequence.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed, std::uint64_t substream = 0);

    double uniform();  ///< in (0, 1)
    double normal();

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

double sample_snr(const LinkSpec& link, RandomStream& rng);

/// Exponential power-decay profile: gamma0 * exp(-k * delta) for relay index k >= 1.
double power_profile(double gamma0, double delta, int k);

/// Scenario with L relays on the decay profile: both hops of relay k have fading figure m_relay
/// and average SNR power_profile(gamma_b, delta, k); the direct link is (m0, gamma0).
NetworkScenario profile_scenario(Scheme scheme, int relay_count, double rate, double m0, double gamma0,
                                 double m_relay, double gamma_b, double delta);

double db_to_linear(double db);
double linear_to_db(double linear);

}  // namespace dfrelay::channel
