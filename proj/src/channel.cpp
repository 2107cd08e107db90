#include "dfrelay/channel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dfrelay/errors.hpp"

namespace dfrelay::channel {

namespace {

void require_non_negative(double x, const char* what) {
    if (!(x >= 0.0)) throw DomainError(std::string(what) + ": argument must be >= 0");
}

void require_probability(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p_fail must lie in [0, 1]");
}

}  // namespace

LinkSpec::LinkSpec(double m, double gamma_bar) : m_(m), gamma_bar_(gamma_bar), c_(m / gamma_bar) {
    if (!(m >= 0.5) || !std::isfinite(m)) {
        throw std::invalid_argument("LinkSpec: fading figure m must be >= 0.5");
    }
    if (!(gamma_bar > 0.0) || !std::isfinite(gamma_bar)) {
        throw std::invalid_argument("LinkSpec: average SNR must be positive and finite");
    }
}

bool LinkSpec::integer_m() const { return is_integer(m_); }

bool is_integer(double value) { return std::abs(value - std::round(value)) < 1e-12; }

std::string to_string(Scheme scheme) {
    switch (scheme) {
        case Scheme::RepetitiveMRD: return "repetitive_mrd";
        case Scheme::RepetitiveSD: return "repetitive_sd";
        case Scheme::PureRS: return "pure_rs";
        case Scheme::RateSelectiveRS: return "rate_selective_rs";
    }
    return "unknown";
}

Scheme scheme_from_string(const std::string& name) {
    for (Scheme s : {Scheme::RepetitiveMRD, Scheme::RepetitiveSD, Scheme::PureRS, Scheme::RateSelectiveRS}) {
        if (to_string(s) == name) return s;
    }
    throw std::invalid_argument("unknown scheme '" + name + "'");
}

bool is_repetitive(Scheme scheme) {
    return scheme == Scheme::RepetitiveMRD || scheme == Scheme::RepetitiveSD;
}

void NetworkScenario::validate() const {
    if (first_hop.size() != second_hop.size()) {
        throw std::invalid_argument("scenario: first-hop and second-hop link counts differ");
    }
    if (!(rate > 0.0) || !std::isfinite(rate)) {
        throw std::invalid_argument("scenario: transmit rate must be positive");
    }
}

double gamma_pdf(const LinkSpec& link, double x) {
    require_non_negative(x, "gamma_pdf");
    const double m = link.m();
    const double c = link.c();
    if (x == 0.0) {
        if (m > 1.0) return 0.0;
        if (m == 1.0) return c;
        return std::numeric_limits<double>::infinity();
    }
    return std::exp(m * std::log(c) + (m - 1.0) * std::log(x) - c * x - std::lgamma(m));
}

double gamma_cdf(const LinkSpec& link, double x) {
    require_non_negative(x, "gamma_cdf");
    return regularized_gamma_p(link.m(), link.c() * x);
}

double gamma_mgf(const LinkSpec& link, double s) {
    const double c = link.c();
    if (!(s > -c)) throw DomainError("gamma_mgf: s must exceed -c (pole)");
    return std::pow(c / (s + c), link.m());
}

double decode_failure_prob(const LinkSpec& first_hop_link, double rate, int alpha) {
    if (!(rate > 0.0)) throw DomainError("decode_failure_prob: rate must be positive");
    if (alpha < 1) throw DomainError("decode_failure_prob: slot factor must be >= 1");
    const double threshold = std::exp2(alpha * rate) - 1.0;
    return gamma_cdf(first_hop_link, threshold);
}

double decode_success_prob(const LinkSpec& first_hop_link, double rate, int alpha) {
    if (!(rate > 0.0)) throw DomainError("decode_success_prob: rate must be positive");
    if (alpha < 1) throw DomainError("decode_success_prob: slot factor must be >= 1");
    const double threshold = std::exp2(alpha * rate) - 1.0;
    return regularized_gamma_q(first_hop_link.m(), first_hop_link.c() * threshold);
}

PathDensity path_pdf(const LinkSpec& link, double p_fail, double x) {
    require_probability(p_fail);
    require_non_negative(x, "path_pdf");
    return {x == 0.0 ? p_fail : 0.0, (1.0 - p_fail) * gamma_pdf(link, x)};
}

double path_cdf(const LinkSpec& link, double p_fail, double x) {
    require_probability(p_fail);
    require_non_negative(x, "path_cdf");
    return p_fail + (1.0 - p_fail) * gamma_cdf(link, x);
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t substream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(substream), static_cast<std::uint32_t>(substream >> 32)};
    engine_.seed(seq);
}

double RandomStream::uniform() {
    // 53 random bits, shifted off zero.
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() { return normal_(engine_); }

namespace {

// Marsaglia-Tsang squeeze/rejection sampler for shape >= 1, unit scale.
double standard_gamma_large_shape(double shape, RandomStream& rng) {
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = rng.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

}  // namespace

double sample_snr(const LinkSpec& link, RandomStream& rng) {
    const double m = link.m();
    double g;
    if (m >= 1.0) {
        g = standard_gamma_large_shape(m, rng);
    } else {
        // Gamma(m) = Gamma(m + 1) * U^(1/m)
        g = standard_gamma_large_shape(m + 1.0, rng) * std::pow(rng.uniform(), 1.0 / m);
    }
    return g / link.c();
}

double power_profile(double gamma0, double delta, int k) {
    if (!(gamma0 > 0.0)) throw DomainError("power_profile: gamma0 must be positive");
    if (!(delta >= 0.0)) throw DomainError("power_profile: delta must be >= 0");
    if (k < 1) throw DomainError("power_profile: relay index must be >= 1");
    return gamma0 * std::exp(-k * delta);
}

NetworkScenario profile_scenario(Scheme scheme, int relay_count, double rate, double m0, double gamma0,
                                 double m_relay, double gamma_b, double delta) {
    if (relay_count < 0) throw std::invalid_argument("profile_scenario: relay count must be >= 0");
    NetworkScenario scenario;
    scenario.scheme = scheme;
    scenario.rate = rate;
    scenario.direct = LinkSpec(m0, gamma0);
    for (int k = 1; k <= relay_count; ++k) {
        const LinkSpec link(m_relay, power_profile(gamma_b, delta, k));
        scenario.first_hop.push_back(link);
        scenario.second_hop.push_back(link);
    }
    scenario.validate();
    return scenario;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

}  // namespace dfrelay::channel
