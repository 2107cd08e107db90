#include "dfrelay/schemes.hpp"

#include <cmath>
#include <utility>

#include "dfrelay/errors.hpp"

namespace dfrelay::schemes {

using algebra::ExpPolyTerm;
using algebra::PoleFactor;
using algebra::PoleProduct;

int slot_factor(Scheme scheme, int relay_count) {
    return channel::is_repetitive(scheme) ? relay_count + 1 : 2;
}

DecodingProfile build_decoding_profile(const NetworkScenario& scenario) {
    scenario.validate();
    DecodingProfile profile;
    profile.alpha = slot_factor(scenario.scheme, scenario.relay_count());
    for (const auto& link : scenario.first_hop) {
        profile.p_fail.push_back(channel::decode_failure_prob(link, scenario.rate, profile.alpha));
    }
    return profile;
}

double outage_threshold(const NetworkScenario& scenario) {
    return std::exp2(slot_factor(scenario.scheme, scenario.relay_count()) * scenario.rate) - 1.0;
}

PoleSum path_mgf(const LinkSpec& link, double p_fail) {
    const double weight = (1.0 - p_fail) * std::pow(link.c(), link.m());
    if (weight == 0.0) return PoleSum::constant(p_fail);
    return PoleSum(p_fail, {PoleProduct(weight, {{link.c(), link.m()}})});
}

ExpPolySum path_cdf_sum(const LinkSpec& link, double p_fail) {
    if (!link.integer_m()) throw IntegralityError("path_cdf_sum: fading figure must be an integer");
    const int m = static_cast<int>(std::lround(link.m()));
    const double c = link.c();
    std::vector<ExpPolyTerm> terms{{1.0, 0, 0.0}};
    double coeff = 1.0 - p_fail;
    for (int i = 0; i < m; ++i) {
        if (i > 0) coeff *= c / i;
        terms.push_back({-coeff, i, c});
    }
    return ExpPolySum(0.0, std::move(terms));
}

// ---------------------------------------------------------------------------

EndToEndStats::EndToEndStats(Scheme scheme, DecodingProfile decoding, std::optional<PoleSum> mgf,
                             std::optional<ExpPolySum> cdf, std::optional<ExpPolySum> pdf, std::string limitation)
    : scheme_(scheme),
      decoding_(std::move(decoding)),
      mgf_(std::move(mgf)),
      cdf_(std::move(cdf)),
      pdf_(std::move(pdf)),
      limitation_(std::move(limitation)) {}

const PoleSum& EndToEndStats::mgf() const {
    if (!mgf_) throw IntegralityError("no closed-form MGF: " + limitation_);
    return *mgf_;
}

const ExpPolySum& EndToEndStats::cdf() const {
    if (!cdf_) throw IntegralityError("no closed-form CDF: " + limitation_);
    return *cdf_;
}

const ExpPolySum& EndToEndStats::pdf() const {
    if (!pdf_) throw IntegralityError("no closed-form PDF: " + limitation_);
    return *pdf_;
}

namespace {

ExpPolySum gamma_cdf_sum(const LinkSpec& link) { return path_cdf_sum(link, 0.0); }

PoleSum gamma_mgf_sum(const LinkSpec& link) { return path_mgf(link, 0.0); }

// Empty when every listed link has an integer fading figure.
std::string non_integer_links(const NetworkScenario& scenario, bool include_direct) {
    std::string out;
    auto note = [&](const std::string& name, double m) {
        if (!out.empty()) out += "; ";
        out += name + " has non-integer m = " + std::to_string(m);
    };
    if (include_direct && !scenario.direct.integer_m()) note("direct link", scenario.direct.m());
    for (int k = 0; k < scenario.relay_count(); ++k) {
        if (!scenario.second_hop[k].integer_m()) {
            note("second-hop link of relay " + std::to_string(k + 1), scenario.second_hop[k].m());
        }
    }
    return out;
}

ExpPolySum best_cdf(const NetworkScenario& scenario, const DecodingProfile& profile) {
    ExpPolySum cdf = ExpPolySum::constant(1.0);
    for (int k = 0; k < scenario.relay_count(); ++k) {
        cdf = algebra::exp_sum_product(cdf, path_cdf_sum(scenario.second_hop[k], profile.p_fail[k]));
    }
    return cdf;
}

}  // namespace

EndToEndStats build_repetitive_mrd(const NetworkScenario& scenario) {
    auto profile = build_decoding_profile(scenario);
    PoleSum mgf = gamma_mgf_sum(scenario.direct);
    for (int k = 0; k < scenario.relay_count(); ++k) {
        mgf = algebra::pole_sum_product(mgf, path_mgf(scenario.second_hop[k], profile.p_fail[k]));
    }
    auto limitation = non_integer_links(scenario, true);
    if (!limitation.empty()) {
        return EndToEndStats(Scheme::RepetitiveMRD, std::move(profile), std::move(mgf), std::nullopt, std::nullopt,
                             limitation);
    }
    auto cdf = algebra::inverse_laplace_over_s(mgf);
    auto pdf = algebra::exp_sum_derivative(cdf);
    return EndToEndStats(Scheme::RepetitiveMRD, std::move(profile), std::move(mgf), std::move(cdf), std::move(pdf));
}

EndToEndStats build_best_relay(const NetworkScenario& scenario) {
    auto profile = build_decoding_profile(scenario);
    auto limitation = non_integer_links(scenario, false);
    if (!limitation.empty()) {
        return EndToEndStats(scenario.scheme, std::move(profile), std::nullopt, std::nullopt, std::nullopt, limitation);
    }
    auto cdf = best_cdf(scenario, profile);
    auto pdf = algebra::exp_sum_derivative(cdf);
    auto mgf = algebra::exp_sum_laplace(pdf);
    return EndToEndStats(scenario.scheme, std::move(profile), std::move(mgf), std::move(cdf), std::move(pdf));
}

EndToEndStats build_repetitive_sd(const NetworkScenario& scenario) {
    auto profile = build_decoding_profile(scenario);
    auto limitation = non_integer_links(scenario, true);
    if (!limitation.empty()) {
        return EndToEndStats(Scheme::RepetitiveSD, std::move(profile), std::nullopt, std::nullopt, std::nullopt,
                             limitation);
    }
    auto cdf = algebra::exp_sum_product(gamma_cdf_sum(scenario.direct), best_cdf(scenario, profile));
    auto pdf = algebra::exp_sum_derivative(cdf);
    auto mgf = algebra::exp_sum_laplace(pdf);
    return EndToEndStats(Scheme::RepetitiveSD, std::move(profile), std::move(mgf), std::move(cdf), std::move(pdf));
}

EndToEndStats build_pure_rs(const NetworkScenario& scenario) {
    NetworkScenario rs = scenario;
    rs.scheme = Scheme::PureRS;
    auto best = build_best_relay(rs);
    if (!best.has_mgf()) {
        return EndToEndStats(Scheme::PureRS, best.decoding(), std::nullopt, std::nullopt, std::nullopt,
                             best.limitation());
    }
    auto mgf = algebra::pole_sum_product(gamma_mgf_sum(scenario.direct), best.mgf());
    if (!scenario.direct.integer_m()) {
        return EndToEndStats(Scheme::PureRS, best.decoding(), std::move(mgf), std::nullopt, std::nullopt,
                             non_integer_links(scenario, true));
    }
    auto cdf = algebra::inverse_laplace_over_s(mgf);
    auto pdf = algebra::exp_sum_derivative(cdf);
    return EndToEndStats(Scheme::PureRS, best.decoding(), std::move(mgf), std::move(cdf), std::move(pdf));
}

EndToEndStats build_stats(const NetworkScenario& scenario) {
    switch (scenario.scheme) {
        case Scheme::RepetitiveMRD: return build_repetitive_mrd(scenario);
        case Scheme::RepetitiveSD: return build_repetitive_sd(scenario);
        case Scheme::PureRS:
        case Scheme::RateSelectiveRS: return build_pure_rs(scenario);
    }
    throw std::invalid_argument("build_stats: unknown scheme");
}

Branch rate_selective_choice(double g0, double g_end) {
    if (!(g0 >= 0.0) || !(g_end >= 0.0)) throw DomainError("rate_selective_choice: SNRs must be >= 0");
    return g_end > g0 * g0 + 2.0 * g0 ? Branch::Relay : Branch::Direct;
}

RateSelectiveStats build_rate_selective(const NetworkScenario& scenario) {
    NetworkScenario rs = scenario;
    rs.scheme = Scheme::RateSelectiveRS;
    return RateSelectiveStats{scenario.direct, build_best_relay(rs), build_pure_rs(rs)};
}

}  // namespace dfrelay::schemes
