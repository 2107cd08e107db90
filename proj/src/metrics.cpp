#include "dfrelay/metrics.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/owens_t.hpp>

#include "dfrelay/errors.hpp"

namespace dfrelay::metrics {

using std::numbers::pi;

void ModulationSpec::validate() const {
    const bool power_of_two = order >= 2 && (order & (order - 1)) == 0;
    switch (family) {
        case Family::NBFSK:
        case Family::DBPSK:
            if (order != 2) throw std::invalid_argument("binary modulation must have order 2");
            return;
        case Family::MPSK:
            if (!power_of_two) throw std::invalid_argument("M-PSK order must be a power of two >= 2");
            return;
        case Family::MQAM: {
            const int root = static_cast<int>(std::lround(std::sqrt(order)));
            if (!power_of_two || order < 4 || root * root != order) {
                throw std::invalid_argument("M-QAM order must be a square power of two >= 4");
            }
            return;
        }
    }
}

int ModulationSpec::bits_per_symbol() const {
    int bits = 0;
    for (int m = order; m > 1; m >>= 1) ++bits;
    return bits;
}

std::string ModulationSpec::family_name() const {
    switch (family) {
        case Family::NBFSK: return "nbfsk";
        case Family::DBPSK: return "dbpsk";
        case Family::MPSK: return "mpsk";
        case Family::MQAM: return "mqam";
    }
    return "unknown";
}

ModulationSpec modulation_from_string(const std::string& family, int order) {
    ModulationSpec spec;
    if (family == "nbfsk") {
        spec = ModulationSpec::nbfsk();
    } else if (family == "dbpsk") {
        spec = ModulationSpec::dbpsk();
    } else if (family == "bpsk") {
        spec = ModulationSpec::mpsk(2);
    } else if (family == "mpsk") {
        spec = ModulationSpec::mpsk(order);
    } else if (family == "mqam") {
        spec = ModulationSpec::mqam(order);
    } else {
        throw std::invalid_argument("unknown modulation '" + family + "'");
    }
    spec.validate();
    return spec;
}

std::string to_string(MetricKind kind) {
    switch (kind) {
        case MetricKind::OP: return "OP";
        case MetricKind::ASEP: return "ASEP";
        case MetricKind::ABEP: return "ABEP";
    }
    return "unknown";
}

std::string to_string(Method method) {
    switch (method) {
        case Method::ClosedForm: return "closed-form";
        case Method::Quadrature: return "quadrature";
        case Method::ConditionedQuadrature: return "conditioned-quadrature";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------

namespace {

GaussLegendreRule build_rule(int n) {
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // One more derivative at the converged node for the weight.
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

double apply_rule(const GaussLegendreRule& rule, const std::function<double(double)>& f, double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return sum * half;
}

constexpr int kFirstNodes = 64;
constexpr int kMaxNodes = 1024;

}  // namespace

const GaussLegendreRule& gauss_legendre(int n) {
    static std::mutex mutex;
    static std::map<int, GaussLegendreRule> cache;
    if (n < 1) throw std::invalid_argument("gauss_legendre: need n >= 1");
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
    return it->second;
}

QuadratureResult integrate_doubling(const std::function<double(double)>& f, double a, double b, double tol) {
    double previous = apply_rule(gauss_legendre(kFirstNodes), f, a, b);
    double error = std::numeric_limits<double>::infinity();
    for (int n = 2 * kFirstNodes; n <= kMaxNodes; n *= 2) {
        const double current = apply_rule(gauss_legendre(n), f, a, b);
        error = std::abs(current - previous);
        if (error <= tol) return {current, error, n};
        previous = current;
    }
    throw ConvergenceError("Gauss-Legendre quadrature did not reach the requested tolerance (last error " +
                           std::to_string(error) + ")");
}

// ---------------------------------------------------------------------------
// Outage

namespace {

double threshold_of(double alpha, double rate) { return std::exp2(alpha * rate) - 1.0; }

// Product of per-path CDFs, valid for any real m.
double best_cdf_direct(const NetworkScenario& scenario, const channel::DecodingProfile& profile, double x) {
    double prod = 1.0;
    for (int k = 0; k < scenario.relay_count(); ++k) {
        prod *= channel::path_cdf(scenario.second_hop[k], profile.p_fail[k], x);
    }
    return prod;
}

// ∫_0^upper f_g0(x)·g(x) dx, robust to the x^(m−1) endpoint singularity for m < 1.
double integrate_against_direct(const channel::LinkSpec& direct, double upper, const std::function<double(double)>& g,
                                double tol) {
    boost::math::quadrature::tanh_sinh<double> integrator;
    auto f = [&](double x) {
        const double fx = channel::gamma_pdf(direct, x);
        return fx == 0.0 ? 0.0 : fx * g(x);
    };
    if (std::isinf(upper)) {
        const double split = direct.gamma_bar();
        boost::math::quadrature::exp_sinh<double> tail;
        return integrator.integrate(f, 0.0, split, tol) + tail.integrate([&](double x) { return f(x); }, split,
                                                                         std::numeric_limits<double>::infinity(), tol);
    }
    return integrator.integrate(f, 0.0, upper, tol);
}

constexpr double kConditioningTolerance = 1e-12;

void require_scheme(const EndToEndStats& stats, const NetworkScenario& scenario) {
    if (stats.scheme() != scenario.scheme) {
        throw ContractError("statistics were built for " + channel::to_string(stats.scheme()) + " but the scenario uses " +
                            channel::to_string(scenario.scheme));
    }
}

}  // namespace

double direct_outage(const NetworkScenario& scenario) {
    return channel::gamma_cdf(scenario.direct, threshold_of(1, scenario.rate));
}

PerformanceResult outage(const EndToEndStats& stats, const NetworkScenario& scenario) {
    require_scheme(stats, scenario);
    const double t = schemes::outage_threshold(scenario);
    if (stats.has_cdf()) return {MetricKind::OP, stats.cdf()(t), Method::ClosedForm, 0, 0.0};
    const auto& profile = stats.decoding();
    switch (scenario.scheme) {
        case channel::Scheme::RepetitiveSD:
            return {MetricKind::OP, channel::gamma_cdf(scenario.direct, t) * best_cdf_direct(scenario, profile, t),
                    Method::ClosedForm, 0, 0.0};
        case channel::Scheme::RepetitiveMRD:
            // Throws ContractError unless all C are equal, the one non-integer closed form.
            return {MetricKind::OP, schemes::literal_cdf_rep_mrd_equal_c(scenario, t), Method::ClosedForm, 0, 0.0};
        case channel::Scheme::PureRS: {
            const double v = integrate_against_direct(
                scenario.direct, t, [&](double x) { return best_cdf_direct(scenario, profile, t - x); },
                kConditioningTolerance);
            return {MetricKind::OP, v, Method::ConditionedQuadrature, 0, 0.0};
        }
        case channel::Scheme::RateSelectiveRS: break;
    }
    throw ContractError("outage: use outage_rate_selective for the rate-selective scheme");
}

PerformanceResult outage_rate_selective(const RateSelectiveStats& rs, const NetworkScenario& scenario) {
    const double t1 = threshold_of(1, scenario.rate);
    const double t2 = threshold_of(2, scenario.rate);
    const double v = channel::gamma_cdf(rs.direct, t1) * best_cdf_direct(scenario, rs.best.decoding(), t2);
    return {MetricKind::OP, v, Method::ClosedForm, 0, 0.0};
}

PerformanceResult outage_rate_selective_exact(const RateSelectiveStats& rs, const NetworkScenario& scenario) {
    const double t1 = threshold_of(1, scenario.rate);
    const double t2 = threshold_of(2, scenario.rate);
    const auto& profile = rs.best.decoding();
    const double v = integrate_against_direct(
        rs.direct, t1, [&](double x) { return best_cdf_direct(scenario, profile, t2 - x); }, kConditioningTolerance);
    return {MetricKind::OP, v, Method::ConditionedQuadrature, 0, 0.0};
}

// ---------------------------------------------------------------------------
// Error probabilities

namespace {

double q_function(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double g_psk(int order) {
    const double s = std::sin(pi / order);
    return s * s;
}

double g_qam(int order) { return 3.0 / (2.0 * (order - 1)); }

}  // namespace

double conditional_sep(const ModulationSpec& modulation, double snr) {
    modulation.validate();
    if (!(snr >= 0.0)) throw DomainError("conditional_sep: SNR must be >= 0");
    switch (modulation.family) {
        case Family::DBPSK: return 0.5 * std::exp(-snr);
        case Family::NBFSK: return 0.5 * std::exp(-0.5 * snr);
        case Family::MPSK: {
            // (1/π)∫_0^{π−π/M} exp(−g·γ/sin²φ) dφ split at π/2: Craig's Q plus an Owen's T tail.
            const double h = std::sqrt(2.0 * snr * g_psk(modulation.order));
            if (modulation.order == 2) return q_function(h);
            return q_function(h) + 2.0 * boost::math::owens_t(h, 1.0 / std::tan(pi / modulation.order));
        }
        case Family::MQAM: {
            const double a = 1.0 - 1.0 / std::sqrt(static_cast<double>(modulation.order));
            const double q = a * std::erfc(std::sqrt(g_qam(modulation.order) * snr));
            return 2.0 * q - q * q;
        }
    }
    throw std::invalid_argument("conditional_sep: unknown modulation");
}

PerformanceResult asep_from_mgf(const std::function<double(double)>& mgf, const ModulationSpec& modulation, double tol) {
    modulation.validate();
    switch (modulation.family) {
        case Family::NBFSK: return {MetricKind::ASEP, 0.5 * mgf(0.5), Method::ClosedForm, 0, 0.0};
        case Family::DBPSK: return {MetricKind::ASEP, 0.5 * mgf(1.0), Method::ClosedForm, 0, 0.0};
        case Family::MPSK: {
            const double g = g_psk(modulation.order);
            auto r = integrate_doubling(
                [&](double phi) {
                    const double s = std::sin(phi);
                    return mgf(g / (s * s)) / pi;
                },
                0.0, pi - pi / modulation.order, tol);
            return {MetricKind::ASEP, r.value, Method::Quadrature, r.nodes, r.error_estimate};
        }
        case Family::MQAM: {
            const double g = g_qam(modulation.order);
            const double a = 1.0 - 1.0 / std::sqrt(static_cast<double>(modulation.order));
            auto integrand = [&](double phi) {
                const double s = std::sin(phi);
                return mgf(g / (s * s));
            };
            const double scale = 4.0 / pi * a;
            auto i1 = integrate_doubling(integrand, 0.0, pi / 2, 0.5 * tol / scale);
            auto i2 = integrate_doubling(integrand, 0.0, pi / 4, 0.5 * tol / (scale * a));
            return {MetricKind::ASEP, scale * (i1.value - a * i2.value), Method::Quadrature, i1.nodes + i2.nodes,
                    scale * (i1.error_estimate + a * i2.error_estimate)};
        }
    }
    throw std::invalid_argument("asep_from_mgf: unknown modulation");
}

PerformanceResult abep_point(const EndToEndStats& stats, const ModulationSpec& modulation) {
    if (modulation.family != Family::NBFSK && modulation.family != Family::DBPSK) {
        throw std::invalid_argument("abep_point: only NBFSK and DBPSK have single-point forms");
    }
    const auto& mgf = stats.mgf();
    auto r = asep_from_mgf([&](double s) { return mgf(s); }, modulation);
    r.kind = MetricKind::ABEP;
    return r;
}

PerformanceResult asep_mpsk(const EndToEndStats& stats, int order, double tol) {
    const auto& mgf = stats.mgf();
    return asep_from_mgf([&](double s) { return mgf(s); }, ModulationSpec::mpsk(order), tol);
}

PerformanceResult asep_mqam(const EndToEndStats& stats, int order, double tol) {
    const auto& mgf = stats.mgf();
    return asep_from_mgf([&](double s) { return mgf(s); }, ModulationSpec::mqam(order), tol);
}

PerformanceResult asep(const EndToEndStats& stats, const ModulationSpec& modulation, double tol) {
    const auto& mgf = stats.mgf();
    return asep_from_mgf([&](double s) { return mgf(s); }, modulation, tol);
}

namespace {

PerformanceResult to_abep(PerformanceResult r, const ModulationSpec& modulation) {
    const int bits = modulation.bits_per_symbol();
    r.kind = MetricKind::ABEP;
    if (bits > 1) {
        r.value /= bits;
        r.error_estimate /= bits;
    }
    return r;
}

}  // namespace

PerformanceResult abep(const EndToEndStats& stats, const ModulationSpec& modulation, double tol) {
    return to_abep(asep(stats, modulation, tol), modulation);
}

double rate_selective_mgf(const RateSelectiveStats& rs, double s) {
    if (!(s >= 0.0)) throw DomainError("rate_selective_mgf: s must be >= 0");
    const auto& cdf = rs.best.cdf();
    const auto& pdf = rs.best.pdf();
    // ∫_τ^∞ y^n e^(−(λ+s)y) dy = n!/(λ+s)^(n+1) · Q(n+1, (λ+s)τ)
    auto relay_tail = [&](double tau) {
        double sum = 0.0;
        for (const auto& t : pdf.terms()) {
            const double rate = t.rate + s;
            sum += t.coeff * std::exp(std::lgamma(t.power + 1.0) - (t.power + 1.0) * std::log(rate)) *
                   regularized_gamma_q(t.power + 1.0, rate * tau);
        }
        return sum;
    };
    return integrate_against_direct(
        rs.direct, std::numeric_limits<double>::infinity(),
        [&](double x) {
            const double tau = RateSelectiveStats::threshold(x);
            return std::exp(-s * x) * (cdf(tau) + relay_tail(tau));
        },
        kConditioningTolerance);
}

PerformanceResult asep_rate_selective(const RateSelectiveStats& rs, const ModulationSpec& modulation, double tol) {
    auto r = asep_from_mgf([&](double s) { return rate_selective_mgf(rs, s); }, modulation, tol);
    r.method = Method::ConditionedQuadrature;
    return r;
}

PerformanceResult abep_rate_selective(const RateSelectiveStats& rs, const ModulationSpec& modulation, double tol) {
    return to_abep(asep_rate_selective(rs, modulation, tol), modulation);
}

AlphaReadings rate_selective_alpha_readings(const NetworkScenario& scenario, const ModulationSpec& modulation,
                                            double tol) {
    const auto rs = schemes::build_rate_selective(scenario);
    AlphaReadings out{};
    out.exact = asep_rate_selective(rs, modulation, tol).value;
    const double g = scenario.direct.gamma_bar();
    out.mean_alpha = g * g * (1.0 + 1.0 / scenario.direct.m()) + 2.0 * g;
    out.at_mean_alpha =
        asep_from_mgf([&](double s) { return schemes::literal_mgf_rate_selective(scenario, s, out.mean_alpha); },
                      modulation, tol)
            .value;
    const bool iid = schemes::is_iid(scenario);
    auto f_end = [&](double a) {
        return iid ? schemes::literal_cdf_pure_rs_equal_c(scenario, a) : schemes::literal_cdf_pure_rs(scenario, a);
    };
    const double mean_f = integrate_against_direct(
        scenario.direct, std::numeric_limits<double>::infinity(), [&](double x) { return f_end(x * x + 2.0 * x); },
        kConditioningTolerance);
    out.alpha_averaged = asep_from_mgf(
                             [&](double s) {
                                 const double m0 = channel::gamma_mgf(scenario.direct, s);
                                 const double m_end = schemes::literal_mgf_rate_selective(scenario, s, 0.0);
                                 return m0 * mean_f + m_end * (1.0 - mean_f);
                             },
                             modulation, tol)
                             .value;
    return out;
}

}  // namespace dfrelay::metrics
