#include "doctest.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "dfrelay/errors.hpp"
#include "dfrelay/metrics.hpp"

using namespace dfrelay;
using namespace dfrelay::metrics;
using channel::db_to_linear;
using channel::LinkSpec;
using channel::profile_scenario;
using channel::Scheme;
using doctest::Approx;
using std::numbers::pi;

namespace {

NetworkScenario iid(Scheme scheme, int L, double m, double gamma0_db) {
    const double g = db_to_linear(gamma0_db);
    return profile_scenario(scheme, L, 1.0, m, g, m, g, 0.0);
}

NetworkScenario inid(Scheme scheme, int L, double m, double gamma0_db, double delta = 0.3) {
    const double g = db_to_linear(gamma0_db);
    return profile_scenario(scheme, L, 1.0, m, g, m, g, delta);
}

NetworkScenario single(double m, double gbar, Scheme scheme = Scheme::RepetitiveMRD) {
    NetworkScenario s;
    s.scheme = scheme;
    s.direct = LinkSpec(m, gbar);
    return s;
}

// Craig-form conditional SEP by adaptive quadrature, independent of conditional_sep.
double craig_sep(const ModulationSpec& mod, double g) {
    using boost::math::quadrature::gauss_kronrod;
    auto f = [&](double coef) {
        return [=](double phi) {
            const double s = std::sin(phi);
            return std::exp(-coef * g / (s * s));
        };
    };
    const int M = mod.order;
    switch (mod.family) {
        case Family::MPSK: {
            const double c = std::pow(std::sin(pi / M), 2);
            return gauss_kronrod<double, 61>::integrate(f(c), 0.0, pi - pi / M, 15, 1e-14) / pi;
        }
        case Family::MQAM: {
            const double c = 1.5 / (M - 1);
            const double a = 1 - 1 / std::sqrt(double(M));
            return 4 / pi * a *
                   (gauss_kronrod<double, 61>::integrate(f(c), 0.0, pi / 2, 15, 1e-14) -
                    a * gauss_kronrod<double, 61>::integrate(f(c), 0.0, pi / 4, 15, 1e-14));
        }
        case Family::DBPSK: return 0.5 * std::exp(-g);
        case Family::NBFSK: return 0.5 * std::exp(-g / 2);
    }
    return NAN;
}

const std::vector<ModulationSpec> kMods = {ModulationSpec::dbpsk(), ModulationSpec::nbfsk(), ModulationSpec::mpsk(2),
                                           ModulationSpec::mpsk(8), ModulationSpec::mqam(4), ModulationSpec::mqam(16)};

}  // namespace

TEST_CASE("gauss-legendre rules") {
    for (int n : {64, 128, 1024}) {
        const auto& r = gauss_legendre(n);
        double sum = 0, x4 = 0;
        for (int i = 0; i < n; ++i) {
            sum += r.weights[i];
            x4 += r.weights[i] * std::pow(r.nodes[i], 4);
            CHECK(std::abs(r.nodes[i]) < 1.0);
        }
        CHECK(sum == Approx(2.0).epsilon(1e-14));
        CHECK(x4 == Approx(0.4).epsilon(1e-13));
    }
    auto r = integrate_doubling([](double x) { return std::exp(-x); }, 0.0, 3.0, 1e-12);
    CHECK(r.value == Approx(1 - std::exp(-3.0)).epsilon(1e-14));
    CHECK(r.nodes == 128);
    CHECK_THROWS_AS(integrate_doubling([](double x) { return std::sin(1e5 * x); }, 0.0, 1.0, 1e-12), ConvergenceError);
}

TEST_CASE("modulation specs") {
    CHECK_THROWS(ModulationSpec::mpsk(6).validate());
    CHECK_THROWS(ModulationSpec::mqam(8).validate());
    CHECK_THROWS(ModulationSpec::mqam(2).validate());
    CHECK_NOTHROW(ModulationSpec::mqam(64).validate());
    CHECK(ModulationSpec::mpsk(8).bits_per_symbol() == 3);
    CHECK(modulation_from_string("bpsk", 2) == ModulationSpec::mpsk(2));
    CHECK_THROWS(modulation_from_string("ook", 2));
}

TEST_CASE("conditional SEP matches the finite-range integrals") {
    std::vector<ModulationSpec> mods = kMods;
    mods.push_back(ModulationSpec::mpsk(4));
    mods.push_back(ModulationSpec::mpsk(16));
    mods.push_back(ModulationSpec::mqam(64));
    for (const auto& mod : mods) {
        for (double g : {0.0, 0.01, 0.5, 2.0, 7.0, 30.0, 200.0}) {
            const double ref = craig_sep(mod, g);
            CHECK(std::abs(conditional_sep(mod, g) - ref) <= 1e-13 + 1e-10 * ref);
        }
    }
    CHECK(conditional_sep(ModulationSpec::mpsk(2), 1.0) == Approx(0.5 * std::erfc(1.0)).epsilon(1e-14));
    CHECK_THROWS_AS(conditional_sep(ModulationSpec::dbpsk(), -1.0), DomainError);
}

TEST_CASE("single Rayleigh link") {
    const auto st = schemes::build_stats(single(1, 1));
    CHECK(asep(st, ModulationSpec::dbpsk()).value == Approx(0.25).epsilon(1e-14));
    CHECK(asep(st, ModulationSpec::nbfsk()).value == Approx(1.0 / 3).epsilon(1e-14));
    CHECK(asep(st, ModulationSpec::mpsk(2)).value == Approx(0.5 * (1 - std::sqrt(0.5))).epsilon(1e-10));
    CHECK(std::abs(asep_mpsk(st, 2).value - 0.146447) < 5e-7);
    // M-QAM/M-PSK against the textbook Rayleigh forms for 4 symbols: both equal QPSK.
    CHECK(asep_mqam(st, 4).value == Approx(asep_mpsk(st, 4).value).epsilon(1e-10));
    CHECK(abep_point(st, ModulationSpec::dbpsk()).value == Approx(0.25).epsilon(1e-14));
    CHECK(abep(st, ModulationSpec::mqam(16)).value == Approx(asep(st, ModulationSpec::mqam(16)).value / 4).epsilon(1e-14));
}

TEST_CASE("ASEP equals the SEP averaged over the end-to-end density") {
    boost::math::quadrature::tanh_sinh<double> ts;
    boost::math::quadrature::exp_sinh<double> es;
    for (Scheme sch : {Scheme::RepetitiveMRD, Scheme::RepetitiveSD, Scheme::PureRS}) {
        for (const auto& sc : {iid(sch, 2, 2, 5), inid(sch, 3, 1, 0), inid(sch, 2, 3, 10)}) {
            const auto st = schemes::build_stats(sc);
            const auto pdf = st.pdf();
            for (const auto& mod : kMods) {
                auto f = [&](double x) { return pdf(x) * conditional_sep(mod, x); };
                const double avg = pdf.atom_mass() * conditional_sep(mod, 0.0) + ts.integrate(f, 0.0, 5.0) +
                                   es.integrate(f, 5.0, std::numeric_limits<double>::infinity());
                CHECK(std::abs(asep(st, mod).value - avg) <= 1e-7);
            }
        }
    }
}

TEST_CASE("ASEP bounds and monotonicity") {
    for (Scheme sch : {Scheme::RepetitiveMRD, Scheme::RepetitiveSD, Scheme::PureRS}) {
        const auto sc = inid(sch, 2, 2, 5);
        const auto st = schemes::build_stats(sc);
        double prev = 0;
        for (int M : {2, 4, 8, 16, 32}) {
            const double v = asep_mpsk(st, M).value;
            CHECK(v >= prev - 1e-12);
            CHECK(v <= 1 - 1.0 / M);
            prev = v;
        }
        for (const auto& mod : kMods) {
            double last = 1.0;
            for (double db : {0.0, 5.0, 10.0, 15.0}) {
                const double v = asep(schemes::build_stats(inid(sch, 2, 2, db)), mod).value;
                CHECK(v > 0.0);
                CHECK(v < last);
                last = v;
            }
        }
    }
}

TEST_CASE("outage") {
    const auto sc = iid(Scheme::RepetitiveMRD, 2, 2, 5);
    const auto st = schemes::build_stats(sc);
    const auto r = outage(st, sc);
    CHECK(r.kind == MetricKind::OP);
    CHECK(r.value == Approx(st.cdf()(std::exp2(3.0) - 1)).epsilon(1e-15));
    CHECK(direct_outage(sc) == Approx(channel::gamma_cdf(sc.direct, 1.0)).epsilon(1e-15));

    auto other = sc;
    other.scheme = Scheme::RepetitiveSD;
    CHECK_THROWS_AS(outage(st, other), ContractError);

    // Non-integer m falls back and stays continuous with the closed forms.
    for (Scheme sch : {Scheme::RepetitiveMRD, Scheme::RepetitiveSD, Scheme::PureRS}) {
        const auto a = iid(sch, 2, 2, 5);
        auto b = a;
        b.direct = LinkSpec(2 + 1e-9, a.direct.gamma_bar());
        if (sch != Scheme::RepetitiveMRD) {
            for (auto& l : b.second_hop) l = LinkSpec(2 + 1e-9, l.gamma_bar());
        }
        const auto sa = schemes::build_stats(a);
        const auto sb = schemes::build_stats(b);
        CHECK(!sb.has_cdf());
        CHECK(outage(sb, b).value == Approx(outage(sa, a).value).epsilon(1e-6));
    }
    // MRD with unequal C and non-integer m has no form at all.
    auto bad = inid(Scheme::RepetitiveMRD, 2, 2, 5);
    bad.direct = LinkSpec(1.5, bad.direct.gamma_bar());
    CHECK_THROWS_AS(outage(schemes::build_stats(bad), bad), ContractError);
}

TEST_CASE("rate-selective outage: printed product bounds the exact value") {
    for (double m : {1.0, 2.0, 3.0}) {
        for (double db : {0.0, 5.0, 10.0}) {
            for (const auto& sc : {iid(Scheme::RateSelectiveRS, 2, m, db), inid(Scheme::RateSelectiveRS, 3, m, db)}) {
                const auto rs = schemes::build_rate_selective(sc);
                const double lit = outage_rate_selective(rs, sc).value;
                const double ex = outage_rate_selective_exact(rs, sc).value;
                CHECK(ex <= lit + 1e-12);
                CHECK(ex > 0);
                // Exact outage can be no larger than that of either branch alone.
                CHECK(ex <= direct_outage(sc) + 1e-12);
                auto pure = sc;
                pure.scheme = Scheme::PureRS;
                CHECK(ex <= outage(schemes::build_stats(pure), pure).value + 1e-12);
            }
        }
    }
}

TEST_CASE("rate-selective MGF") {
    const auto sc = inid(Scheme::RateSelectiveRS, 2, 2, 5);
    const auto rs = schemes::build_rate_selective(sc);
    CHECK(rate_selective_mgf(rs, 0.0) == Approx(1.0).epsilon(1e-10));

    // Inner tail by plain quadrature over the best-relay density.
    boost::math::quadrature::tanh_sinh<double> ts;
    boost::math::quadrature::exp_sinh<double> es;
    const auto pdf = rs.best.pdf();
    const auto cdf = rs.best.cdf();
    for (double s : {0.3, 1.0, 4.0}) {
        auto outer = [&](double x) {
            const double tau = x * x + x;
            const double tail = es.integrate([&](double y) { return pdf(y) * std::exp(-s * y); }, tau,
                                             std::numeric_limits<double>::infinity());
            return channel::gamma_pdf(sc.direct, x) * std::exp(-s * x) * (cdf(tau) + tail);
        };
        const double ref = ts.integrate(outer, 0.0, 2.0) + es.integrate(outer, 2.0, std::numeric_limits<double>::infinity());
        CHECK(rate_selective_mgf(rs, s) == Approx(ref).epsilon(1e-8));
    }
}

TEST_CASE("rate-selective with no decoding relay reduces to the direct link") {
    auto sc = iid(Scheme::RateSelectiveRS, 2, 2, 5);
    for (auto& l : sc.first_hop) l = LinkSpec(2, 1e-9);
    const auto rs = schemes::build_rate_selective(sc);
    const auto direct_stats = schemes::build_stats(single(2, sc.direct.gamma_bar()));
    for (const auto& mod : kMods) {
        CHECK(asep_rate_selective(rs, mod).value == Approx(asep(direct_stats, mod).value).epsilon(1e-8));
    }
    const auto r = rate_selective_alpha_readings(sc, ModulationSpec::dbpsk());
    CHECK(r.exact == Approx(r.at_mean_alpha).epsilon(1e-8));
    CHECK(r.exact == Approx(r.alpha_averaged).epsilon(1e-8));
}

TEST_CASE("rate-selective alpha readings") {
    const auto sc = iid(Scheme::RateSelectiveRS, 2, 1, 5);
    const double g = db_to_linear(5.0);
    const auto r = rate_selective_alpha_readings(sc, ModulationSpec::dbpsk());
    CHECK(r.mean_alpha == Approx(2 * g * g + 2 * g).epsilon(1e-14));
    for (double v : {r.exact, r.at_mean_alpha, r.alpha_averaged}) {
        CHECK(v > 0);
        CHECK(v < 0.5);
    }
    const auto rs = schemes::build_rate_selective(sc);
    CHECK(abep_rate_selective(rs, ModulationSpec::mpsk(8)).value ==
          Approx(asep_rate_selective(rs, ModulationSpec::mpsk(8)).value / 3).epsilon(1e-14));
}
