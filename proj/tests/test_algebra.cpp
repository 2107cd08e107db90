#include "doctest.h"

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dfrelay/algebra.hpp"
#include "dfrelay/errors.hpp"

using namespace dfrelay;
using namespace dfrelay::algebra;
using doctest::Approx;

namespace {

ExpPolySum random_sum(std::mt19937_64& rng, bool with_atom = false) {
    std::uniform_real_distribution<double> coeff(-2, 2), rate(0.2, 3);
    std::uniform_int_distribution<int> count(1, 6), power(0, 3);
    std::vector<ExpPolyTerm> terms;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) terms.push_back({coeff(rng), power(rng), rate(rng)});
    return ExpPolySum(with_atom ? 0.25 : 0.0, terms);
}

PoleSum random_pole_sum(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coeff(-2, 2), pole(0.2, 4);
    std::uniform_int_distribution<int> count(1, 6), mult(1, 3), nf(1, 3);
    std::vector<PoleProduct> products;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
        std::vector<PoleFactor> fs;
        const int k = nf(rng);
        for (int j = 0; j < k; ++j) fs.push_back({pole(rng), double(mult(rng))});
        products.emplace_back(coeff(rng), fs);
    }
    return PoleSum(coeff(rng), products);
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("exp sums: canonical form") {
    ExpPolySum a(0.0, {{1, 0, 1.0}, {2, 0, 1.0 + 1e-14}, {3, 1, 2.0}});
    CHECK(a.terms().size() == 2);
    CHECK(a.terms()[0].coeff == Approx(3));
    ExpPolySum b(0.0, {{1, 0, 1.0}, {1e-20, 0, 2.0}});
    CHECK(b.terms().size() == 1);
    CHECK_THROWS_AS(ExpPolySum(0.0, {{1, -1, 1.0}}), ContractError);
}

TEST_CASE("exp sums: examples") {
    const auto f1 = ExpPolySum::constant(1) + ExpPolySum::term(-1, 0, 1);
    const auto f2 = ExpPolySum::constant(1) + ExpPolySum::term(-1, 0, 2);
    const auto prod = exp_sum_product(f1, f2);
    const auto expect = ExpPolySum(0.0, {{1, 0, 0}, {-1, 0, 1}, {-1, 0, 2}, {1, 0, 3}});
    REQUIRE(prod.terms().size() == expect.terms().size());
    for (std::size_t i = 0; i < expect.terms().size(); ++i) {
        CHECK(prod.terms()[i].coeff == Approx(expect.terms()[i].coeff));
        CHECK(prod.terms()[i].rate == Approx(expect.terms()[i].rate));
    }
    const auto id = exp_sum_product(f1, ExpPolySum::constant(1));
    CHECK(id(0.9) == Approx(f1(0.9)).epsilon(1e-15));
    CHECK_THROWS_AS(exp_sum_product(ExpPolySum(0.1, {}), f1), ContractError);

    CHECK(ExpPolySum::constant(1)(17.0) == 1.0);
    CHECK(ExpPolySum::term(2, 1, 2)(1.0) == Approx(2 * std::exp(-2.0)).epsilon(1e-15));
    CHECK_THROWS_AS(exp_sum_eval(f1, -1), DomainError);

    const auto d = exp_sum_derivative(ExpPolySum::constant(1) + ExpPolySum::term(-1, 0, 1.5));
    CHECK(d.atom_mass() == 0.0);
    CHECK(d(0.4) == Approx(1.5 * std::exp(-0.6)).epsilon(1e-14));
    const auto mix = ExpPolySum::constant(1) + ExpPolySum::term(-0.7, 0, 1);
    const auto dm = exp_sum_derivative(mix);
    CHECK(dm.atom_mass() == Approx(0.3).epsilon(1e-15));
    CHECK(dm(2.0) == Approx(0.7 * std::exp(-2.0)).epsilon(1e-14));
}

TEST_CASE("exp sums: random products and derivatives match pointwise") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> xs(0.0, 6.0);
    for (int trial = 0; trial < 30; ++trial) {
        auto a = random_sum(rng), b = random_sum(rng), c = random_sum(rng), e = random_sum(rng);
        auto p = exp_sum_product(exp_sum_product(a, b), exp_sum_product(c, e));
        auto sum = a + b;
        for (int k = 0; k < 20; ++k) {
            const double x = xs(rng);
            const double direct = a(x) * b(x) * c(x) * e(x);
            const double scale = std::max({1.0, std::abs(direct)});
            CHECK(std::abs(p(x) - direct) / scale < 1e-10);
            CHECK(rel_err(sum(x), a(x) + b(x)) < 1e-12);
            CHECK(rel_err((a * 2.5)(x), 2.5 * a(x)) < 1e-12);
        }
        for (double x : {0.5, 2.0}) {
            const auto cdf = exp_sum_product(exp_sum_product(a, b), c);
            const auto d = exp_sum_derivative(cdf);
            const double h = 1e-5;
            const double fd = (cdf(x + h) - cdf(x - h)) / (2 * h);
            CHECK(std::abs(d(x) - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
        }
    }
}

TEST_CASE("laplace transform") {
    CHECK(exp_sum_laplace(ExpPolySum(1.0, {})).constant_term() == 1.0);
    const auto t = exp_sum_laplace(ExpPolySum::term(1, 1, 2));
    CHECK(t(0.7) == Approx(std::pow(2.7, -2)).epsilon(1e-14));
    CHECK_THROWS_AS(exp_sum_laplace(ExpPolySum::constant(1)), ContractError);

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        auto pdf = random_sum(rng, true);
        auto mgf = exp_sum_laplace(pdf);
        for (double s : {0.0, 0.5, 1.0, 3.0}) {
            const double num = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                [&](double x) { return std::exp(-s * x) * pdf(x); }, 0.0, 200.0, 15, 1e-14);
            CHECK(rel_err(mgf(s), pdf.atom_mass() + num) < 1e-8);
        }
    }
}

TEST_CASE("pole sums") {
    auto p = PoleSum::single(1, 1, 1);
    auto sq = pole_sum_product(p, p);
    REQUIRE(sq.products().size() == 1);
    CHECK(sq.products()[0].factors().size() == 1);
    CHECK(sq.products()[0].factors()[0].multiplicity == 2);
    CHECK(pole_sum_product(p, PoleSum::constant(1))(0.3) == Approx(p(0.3)).epsilon(1e-15));

    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> ss(0.0, 5.0);
    for (int trial = 0; trial < 30; ++trial) {
        auto a = random_pole_sum(rng), b = random_pole_sum(rng);
        auto prod = pole_sum_product(a, b);
        auto sum = a + b;
        for (int k = 0; k < 20; ++k) {
            const double s = ss(rng);
            CHECK(rel_err(prod(s), a(s) * b(s)) < 1e-10);
            CHECK(rel_err(sum(s), a(s) + b(s)) < 1e-10);
        }
    }
    // Non-integer multiplicities evaluate but cannot be inverted.
    auto frac = PoleSum::single(std::pow(0.5, 0.5), 0.5, 0.5);
    CHECK(frac(0) == Approx(1).epsilon(1e-15));
    CHECK_THROWS_AS(inverse_laplace_over_s(frac), IntegralityError);
}

TEST_CASE("partial fractions") {
    auto find = [](const PartialFractions& pf, double pole, int order) {
        for (const auto& t : pf.terms) {
            if (std::abs(t.pole - pole) < 1e-12 && t.order == order) return t.coeff;
        }
        FAIL("term not found");
        return 0.0;
    };
    auto a = partial_fractions(PoleProduct(1, {{1, 1}, {2, 1}}));
    CHECK(a.terms.size() == 2);
    CHECK(find(a, 1, 1) == Approx(1));
    CHECK(find(a, 2, 1) == Approx(-1));
    auto b = partial_fractions(PoleProduct(1, {{1, 2}, {3, 1}}));
    CHECK(find(b, 1, 2) == Approx(0.5));
    CHECK(find(b, 1, 1) == Approx(-0.25));
    CHECK(find(b, 3, 1) == Approx(0.25));
    auto c = partial_fractions(PoleProduct(1, {{0.7, 4}}));
    REQUIRE(c.terms.size() == 1);
    CHECK(find(c, 0.7, 4) == 1.0);
    CHECK(partial_fractions(PoleProduct(1, {{1, 1}, {1.0001, 1}})).ill_conditioned);
    CHECK_FALSE(b.ill_conditioned);

    SUBCASE("recombination at random points") {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> pole(0.1, 5), ss(0.0, 10);
        std::uniform_int_distribution<int> mult(1, 5), nf(1, 5);
        for (int trial = 0; trial < 40; ++trial) {
            std::vector<PoleFactor> fs;
            const int k = nf(rng);
            for (int j = 0; j < k; ++j) fs.push_back({pole(rng), double(mult(rng))});
            PoleProduct p(1.3, fs);
            if (partial_fractions(p).ill_conditioned) continue;
            auto pf = partial_fractions(p);
            for (int i = 0; i < 20; ++i) {
                const double s = ss(rng);
                double sum = 0, magnitude = 0;
                for (const auto& t : pf.terms) {
                    const double v = t.coeff * std::pow(s + t.pole, -t.order);
                    sum += v;
                    magnitude += std::abs(v);
                }
                // Relative accuracy, floored at the rounding level of the largest cancelling term.
                CHECK(std::abs(sum - p(s)) <= 1e-10 * std::abs(p(s)) + 1e-14 * magnitude);
            }
        }
    }
}

TEST_CASE("inverse laplace") {
    auto e = inverse_laplace_over_s(PoleSum::single(0.8, 0.8, 1));
    for (double x : {0.0, 0.5, 3.0}) CHECK(e(x) == Approx(1 - std::exp(-0.8 * x)).epsilon(1e-14));
    auto u = inverse_laplace_over_s(PoleSum::constant(1));
    CHECK(u(0.0) == 1.0);
    CHECK(u(5.0) == 1.0);

    SUBCASE("round trip reproduces running integral of a pdf") {
        // Mixture of gamma laws with integer shapes.
        ExpPolySum pdf(0.2, {{0.3 * 2.0, 0, 2.0},
                             {0.5 * std::pow(1.5, 3) / 2.0, 2, 1.5}});
        auto cdf = inverse_laplace_over_s(exp_sum_laplace(pdf));
        for (double x : {0.0, 0.1, 0.7, 2.0, 5.0, 20.0}) {
            const double run = pdf.atom_mass() + boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                                                     [&](double t) { return pdf(t); }, 0.0, x, 15, 1e-15);
            CHECK(std::abs(cdf(x) - run) < 1e-9);
        }
        CHECK(cdf.limit_at_infinity() == Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("Z function") {
    for (int t = 1; t <= 6; ++t) {
        for (double c : {0.3, 1.0, 4.0}) {
            CHECK(z_function(t, c, 0.0) == 0.0);
            CHECK(z_function(t, c, 200.0 / c) == Approx(1.0).epsilon(1e-14));
            const auto zs = z_function_sum(t, c);
            for (double x : {0.2, 1.0, 5.0}) CHECK(zs(x) == Approx(z_function(t, c, x)).epsilon(1e-12));
        }
    }
}

TEST_CASE("extended precision re-evaluation") {
    // (1 − e^(−x))(1 − e^(−1.01x))(1 − e^(−1.02x)) expanded has cancelling terms near 0.
    auto f = [](double c) { return ExpPolySum::constant(1) + ExpPolySum::term(-1, 0, c); };
    auto p = exp_sum_product(exp_sum_product(f(1.0), f(1.01)), f(1.02));
    const double x = 1e-3;
    const double exact = -std::expm1(-x) * -std::expm1(-1.01 * x) * -std::expm1(-1.02 * x);
    CHECK(exp_sum_eval_extended(p, x) == Approx(exact).epsilon(1e-6));
    CHECK(cancellation_ratio(p, x) > 1e6);
}

TEST_CASE("subset enumerations") {
    auto one = increasing_subsets(1, 1);
    REQUIRE(one.size() == 1);
    CHECK(one[0] == std::vector<int>{1});
    CHECK(increasing_subsets(1, 3).size() == 7);
    CHECK(increasing_subsets(0, 3).front() == std::vector<int>{0});
    CHECK(increasing_subsets(0, 3).back() == std::vector<int>{0, 1, 2, 3});

    for (int n = 1; n <= 6; ++n) {
        for (int depth = 1; depth <= 3; ++depth) {
            std::uint64_t count = 0;
            for_each_subset_chain(1, n, depth, [&](const SubsetChain&) { ++count; });
            CHECK(count == subset_chain_count(n, depth));
        }
    }
    // Brute force over bitmasks for L = 3.
    std::set<std::vector<int>> brute;
    for (int lam = 1; lam < 8; ++lam) {
        std::vector<int> l;
        for (int i = 0; i < 3; ++i) if (lam >> i & 1) l.push_back(i + 1);
        const int k = static_cast<int>(l.size());
        for (int mu = 1; mu < (1 << k); ++mu) {
            std::vector<int> m;
            for (int i = 0; i < k; ++i) if (mu >> i & 1) m.push_back(i);
            const int j = static_cast<int>(m.size());
            for (int nu = 1; nu < (1 << j); ++nu) {
                std::vector<int> key{lam, mu, nu};
                brute.insert(key);
            }
        }
    }
    std::set<std::vector<int>> seen;
    for_each_subset_chain(1, 3, 3, [&](const SubsetChain& ch) {
        int lam = 0, mu = 0, nu = 0;
        for (int v : ch.lambda) lam |= 1 << (v - 1);
        for (int v : ch.mu) mu |= 1 << v;
        for (int v : ch.nu) nu |= 1 << v;
        CHECK(seen.insert({lam, mu, nu}).second);
    });
    CHECK(seen == brute);
    CHECK_THROWS_AS(for_each_subset_chain(1, 13, 1, [](const SubsetChain&) {}), ResourceGuardError);
}

TEST_CASE("compositions") {
    auto a = enumerate_compositions(2, 1);
    REQUIRE(a.size() == 2);
    CHECK(a[0].parts == std::vector<int>{1, 0});
    CHECK(a[1].parts == std::vector<int>{0, 1});
    CHECK(a[1].sigma == 1);
    auto b = enumerate_compositions(1, 5);
    REQUIRE(b.size() == 1);
    CHECK(b[0].parts == std::vector<int>{5});
    CHECK(composition_count(3, 4) == 15);
    for (int m = 1; m <= 5; ++m) {
        for (int j = 0; j <= 6; ++j) {
            auto all = enumerate_compositions(m, j);
            CHECK(all.size() == composition_count(m, j));
            std::set<std::vector<int>> uniq;
            for (const auto& c : all) {
                int total = 0, sigma = 0;
                for (int i = 0; i < m; ++i) {
                    total += c.parts[i];
                    sigma += i * c.parts[i];
                }
                CHECK(total == j);
                CHECK(sigma == c.sigma);
                uniq.insert(c.parts);
            }
            CHECK(uniq.size() == all.size());
        }
    }
    CHECK_THROWS_AS(enumerate_compositions(10, 40), ResourceGuardError);
}
