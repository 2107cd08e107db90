#include "dfrelay/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "dfrelay/errors.hpp"

namespace dfrelay::algebra {

namespace {

// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

bool close_relative(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

// Maps every value onto the smallest member of its tolerance cluster.
template <typename Get, typename Set, typename Range>
void snap_values(Range& items, Get get, Set set, double tol) {
    std::vector<double> values;
    for (auto& item : items) get(item, values);
    if (values.empty()) return;
    std::sort(values.begin(), values.end());
    std::vector<double> reps;
    reps.reserve(values.size());
    double start = values.front();
    for (double v : values) {
        if (!close_relative(v, start, tol)) start = v;
        reps.push_back(start);
    }
    auto lookup = [&](double v) {
        auto it = std::lower_bound(values.begin(), values.end(), v);
        return reps[static_cast<std::size_t>(it - values.begin())];
    };
    for (auto& item : items) set(item, lookup);
}

// max_x |x^n e^(-λx)|
double term_peak(int power, double rate) {
    if (power == 0) return 1.0;
    if (rate == 0.0) return std::numeric_limits<double>::infinity();
    return std::exp(power * (std::log(power / rate) - 1.0));
}

double term_value(const ExpPolyTerm& t, double x) {
    if (t.power == 0) return t.coeff * std::exp(-t.rate * x);
    if (x == 0.0) return 0.0;
    return t.coeff * std::exp(t.power * std::log(x) - t.rate * x);
}

}  // namespace

// ---------------------------------------------------------------------------
// ExpPolySum

ExpPolySum::ExpPolySum(double atom_mass, std::vector<ExpPolyTerm> terms)
    : atom_(atom_mass), terms_(std::move(terms)) {
    canonicalize();
}

ExpPolySum ExpPolySum::constant(double value) { return ExpPolySum(0.0, {{value, 0, 0.0}}); }

ExpPolySum ExpPolySum::term(double coeff, int power, double rate) {
    return ExpPolySum(0.0, {{coeff, power, rate}});
}

void ExpPolySum::canonicalize() {
    if (!std::isfinite(atom_)) throw ContractError("ExpPolySum: atom mass must be finite");
    for (const auto& t : terms_) {
        if (t.power < 0 || !(t.rate >= 0.0) || !std::isfinite(t.rate) || !std::isfinite(t.coeff)) {
            throw ContractError("ExpPolySum: terms need power >= 0, finite rate >= 0 and finite coefficient");
        }
    }
    snap_values(
        terms_, [](const ExpPolyTerm& t, std::vector<double>& out) { out.push_back(t.rate); },
        [](ExpPolyTerm& t, auto lookup) { t.rate = lookup(t.rate); }, kRateMergeTolerance);
    std::sort(terms_.begin(), terms_.end(), [](const ExpPolyTerm& a, const ExpPolyTerm& b) {
        return a.rate != b.rate ? a.rate < b.rate : a.power < b.power;
    });
    std::vector<ExpPolyTerm> merged;
    merged.reserve(terms_.size());
    for (const auto& t : terms_) {
        if (!merged.empty() && merged.back().rate == t.rate && merged.back().power == t.power) {
            merged.back().coeff += t.coeff;
        } else {
            merged.push_back(t);
        }
    }
    double max_peak = 0.0;
    for (const auto& t : merged) {
        const double peak = std::abs(t.coeff) * term_peak(t.power, t.rate);
        if (std::isfinite(peak)) max_peak = std::max(max_peak, peak);
    }
    const double floor = kPruneRelative * max_peak;
    std::erase_if(merged, [&](const ExpPolyTerm& t) {
        return t.coeff == 0.0 || std::abs(t.coeff) * term_peak(t.power, t.rate) < floor;
    });
    terms_ = std::move(merged);
}

double ExpPolySum::operator()(double x) const { return exp_sum_eval(*this, x); }

double ExpPolySum::limit_at_infinity() const {
    double sum = 0.0;
    for (const auto& t : terms_) {
        if (t.rate == 0.0) {
            if (t.power > 0) return t.coeff > 0 ? std::numeric_limits<double>::infinity()
                                                : -std::numeric_limits<double>::infinity();
            sum += t.coeff;
        }
    }
    return sum;
}

double ExpPolySum::integral() const {
    CompensatedSum sum;
    for (const auto& t : terms_) {
        if (t.rate == 0.0) throw ContractError("ExpPolySum::integral: non-integrable constant or polynomial term");
        sum.add(t.coeff * std::exp(std::lgamma(t.power + 1.0) - (t.power + 1.0) * std::log(t.rate)));
    }
    return sum.value();
}

ExpPolySum& ExpPolySum::operator+=(const ExpPolySum& other) {
    atom_ += other.atom_;
    terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
    canonicalize();
    return *this;
}

ExpPolySum& ExpPolySum::operator*=(double factor) {
    atom_ *= factor;
    for (auto& t : terms_) t.coeff *= factor;
    canonicalize();
    return *this;
}

ExpPolySum operator+(ExpPolySum a, const ExpPolySum& b) { return a += b; }
ExpPolySum operator*(ExpPolySum a, double factor) { return a *= factor; }
ExpPolySum operator*(double factor, ExpPolySum a) { return a *= factor; }

ExpPolySum exp_sum_product(const ExpPolySum& a, const ExpPolySum& b) {
    if (a.atom_mass() != 0.0 || b.atom_mass() != 0.0) {
        throw ContractError("exp_sum_product: operands must be atom-free (CDF-like)");
    }
    std::vector<ExpPolyTerm> terms;
    terms.reserve(a.terms().size() * b.terms().size());
    for (const auto& x : a.terms()) {
        for (const auto& y : b.terms()) {
            terms.push_back({x.coeff * y.coeff, x.power + y.power, x.rate + y.rate});
        }
    }
    return ExpPolySum(0.0, std::move(terms));
}

ExpPolySum exp_sum_derivative(const ExpPolySum& a) {
    if (a.atom_mass() != 0.0) throw ContractError("exp_sum_derivative: operand must be CDF-like (no atom)");
    double jump = 0.0;
    std::vector<ExpPolyTerm> terms;
    for (const auto& t : a.terms()) {
        if (t.power == 0) jump += t.coeff;
        if (t.power > 0) terms.push_back({t.coeff * t.power, t.power - 1, t.rate});
        if (t.rate > 0.0) terms.push_back({-t.coeff * t.rate, t.power, t.rate});
    }
    return ExpPolySum(jump, std::move(terms));
}

double exp_sum_eval(const ExpPolySum& a, double x) {
    if (!(x >= 0.0)) throw DomainError("exp_sum_eval: x must be >= 0");
    CompensatedSum sum;
    for (const auto& t : a.terms()) sum.add(term_value(t, x));
    return sum.value();
}

double exp_sum_eval_extended(const ExpPolySum& a, double x) {
    using Big = boost::multiprecision::cpp_bin_float_50;
    if (!(x >= 0.0)) throw DomainError("exp_sum_eval_extended: x must be >= 0");
    Big sum = 0;
    const Big bx = x;
    for (const auto& t : a.terms()) {
        Big term = Big(t.coeff) * exp(-Big(t.rate) * bx);
        if (t.power > 0) term *= pow(bx, t.power);
        sum += term;
    }
    return static_cast<double>(sum);
}

double cancellation_ratio(const ExpPolySum& a, double x) {
    double magnitude = 0.0;
    for (const auto& t : a.terms()) magnitude += std::abs(term_value(t, x));
    const double value = std::abs(exp_sum_eval(a, x));
    if (value == 0.0) return magnitude == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    return magnitude / value;
}

// ---------------------------------------------------------------------------
// PoleProduct / PoleSum

namespace {

void merge_factors(std::vector<PoleFactor>& factors) {
    std::sort(factors.begin(), factors.end(),
              [](const PoleFactor& a, const PoleFactor& b) { return a.pole < b.pole; });
    std::vector<PoleFactor> merged;
    for (const auto& f : factors) {
        if (!merged.empty() && close_relative(merged.back().pole, f.pole, kPoleMergeTolerance)) {
            merged.back().multiplicity += f.multiplicity;
        } else {
            merged.push_back(f);
        }
    }
    factors = std::move(merged);
}

bool same_signature(const PoleProduct& a, const PoleProduct& b) {
    const auto fa = a.factors();
    const auto fb = b.factors();
    if (fa.size() != fb.size()) return false;
    for (std::size_t i = 0; i < fa.size(); ++i) {
        if (fa[i].pole != fb[i].pole || fa[i].multiplicity != fb[i].multiplicity) return false;
    }
    return true;
}

bool signature_less(const PoleProduct& a, const PoleProduct& b) {
    const auto fa = a.factors();
    const auto fb = b.factors();
    if (fa.size() != fb.size()) return fa.size() < fb.size();
    for (std::size_t i = 0; i < fa.size(); ++i) {
        if (fa[i].pole != fb[i].pole) return fa[i].pole < fb[i].pole;
        if (fa[i].multiplicity != fb[i].multiplicity) return fa[i].multiplicity < fb[i].multiplicity;
    }
    return false;
}

}  // namespace

PoleProduct::PoleProduct(double coeff, std::vector<PoleFactor> factors)
    : coeff_(coeff), factors_(std::move(factors)) {
    if (!std::isfinite(coeff_)) throw ContractError("PoleProduct: coefficient must be finite");
    for (const auto& f : factors_) {
        if (!(f.pole > 0.0) || !std::isfinite(f.pole)) throw ContractError("PoleProduct: poles must be positive");
        if (!(f.multiplicity > 0.0)) throw ContractError("PoleProduct: multiplicities must be positive");
    }
    merge_factors(factors_);
}

bool PoleProduct::integer_multiplicities() const {
    return std::all_of(factors_.begin(), factors_.end(), [](const PoleFactor& f) {
        return std::abs(f.multiplicity - std::round(f.multiplicity)) < 1e-12;
    });
}

double PoleProduct::operator()(double s) const {
    double log_mag = 0.0;
    for (const auto& f : factors_) {
        const double base = s + f.pole;
        if (!(base > 0.0)) throw DomainError("PoleProduct: evaluation at or left of a pole");
        log_mag -= f.multiplicity * std::log(base);
    }
    return coeff_ * std::exp(log_mag);
}

double PoleProduct::magnitude() const { return std::abs((*this)(0.0)); }

PoleProduct operator*(const PoleProduct& a, const PoleProduct& b) {
    std::vector<PoleFactor> factors(a.factors().begin(), a.factors().end());
    factors.insert(factors.end(), b.factors().begin(), b.factors().end());
    return PoleProduct(a.coeff() * b.coeff(), std::move(factors));
}

PoleSum::PoleSum(double constant, std::vector<PoleProduct> products)
    : constant_(constant), products_(std::move(products)) {
    canonicalize();
}

PoleSum PoleSum::single(double coeff, double pole, double multiplicity) {
    return PoleSum(0.0, {PoleProduct(coeff, {{pole, multiplicity}})});
}

void PoleSum::canonicalize() {
    if (!std::isfinite(constant_)) throw ContractError("PoleSum: constant must be finite");
    // Snap poles across all products first so that equal signatures compare equal.
    std::vector<std::vector<PoleFactor>> factor_lists;
    std::vector<double> coeffs;
    for (const auto& p : products_) {
        factor_lists.emplace_back(p.factors().begin(), p.factors().end());
        coeffs.push_back(p.coeff());
    }
    snap_values(
        factor_lists,
        [](const std::vector<PoleFactor>& fs, std::vector<double>& out) {
            for (const auto& f : fs) out.push_back(f.pole);
        },
        [](std::vector<PoleFactor>& fs, auto lookup) {
            for (auto& f : fs) f.pole = lookup(f.pole);
        },
        kPoleMergeTolerance);

    std::vector<PoleProduct> rebuilt;
    rebuilt.reserve(products_.size());
    for (std::size_t i = 0; i < factor_lists.size(); ++i) {
        if (factor_lists[i].empty()) {
            constant_ += coeffs[i];
        } else {
            rebuilt.emplace_back(coeffs[i], std::move(factor_lists[i]));
        }
    }
    std::sort(rebuilt.begin(), rebuilt.end(), signature_less);
    std::vector<PoleProduct> merged;
    for (auto& p : rebuilt) {
        if (!merged.empty() && same_signature(merged.back(), p)) {
            merged.back() = PoleProduct(merged.back().coeff() + p.coeff(),
                                        {merged.back().factors().begin(), merged.back().factors().end()});
        } else {
            merged.push_back(std::move(p));
        }
    }
    double max_mag = std::abs(constant_);
    for (const auto& p : merged) max_mag = std::max(max_mag, p.magnitude());
    const double floor = kPruneRelative * max_mag;
    std::erase_if(merged, [&](const PoleProduct& p) { return p.coeff() == 0.0 || p.magnitude() < floor; });
    products_ = std::move(merged);
}

double PoleSum::operator()(double s) const {
    CompensatedSum sum;
    sum.add(constant_);
    for (const auto& p : products_) sum.add(p(s));
    return sum.value();
}

PoleSum& PoleSum::operator+=(const PoleSum& other) {
    constant_ += other.constant_;
    products_.insert(products_.end(), other.products_.begin(), other.products_.end());
    canonicalize();
    return *this;
}

PoleSum& PoleSum::operator*=(double factor) {
    constant_ *= factor;
    for (auto& p : products_) p *= factor;
    canonicalize();
    return *this;
}

PoleSum operator+(PoleSum a, const PoleSum& b) { return a += b; }
PoleSum operator*(PoleSum a, double factor) { return a *= factor; }

PoleSum pole_sum_product(const PoleSum& p, const PoleSum& q) {
    std::vector<PoleProduct> products;
    products.reserve((p.products().size() + 1) * (q.products().size() + 1));
    const double kp = p.constant_term();
    const double kq = q.constant_term();
    if (kq != 0.0) {
        for (const auto& a : p.products()) products.push_back(PoleProduct(a.coeff() * kq, {a.factors().begin(), a.factors().end()}));
    }
    if (kp != 0.0) {
        for (const auto& b : q.products()) products.push_back(PoleProduct(b.coeff() * kp, {b.factors().begin(), b.factors().end()}));
    }
    for (const auto& a : p.products()) {
        for (const auto& b : q.products()) products.push_back(a * b);
    }
    return PoleSum(kp * kq, std::move(products));
}

PoleSum exp_sum_laplace(const ExpPolySum& pdf) {
    std::vector<PoleProduct> products;
    products.reserve(pdf.terms().size());
    for (const auto& t : pdf.terms()) {
        if (t.rate == 0.0) {
            throw ContractError("exp_sum_laplace: constant or polynomial term without decay is not integrable");
        }
        products.emplace_back(t.coeff * factorial(t.power), std::vector<PoleFactor>{{t.rate, t.power + 1.0}});
    }
    return PoleSum(pdf.atom_mass(), std::move(products));
}

// ---------------------------------------------------------------------------
// Partial fractions and inversion

namespace {

// Poles closer than this (relative) are distinct but amplify residues strongly.
constexpr double kIllConditionedBand = 1e-3;

}  // namespace

PartialFractions partial_fractions(const PoleProduct& product) {
    if (!product.integer_multiplicities()) {
        throw IntegralityError("partial_fractions: pole multiplicities must be integers");
    }
    PartialFractions out;
    const auto factors = product.factors();
    for (std::size_t i = 0; i + 1 < factors.size(); ++i) {
        if (close_relative(factors[i].pole, factors[i + 1].pole, kIllConditionedBand)) out.ill_conditioned = true;
    }
    for (std::size_t j = 0; j < factors.size(); ++j) {
        const double cj = factors[j].pole;
        const int order = static_cast<int>(std::lround(factors[j].multiplicity));
        // Taylor coefficients a_n of g(s) = Π_{i≠j} (s + cᵢ)^(−bᵢ) about s = −cⱼ, from
        // g'/g = −Σ bᵢ/(s + cᵢ) and the Leibniz recurrence (n+1)·a_{n+1} = Σ_k q_k a_{n−k}.
        std::vector<double> a(order, 0.0);
        std::vector<double> q(order, 0.0);
        double log_a0 = 0.0;
        int sign_a0 = 1;
        for (std::size_t i = 0; i < factors.size(); ++i) {
            if (i == j) continue;
            const double d = factors[i].pole - cj;
            const int b = static_cast<int>(std::lround(factors[i].multiplicity));
            log_a0 -= b * std::log(std::abs(d));
            if (d < 0.0 && (b % 2 != 0)) sign_a0 = -sign_a0;
            double inv_pow = 1.0 / d;  // d^-(k+1)
            for (int k = 0; k < order; ++k) {
                q[k] -= b * ((k % 2 == 0) ? inv_pow : -inv_pow);
                inv_pow /= d;
            }
        }
        a[0] = sign_a0 * std::exp(log_a0);
        for (int n = 0; n + 1 < order; ++n) {
            double acc = 0.0;
            for (int k = 0; k <= n; ++k) acc += q[k] * a[n - k];
            a[n + 1] = acc / (n + 1);
        }
        for (int t = 1; t <= order; ++t) {
            if (a[order - t] == 0.0) continue;
            out.terms.push_back({cj, t, product.coeff() * a[order - t]});
        }
    }
    return out;
}

double z_function(int t, double c, double x) {
    if (t < 0) throw DomainError("z_function: order must be >= 0");
    if (!(x >= 0.0)) throw DomainError("z_function: x must be >= 0");
    if (t == 0) return 1.0;
    return regularized_gamma_p(t, c * x);
}

ExpPolySum z_function_sum(int t, double c) {
    std::vector<ExpPolyTerm> terms{{1.0, 0, 0.0}};
    double coeff = 1.0;
    for (int i = 0; i < t; ++i) {
        if (i > 0) coeff *= c / i;
        terms.push_back({-coeff, i, c});
    }
    return ExpPolySum(0.0, std::move(terms));
}

ExpPolySum inverse_laplace_over_s(const PoleSum& mgf) {
    std::vector<ExpPolyTerm> terms;
    if (mgf.constant_term() != 0.0) terms.push_back({mgf.constant_term(), 0, 0.0});
    for (const auto& product : mgf.products()) {
        for (const auto& pf : partial_fractions(product).terms) {
            // coeff · (s+c)^(−t) / s  ↦  coeff · c^(−t) · 𝒵_t(c, x)
            const double scale = pf.coeff * std::pow(pf.pole, -pf.order);
            terms.push_back({scale, 0, 0.0});
            double coeff = 1.0;
            for (int i = 0; i < pf.order; ++i) {
                if (i > 0) coeff *= pf.pole / i;
                terms.push_back({-scale * coeff, i, pf.pole});
            }
        }
    }
    return ExpPolySum(0.0, std::move(terms));
}

// ---------------------------------------------------------------------------
// Enumerations

namespace {

constexpr int kMaxChainSetSize = 12;
constexpr std::uint64_t kMaxCompositions = 1'000'000;

void combinations_of_size(int first, int last, int size, std::vector<std::vector<int>>& out) {
    std::vector<int> current(size);
    std::iota(current.begin(), current.end(), first);
    for (;;) {
        out.push_back(current);
        int i = size - 1;
        while (i >= 0 && current[i] == last - (size - 1 - i)) --i;
        if (i < 0) return;
        ++current[i];
        for (int k = i + 1; k < size; ++k) current[k] = current[k - 1] + 1;
    }
}

}  // namespace

std::vector<std::vector<int>> increasing_subsets(int first, int last) {
    std::vector<std::vector<int>> out;
    const int n = last - first + 1;
    for (int size = 1; size <= n; ++size) combinations_of_size(first, last, size, out);
    return out;
}

void for_each_subset_chain(int first, int last, int depth, const std::function<void(const SubsetChain&)>& visit) {
    const int n = last - first + 1;
    if (n > kMaxChainSetSize) {
        throw ResourceGuardError("subset-chain enumeration is limited to 12 indices");
    }
    if (depth < 1 || depth > 3) throw std::invalid_argument("for_each_subset_chain: depth must be 1, 2 or 3");
    if (n < 1) return;
    std::vector<std::vector<std::vector<int>>> positions(n + 1);
    for (int k = 1; k <= n; ++k) positions[k] = increasing_subsets(0, k - 1);

    for (const auto& lambda : increasing_subsets(first, last)) {
        if (depth == 1) {
            visit({lambda, {}, {}});
            continue;
        }
        for (const auto& mu : positions[lambda.size()]) {
            if (depth == 2) {
                visit({lambda, mu, {}});
                continue;
            }
            for (const auto& nu : positions[mu.size()]) visit({lambda, mu, nu});
        }
    }
}

std::uint64_t subset_chain_count(int set_size, int depth) {
    auto ipow = [](std::uint64_t b, int e) {
        std::uint64_t r = 1;
        while (e-- > 0) r *= b;
        return r;
    };
    switch (depth) {
        case 1: return ipow(2, set_size) - 1;
        case 2: return ipow(3, set_size) - ipow(2, set_size);
        case 3: return ipow(4, set_size) - ipow(3, set_size);
        default: throw std::invalid_argument("subset_chain_count: depth must be 1, 2 or 3");
    }
}

std::uint64_t composition_count(int m, int j) {
    if (m < 1 || j < 0) throw std::invalid_argument("composition_count: need m >= 1, j >= 0");
    return static_cast<std::uint64_t>(binomial(j + m - 1, m - 1));
}

std::vector<Composition> enumerate_compositions(int m, int j) {
    if (composition_count(m, j) > kMaxCompositions) {
        throw ResourceGuardError("enumerate_compositions: more than 10^6 compositions");
    }
    std::vector<Composition> out;
    std::vector<int> parts(m, 0);
    auto recurse = [&](auto&& self, int index, int remaining) -> void {
        if (index == m - 1) {
            parts[index] = remaining;
            int sigma = 0;
            for (int i = 1; i < m; ++i) sigma += i * parts[i];
            out.push_back({parts, sigma});
            return;
        }
        for (int v = remaining; v >= 0; --v) {
            parts[index] = v;
            self(self, index + 1, remaining - v);
        }
    };
    recurse(recurse, 0, j);
    return out;
}

}  // namespace dfrelay::algebra
