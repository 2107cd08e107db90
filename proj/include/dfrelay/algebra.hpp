#pragma once

// Exact arithmetic on the two function families every closed form in this
// project lives in:
//
//   ExpPolySum  a·δ(x) + Σ coeff · xⁿ · e^(−λx)       on x ≥ 0  (PDFs, CDFs)
//   PoleSum     κ + Σ coeff · Π (s + cᵢ)^(−bᵢ)                  (MGFs)
//
// Products, derivatives, Laplace transforms and partial-fraction inversion
// are carried out mechanically on these carriers, so every scheme statistic
// is an expansion of products of two-term path mixtures.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "dfrelay/special.hpp"

namespace dfrelay::algebra {

/// Relative tolerance under which two exponential rates are the same rate.
inline constexpr double kRateMergeTolerance = 1e-12;
/// Relative tolerance under which two poles are merged (multiplicities add).
inline constexpr double kPoleMergeTolerance = 1e-6;
/// Terms whose peak magnitude is below this fraction of the largest peak are dropped.
inline constexpr double kPruneRelative = 1e-14;

struct ExpPolyTerm {
    double coeff;
    int power;   ///< n >= 0
    double rate; ///< λ >= 0
};

class ExpPolySum {
public:
    ExpPolySum() = default;
    ExpPolySum(double atom_mass, std::vector<ExpPolyTerm> terms);

    static ExpPolySum constant(double value);
    static ExpPolySum term(double coeff, int power, double rate);

    double atom_mass() const { return atom_; }
    std::span<const ExpPolyTerm> terms() const { return terms_; }
    bool empty() const { return atom_ == 0.0 && terms_.empty(); }

    /// Continuous part at x (the atom is reported separately by atom_mass()).
    double operator()(double x) const;

    ExpPolySum continuous_part() const { return ExpPolySum(0.0, terms_); }
    /// Σ of constant (n = 0, λ = 0) coefficients: the limit of the continuous part as x → ∞.
    double limit_at_infinity() const;
    /// ∫₀^∞ of the continuous part; throws ContractError if a λ = 0 term makes it diverge.
    double integral() const;
    /// atom_mass() + integral()
    double total_mass() const { return atom_ + integral(); }

    ExpPolySum& operator+=(const ExpPolySum& other);
    ExpPolySum& operator*=(double factor);

private:
    void canonicalize();

    double atom_ = 0.0;
    std::vector<ExpPolyTerm> terms_;
};

ExpPolySum operator+(ExpPolySum a, const ExpPolySum& b);
ExpPolySum operator*(ExpPolySum a, double factor);
ExpPolySum operator*(double factor, ExpPolySum a);

ExpPolySum exp_sum_product(const ExpPolySum& a, const ExpPolySum& b);
ExpPolySum exp_sum_derivative(const ExpPolySum& a);
double exp_sum_eval(const ExpPolySum& a, double x);
/// Evaluation with 50 significant digits of working precision (coefficients taken as exact).
double exp_sum_eval_extended(const ExpPolySum& a, double x);
/// Σ|termᵢ(x)| / |Σ termᵢ(x)|; large values flag catastrophic cancellation.
double cancellation_ratio(const ExpPolySum& a, double x);

struct PoleFactor {
    double pole;          ///< c > 0
    double multiplicity;  ///< b > 0; integer wherever partial fractions are needed
};

class PoleProduct {
public:
    PoleProduct() = default;
    PoleProduct(double coeff, std::vector<PoleFactor> factors);

    double coeff() const { return coeff_; }
    std::span<const PoleFactor> factors() const { return factors_; }
    bool integer_multiplicities() const;
    double operator()(double s) const;
    /// |value at s = 0|, used as the magnitude scale for pruning.
    double magnitude() const;

    PoleProduct& operator*=(double factor) {
        coeff_ *= factor;
        return *this;
    }

private:
    double coeff_ = 0.0;
    std::vector<PoleFactor> factors_;
};

PoleProduct operator*(const PoleProduct& a, const PoleProduct& b);

class PoleSum {
public:
    PoleSum() = default;
    PoleSum(double constant, std::vector<PoleProduct> products);

    static PoleSum constant(double value) { return PoleSum(value, {}); }
    /// coeff · (s + pole)^(−multiplicity)
    static PoleSum single(double coeff, double pole, double multiplicity);

    double constant_term() const { return constant_; }
    std::span<const PoleProduct> products() const { return products_; }
    double operator()(double s) const;

    PoleSum& operator+=(const PoleSum& other);
    PoleSum& operator*=(double factor);

private:
    void canonicalize();

    double constant_ = 0.0;
    std::vector<PoleProduct> products_;
};

PoleSum operator+(PoleSum a, const PoleSum& b);
PoleSum operator*(PoleSum a, double factor);

PoleSum pole_sum_product(const PoleSum& p, const PoleSum& q);

/// coeff · n! · (s + λ)^(−(n+1)) per term, atom ↦ constant.
PoleSum exp_sum_laplace(const ExpPolySum& pdf);

struct PartialFractionTerm {
    double pole;
    int order;
    double coeff;
};

struct PartialFractions {
    std::vector<PartialFractionTerm> terms;
    /// Set when two poles sit within kPoleMergeTolerance of each other.
    bool ill_conditioned = false;
};

PartialFractions partial_fractions(const PoleProduct& product);

/// 𝒵_t(c, x) = 1 − e^(−cx) Σ_{i<t} (cx)^i / i!
double z_function(int t, double c, double x);
ExpPolySum z_function_sum(int t, double c);

/// Inverse Laplace transform of p(s)/s, i.e. the CDF of the law whose MGF is p.
ExpPolySum inverse_laplace_over_s(const PoleSum& mgf);

// ---------------------------------------------------------------------------
// Index enumerations behind the nested-sum shorthand of the literal formulas.

/// All non-empty increasing index tuples of {first..last}, ordered by size, then lexicographically.
std::vector<std::vector<int>> increasing_subsets(int first, int last);

/// One (λ, μ, ν) chain: λ ⊆ {first..last}; μ, ν hold 0-based positions into λ and μ.
struct SubsetChain {
    std::span<const int> lambda;
    std::span<const int> mu;
    std::span<const int> nu;
};

/// Visits every nested chain of the given depth (1: λ only, 2: λ ⊇ μ, 3: λ ⊇ μ ⊇ ν).
/// Throws ResourceGuardError when the index set has more than 12 elements.
void for_each_subset_chain(int first, int last, int depth, const std::function<void(const SubsetChain&)>& visit);
std::uint64_t subset_chain_count(int set_size, int depth);

struct Composition {
    std::vector<int> parts;  ///< n₁..n_m, Σ = j
    int sigma;               ///< Σ_{i≥2} (i−1)·nᵢ
};

/// Weak compositions of j into m parts; throws ResourceGuardError past 10⁶ of them.
std::vector<Composition> enumerate_compositions(int m, int j);
std::uint64_t composition_count(int m, int j);

}  // namespace dfrelay::algebra
