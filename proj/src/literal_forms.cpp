// Literal evaluators of the nested-sum closed forms. Everything here is
// evaluated pointwise from the printed structure; the only shared pieces are
// the channel primitives and the index enumerators.

#include <cmath>
#include <vector>

#include "dfrelay/errors.hpp"
#include "dfrelay/schemes.hpp"

namespace dfrelay::schemes {

namespace {

using algebra::z_function;

constexpr double kDistinctTolerance = 1e-6;
constexpr double kEqualTolerance = 1e-9;

bool nearly_equal(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

int integer_m(const LinkSpec& link, const char* who) {
    if (!link.integer_m()) throw IntegralityError(std::string(who) + ": integer fading figures required");
    return static_cast<int>(std::lround(link.m()));
}

void require_literal_size(const NetworkScenario& scenario, const char* who) {
    scenario.validate();
    if (scenario.relay_count() > kLiteralMaxRelays) {
        throw ResourceGuardError(std::string(who) + ": literal forms are limited to L <= 5");
    }
}

// Taylor coefficient of t^k in (d + t)^(−b).
double power_taylor(double d, int b, int k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    return sign * binomial(b + k - 1, k) * std::pow(d, -(b + k));
}

// r-th Taylor coefficient at s = −center of Π (s + poles[i])^(−mult[i]), i.e. the
// r-th derivative over r!, by the general Leibniz rule over weak compositions of r.
double product_taylor(double center, const std::vector<double>& poles, const std::vector<int>& mult, int r) {
    if (poles.empty()) return r == 0 ? 1.0 : 0.0;
    double total = 0.0;
    for (const auto& comp : algebra::enumerate_compositions(static_cast<int>(poles.size()), r)) {
        double term = 1.0;
        for (std::size_t i = 0; i < poles.size(); ++i) {
            term *= power_taylor(poles[i] - center, mult[i], comp.parts[i]);
        }
        total += term;
    }
    return total;
}

// L⁻¹{(s + c1)^(−b1) (s + c2)^(−b2) / s} at x, the bracket behind the 𝒴 functions.
double two_pole_cdf(double c1, int b1, double c2, int b2, double x) {
    if (b2 == 0) return std::pow(c1, -b1) * z_function(b1, c1, x);
    if (nearly_equal(c1, c2, kDistinctTolerance)) {
        throw ContractError("two-pole inversion: poles coincide; the distinct-C form does not apply");
    }
    double sum = 0.0;
    for (int t = 1; t <= b1; ++t) {
        sum += power_taylor(c2 - c1, b2, b1 - t) * std::pow(c1, -t) * z_function(t, c1, x);
    }
    for (int t = 1; t <= b2; ++t) {
        sum += power_taylor(c1 - c2, b1, b2 - t) * std::pow(c2, -t) * z_function(t, c2, x);
    }
    return sum;
}

// Π_{λ}(1 − P) · Π_{not λ} P over the index set encoded by mask.
double subset_weight(const std::vector<double>& p, unsigned mask) {
    double w = 1.0;
    for (std::size_t i = 0; i < p.size(); ++i) w *= (mask >> i & 1u) ? 1.0 - p[i] : p[i];
    return w;
}

struct RelaySide {
    std::vector<double> c;
    std::vector<int> m;
    std::vector<double> p;
};

RelaySide relay_side(const NetworkScenario& scenario, const char* who) {
    const auto profile = build_decoding_profile(scenario);
    RelaySide side;
    for (int k = 0; k < scenario.relay_count(); ++k) {
        side.c.push_back(scenario.second_hop[k].c());
        side.m.push_back(integer_m(scenario.second_hop[k], who));
    }
    side.p = profile.p_fail;
    return side;
}

// Visits every (i_{ν_1}, …, i_{ν_p}) with i_s ∈ 1..upper[s].
template <typename Visit>
void for_each_index_tuple(const std::vector<int>& upper, Visit visit) {
    for (int u : upper) {
        if (u < 1) return;
    }
    std::vector<int> idx(upper.size(), 1);
    for (;;) {
        visit(idx);
        std::size_t pos = 0;
        while (pos < idx.size() && idx[pos] == upper[pos]) idx[pos++] = 1;
        if (pos == idx.size()) return;
        ++idx[pos];
    }
}

// Callback receives (weight·(−1)^j, χ, per-ν term list) for each (λ, μ) chain; each ν term is
// (Π C^i/i!, Σ i, ξ).
struct NuTerm {
    double product;
    int order;
    double xi;
};

template <typename Visit>
void for_each_best_chain(const RelaySide& side, Visit visit) {
    const int L = static_cast<int>(side.c.size());
    if (L == 0) return;
    algebra::for_each_subset_chain(1, L, 2, [&](const algebra::SubsetChain& chain) {
        unsigned mask = 0;
        for (int k : chain.lambda) mask |= 1u << (k - 1);
        const double w = subset_weight(side.p, mask);
        if (w == 0.0) return;
        const int j = static_cast<int>(chain.mu.size());
        std::vector<int> members;  // relay indices (0-based) of λ_{μ_1..μ_j}
        double chi = 0.0;
        for (int pos : chain.mu) {
            members.push_back(chain.lambda[pos] - 1);
            chi += side.c[chain.lambda[pos] - 1];
        }
        std::vector<NuTerm> nu_terms;
        for (const auto& nu : algebra::increasing_subsets(0, j - 1)) {
            std::vector<int> upper;
            double xi = 0.0;
            std::vector<bool> in_nu(j, false);
            for (int v : nu) {
                upper.push_back(side.m[members[v]] - 1);
                xi += side.c[members[v]];
                in_nu[v] = true;
            }
            for (int t = 0; t < j; ++t) {
                if (!in_nu[t]) xi += side.c[members[t]];
            }
            for_each_index_tuple(upper, [&](const std::vector<int>& idx) {
                double prod = 1.0;
                int order = 0;
                for (std::size_t s = 0; s < idx.size(); ++s) {
                    const double c = side.c[members[nu[s]]];
                    prod *= std::pow(c, idx[s]) / factorial(idx[s]);
                    order += idx[s];
                }
                nu_terms.push_back({prod, order, xi});
            });
        }
        visit(((j % 2 == 0) ? 1.0 : -1.0) * w, chi, nu_terms);
    });
}

double product_of(const std::vector<double>& p) {
    double prod = 1.0;
    for (double v : p) prod *= v;
    return prod;
}

struct IidParams {
    int L;
    int m;
    double c;
    double p;
};

IidParams iid_params(const NetworkScenario& scenario, const char* who, bool include_direct) {
    require_literal_size(scenario, who);
    const int L = scenario.relay_count();
    IidParams out{L, 0, 0.0, 0.0};
    if (L == 0) {
        out.m = integer_m(scenario.direct, who);
        out.c = scenario.direct.c();
        return out;
    }
    const auto& ref = scenario.second_hop.front();
    out.m = integer_m(ref, who);
    out.c = ref.c();
    const auto profile = build_decoding_profile(scenario);
    out.p = profile.p_fail.front();
    for (int k = 0; k < L; ++k) {
        const auto& link = scenario.second_hop[k];
        if (link.m() != ref.m() || !nearly_equal(link.c(), ref.c(), kEqualTolerance) ||
            !nearly_equal(profile.p_fail[k], out.p, kEqualTolerance)) {
            throw ContractError(std::string(who) + ": relays are not identically distributed");
        }
    }
    if (include_direct && (scenario.direct.m() != ref.m() || !nearly_equal(scenario.direct.c(), ref.c(), kEqualTolerance))) {
        throw ContractError(std::string(who) + ": direct link differs from the relay links");
    }
    return out;
}

// Visits the (j, composition) terms of the IID best-relay expansion:
// coefficient of C^(m+σ) x^(m+σ−1) e^(−(j+1)Cx) / (m−1)! in the continuous density.
template <typename Visit>
void for_each_iid_term(const IidParams& q, Visit visit) {
    const int L = q.L;
    for (int k = 0; k <= L - 1; ++k) {
        const double outer = binomial(L - 1, k) * L * std::pow(q.p, L - 1 - k) * std::pow(1.0 - q.p, k + 1);
        if (outer == 0.0) continue;
        for (int j = 0; j <= k; ++j) {
            const double sign = (j % 2 == 0) ? 1.0 : -1.0;
            const double bj = binomial(k, j);
            for (const auto& comp : algebra::enumerate_compositions(q.m, j)) {
                double multinomial = factorial(j);
                double denom = 1.0;
                for (int i = 0; i < q.m; ++i) {
                    multinomial /= factorial(comp.parts[i]);
                    denom *= std::pow(factorial(i), comp.parts[i]);
                }
                const int order = q.m + comp.sigma;
                // C^(m+σ)·(m+σ−1)!/((m−1)!·Π((i−1)!)^{n_i}) is the Laplace weight of (s + (j+1)C)^(−(m+σ)).
                const double weight = outer * sign * bj * multinomial / denom * std::pow(q.c, order) *
                                      factorial(order - 1) / factorial(q.m - 1);
                visit(j, order, weight);
            }
        }
    }
}

}  // namespace

bool is_iid(const NetworkScenario& scenario) {
    scenario.validate();
    for (int k = 0; k < scenario.relay_count(); ++k) {
        const auto& link = scenario.second_hop[k];
        if (link.m() != scenario.direct.m() || !nearly_equal(link.c(), scenario.direct.c(), kEqualTolerance)) return false;
        if (!(scenario.first_hop[k] == scenario.first_hop.front())) return false;
    }
    return true;
}

double literal_cdf_rep_mrd_distinct(const NetworkScenario& scenario, double x) {
    const char* who = "literal_cdf_rep_mrd_distinct";
    require_literal_size(scenario, who);
    if (!(x >= 0.0)) throw DomainError(std::string(who) + ": x must be >= 0");
    const auto profile = build_decoding_profile(scenario);
    std::vector<double> c{scenario.direct.c()};
    std::vector<int> m{integer_m(scenario.direct, who)};
    std::vector<double> p{0.0};
    for (int k = 0; k < scenario.relay_count(); ++k) {
        c.push_back(scenario.second_hop[k].c());
        m.push_back(integer_m(scenario.second_hop[k], who));
        p.push_back(profile.p_fail[k]);
    }
    for (std::size_t a = 0; a < c.size(); ++a) {
        for (std::size_t b = a + 1; b < c.size(); ++b) {
            if (nearly_equal(c[a], c[b], kDistinctTolerance)) throw ContractError(std::string(who) + ": C values must be distinct");
        }
    }
    const unsigned n = static_cast<unsigned>(c.size());
    double total = 0.0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        const double w = subset_weight(p, mask);
        if (w == 0.0) continue;
        if (mask == 0) {
            total += w;
            continue;
        }
        std::vector<int> members;
        double scale = 1.0;
        for (unsigned i = 0; i < n; ++i) {
            if (mask >> i & 1u) {
                members.push_back(static_cast<int>(i));
                scale *= std::pow(c[i], m[i]);
            }
        }
        double inner = 0.0;
        for (int pidx : members) {
            std::vector<double> poles;
            std::vector<int> mult;
            for (int other : members) {
                if (other == pidx) continue;
                poles.push_back(c[other]);
                mult.push_back(m[other]);
            }
            for (int q = 1; q <= m[pidx]; ++q) {
                const double psi = product_taylor(c[pidx], poles, mult, m[pidx] - q);
                inner += psi * std::pow(c[pidx], -q) * z_function(q, c[pidx], x);
            }
        }
        total += w * scale * inner;
    }
    return total;
}

double literal_cdf_rep_mrd_equal_c(const NetworkScenario& scenario, double x) {
    const char* who = "literal_cdf_rep_mrd_equal_c";
    require_literal_size(scenario, who);
    if (!(x >= 0.0)) throw DomainError(std::string(who) + ": x must be >= 0");
    const double c = scenario.direct.c();
    for (const auto& link : scenario.second_hop) {
        if (!nearly_equal(link.c(), c, kEqualTolerance)) throw ContractError(std::string(who) + ": C values must be equal");
    }
    const auto profile = build_decoding_profile(scenario);
    std::vector<double> m{scenario.direct.m()};
    std::vector<double> p{0.0};
    for (int k = 0; k < scenario.relay_count(); ++k) {
        m.push_back(scenario.second_hop[k].m());
        p.push_back(profile.p_fail[k]);
    }
    const unsigned n = static_cast<unsigned>(m.size());
    double total = 0.0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        const double w = subset_weight(p, mask);
        if (w == 0.0) continue;
        double shape = 0.0;
        for (unsigned i = 0; i < n; ++i) {
            if (mask >> i & 1u) shape += m[i];
        }
        total += w * (mask == 0 ? 1.0 : regularized_gamma_p(shape, c * x));
    }
    return total;
}

double literal_mgf_gbest_distinct(const NetworkScenario& scenario, double s) {
    const char* who = "literal_mgf_gbest_distinct";
    require_literal_size(scenario, who);
    if (!(s >= 0.0)) throw DomainError(std::string(who) + ": s must be >= 0");
    const auto side = relay_side(scenario, who);
    double total = product_of(side.p);
    for_each_best_chain(side, [&](double signed_weight, double chi, const std::vector<NuTerm>& nu_terms) {
        double bracket = -chi / (s + chi);
        for (const auto& t : nu_terms) {
            bracket += t.product * factorial(t.order) * std::pow(s + t.xi, -t.order) * (1.0 - t.xi / (s + t.xi));
        }
        total += signed_weight * bracket;
    });
    return total;
}

double literal_cdf_pure_rs(const NetworkScenario& scenario, double x) {
    const char* who = "literal_cdf_pure_rs";
    require_literal_size(scenario, who);
    if (!(x >= 0.0)) throw DomainError(std::string(who) + ": x must be >= 0");
    const auto side = relay_side(scenario, who);
    const int m0 = integer_m(scenario.direct, who);
    const double c0 = scenario.direct.c();
    const double c0m = std::pow(c0, m0);
    double total = product_of(side.p) * z_function(m0, c0, x);
    for_each_best_chain(side, [&](double signed_weight, double chi, const std::vector<NuTerm>& nu_terms) {
        // −χ·C0^m0 · L⁻¹{(s+C0)^(−m0) (s+χ)^(−1) / s}
        double bracket = -c0m * chi * two_pole_cdf(c0, m0, chi, 1, x);
        for (const auto& t : nu_terms) {
            bracket += t.product * c0m * factorial(t.order) *
                       (two_pole_cdf(c0, m0, t.xi, t.order, x) - t.xi * two_pole_cdf(c0, m0, t.xi, t.order + 1, x));
        }
        total += signed_weight * bracket;
    });
    return total;
}

double literal_mgf_gbest_equal_c(const NetworkScenario& scenario, double s) {
    const char* who = "literal_mgf_gbest_equal_c";
    if (!(s >= 0.0)) throw DomainError(std::string(who) + ": s must be >= 0");
    const auto q = iid_params(scenario, who, false);
    if (q.L == 0) return 1.0;
    double total = std::pow(q.p, q.L);
    for_each_iid_term(q, [&](int j, int order, double weight) {
        total += weight * std::pow(s + (j + 1) * q.c, -order);
    });
    return total;
}

double literal_cdf_pure_rs_equal_c(const NetworkScenario& scenario, double x) {
    const char* who = "literal_cdf_pure_rs_equal_c";
    if (!(x >= 0.0)) throw DomainError(std::string(who) + ": x must be >= 0");
    const auto q = iid_params(scenario, who, true);
    if (q.L == 0) return z_function(q.m, q.c, x);
    const double cm = std::pow(q.c, q.m);
    double total = std::pow(q.p, q.L) * z_function(q.m, q.c, x);
    for_each_iid_term(q, [&](int j, int order, double weight) {
        const double inverse = (j == 0) ? std::pow(q.c, -(q.m + order)) * z_function(q.m + order, q.c, x)
                                        : two_pole_cdf(q.c, q.m, (j + 1) * q.c, order, x);
        total += weight * cm * inverse;
    });
    return total;
}

double literal_mgf_rate_selective(const NetworkScenario& scenario, double s, double alpha) {
    if (!(alpha >= 0.0)) throw DomainError("literal_mgf_rate_selective: alpha must be >= 0");
    const double m0s = channel::gamma_mgf(scenario.direct, s);
    const bool iid = is_iid(scenario);
    const double f_end = iid ? literal_cdf_pure_rs_equal_c(scenario, alpha) : literal_cdf_pure_rs(scenario, alpha);
    const double m_best = iid ? literal_mgf_gbest_equal_c(scenario, s) : literal_mgf_gbest_distinct(scenario, s);
    return m0s * f_end + m0s * m_best * (1.0 - f_end);
}

}  // namespace dfrelay::schemes
