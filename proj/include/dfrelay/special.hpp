#pragma once

namespace dfrelay {

/// P(a, x) = 𝖦(a, x)/Γ(a), lower regularized incomplete gamma; series for x < a + 1,
/// continued fraction otherwise.
double regularized_gamma_p(double a, double x);
/// Q(a, x) = 1 − P(a, x), computed without cancellation in the upper tail.
double regularized_gamma_q(double a, double x);

double factorial(int n);
double binomial(int n, int k);

}  // namespace dfrelay
