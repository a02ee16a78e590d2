#pragma once

// Special functions needed by the closed-form secrecy and energy-chain
// expressions. All routines are pure and thread-safe; internal accumulation
// is done in long double.

namespace anj::specfun {

struct Tolerance {
    double abs_tol = 1e-12;
    int max_terms = 10'000;
};

/// Throws DomainError unless abs_tol > 0 and max_terms >= 1.
void validate(const Tolerance& tol);

/// Q(n, x) = Gamma(n, x) / Gamma(n) = exp(-x) * sum_{k<n} x^k / k! for integer n >= 1.
double regularized_upper_gamma(int shape, double x);

/// P(n, x) = 1 - Q(n, x), evaluated without cancellation when P is small.
double regularized_lower_gamma(int shape, double x);

/// Generalized Marcum Q function Q_m(a, b): the probability that a noncentral
/// chi-square variable with 2m degrees of freedom and noncentrality a^2
/// exceeds b^2.
///
/// Evaluated as the Poisson mixture
///   Q_m(a, b) = sum_k e^{-a^2/2} (a^2/2)^k / k! * Q(m + k, b^2 / 2)
/// truncated once the remaining Poisson mass is below tol.abs_tol.
/// Throws DomainError for m < 1 or negative a, b and ConvergenceError if the
/// mixture needs more than tol.max_terms terms.
double marcum_q(int m, double a, double b, const Tolerance& tol = {});

/// 1 - Q_m(a, b), summed directly so small lower-tail values keep their
/// relative precision.
double marcum_p(int m, double a, double b, const Tolerance& tol = {});

/// Exponential integral Ei(x) for x < 0 (where Ei(x) = -E1(-x)).
/// Throws DomainError for x >= 0 and NumericalError if the result overflows.
double exp_integral_ei(double x, const Tolerance& tol = {});

/// exp(y) * E1(y) for y > 0. Stays finite where exp(y) alone would overflow,
/// so exp(b*m) * Ei(-b*m) == -scaled_exp_integral_e1(b*m).
long double scaled_exp_integral_e1(long double y);

/// exp(y) * E_n(y) for y > 0 and n >= 1, where E_n is the generalized
/// exponential integral.
long double scaled_exp_integral_en(int n, long double y);

}  // namespace anj::specfun
