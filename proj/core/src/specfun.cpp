#include "anj/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "anj/errors.hpp"

namespace anj::specfun {
namespace {

using real = long double;

constexpr real kEulerGamma = 0.577215664901532860606512090082402431L;
constexpr real kEps = std::numeric_limits<real>::epsilon();
constexpr real kTiny = std::numeric_limits<real>::min() / kEps;

// log(exp(-x) x^k / k!)
real log_poisson_term(real x, int k) {
    if (k == 0) return -x;
    return -x + k * std::log(x) - std::lgamma(static_cast<real>(k) + 1);
}

void check_shape(int shape, double x, const char* fn) {
    if (shape < 1) throw DomainError(std::string(fn) + ": shape must be >= 1");
    if (!(x >= 0)) throw DomainError(std::string(fn) + ": x must be non-negative");
}

// exp(-x) * sum_{k<n} x^k/k!, summed outward from the largest term.
real upper_gamma_sum(int n, real x) {
    if (x == 0) return 1;
    if (std::isinf(x)) return 0;
    const int peak = static_cast<int>(std::min<real>(n - 1, std::floor(x)));
    const real log_peak = log_poisson_term(x, peak);
    real sum = 1;
    real t = 1;
    for (int k = peak + 1; k < n; ++k) {
        t *= x / k;
        sum += t;
        if (t < kEps * sum) break;
    }
    t = 1;
    for (int k = peak; k >= 1; --k) {
        t *= k / x;
        sum += t;
        if (t < kEps * sum) break;
    }
    return std::clamp<real>(std::exp(log_peak) * sum, 0, 1);
}

// exp(-x) * sum_{k>=n} x^k/k!, valid (and cancellation free) for x <= n.
real lower_gamma_series(int n, real x) {
    if (x == 0) return 0;
    real sum = 1;
    real t = 1;
    for (int i = 1; i < 1'000'000; ++i) {
        t *= x / (n + i);
        sum += t;
        if (t < kEps * sum) break;
    }
    return std::clamp<real>(std::exp(log_poisson_term(x, n)) * sum, 0, 1);
}

real lower_gamma(int n, real x) {
    if (x <= n) return lower_gamma_series(n, x);
    return 1 - upper_gamma_sum(n, x);
}

void check_marcum(int m, double a, double b, const Tolerance& tol) {
    validate(tol);
    if (m < 1) throw DomainError("marcum_q: order m must be >= 1");
    if (!(a >= 0) || !(b >= 0)) throw DomainError("marcum_q: a and b must be non-negative");
}

[[noreturn]] void throw_no_convergence(const char* fn, int max_terms) {
    throw ConvergenceError(std::string(fn) + ": Poisson mixture did not converge within " +
                           std::to_string(max_terms) + " terms");
}

// Sums w_k * g(m + k) over the Poisson(lambda) weights w_k, walking outward
// from the mode until the untouched mass on both sides drops below tol.
template <typename Next, typename Prev>
real poisson_mixture(real lambda, const Tolerance& tol, const char* fn, real g_mode, Next next,
                     Prev prev) {
    const int mode = static_cast<int>(std::floor(lambda));
    const real half_tol = static_cast<real>(tol.abs_tol) / 2;
    int terms = 0;

    real sum = 0;
    // Upward from the mode.
    real log_w = log_poisson_term(lambda, mode);
    real g = g_mode;
    for (int k = mode;; ++k) {
        const real w = std::exp(log_w);
        sum += w * g;
        if (++terms > tol.max_terms) throw_no_convergence(fn, tol.max_terms);
        const real r = lambda / (k + 1);
        if (r < 1 && w * r / (1 - r) < half_tol) break;
        log_w += std::log(lambda) - std::log(static_cast<real>(k + 1));
        g = next(k, g);
    }
    // Downward from the mode.
    log_w = log_poisson_term(lambda, mode);
    g = g_mode;
    for (int k = mode - 1; k >= 0; --k) {
        log_w += std::log(static_cast<real>(k + 1)) - std::log(lambda);
        g = prev(k, g);
        const real w = std::exp(log_w);
        sum += w * g;
        if (++terms > tol.max_terms) throw_no_convergence(fn, tol.max_terms);
        const real r = k / lambda;
        if (r < 1 && w * r / (1 - r) < half_tol) break;
    }
    return sum;
}

}  // namespace

void validate(const Tolerance& tol) {
    if (!(tol.abs_tol > 0)) throw DomainError("Tolerance: abs_tol must be > 0");
    if (tol.max_terms < 1) throw DomainError("Tolerance: max_terms must be >= 1");
}

double regularized_upper_gamma(int shape, double x) {
    check_shape(shape, x, "regularized_upper_gamma");
    return static_cast<double>(upper_gamma_sum(shape, x));
}

double regularized_lower_gamma(int shape, double x) {
    check_shape(shape, x, "regularized_lower_gamma");
    return static_cast<double>(lower_gamma(shape, x));
}

double marcum_q(int m, double a, double b, const Tolerance& tol) {
    check_marcum(m, a, b, tol);
    const real y = static_cast<real>(b) * b / 2;
    if (b == 0) return 1.0;
    const real lambda = static_cast<real>(a) * a / 2;
    if (lambda == 0) return static_cast<double>(upper_gamma_sum(m, y));

    const int mode = static_cast<int>(std::floor(lambda));
    // Q(n+1, y) = Q(n, y) + e^{-y} y^n / n!
    auto next = [&](int k, real q) { return q + std::exp(log_poisson_term(y, m + k)); };
    auto prev = [&](int k, real q) {
        return std::max<real>(0, q - std::exp(log_poisson_term(y, m + k)));
    };
    const real sum =
        poisson_mixture(lambda, tol, "marcum_q", upper_gamma_sum(m + mode, y), next, prev);
    return static_cast<double>(std::clamp<real>(sum, 0, 1));
}

double marcum_p(int m, double a, double b, const Tolerance& tol) {
    check_marcum(m, a, b, tol);
    const real y = static_cast<real>(b) * b / 2;
    if (b == 0) return 0.0;
    const real lambda = static_cast<real>(a) * a / 2;
    if (lambda == 0) return static_cast<double>(lower_gamma(m, y));

    const int mode = static_cast<int>(std::floor(lambda));
    auto next = [&](int k, real) { return lower_gamma(m + k + 1, y); };
    auto prev = [&](int k, real) { return lower_gamma(m + k, y); };
    const real sum =
        poisson_mixture(lambda, tol, "marcum_p", lower_gamma(m + mode, y), next, prev);
    return static_cast<double>(std::clamp<real>(sum, 0, 1));
}

long double scaled_exp_integral_en(int n, long double y) {
    if (n < 1) throw DomainError("scaled_exp_integral_en: order must be >= 1");
    if (!(y > 0)) throw DomainError("scaled_exp_integral_en: argument must be positive");
    if (std::isinf(y)) return 0;

    if (y > 1) {
        // Modified Lentz evaluation of the continued fraction for e^y E_n(y).
        real b = y + n;
        real c = 1 / kTiny;
        real d = 1 / b;
        real h = d;
        for (int i = 1; i < 100'000; ++i) {
            const real an = -static_cast<real>(i) * (n - 1 + i);
            b += 2;
            d = 1 / (an * d + b);
            c = b + an / c;
            const real del = c * d;
            h *= del;
            if (std::fabs(del - 1) < kEps) return h;
        }
        throw ConvergenceError("scaled_exp_integral_en: continued fraction did not converge");
    }

    // Power series around the origin.
    const int nm1 = n - 1;
    real ans = nm1 != 0 ? 1 / static_cast<real>(nm1) : -std::log(y) - kEulerGamma;
    real fact = 1;
    for (int i = 1; i < 100'000; ++i) {
        fact *= -y / i;
        real del;
        if (i != nm1) {
            del = -fact / (i - nm1);
        } else {
            real psi = -kEulerGamma;
            for (int ii = 1; ii <= nm1; ++ii) psi += 1 / static_cast<real>(ii);
            del = fact * (-std::log(y) + psi);
        }
        ans += del;
        if (std::fabs(del) < std::fabs(ans) * kEps) return std::exp(y) * ans;
    }
    throw ConvergenceError("scaled_exp_integral_en: series did not converge");
}

long double scaled_exp_integral_e1(long double y) { return scaled_exp_integral_en(1, y); }

double exp_integral_ei(double x, const Tolerance& tol) {
    validate(tol);
    if (!(x < 0)) throw DomainError("exp_integral_ei: argument must be strictly negative");
    const real y = -static_cast<real>(x);

    real result;
    if (y <= 1) {
        // Ei(x) = gamma + ln|x| + sum_k x^k / (k k!)
        real sum = 0;
        real term = 1;
        int k = 1;
        for (;; ++k) {
            term *= static_cast<real>(x) / k;
            const real add = term / k;
            sum += add;
            if (std::fabs(add) < kEps * std::fabs(sum)) break;
            if (k >= tol.max_terms) throw ConvergenceError("exp_integral_ei: series did not converge");
        }
        result = kEulerGamma + std::log(y) + sum;
    } else {
        result = -std::exp(-y) * scaled_exp_integral_e1(y);
    }
    if (!std::isfinite(result) || std::fabs(result) > std::numeric_limits<double>::max()) {
        throw NumericalError("exp_integral_ei: result overflows near x = 0-");
    }
    return static_cast<double>(result);
}

}  // namespace anj::specfun
