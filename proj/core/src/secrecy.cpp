#include "anj/secrecy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "anj/channels.hpp"
#include "anj/errors.hpp"
#include "anj/specfun.hpp"

namespace anj {
namespace {

using real = long double;

void check_psi_args(double mu, double beta, const char* name) {
    if (!(mu > 0) || !(beta > 0) || !std::isfinite(mu) || !std::isfinite(beta)) {
        throw DomainError(std::string(name) + ": mu and beta must be finite and > 0");
    }
}

// beta^{1-n} e^{y} E_n(y), y = beta mu
real psi_via_en(int n, real mu, real beta) {
    return std::pow(beta, static_cast<real>(1 - n)) * specfun::scaled_exp_integral_en(n, beta * mu);
}

real clamp01(real p) { return std::clamp<real>(p, 0, 1); }

void check_ready(double ready_prob, const char* name) {
    if (!(ready_prob >= 0 && ready_prob <= 1)) {
        throw DomainError(std::string(name) + ": ready_prob must lie in [0, 1]");
    }
}

// Weight of the jammed-eavesdropper integral common to both closed forms:
//   N = 2 : (s Psi1(1, mu, b) + Psi1(2, mu, b)) / varphi
//   N >= 3: (s Psi2(N-1, mu, b) + (N-1) Psi2(N, mu, b)) beta1^{N-1}
real jammed_integral(const SecrecyConstants& c, real mu, real b) {
    const int n = c.n_jam;
    const real s = c.noise_ratio;
    if (n == 2) {
        return (s * psi1(1, mu, b) + psi1(2, mu, b)) / c.varphi;
    }
    return (s * psi2(n - 1, mu, b) + (n - 1) * static_cast<real>(psi2(n, mu, b))) *
           std::pow(static_cast<real>(c.beta1), static_cast<real>(n - 1));
}

}  // namespace

SecrecyConstants secrecy_constants(const SystemParams& p, int n_jam) {
    validate(p);
    if (n_jam < 2) throw DomainError("secrecy_constants: n_jam must be >= 2");
    SecrecyConstants c;
    c.n_jam = n_jam;
    c.kappa1 = p.p_s / ((1 - p.rho) * p.p_j * p.sigma2_err / (n_jam - 1) + p.sigma2_d);
    c.kappa2 = p.p_s / p.sigma2_d;
    c.varphi = p.p_j * p.omega_je / (p.p_s * p.omega_se);
    c.beta1 = (n_jam - 1) / c.varphi;
    const double rate_gain = std::exp2(p.r_s);
    c.beta2 = std::expm1(p.r_s * std::numbers::ln2) * c.kappa1 / c.kappa2;
    c.noise_ratio = p.sigma2_e / (p.p_s * p.omega_se);
    c.mu1 = rate_gain / (c.kappa1 * p.omega_sd) + c.noise_ratio;
    c.mu2 = 1 / (c.kappa1 * p.omega_sd) + c.noise_ratio;
    return c;
}

double psi1(int n, double mu, double beta) {
    check_psi_args(mu, beta, "psi1");
    if (n != 1 && n != 2) throw DomainError("psi1: n must be 1 or 2");
    const real y = static_cast<real>(beta) * mu;
    if (n == 2 && y > 2) return static_cast<double>(psi_via_en(2, mu, beta));
    // e^{y} Ei(-y) = -e^{y} E1(y)
    const real e1 = specfun::scaled_exp_integral_e1(y);
    if (n == 1) return static_cast<double>(e1);
    return static_cast<double>(1 / static_cast<real>(beta) - mu * e1);
}

double psi2(int n, double mu, double beta) {
    check_psi_args(mu, beta, "psi2");
    if (n < 2) throw DomainError("psi2: n must be >= 2");
    const real m = mu;
    const real b = beta;
    if (b * m > n) return static_cast<double>(psi_via_en(n, m, b));

    real factorial = 1;  // (n-1)!
    for (int k = 2; k < n; ++k) factorial *= k;
    real sum = 0;
    real k_fact = 1;  // (k-1)!
    for (int k = 1; k <= n - 1; ++k) {
        if (k > 1) k_fact *= k - 1;
        sum += k_fact * std::pow(-m, static_cast<real>(n - k - 1)) * std::pow(b, static_cast<real>(-k));
    }
    const real tail = std::pow(-m, static_cast<real>(n - 1)) * specfun::scaled_exp_integral_e1(b * m);
    return static_cast<double>((sum + tail) / factorial);
}

double secrecy_outage(const SystemParams& p, double ready_prob, int n_jam) {
    check_ready(ready_prob, "secrecy_outage");
    const SecrecyConstants c = secrecy_constants(p, n_jam);
    const real thr = std::expm1(static_cast<real>(p.r_s) * std::numbers::ln2_v<real>);
    const real decay = std::exp(-thr / (static_cast<real>(c.kappa1) * p.omega_sd));
    const real covered = jammed_integral(c, c.mu1, c.beta1) * decay;
    return static_cast<double>(clamp01(1 - covered * ready_prob));
}

double prob_nonzero_secrecy(const SystemParams& p, double ready_prob, int n_jam) {
    check_ready(ready_prob, "prob_nonzero_secrecy");
    const SecrecyConstants c = secrecy_constants(p, n_jam);
    const real weak_eve = std::exp(-static_cast<real>(c.beta2) * c.mu2) *
                          jammed_integral(c, c.mu2, static_cast<real>(c.beta1) + c.beta2);
    const real strong_main = channel_ready_prob(p) * static_cast<real>(eve_sinr_cdf(c.beta2, p, n_jam));
    return static_cast<double>(clamp01((weak_eve + strong_main) * ready_prob));
}

std::string_view to_string(Variant v) {
    switch (v) {
        case Variant::fd_finite: return "fd_finite";
        case Variant::hd_finite: return "hd_finite";
        case Variant::fd_infinite: return "fd_infinite";
    }
    return "unknown";
}

Variant parse_variant(std::string_view name) {
    if (name == "fd" || name == "fd_finite") return Variant::fd_finite;
    if (name == "hd" || name == "hd_finite") return Variant::hd_finite;
    if (name == "inf" || name == "fd_infinite") return Variant::fd_infinite;
    throw UsageError("unknown variant '" + std::string(name) + "'");
}

SecrecyReport evaluate_variant(Variant variant, const SystemParams& p, const StorageSizing& sizing) {
    validate(p);
    SecrecyReport r;
    r.variant = variant;
    r.q_c = channel_ready_prob(p);
    const int n_jam = variant == Variant::hd_finite ? p.n_j() : p.n_t;

    if (variant == Variant::fd_infinite) {
        r.ready_prob = infinite_capacity_ready_prob(p);
    } else {
        const EnergyStorageSpec storage = make_storage(sizing, p);
        const TransitionMatrix m = variant == Variant::fd_finite ? fd_transition_matrix(p, storage)
                                                                 : hd_transition_matrix(p, storage);
        const StationaryDistribution xi = stationary_distribution(m, storage.tau);
        r.ready_prob = std::clamp(xi.ready_prob, 0.0, 1.0);
        r.tau = storage.tau;
        r.stationary_residual = xi.residual;
        r.threshold_at_capacity = storage.threshold_at_capacity();
    }
    r.constants = secrecy_constants(p, n_jam);
    r.p_so = secrecy_outage(p, r.ready_prob, n_jam);
    r.p_nzsc = prob_nonzero_secrecy(p, r.ready_prob, n_jam);
    return r;
}

JammingSearch optimal_jamming_power(const SystemParams& params, const StorageSizing& sizing,
                                    const std::vector<double>& grid, Variant variant) {
    if (grid.empty()) throw UsageError("optimal_jamming_power: empty candidate grid");

    JammingSearch out;
    out.candidates.reserve(grid.size());
    bool found = false;
    for (const double p_j : grid) {
        JammingCandidate cand;
        cand.p_j = p_j;
        try {
            SystemParams p = params;
            p.p_j = p_j;
            cand.p_so = evaluate_variant(variant, p, sizing).p_so;
            cand.feasible = true;
        } catch (const Error& e) {
            cand.diagnostic = e.what();
        }
        if (cand.feasible &&
            (!found || cand.p_so < out.p_so_min || (cand.p_so == out.p_so_min && p_j < out.p_j_star))) {
            found = true;
            out.p_j_star = p_j;
            out.p_so_min = cand.p_so;
        }
        out.candidates.push_back(std::move(cand));
    }
    if (!found) {
        throw DomainError("optimal_jamming_power: no feasible candidate (first rejection: " +
                          out.candidates.front().diagnostic + ")");
    }
    return out;
}

}  // namespace anj
