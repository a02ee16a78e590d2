#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "anj/energy_chain.hpp"
#include "anj/params.hpp"

namespace anj {

/// Scalars shared by the outage and non-zero-capacity closed forms, built
/// for a jammer that transmits from n_jam antennas.
struct SecrecyConstants {
    int n_jam = 0;
    double kappa1 = 0;       ///< P_S / ((1 - rho) P_J sigma_err^2 / (n_jam - 1) + sigma_D^2)
    double kappa2 = 0;       ///< P_S / sigma_D^2
    double varphi = 0;       ///< P_J Omega_JE / (P_S Omega_SE)
    double beta1 = 0;        ///< (n_jam - 1) / varphi
    double beta2 = 0;        ///< (2^R_s - 1) kappa1 / kappa2
    double mu1 = 0;          ///< 2^R_s / (kappa1 Omega_SD) + noise_ratio
    double mu2 = 0;          ///< 1 / (kappa1 Omega_SD) + noise_ratio
    double noise_ratio = 0;  ///< sigma_E^2 / (P_S Omega_SE)
};

SecrecyConstants secrecy_constants(const SystemParams& params, int n_jam);

/// (n - 1) / beta - (-mu)^(n-1) e^{beta mu} Ei(-beta mu), for n in {1, 2}.
/// Equals the integral of e^{-mu x} (x + beta)^{-n} over [0, inf).
double psi1(int n, double mu, double beta);

/// Finite-sum form of the same integral for n >= 2:
///   1/(n-1)! sum_{k=1}^{n-1} (k-1)! (-mu)^{n-k-1} beta^{-k}
///     - (-mu)^{n-1} / (n-1)! e^{beta mu} Ei(-beta mu).
/// The alternating sum cancels badly once beta mu exceeds n, so that regime
/// is evaluated as beta^{1-n} e^{beta mu} E_n(beta mu) instead.
double psi2(int n, double mu, double beta);

/// Probability that the secrecy capacity falls below R_s, given the
/// probability that the jammer meets its energy condition.
double secrecy_outage(const SystemParams& params, double ready_prob, int n_jam);

/// Probability that the secrecy capacity is strictly positive.
double prob_nonzero_secrecy(const SystemParams& params, double ready_prob, int n_jam);

enum class Variant { fd_finite, hd_finite, fd_infinite };

std::string_view to_string(Variant v);
/// Accepts "fd", "hd", "inf" and the names returned by to_string.
Variant parse_variant(std::string_view name);

struct SecrecyReport {
    Variant variant = Variant::fd_finite;
    double p_so = 1;
    double p_nzsc = 0;
    double ready_prob = 0;
    double q_c = 0;
    SecrecyConstants constants;
    /// Finite variants only.
    int tau = 0;
    double stationary_residual = 0;
    /// Set when tau == L: jamming is only possible from a full store.
    bool threshold_at_capacity = false;
};

/// Full pipeline for one operating point: storage, chain, stationary law
/// (or q_b for the infinite store), then both closed forms.
SecrecyReport evaluate_variant(Variant variant, const SystemParams& params,
                               const StorageSizing& sizing);

struct JammingCandidate {
    double p_j = 0;
    bool feasible = false;
    double p_so = 1;
    std::string diagnostic;  ///< why an infeasible candidate was rejected
};

struct JammingSearch {
    double p_j_star = 0;
    double p_so_min = 1;
    std::vector<JammingCandidate> candidates;  ///< in grid order
};

/// Exhaustive search over candidate jamming powers (watts). E_th = P_J + P_c
/// is recomputed for each candidate, so storage and chain are rebuilt.
/// Candidates that violate an invariant are kept in the result with a
/// diagnostic. Ties go to the smaller P_J. Throws UsageError for an empty
/// grid and DomainError when no candidate is feasible.
JammingSearch optimal_jamming_power(const SystemParams& params, const StorageSizing& sizing,
                                    const std::vector<double>& grid,
                                    Variant variant = Variant::fd_finite);

}  // namespace anj
