#pragma once

#include "anj/params.hpp"
#include "anj/rng.hpp"

namespace anj {

/// Average power gains of the five links.
struct LinkGains {
    double sj, sd, se, jd, je;
};

/// Omega = 1 / (1 + d^alpha).
double link_gain(double distance, double alpha);

LinkGains omegas_from_topology(const Topology& topo);

// ---------------------------------------------------------------------------
// Distribution functions. Pure; safe to call from any thread.

/// CDF of ||h||^2 for an n-antenna Rician vector with K-factor k and
/// per-entry mean power omega:
///   F(x) = 1 - Q_n(sqrt(2 n K), sqrt(2 (K + 1) x / omega)).
double rician_power_cdf(double x, int n_antennas, double k_factor, double omega);

/// Same, using the source-jammer link of params.
double rician_power_cdf(double x, int n_antennas, const SystemParams& params);

/// 1 - exp(-x / omega).
double rayleigh_power_cdf(double x, double omega);

/// Finite-sum CDF of Gamma(shape, scale) with integer shape.
double gamma_cdf(double x, int shape, double scale);

/// CDF of the eavesdropper SINR  X / (Y + sigma_E^2), X ~ Exp(P_S Omega_SE),
/// Y ~ Gamma(n_jam - 1, P_J Omega_JE / (n_jam - 1)):
///   F(z) = 1 - exp(-z sigma_E^2 / (P_S Omega_SE)) ((n-1) / (varphi z + n - 1))^(n-1).
/// n_jam is N_t for the full-duplex jammer and N_J for the half-duplex one.
double eve_sinr_cdf(double z, const SystemParams& params, int n_jam);
double eve_sinr_cdf(double z, const SystemParams& params);

/// Derivative of eve_sinr_cdf.
double eve_sinr_pdf(double z, const SystemParams& params, int n_jam);
double eve_sinr_pdf(double z, const SystemParams& params);

// ---------------------------------------------------------------------------
// Samplers. Each call draws only from the stream it is given.

double sample_exponential(double mean, RngStream& rng);

/// Sum of `shape` independent exponentials with mean `scale`.
double sample_gamma(int shape, double scale, RngStream& rng);

/// ||h||^2 where each of the n entries has deterministic line-of-sight
/// amplitude sqrt(K omega / (K + 1)) plus CN(0, omega / (K + 1)) scatter.
double sample_rician_power(int n_antennas, double k_factor, double omega, RngStream& rng);
double sample_rician_power(int n_antennas, const SystemParams& params, RngStream& rng);

}  // namespace anj
