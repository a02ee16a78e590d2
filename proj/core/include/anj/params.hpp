#pragma once

namespace anj {

/// Physical and protocol scalars. Powers and noise variances are in watts;
/// with the block length normalized to one, joules and watts coincide.
struct SystemParams {
    double p_s = 0.1;        ///< source transmit power
    double p_j = 1e-3;       ///< jamming power
    double p_c = 1e-4;       ///< circuitry power
    double sigma2_d = 1e-11; ///< noise power at the destination
    double sigma2_e = 1e-11; ///< noise power at the eavesdropper
    double sigma2_err = 0;   ///< CSI error variance of the jammer-destination estimate
    double rho = 1;          ///< CSI correlation coefficient in [0, 1]
    double r_s = 1;          ///< target secrecy rate, bits/s/Hz
    int n_t = 4;             ///< jamming antennas in full-duplex operation
    int n_r = 4;             ///< harvesting antennas in full-duplex operation
    double k_rician = 0;     ///< Rician K-factor of the source-jammer link (linear)
    double omega_sj = 0;
    double omega_sd = 0;
    double omega_se = 0;
    double omega_jd = 0;
    double omega_je = 0;
    double eta = 0.5;        ///< RF-to-DC conversion efficiency
    double eta_prime = 0.9;  ///< SES-to-PES transfer efficiency

    int n_j() const noexcept { return n_t + n_r; }
    /// Energy spent per jamming block.
    double e_th() const noexcept { return p_j + p_c; }

    bool operator==(const SystemParams&) const = default;
};

/// Checks every invariant; throws DomainError naming the first violation.
/// With allow_silent_source the source power may be zero (used by the
/// simulator, where a silent source is a meaningful corner case).
void validate(const SystemParams& params, bool allow_silent_source = false);

/// Nodes S, J, E, D placed in that order on a line.
struct Topology {
    double d_sj = 5;
    double d_se = 20;
    double d_sd = 30;
    double alpha = 3;

    double d_je() const noexcept { return d_se - d_sj; }
    double d_jd() const noexcept { return d_sd - d_sj; }

    bool operator==(const Topology&) const = default;
};

void validate(const Topology& topo);

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);
double db_to_linear(double db);

/// Default scenario: linear topology 5/20/30 m, alpha = 3, sigma_D^2 = -80 dBm,
/// R_s = 1, K = 5 dB, rho = 1, N_t = N_r = 4, eta = 0.5, eta' = 0.9,
/// P_c = 0.1 mW, P_S = 20 dBm, P_J = 0 dBm. sigma_E^2 defaults to sigma_D^2 and
/// sigma_err^2 to Omega_JD.
SystemParams default_params();
Topology default_topology();

/// Writes the topology-derived average gains into params.
void apply_topology(SystemParams& params, const Topology& topo);

}  // namespace anj
