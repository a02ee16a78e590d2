#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "anj/params.hpp"

namespace anj {

/// Capacities and discretization, before the jamming threshold is known.
struct StorageSizing {
    double c1 = 0.02;  ///< PES capacity, joules
    double c2 = 0.01;  ///< SES capacity, joules
    int levels = 100;  ///< L; the PES has L + 1 levels

    bool operator==(const StorageSizing&) const = default;
};

/// Discretized PES: level i holds i * c1 / levels joules. tau is the number
/// of levels consumed by one jamming block, ceil(e_th / (c1 / levels)).
struct EnergyStorageSpec {
    double c1 = 0;
    double c2 = 0;
    int levels = 0;
    double e_th = 0;
    int tau = 0;

    double level_energy() const noexcept { return c1 / levels; }
    double energy_at(int level) const noexcept { return level * c1 / levels; }
    /// Jamming is only possible from a full PES.
    bool threshold_at_capacity() const noexcept { return tau == levels; }
    /// Largest discretized OEH gain the SES can deliver, floor(eta' c2 L / c1),
    /// not yet capped at L.
    int ses_level_cap(double eta_prime) const noexcept;
};

/// Throws DomainError unless c1 > e_th > 0, c2 > 0 and levels >= 1.
EnergyStorageSpec make_storage(double c1, double c2, int levels, double e_th);
/// Threshold taken from the parameters: e_th = p_j + p_c.
EnergyStorageSpec make_storage(const StorageSizing& sizing, const SystemParams& params);

void validate(const EnergyStorageSpec& storage);

/// Row-stochastic (L+1) x (L+1) matrix of PES level transitions.
class TransitionMatrix {
public:
    TransitionMatrix() = default;
    explicit TransitionMatrix(Eigen::MatrixXd entries);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
    double operator()(std::size_t from, std::size_t to) const {
        return entries_(static_cast<Eigen::Index>(from), static_cast<Eigen::Index>(to));
    }
    const Eigen::MatrixXd& entries() const noexcept { return entries_; }

    /// max_i |sum_j p_ij - 1|
    double max_row_sum_error() const;

private:
    Eigen::MatrixXd entries_;
};

struct StationaryDistribution {
    std::vector<double> xi;
    /// Probability that the energy condition holds: sum_{i >= tau} xi_i.
    double ready_prob = 0;
    /// ||M^T xi - xi||_inf of the returned vector.
    double residual = 0;
    /// Reciprocal condition estimate of M^T - I + 1 1^T (diagnostic only).
    double rcond = 0;
};

/// Probability that the source-destination link supports R_s:
/// exp(-(2^R_s - 1) sigma_D^2 / (P_S Omega_SD)).
double channel_ready_prob(const SystemParams& params);

/// Full-duplex jammer chain. OEH blocks drain tau levels and refill through
/// the SES; every C2 regime boundary is closed at its lower endpoint.
/// Throws ReducibleChainError if some state is absorbing.
TransitionMatrix fd_transition_matrix(const SystemParams& params, const EnergyStorageSpec& storage);

/// Half-duplex benchmark chain: jamming blocks harvest nothing and drop
/// exactly tau levels.
TransitionMatrix hd_transition_matrix(const SystemParams& params, const EnergyStorageSpec& storage);

/// Stationary law of an irreducible chain by GTH elimination (Gaussian
/// elimination on the censored chains, no subtractions). Throws
/// NumericalError if elimination meets a state that cannot leave the
/// remaining set, i.e. the chain is reducible.
StationaryDistribution stationary_distribution(const TransitionMatrix& m, int tau);

/// E{E_h^d} = eta P_S N_J Omega_SJ.
double mean_deh_harvest(const SystemParams& params);
/// E{E~_h^o} = eta eta' P_S N_r Omega_SJ, with unlimited SES.
double mean_oeh_harvest(const SystemParams& params);

/// Energy-ready probability of an unbounded continuous store. Equals one
/// when OEH blocks harvest more than they spend on average; otherwise
/// follows from long-run energy balance, clamped to at most one.
/// Throws NumericalError when q_c == 0.
double infinite_capacity_ready_prob(const SystemParams& params);

/// Row-major CSV of every entry, 17 significant digits, one row per line.
void write_matrix_csv(std::ostream& out, const TransitionMatrix& m);

}  // namespace anj
