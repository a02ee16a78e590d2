#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "anj/energy_chain.hpp"
#include "anj/params.hpp"
#include "anj/rng.hpp"

namespace anj {

enum class JammerMode { deh, oeh };

/// PES contents. Harvests are discretized before they are stored, so the
/// energy always sits exactly on a level.
struct JammerState {
    double pes_energy = 0;
    JammerMode mode_last = JammerMode::deh;
    int level = 0;
};

struct TrialStats {
    int levels = 0;
    int tau = 0;
    std::uint64_t blocks = 0;
    std::uint64_t outage_count = 0;
    std::uint64_t nzsc_count = 0;
    std::uint64_t deh_count = 0;
    std::uint64_t oeh_count = 0;
    std::vector<std::uint64_t> level_histogram;    ///< level at the start of each block
    std::vector<std::uint64_t> transition_counts;  ///< (L+1)^2, row-major, from -> to

    TrialStats() = default;
    TrialStats(int levels, int tau);

    std::uint64_t transitions(int from, int to) const {
        return transition_counts[static_cast<std::size_t>(from) * (levels + 1) + to];
    }
    /// Adds counts; throws DomainError if the shapes differ.
    void merge(const TrialStats& other);

    bool operator==(const TrialStats&) const = default;
};

struct SimOptions {
    /// Draw the residual self-interference at D per block as
    /// (1 - rho) P_J sigma_err^2 G / (n - 1), G ~ Gamma(n - 1, 1), instead of
    /// using its mean.
    bool sampled_leakage = false;
    /// Unrecorded warm-up blocks, as a fraction of the recorded ones. The
    /// PES starts empty.
    double burn_in_fraction = 0.01;
};

/// Full-duplex jammer: DEH blocks harvest on all N_J antennas; OEH blocks
/// jam from N_t antennas while N_r antennas charge the SES.
TrialStats simulate_fd(const SystemParams& params, const EnergyStorageSpec& storage,
                       std::uint64_t n_blocks, RngStream& rng, const SimOptions& opts = {});

/// Half-duplex benchmark: jamming blocks use all N_J antennas and harvest nothing.
TrialStats simulate_hd(const SystemParams& params, const EnergyStorageSpec& storage,
                       std::uint64_t n_blocks, RngStream& rng, const SimOptions& opts = {});

enum class Scheme { fd, hd };

struct BatchRun {
    std::uint64_t seed = 0;
    std::vector<TrialStats> batches;  ///< batch b used RngStream{seed, b}
    TrialStats total;
};

/// Splits n_blocks over `batches` independent chains (each with its own
/// burn-in) and runs them on up to `threads` workers. The merged counts do
/// not depend on the thread count. threads == 0 picks the hardware count.
BatchRun simulate_batches(Scheme scheme, const SystemParams& params,
                          const EnergyStorageSpec& storage, std::uint64_t n_blocks,
                          std::uint64_t seed, int batches, int threads = 0,
                          const SimOptions& opts = {});

/// One row per batch: batch, seed, stream, blocks and every counter.
void write_batch_csv(std::ostream& out, const BatchRun& run);

struct Estimate {
    double value = 0;
    double std_error = 0;
};

struct EmpiricalReport {
    std::uint64_t blocks = 0;
    Estimate p_so;
    Estimate p_nzsc;
    Estimate oeh_rate;
    Estimate ready_rate;  ///< fraction of blocks starting at a level >= tau
    std::vector<double> occupancy;
    Eigen::MatrixXd transitions;          ///< rows normalized by visits; unvisited rows are zero
    std::vector<std::uint64_t> row_visits;
};

/// Relative frequencies with binomial standard errors sqrt(p (1 - p) / n).
/// Throws UsageError when stats.blocks == 0.
EmpiricalReport estimate(const TrialStats& stats);

/// Unquantized store of capacity c1 with an unlimited SES, used to check
/// the infinite-capacity energy-ready probability.
struct ContinuousStats {
    std::uint64_t blocks = 0;
    std::uint64_t ready_count = 0;
    std::uint64_t oeh_count = 0;
};

ContinuousStats simulate_continuous(const SystemParams& params, double c1, std::uint64_t n_blocks,
                                    RngStream& rng, const SimOptions& opts = {});

}  // namespace anj
