#include "anj/mc_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numbers>
#include <ostream>
#include <thread>

#include "anj/channels.hpp"
#include "anj/errors.hpp"

namespace anj {
namespace {

struct BlockOutcome {
    bool outage = true;
    bool nonzero = false;
};

std::uint64_t burn_in_blocks(std::uint64_t n, const SimOptions& opts) {
    if (!(opts.burn_in_fraction >= 0)) throw DomainError("SimOptions: burn_in_fraction must be >= 0");
    return static_cast<std::uint64_t>(std::ceil(static_cast<double>(n) * opts.burn_in_fraction));
}

// Constants of one run, hoisted out of the block loop.
struct Link {
    double rate_threshold;  // (2^R_s - 1) sigma_D^2: C_SD >= R_s iff P_S H_SD >= this
    double leak_mean;       // (1 - rho) P_J sigma_err^2 / (n - 1)
    double eve_jam_scale;   // P_J Omega_JE / (n - 1)
    int n_jam;

    Link(const SystemParams& p, int n) : n_jam(n) {
        rate_threshold = std::expm1(p.r_s * std::numbers::ln2) * p.sigma2_d;
        leak_mean = (1 - p.rho) * p.p_j * p.sigma2_err / (n - 1);
        eve_jam_scale = p.p_j * p.omega_je / (n - 1);
    }
};

// Secrecy of one protected block given the main-link gain already drawn.
BlockOutcome protected_block(const SystemParams& p, const Link& link, double h_sd, RngStream& rng,
                             const SimOptions& opts) {
    double leak = link.leak_mean;
    if (opts.sampled_leakage) leak *= sample_gamma(link.n_jam - 1, 1.0, rng);
    const double gamma_d = p.p_s * h_sd / (leak + p.sigma2_d);
    const double x = sample_exponential(p.p_s * p.omega_se, rng);
    const double y = sample_gamma(link.n_jam - 1, link.eve_jam_scale, rng);
    const double gamma_e = x / (y + p.sigma2_e);
    const double c_s = std::max(0.0, std::log2(1 + gamma_d) - std::log2(1 + gamma_e));
    return BlockOutcome{c_s < p.r_s, c_s > 0};
}

int discretize(double energy, const EnergyStorageSpec& s) {
    const double lv = std::floor(energy * s.levels / s.c1);
    return lv >= s.levels ? s.levels : static_cast<int>(lv);
}

template <class Step>
TrialStats run_chain(const EnergyStorageSpec& s, std::uint64_t n_blocks, const SimOptions& opts,
                     Step&& step) {
    if (n_blocks == 0) throw UsageError("simulate: n_blocks must be >= 1");
    validate(s);
    TrialStats stats(s.levels, s.tau);
    JammerState state;
    const std::uint64_t warmup = burn_in_blocks(n_blocks, opts);
    for (std::uint64_t k = 0; k < warmup + n_blocks; ++k) {
        const int from = state.level;
        const BlockOutcome out = step(state);
        state.pes_energy = s.energy_at(state.level);
        if (k < warmup) continue;
        ++stats.blocks;
        ++stats.level_histogram[from];
        ++stats.transition_counts[static_cast<std::size_t>(from) * (s.levels + 1) + state.level];
        if (state.mode_last == JammerMode::oeh) {
            ++stats.oeh_count;
        } else {
            ++stats.deh_count;
        }
        stats.outage_count += out.outage;
        stats.nzsc_count += out.nonzero;
    }
    return stats;
}

}  // namespace

TrialStats::TrialStats(int levels_, int tau_)
    : levels(levels_),
      tau(tau_),
      level_histogram(static_cast<std::size_t>(levels_) + 1, 0),
      transition_counts((static_cast<std::size_t>(levels_) + 1) * (levels_ + 1), 0) {}

void TrialStats::merge(const TrialStats& o) {
    if (levels != o.levels || tau != o.tau) throw DomainError("TrialStats::merge: shape mismatch");
    blocks += o.blocks;
    outage_count += o.outage_count;
    nzsc_count += o.nzsc_count;
    deh_count += o.deh_count;
    oeh_count += o.oeh_count;
    for (std::size_t i = 0; i < level_histogram.size(); ++i) level_histogram[i] += o.level_histogram[i];
    for (std::size_t i = 0; i < transition_counts.size(); ++i) {
        transition_counts[i] += o.transition_counts[i];
    }
}

TrialStats simulate_fd(const SystemParams& p, const EnergyStorageSpec& s, std::uint64_t n_blocks,
                       RngStream& rng, const SimOptions& opts) {
    validate(p, true);
    const Link link(p, p.n_t);
    const int ses_cap = s.ses_level_cap(p.eta_prime);
    const int n_j = p.n_j();

    return run_chain(s, n_blocks, opts, [&](JammerState& st) {
        const double h_sd = sample_exponential(p.omega_sd, rng);
        const bool channel_ok = p.p_s * h_sd >= link.rate_threshold;
        if (channel_ok && st.level >= s.tau) {
            st.mode_last = JammerMode::oeh;
            const double e_o = p.eta * p.p_s * sample_rician_power(p.n_r, p, rng);
            const int gain = std::min(discretize(p.eta_prime * e_o, s), ses_cap);
            st.level = std::min(st.level - s.tau + gain, s.levels);
            return protected_block(p, link, h_sd, rng, opts);
        }
        st.mode_last = JammerMode::deh;
        const double e_d = p.eta * p.p_s * sample_rician_power(n_j, p, rng);
        st.level = std::min(st.level + discretize(e_d, s), s.levels);
        return BlockOutcome{};
    });
}

TrialStats simulate_hd(const SystemParams& p, const EnergyStorageSpec& s, std::uint64_t n_blocks,
                       RngStream& rng, const SimOptions& opts) {
    validate(p, true);
    const int n_j = p.n_j();
    const Link link(p, n_j);

    return run_chain(s, n_blocks, opts, [&](JammerState& st) {
        const double h_sd = sample_exponential(p.omega_sd, rng);
        const bool channel_ok = p.p_s * h_sd >= link.rate_threshold;
        if (channel_ok && st.level >= s.tau) {
            st.mode_last = JammerMode::oeh;
            st.level -= s.tau;
            return protected_block(p, link, h_sd, rng, opts);
        }
        st.mode_last = JammerMode::deh;
        const double e_d = p.eta * p.p_s * sample_rician_power(n_j, p, rng);
        st.level = std::min(st.level + discretize(e_d, s), s.levels);
        return BlockOutcome{};
    });
}

BatchRun simulate_batches(Scheme scheme, const SystemParams& params,
                          const EnergyStorageSpec& storage, std::uint64_t n_blocks,
                          std::uint64_t seed, int batches, int threads, const SimOptions& opts) {
    if (batches < 1) throw UsageError("simulate_batches: batches must be >= 1");
    if (n_blocks < static_cast<std::uint64_t>(batches)) {
        throw UsageError("simulate_batches: need at least one block per batch");
    }
    validate(params, true);
    validate(storage);
    if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    threads = std::min(threads, batches);

    BatchRun run;
    run.seed = seed;
    run.batches.resize(static_cast<std::size_t>(batches));
    const std::uint64_t base = n_blocks / batches;
    const std::uint64_t extra = n_blocks % batches;

    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (int b = next++; b < batches && !failed; b = next++) {
            try {
                RngStream rng(seed, static_cast<std::uint64_t>(b));
                const std::uint64_t n = base + (static_cast<std::uint64_t>(b) < extra ? 1 : 0);
                run.batches[b] = scheme == Scheme::fd ? simulate_fd(params, storage, n, rng, opts)
                                                      : simulate_hd(params, storage, n, rng, opts);
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    run.total = TrialStats(storage.levels, storage.tau);
    for (const auto& b : run.batches) run.total.merge(b);
    return run;
}

void write_batch_csv(std::ostream& out, const BatchRun& run) {
    out << "batch,seed,stream,blocks,outage_count,nzsc_count,deh_count,oeh_count\n";
    for (std::size_t b = 0; b < run.batches.size(); ++b) {
        const TrialStats& s = run.batches[b];
        out << b << ',' << run.seed << ',' << b << ',' << s.blocks << ',' << s.outage_count << ','
            << s.nzsc_count << ',' << s.deh_count << ',' << s.oeh_count << '\n';
    }
}

EmpiricalReport estimate(const TrialStats& s) {
    if (s.blocks == 0) throw UsageError("estimate: no recorded blocks");
    const double n = static_cast<double>(s.blocks);
    auto freq = [n](std::uint64_t count) {
        const double p = count / n;
        return Estimate{p, std::sqrt(p * (1 - p) / n)};
    };

    EmpiricalReport r;
    r.blocks = s.blocks;
    r.p_so = freq(s.outage_count);
    r.p_nzsc = freq(s.nzsc_count);
    r.oeh_rate = freq(s.oeh_count);

    const int dim = s.levels + 1;
    std::uint64_t ready = 0;
    r.occupancy.resize(dim);
    for (int i = 0; i < dim; ++i) {
        r.occupancy[i] = s.level_histogram[i] / n;
        if (i >= s.tau) ready += s.level_histogram[i];
    }
    r.ready_rate = freq(ready);

    r.transitions = Eigen::MatrixXd::Zero(dim, dim);
    r.row_visits.assign(dim, 0);
    for (int i = 0; i < dim; ++i) {
        std::uint64_t visits = 0;
        for (int j = 0; j < dim; ++j) visits += s.transitions(i, j);
        r.row_visits[i] = visits;
        if (visits == 0) continue;
        for (int j = 0; j < dim; ++j) {
            r.transitions(i, j) = static_cast<double>(s.transitions(i, j)) / visits;
        }
    }
    return r;
}

ContinuousStats simulate_continuous(const SystemParams& p, double c1, std::uint64_t n_blocks,
                                    RngStream& rng, const SimOptions& opts) {
    validate(p, true);
    if (n_blocks == 0) throw UsageError("simulate_continuous: n_blocks must be >= 1");
    const double e_th = p.e_th();
    if (!(c1 > e_th)) throw DomainError("simulate_continuous: c1 must exceed e_th");
    const double rate_threshold = std::expm1(p.r_s * std::numbers::ln2) * p.sigma2_d;
    const int n_j = p.n_j();

    ContinuousStats stats;
    double energy = 0;
    const std::uint64_t warmup = burn_in_blocks(n_blocks, opts);
    for (std::uint64_t k = 0; k < warmup + n_blocks; ++k) {
        const bool ready = energy >= e_th;
        const bool channel_ok = p.p_s * sample_exponential(p.omega_sd, rng) >= rate_threshold;
        const bool oeh = ready && channel_ok;
        if (oeh) {
            energy += p.eta_prime * p.eta * p.p_s * sample_rician_power(p.n_r, p, rng) - e_th;
        } else {
            energy += p.eta * p.p_s * sample_rician_power(n_j, p, rng);
        }
        energy = std::min(energy, c1);
        if (k < warmup) continue;
        ++stats.blocks;
        stats.ready_count += ready;
        stats.oeh_count += oeh;
    }
    return stats;
}

}  // namespace anj
