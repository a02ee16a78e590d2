#include "anj/energy_chain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <string>

#include <Eigen/LU>

#include "anj/channels.hpp"
#include "anj/errors.hpp"

namespace anj {
namespace {

// Integer rounding of ratios that are mathematically exact integers but may
// land a few ulps off after floating-point division.
constexpr double kRatioGuard = 1e-12;

int guarded_ceil(double x) { return static_cast<int>(std::ceil(x * (1 - kRatioGuard))); }
int guarded_floor(double x) { return static_cast<int>(std::floor(x * (1 + kRatioGuard))); }

// Discretized harvest statistics for one operating point.
//   DEH gain in levels: floor(eta P_S H^d L / C1),      H^d over N_J antennas
//   OEH gain in levels: floor(eta' min(eta P_S H^o, C2) L / C1), H^o over N_r
class HarvestLaw {
public:
    HarvestLaw(const SystemParams& p, const EnergyStorageSpec& s, bool with_oeh)
        : ses_cap_(s.ses_level_cap(p.eta_prime)) {
        const int L = s.levels;
        const double deh_scale = p.eta * p.p_s * L / s.c1;
        deh_cdf_.resize(L + 2);
        for (int k = 0; k <= L + 1; ++k) {
            deh_cdf_[k] = rician_power_cdf(k / deh_scale, p.n_j(), p);
        }
        if (with_oeh) {
            const double oeh_scale = p.eta * p.eta_prime * p.p_s * L / s.c1;
            oeh_cdf_.resize(L + 2);
            for (int k = 0; k <= L + 1; ++k) {
                oeh_cdf_[k] = rician_power_cdf(k / oeh_scale, p.n_r, p);
            }
        }
    }

    // F_{H^d}(k / (eta P_S L / C1))
    double deh_cdf(int k) const { return deh_cdf_.at(k); }
    // Pr{DEH gain == k}
    double deh_exact(int k) const { return deh_cdf(k + 1) - deh_cdf(k); }
    // Pr{DEH gain >= k}
    double deh_at_least(int k) const { return 1 - deh_cdf(k); }

    // Pr{OEH gain == n}, with the three SES regimes:
    //   C2 <  n C1 / (eta' L)                        -> 0
    //   n C1 / (eta' L) <= C2 < (n+1) C1 / (eta' L)  -> 1 - F_o(n)
    //   C2 >= (n+1) C1 / (eta' L)                    -> F_o(n+1) - F_o(n)
    double oeh_exact(int n) const {
        if (n < 0 || ses_cap_ < n) return 0;
        if (ses_cap_ == n) return 1 - oeh_cdf_.at(n);
        return oeh_cdf_.at(n + 1) - oeh_cdf_.at(n);
    }
    // Pr{OEH gain >= n}
    double oeh_at_least(int n) const {
        if (n <= 0) return 1;
        if (ses_cap_ < n) return 0;
        return 1 - oeh_cdf_.at(n);
    }

private:
    int ses_cap_;
    std::vector<double> deh_cdf_;
    std::vector<double> oeh_cdf_;
};

void check_stochastic(const Eigen::MatrixXd& m, const char* name) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (m(i, i) == 1.0) {
            throw ReducibleChainError(static_cast<std::size_t>(i),
                                      std::string(name) + ": state " + std::to_string(i) +
                                          " is absorbing (p_ii == 1); no unique stationary law");
        }
        const double sum = m.row(i).sum();
        if (std::fabs(sum - 1) > 1e-9) {
            throw NumericalError(std::string(name) + ": row " + std::to_string(i) + " sums to " +
                                 std::to_string(sum));
        }
    }
}

Eigen::MatrixXd clean(Eigen::MatrixXd m) {
    // Differences of nearly equal CDF values can dip a few ulps below zero.
    return m.cwiseMax(0.0);
}

}  // namespace

int EnergyStorageSpec::ses_level_cap(double eta_prime) const noexcept {
    return guarded_floor(eta_prime * c2 * levels / c1);
}

void validate(const EnergyStorageSpec& s) {
    if (s.levels < 1) throw DomainError("EnergyStorageSpec: levels must be >= 1");
    if (!(s.c2 > 0)) throw DomainError("EnergyStorageSpec: c2 must be > 0");
    if (!(s.e_th > 0)) throw DomainError("EnergyStorageSpec: e_th must be > 0");
    if (!(s.c1 > s.e_th)) throw DomainError("EnergyStorageSpec: c1 must exceed e_th");
    if (s.tau < 1 || s.tau > s.levels) throw DomainError("EnergyStorageSpec: tau must lie in [1, L]");
}

EnergyStorageSpec make_storage(double c1, double c2, int levels, double e_th) {
    EnergyStorageSpec s{c1, c2, levels, e_th, 0};
    if (levels >= 1 && c1 > 0) s.tau = guarded_ceil(e_th / (c1 / levels));
    validate(s);
    return s;
}

EnergyStorageSpec make_storage(const StorageSizing& sizing, const SystemParams& params) {
    return make_storage(sizing.c1, sizing.c2, sizing.levels, params.e_th());
}

TransitionMatrix::TransitionMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols()) throw DomainError("TransitionMatrix: must be square");
}

double TransitionMatrix::max_row_sum_error() const {
    if (entries_.size() == 0) return 0;
    return (entries_.rowwise().sum().array() - 1.0).abs().maxCoeff();
}

double channel_ready_prob(const SystemParams& p) {
    if (!(p.p_s > 0) || !(p.sigma2_d > 0) || !(p.omega_sd > 0)) {
        throw DomainError("channel_ready_prob: p_s, sigma2_d and omega_sd must be > 0");
    }
    const double snr_threshold = std::expm1(p.r_s * std::numbers::ln2);
    return std::exp(-snr_threshold * p.sigma2_d / (p.p_s * p.omega_sd));
}

TransitionMatrix fd_transition_matrix(const SystemParams& p, const EnergyStorageSpec& s) {
    validate(p);
    validate(s);
    const int L = s.levels;
    const int tau = s.tau;
    const double qc = channel_ready_prob(p);
    const HarvestLaw law(p, s, true);

    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(L + 1, L + 1);
    for (int i = 0; i <= L; ++i) {
        const bool ready = i >= tau;
        for (int j = 0; j <= L; ++j) {
            double v = 0;
            if (i == L && j == L) {
                // Full PES: a DEH block leaves it full; an OEH block must refill tau levels.
                v = (1 - qc) + qc * law.oeh_at_least(tau);
            } else if (i == j) {
                v = ready ? (1 - qc) * law.deh_exact(0) + qc * law.oeh_exact(tau) : law.deh_exact(0);
            } else if (j == L) {
                v = ready ? (1 - qc) * law.deh_at_least(L - i) + qc * law.oeh_at_least(L - i + tau)
                          : law.deh_at_least(L - i);
            } else if (i < j) {
                v = ready ? (1 - qc) * law.deh_exact(j - i) + qc * law.oeh_exact(j - i + tau)
                          : law.deh_exact(j - i);
            } else {
                // Discharge by i - j levels: only OEH, and never more than tau.
                const int drop = i - j;
                v = (ready && drop <= tau) ? qc * law.oeh_exact(tau - drop) : 0.0;
            }
            m(i, j) = v;
        }
    }
    m = clean(std::move(m));
    check_stochastic(m, "fd_transition_matrix");
    return TransitionMatrix(std::move(m));
}

TransitionMatrix hd_transition_matrix(const SystemParams& p, const EnergyStorageSpec& s) {
    validate(p);
    validate(s);
    const int L = s.levels;
    const int tau = s.tau;
    const double qc = channel_ready_prob(p);
    const HarvestLaw law(p, s, false);

    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(L + 1, L + 1);
    for (int i = 0; i <= L; ++i) {
        const double eh_weight = i >= tau ? 1 - qc : 1.0;
        if (i == L) {
            m(L, L) = 1 - qc;
        } else {
            for (int j = i; j < L; ++j) m(i, j) = eh_weight * law.deh_exact(j - i);
            m(i, L) = eh_weight * law.deh_at_least(L - i);
        }
        if (i >= tau) m(i, i - tau) = qc;
    }
    m = clean(std::move(m));
    check_stochastic(m, "hd_transition_matrix");
    return TransitionMatrix(std::move(m));
}

StationaryDistribution stationary_distribution(const TransitionMatrix& m, int tau) {
    const auto n = static_cast<Eigen::Index>(m.dim());
    if (n == 0) throw DomainError("stationary_distribution: empty matrix");
    if (tau < 0 || tau >= n) throw DomainError("stationary_distribution: tau out of range");
    const Eigen::MatrixXd& p = m.entries();

    // Condition estimate of (M^T - I + 1 1^T); reported, not used for the solve.
    const Eigen::MatrixXd a =
        p.transpose() - Eigen::MatrixXd::Identity(n, n) + Eigen::MatrixXd::Ones(n, n);
    const double rcond = Eigen::PartialPivLU<Eigen::MatrixXd>(a).rcond();

    // GTH elimination: censor states n-1, n-2, ... out of the chain. The pivot
    // is the mass a state sends to lower-numbered states, a sum of
    // non-negative terms, so small entries of xi keep full relative accuracy.
    Eigen::MatrixXd g = p;
    for (Eigen::Index k = n - 1; k > 0; --k) {
        const double out = g.row(k).head(k).sum();
        if (!(out > 0)) {
            char buf[128];
            std::snprintf(buf, sizeof buf,
                          "stationary_distribution: singular system, state %ld cannot reach a lower "
                          "state (rcond = %.3g)",
                          static_cast<long>(k), rcond);
            throw NumericalError(buf);
        }
        g.col(k).head(k) /= out;
        g.topLeftCorner(k, k).noalias() += g.col(k).head(k) * g.row(k).head(k);
    }
    Eigen::VectorXd xi(n);
    xi(0) = 1;
    for (Eigen::Index k = 1; k < n; ++k) {
        xi(k) = xi.head(k).dot(g.col(k).head(k));
        // xi(0) = 1 is arbitrary; rescale before mass far from state 0 overflows.
        if (xi(k) > 1e150) xi.head(k + 1) /= xi(k);
    }
    xi /= xi.sum();

    StationaryDistribution out;
    out.xi.assign(xi.data(), xi.data() + n);
    out.ready_prob = xi.tail(n - tau).sum();
    out.residual = (p.transpose() * xi - xi).cwiseAbs().maxCoeff();
    out.rcond = rcond;
    return out;
}

double mean_deh_harvest(const SystemParams& p) { return p.eta * p.p_s * p.n_j() * p.omega_sj; }

double mean_oeh_harvest(const SystemParams& p) {
    return p.eta * p.eta_prime * p.p_s * p.n_r * p.omega_sj;
}

double infinite_capacity_ready_prob(const SystemParams& p) {
    validate(p);
    const double qc = channel_ready_prob(p);
    if (!(qc > 0)) {
        throw NumericalError("infinite_capacity_ready_prob: q_c == 0, no OEH block can occur");
    }
    const double e_th = p.e_th();
    const double oeh = mean_oeh_harvest(p);
    if (e_th < oeh) return 1.0;
    const double deh = mean_deh_harvest(p);
    return std::min(1.0, deh / (qc * (e_th + deh - oeh)));
}

void write_matrix_csv(std::ostream& out, const TransitionMatrix& m) {
    char buf[32];
    for (std::size_t i = 0; i < m.dim(); ++i) {
        for (std::size_t j = 0; j < m.dim(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
            if (j > 0) out << ',';
            out << buf;
        }
        out << '\n';
    }
}

}  // namespace anj
