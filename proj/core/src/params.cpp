#include "anj/params.hpp"

#include <cmath>
#include <string>

#include "anj/channels.hpp"
#include "anj/errors.hpp"

namespace anj {
namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw DomainError("SystemParams: " + what);
}

}  // namespace

void validate(const SystemParams& p, bool allow_silent_source) {
    if (allow_silent_source) {
        require(p.p_s >= 0, "p_s must be >= 0");
    } else {
        require(p.p_s > 0, "p_s must be > 0");
    }
    require(p.p_j > 0, "p_j must be > 0");
    require(p.p_c > 0, "p_c must be > 0");
    require(p.sigma2_d > 0, "sigma2_d must be > 0");
    require(p.sigma2_e > 0, "sigma2_e must be > 0");
    require(p.sigma2_err > 0, "sigma2_err must be > 0");
    require(p.rho >= 0 && p.rho <= 1, "rho must lie in [0, 1]");
    require(p.r_s >= 0 && std::isfinite(p.r_s), "r_s must be finite and >= 0");
    require(p.n_t >= 2, "n_t must be >= 2 for null-space jamming");
    require(p.n_r >= 1, "n_r must be >= 1");
    require(p.k_rician >= 0 && std::isfinite(p.k_rician), "k_rician must be finite and >= 0");
    require(p.omega_sj > 0 && p.omega_sd > 0 && p.omega_se > 0 && p.omega_jd > 0 &&
                p.omega_je > 0,
            "all average link gains must be > 0");
    require(p.eta > 0 && p.eta <= 1, "eta must lie in (0, 1]");
    require(p.eta_prime > 0 && p.eta_prime <= 1, "eta_prime must lie in (0, 1]");
}

void validate(const Topology& t) {
    if (!(t.d_sj > 0 && t.d_sj < t.d_se && t.d_se < t.d_sd)) {
        throw DomainError("Topology: distances must satisfy 0 < d_sj < d_se < d_sd");
    }
    if (!(t.alpha > 0)) throw DomainError("Topology: alpha must be > 0");
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

Topology default_topology() { return Topology{}; }

void apply_topology(SystemParams& params, const Topology& topo) {
    validate(topo);
    const LinkGains g = omegas_from_topology(topo);
    params.omega_sj = g.sj;
    params.omega_sd = g.sd;
    params.omega_se = g.se;
    params.omega_jd = g.jd;
    params.omega_je = g.je;
}

SystemParams default_params() {
    SystemParams p;
    p.p_s = dbm_to_watts(20);
    p.p_j = dbm_to_watts(0);
    p.p_c = 0.1e-3;
    p.sigma2_d = dbm_to_watts(-80);
    p.sigma2_e = p.sigma2_d;
    p.rho = 1;
    p.r_s = 1;
    p.n_t = 4;
    p.n_r = 4;
    p.k_rician = db_to_linear(5);
    p.eta = 0.5;
    p.eta_prime = 0.9;
    apply_topology(p, default_topology());
    p.sigma2_err = p.omega_jd;
    return p;
}

}  // namespace anj
