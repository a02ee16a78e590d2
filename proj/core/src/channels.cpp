#include "anj/channels.hpp"

#include <cmath>
#include <numbers>

#include "anj/errors.hpp"
#include "anj/specfun.hpp"

namespace anj {
namespace {

void check_eve_inputs(double z, const SystemParams& p, int n_jam) {
    if (!(z >= 0)) throw DomainError("eve_sinr: z must be >= 0");
    if (n_jam < 2) throw DomainError("eve_sinr: at least two jamming antennas are required");
    if (!(p.p_s > 0) || !(p.omega_se > 0) || !(p.sigma2_e > 0)) {
        throw DomainError("eve_sinr: p_s, omega_se and sigma2_e must be > 0");
    }
    if (!(p.p_j >= 0)) throw DomainError("eve_sinr: p_j must be >= 0");
}

}  // namespace

double link_gain(double distance, double alpha) {
    if (!(distance >= 0) || !(alpha > 0)) throw DomainError("link_gain: invalid distance or alpha");
    return 1.0 / (1.0 + std::pow(distance, alpha));
}

LinkGains omegas_from_topology(const Topology& topo) {
    validate(topo);
    return LinkGains{link_gain(topo.d_sj, topo.alpha), link_gain(topo.d_sd, topo.alpha),
                     link_gain(topo.d_se, topo.alpha), link_gain(topo.d_jd(), topo.alpha),
                     link_gain(topo.d_je(), topo.alpha)};
}

double rician_power_cdf(double x, int n_antennas, double k_factor, double omega) {
    if (!(x >= 0)) throw DomainError("rician_power_cdf: x must be >= 0");
    if (n_antennas < 1) throw DomainError("rician_power_cdf: need at least one antenna");
    if (!(k_factor >= 0) || !(omega > 0)) throw DomainError("rician_power_cdf: invalid K or omega");
    if (x == 0) return 0.0;
    if (std::isinf(x)) return 1.0;
    const double a = std::sqrt(2.0 * n_antennas * k_factor);
    const double b = std::sqrt(2.0 * (k_factor + 1.0) * x / omega);
    return specfun::marcum_p(n_antennas, a, b, specfun::Tolerance{1e-15, 100'000});
}

double rician_power_cdf(double x, int n_antennas, const SystemParams& params) {
    return rician_power_cdf(x, n_antennas, params.k_rician, params.omega_sj);
}

double rayleigh_power_cdf(double x, double omega) {
    if (!(x >= 0) || !(omega > 0)) throw DomainError("rayleigh_power_cdf: invalid x or omega");
    return -std::expm1(-x / omega);
}

double gamma_cdf(double x, int shape, double scale) {
    if (!(scale > 0)) throw DomainError("gamma_cdf: scale must be > 0");
    return specfun::regularized_lower_gamma(shape, x / scale);
}

double eve_sinr_cdf(double z, const SystemParams& p, int n_jam) {
    check_eve_inputs(z, p, n_jam);
    const double mean_x = p.p_s * p.omega_se;
    const double varphi = p.p_j * p.omega_je / mean_x;
    const double dof = n_jam - 1;
    const double ratio = dof / (varphi * z + dof);
    return 1.0 - std::exp(-z * p.sigma2_e / mean_x) * std::pow(ratio, dof);
}

double eve_sinr_cdf(double z, const SystemParams& p) { return eve_sinr_cdf(z, p, p.n_t); }

double eve_sinr_pdf(double z, const SystemParams& p, int n_jam) {
    check_eve_inputs(z, p, n_jam);
    const double mean_x = p.p_s * p.omega_se;
    const double noise_rate = p.sigma2_e / mean_x;
    const double varphi = p.p_j * p.omega_je / mean_x;
    const double dof = n_jam - 1;
    const double ratio = dof / (varphi * z + dof);
    const double decay = std::exp(-z * noise_rate);
    return noise_rate * decay * std::pow(ratio, dof) + varphi * decay * std::pow(ratio, dof + 1);
}

double eve_sinr_pdf(double z, const SystemParams& p) { return eve_sinr_pdf(z, p, p.n_t); }

double sample_exponential(double mean, RngStream& rng) { return -mean * std::log(rng.uniform()); }

double sample_gamma(int shape, double scale, RngStream& rng) {
    if (shape < 1) throw DomainError("sample_gamma: shape must be >= 1");
    double sum = 0;
    for (int i = 0; i < shape; ++i) sum -= std::log(rng.uniform());
    return scale * sum;
}

double sample_rician_power(int n_antennas, double k_factor, double omega, RngStream& rng) {
    const double los = std::sqrt(k_factor * omega / (k_factor + 1.0));
    const double scatter = std::sqrt(omega / (k_factor + 1.0));
    double power = 0;
    for (int i = 0; i < n_antennas; ++i) {
        // Box-Muller: r^2 ~ Exp(1), so each quadrature has variance 1/2.
        const double r = scatter * std::sqrt(-std::log(rng.uniform()));
        const double theta = 2.0 * std::numbers::pi * rng.uniform();
        const double re = los + r * std::cos(theta);
        const double im = r * std::sin(theta);
        power += re * re + im * im;
    }
    return power;
}

double sample_rician_power(int n_antennas, const SystemParams& params, RngStream& rng) {
    return sample_rician_power(n_antennas, params.k_rician, params.omega_sj, rng);
}

}  // namespace anj
