#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include <anj/channels.hpp>
#include <anj/errors.hpp>
#include <anj/params.hpp>
#include <anj/rng.hpp>

#include "oracles.hpp"

using namespace anj;

namespace {

constexpr int kSamples = 1'000'000;
const double kKsBound = 1.63 / std::sqrt(static_cast<double>(kSamples));

// Within three binomial standard errors of p.
bool within_3se(double observed, double p, double n) {
    return std::fabs(observed - p) <= 3 * std::sqrt(p * (1 - p) / n);
}

}  // namespace

TEST_CASE("Philox4x32-10 known answers") {
    using A4 = std::array<std::uint32_t, 4>;
    CHECK(RngStream::philox({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(RngStream::philox({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u}) ==
          A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(RngStream::philox({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
    RngStream a(42, 3), b(42, 3), c(42, 4), d(43, 3);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
        seen.insert(x);
        seen.insert(c.next_u64());
        seen.insert(d.next_u64());
    }
    CHECK(seen.size() == 3000);
    RngStream u(7, 0);
    for (int i = 0; i < 100000; ++i) {
        const double v = u.uniform();
        REQUIRE(v > 0);
        REQUIRE(v < 1);
    }
}

TEST_CASE("unit conversions") {
    CHECK(dbm_to_watts(30) == doctest::Approx(1));
    CHECK(dbm_to_watts(20) == doctest::Approx(0.1));
    CHECK(dbm_to_watts(-10) == doctest::Approx(1e-4));
    CHECK(watts_to_dbm(dbm_to_watts(13.7)) == doctest::Approx(13.7));
    CHECK(db_to_linear(5) == doctest::Approx(3.16227766016838));
}

TEST_CASE("link gains from distances") {
    CHECK(link_gain(5, 3) == doctest::Approx(1.0 / 126));
    CHECK(link_gain(30, 3) == doctest::Approx(1.0 / 27001));
    CHECK(link_gain(0, 3) == 1);
    const auto g = omegas_from_topology(default_topology());
    CHECK(g.je == doctest::Approx(1.0 / (1 + 15.0 * 15 * 15)));
    CHECK(g.jd == doctest::Approx(1.0 / (1 + 25.0 * 25 * 25)));
    CHECK_THROWS_AS(omegas_from_topology(Topology{20, 5, 30, 3}), DomainError);
    CHECK_THROWS_AS(link_gain(1, 0), DomainError);
}

TEST_CASE("parameter invariants") {
    const SystemParams p = default_params();
    CHECK_NOTHROW(validate(p));
    auto broken = [&](auto mutate) {
        SystemParams q = p;
        mutate(q);
        return q;
    };
    CHECK_THROWS_AS(validate(broken([](SystemParams& q) { q.n_t = 1; })), DomainError);
    CHECK_THROWS_AS(validate(broken([](SystemParams& q) { q.n_r = 0; })), DomainError);
    CHECK_THROWS_AS(validate(broken([](SystemParams& q) { q.rho = 1.5; })), DomainError);
    CHECK_THROWS_AS(validate(broken([](SystemParams& q) { q.p_s = 0; })), DomainError);
    CHECK_NOTHROW(validate(broken([](SystemParams& q) { q.p_s = 0; }), true));
    CHECK_THROWS_AS(validate(broken([](SystemParams& q) { q.omega_je = 0; })), DomainError);
    CHECK_THROWS_AS(validate(broken([](SystemParams& q) { q.sigma2_e = -1; })), DomainError);
}

TEST_CASE("Rician power CDF") {
    const double omega = 1.0 / 126;
    CHECK(rician_power_cdf(0, 4, 3.0, omega) == 0);
    for (double x : {0.001, 0.01, 0.05}) {
        CHECK(rician_power_cdf(x, 1, 0.0, omega) == doctest::Approx(1 - std::exp(-x / omega)));
    }
    for (int n : {1, 2, 4, 8}) {
        for (double k : {0.0, 0.5, db_to_linear(5), 10.0}) {
            for (double rel : {0.1, 0.5, 1.0, 2.0}) {
                const double x = rel * n * omega;
                CHECK(std::fabs(rician_power_cdf(x, n, k, omega) - oracle::rician_power_cdf(x, n, k, omega)) <
                      1e-10);
            }
        }
    }
}

TEST_CASE("Rician power sampler") {
    const int n = 4;
    const double k = db_to_linear(5);
    const double omega = 1.0 / 126;
    RngStream rng(2024, 0);
    std::vector<double> s(kSamples);
    double sum = 0, sum2 = 0;
    int below = 0;
    const double x_mid = 0.5 * n * omega;
    for (auto& v : s) {
        v = sample_rician_power(n, k, omega, rng);
        sum += v;
        sum2 += v * v;
        below += v <= x_mid;
    }
    const double mean = sum / kSamples;
    const double sd = std::sqrt(sum2 / kSamples - mean * mean);
    CHECK(std::fabs(mean - n * omega) < 3 * sd / std::sqrt(static_cast<double>(kSamples)));
    CHECK(within_3se(static_cast<double>(below) / kSamples, rician_power_cdf(x_mid, n, k, omega), kSamples));
    CHECK(oracle::ks_distance(s, [&](double x) { return rician_power_cdf(x, n, k, omega); }) < kKsBound);

    // Strong line of sight: almost deterministic.
    RngStream r2(5, 0);
    const double k_big = 1e8;
    double m = 0, m2 = 0;
    for (int i = 0; i < 10000; ++i) {
        const double v = sample_rician_power(n, k_big, omega, r2);
        m += v;
        m2 += v * v;
    }
    m /= 10000;
    const double scatter = omega / (k_big + 1);
    const double var_theory = n * (2 * k_big * omega / (k_big + 1) * scatter + scatter * scatter);
    CHECK(m == doctest::Approx(n * omega).epsilon(1e-3));
    CHECK(m2 / 10000 - m * m == doctest::Approx(var_theory).epsilon(0.1));
    CHECK(var_theory < 1e-6 * (n * omega) * (n * omega));
}

TEST_CASE("Rayleigh and Gamma") {
    const double omega = 0.3;
    CHECK(rayleigh_power_cdf(0, omega) == 0);
    CHECK(rayleigh_power_cdf(omega * std::log(2.0), omega) == doctest::Approx(0.5));
    CHECK(rayleigh_power_cdf(2 * omega, omega) == doctest::Approx(0.8646647167633873));

    RngStream rng(77, 1);
    std::vector<double> e(kSamples);
    int below = 0;
    for (auto& v : e) {
        v = sample_exponential(omega, rng);
        below += v <= 2 * omega;
    }
    CHECK(within_3se(static_cast<double>(below) / kSamples, 1 - std::exp(-2.0), kSamples));
    CHECK(oracle::ks_distance(e, [&](double x) { return 1 - std::exp(-x / omega); }) < kKsBound);

    std::vector<double> g(kSamples);
    double sum = 0;
    for (auto& v : g) {
        v = sample_gamma(3, 0.4, rng);
        sum += v;
    }
    CHECK(sum / kSamples == doctest::Approx(1.2).epsilon(3e-3));
    CHECK(oracle::ks_distance(g, [](double x) { return oracle::gamma_cdf(x, 3, 0.4); }) < kKsBound);
    for (double x : {0.1, 1.0, 3.0}) CHECK(gamma_cdf(x, 3, 0.4) == doctest::Approx(oracle::gamma_cdf(x, 3, 0.4)));

    std::vector<double> g1(kSamples);
    for (auto& v : g1) v = sample_gamma(1, omega, rng);
    CHECK(oracle::ks_distance(g1, [&](double x) { return 1 - std::exp(-x / omega); }) < kKsBound);
    CHECK_THROWS_AS(sample_gamma(0, 1, rng), DomainError);
}

TEST_CASE("eavesdropper SINR distribution") {
    SystemParams p = default_params();
    CHECK(eve_sinr_cdf(0, p) == 0);

    // Silent jammer: plain exponential in z.
    SystemParams q = p;
    q.p_j = 0;
    const double rate = q.sigma2_e / (q.p_s * q.omega_se);
    for (double z : {0.1, 1.0, 10.0}) {
        CHECK(eve_sinr_cdf(z, q) == doctest::Approx(1 - std::exp(-z * rate)));
    }

    // N_t = 4, varphi = 0.5, sigma_E^2 / (P_S Omega_SE) = 0.1, checked by sampling X / (Y + sigma_E^2).
    SystemParams r = p;
    r.n_t = 4;
    r.p_s = 1;
    r.omega_se = 1;
    r.sigma2_e = 0.1;
    r.omega_je = 1;
    r.p_j = 0.5;
    RngStream rng(31, 0);
    int hits = 0;
    for (int i = 0; i < kSamples; ++i) {
        const double x = sample_exponential(r.p_s * r.omega_se, rng);
        const double y = sample_gamma(r.n_t - 1, r.p_j * r.omega_je / (r.n_t - 1), rng);
        hits += x / (y + r.sigma2_e) <= 1.0;
    }
    CHECK(within_3se(static_cast<double>(hits) / kSamples, eve_sinr_cdf(1.0, r), kSamples));

    for (int n : {2, 4, 8}) {
        double prev = 0;
        for (double z = 0; z < 1e3; z = z * 1.5 + 0.01) {
            const double f = eve_sinr_cdf(z, p, n);
            CHECK(f >= prev - 1e-15);
            prev = f;
        }
        CHECK(eve_sinr_cdf(1e6 * 1e4, p, n) == doctest::Approx(1).epsilon(1e-6));

        // Trapezoid of the pdf against the cdf.
        const double z_max = 2000;
        const int steps = 400000;
        const double h = z_max / steps;
        double area = 0.5 * (eve_sinr_pdf(0, p, n) + eve_sinr_pdf(z_max, p, n));
        for (int i = 1; i < steps; ++i) area += eve_sinr_pdf(i * h, p, n);
        CHECK(std::fabs(area * h - eve_sinr_cdf(z_max, p, n)) < 1e-6);
    }
    CHECK_THROWS_AS(eve_sinr_cdf(1, p, 1), DomainError);
    CHECK_THROWS_AS(eve_sinr_cdf(-1, p), DomainError);
}
