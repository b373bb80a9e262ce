#include "qkdlm/mc_oracle.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace qkdlm;
using qkdlm_test::gys;

TEST_CASE("input validation") {
    CHECK_THROWS_AS(simulate({0, 1, {0.5}, 10.0}, gys()), domain_error);
    CHECK_THROWS_AS(simulate({100, 1, {}, 10.0}, gys()), domain_error);
    CHECK_THROWS_AS(simulate({100, 1, {-0.5}, 10.0}, gys()), domain_error);
}

TEST_CASE("nothing clicks through a dead system") {
    SystemParams p = gys();
    p.eta_bob = 0.0;
    p.y0 = 0.0;
    const auto mc = simulate({100000, 7, {0.5}, 10.0}, p);
    CHECK(mc.per_intensity[0].detected == 0);
    CHECK(mc.per_intensity[0].errors == 0);
}

TEST_CASE("same seed reproduces identical tallies") {
    const McConfig config{500000, 1234, {0.5, 0.1}, 15.0};
    const auto a = simulate(config, gys());
    const auto b = simulate(config, gys());
    REQUIRE(a.per_intensity.size() == b.per_intensity.size());
    for (std::size_t i = 0; i < a.per_intensity.size(); ++i) {
        CHECK(a.per_intensity[i].detected == b.per_intensity[i].detected);
        CHECK(a.per_intensity[i].errors == b.per_intensity[i].errors);
        CHECK(a.per_intensity[i].detected_n == b.per_intensity[i].detected_n);
    }
}

TEST_CASE("tallies partition consistently") {
    const auto mc = simulate({2000000, 99, {0.5}, 10.0}, gys());
    const auto& s = mc.per_intensity[0];
    std::uint64_t sent_sum = 0, det_sum = 0, err_sum = 0;
    for (std::size_t n = 0; n < s.sent_n.size(); ++n) {
        sent_sum += s.sent_n[n];
        det_sum += s.detected_n[n];
        err_sum += s.errors_n[n];
        CHECK(s.errors_n[n] <= s.detected_n[n]);
        CHECK(s.detected_n[n] <= s.sent_n[n]);
    }
    CHECK(sent_sum == s.sent);
    CHECK(det_sum == s.detected);
    CHECK(err_sum == s.errors);
}

TEST_CASE("empirical statistics track the analytic model") {
    const auto& p = gys();
    const auto mc = simulate({4000000, 20260823, {0.5, 0.1}, 10.0}, p);
    for (const auto& s : mc.per_intensity) {
        const auto analytic = overall_gain_qber(p, s.intensity, mc.eta);
        CHECK(std::abs(s.q_hat() - analytic.gain) < 4.0 * s.q_se());
        CHECK(std::abs(s.e_hat() - analytic.qber) < 4.0 * s.e_se());
    }
    const auto& s_mu = mc.per_intensity[0];
    for (unsigned n : {1u, 2u}) {
        const double y = yield_i(p, mc.eta, n);
        CHECK(std::abs(s_mu.yield_hat(n) - y) < 4.0 * s_mu.yield_se(n));
    }
}

TEST_CASE("standard error shrinks like the square root of the sample") {
    const auto small = simulate({1000000, 5, {0.5}, 10.0}, gys());
    const auto large = simulate({4000000, 5, {0.5}, 10.0}, gys());
    const double ratio = small.per_intensity[0].q_se() / large.per_intensity[0].q_se();
    CHECK(ratio == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("packaging measured stats") {
    const auto mc = simulate({200000, 11, {0.5, 0.1}, 10.0}, gys());
    const auto stats = measured_stats_from_mc(mc, 0.5, 0.1, true, gys().y0);
    CHECK(stats.q_mu == mc.per_intensity[0].q_hat());
    CHECK(stats.q_nu == mc.per_intensity[1].q_hat());
    CHECK(stats.y0_known == gys().y0);
    CHECK_THROWS_AS(measured_stats_from_mc(mc, 0.5, 0.2, true, gys().y0), usage_error);
    CHECK_THROWS_AS(measured_stats_from_mc(mc, 0.7, 0.1, true, gys().y0), usage_error);
}

TEST_CASE("noisy stats still produce bounds, clamps flagged where needed") {
    const auto& p = gys();
    const auto mc = simulate({1000, 3, {0.5, 0.1}, 10.0}, p);
    const auto stats = measured_stats_from_mc(mc, 0.5, 0.1, true, p.y0);
    if (stats.q_mu > 0.0 && stats.q_nu > 0.0) {
        const auto b = wv_r12sum(stats, {0.5, 0.1}, p, yield_i(p, mc.eta, 2));
        CHECK(*b.y1_lower >= 0.0);
        CHECK(*b.y1_lower <= 1.0);
        CHECK(*b.e1_upper <= 0.5);
    }
}

TEST_CASE("large sample converges to the analytic bounds") {
    const auto& p = gys();
    const PulseSettings pulses{0.5, 0.1};
    const auto cp = channel_point(10.0, p, pulses);
    const auto mc = simulate({20000000, 424242, {0.5, 0.1}, 10.0}, p);
    const auto stats = measured_stats_from_mc(mc, 0.5, 0.1, true, p.y0);
    const MeasuredStats exact{cp.q_mu, cp.e_mu, cp.q_nu, cp.e_nu, p.y0};
    const double y2inf = yield_i(p, cp.eta, 2);
    const auto b_mc = wv_r12sum(stats, pulses, p, y2inf);
    const auto b_exact = wv_r12sum(exact, pulses, p, y2inf);
    // the bound is a smooth function of (Q, E); propagate the decoy-gain and
    // decoy-error standard errors through the leading linear coefficients
    const double mu = pulses.mu, nu = pulses.nu;
    const double dq = mu / (mu * nu - nu * nu) * std::exp(nu);
    const double q_se = mc.per_intensity[1].q_se();
    CHECK(std::abs(*b_mc.y1_lower - *b_exact.y1_lower) < 5.0 * dq * q_se);
    const double eq_nu = cp.e_nu * cp.q_nu;
    const double eq_se = std::sqrt(eq_nu * (1.0 - eq_nu) / mc.config.pulses);
    const double de = std::exp(nu) * mu * mu /
                      (*b_exact.y1_lower * (nu * mu * mu - mu * nu * nu));
    CHECK(std::abs(*b_mc.e1_upper - *b_exact.e1_upper) <
          5.0 * (de * eq_se + dq * q_se / *b_exact.y1_lower));
}
