#include "qkdlm/decoy_bounds.hpp"

#include "qkdlm/channel_model.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace qkdlm;
using qkdlm_test::gys;

namespace {

struct ExactPoint {
    ChannelPoint cp;
    MeasuredStats stats;       // with y0_known
    MeasuredStats stats_blind; // without
    double y1, y2, e1, e2, q1, q2, y2_inf;
};

ExactPoint exact_point(double l, double mu, double nu) {
    const auto& p = gys();
    ExactPoint e;
    e.cp = channel_point(l, p, {mu, nu});
    e.stats = {e.cp.q_mu, e.cp.e_mu, e.cp.q_nu, e.cp.e_nu, p.y0};
    e.stats_blind = {e.cp.q_mu, e.cp.e_mu, e.cp.q_nu, e.cp.e_nu, {}};
    e.y1 = yield_i(p, e.cp.eta, 1);
    e.y2 = yield_i(p, e.cp.eta, 2);
    e.e1 = error_i(p, e.cp.eta, 1);
    e.e2 = error_i(p, e.cp.eta, 2);
    e.q1 = gain_i(p, mu, e.cp.eta, 1);
    e.q2 = gain_i(p, mu, e.cp.eta, 2);
    e.y2_inf = e.y2;
    return e;
}

} // namespace

TEST_CASE("invalid intensities are rejected") {
    const auto pt = exact_point(20.0, 0.48, 0.05);
    ClampFlags flags;
    CHECK_THROWS_AS(wv_single_photon(pt.stats, {0.48, 0.0}, flags), invalid_intensities);
    CHECK_THROWS_AS(wv_single_photon(pt.stats, {0.48, 0.48}, flags), invalid_intensities);
    CHECK_THROWS_AS(wv_double_photon(pt.stats, {0.48, 0.48}, 0.1, flags),
                    invalid_intensities);
    CHECK_THROWS_AS(one_decoy_r12sum(pt.stats_blind, {0.48, 0.6}, gys(), pt.y2_inf),
                    invalid_intensities);
}

TEST_CASE("weak+vacuum schemes require a measured Y0") {
    const auto pt = exact_point(20.0, 0.48, 0.05);
    ClampFlags flags;
    CHECK_THROWS_AS(wv_single_photon(pt.stats_blind, {0.48, 0.05}, flags), usage_error);
    CHECK_THROWS_AS(wv_lumped(pt.stats_blind, {0.48, 0.05}, gys(), 0.1, flags),
                    usage_error);
}

TEST_CASE("single worked point sandwiches the truth") {
    const auto pt = exact_point(20.0, 0.48, 0.05);
    const PulseSettings pulses{0.48, 0.05};
    const auto b = wv_r12sum(pt.stats, pulses, gys(), pt.y2_inf);
    CHECK(*b.y1_lower > 0.0);
    CHECK(*b.y1_lower <= pt.y1);
    CHECK(*b.y1_upper >= pt.y1);
    CHECK(*b.y2_lower <= pt.y2);
    CHECK(*b.e1_upper >= pt.e1);
    CHECK(*b.e2_upper >= pt.e2);

    const auto lump = wv_r12lump(pt.stats, pulses, gys());
    CHECK(*lump.y12_lower <= pt.y1 + pt.y2);
    CHECK(*lump.y12_lower > 0.0);
}

TEST_CASE("opaque channel leaves at most background-sized bounds") {
    const auto& p = gys();
    // eta = 0: gains and errors are pure background
    const MeasuredStats stats{p.y0, 0.5, p.y0, 0.5, p.y0};
    const PulseSettings pulses{0.48, 0.05};
    const auto b = wv_r12sum(stats, pulses, p, p.y0);
    CHECK(*b.y1_lower >= 0.0);
    CHECK(*b.y1_lower <= p.y0);
    CHECK(*b.y2_lower <= p.y0);
    CHECK(*b.e1_upper == 0.5);
    CHECK(b.clamped.e1_upper);
    CHECK(*b.e2_upper == 0.5);

    const auto lump = wv_r12lump(stats, pulses, p);
    CHECK(*lump.q12_lower <= p.y0);
    CHECK(*lump.eps_upper == 0.5);
    CHECK(lump.clamped.eps_upper);
}

TEST_CASE("negative brackets clamp to zero and flag") {
    const auto& p = gys();
    // decoy gain at background level while the signal gain is large forces
    // every lower-bound bracket negative
    const MeasuredStats stats{0.1, 0.05, p.y0, 0.5, p.y0};
    const PulseSettings pulses{0.48, 0.05};
    const auto b = wv_r12sum(stats, pulses, p, p.y0);
    CHECK(*b.y1_lower == 0.0);
    CHECK(b.clamped.y1_lower);
    CHECK(*b.y2_lower == 0.0);
    CHECK(b.clamped.y2_lower);
    CHECK(*b.e1_upper == 0.5);
    CHECK(b.clamped.e1_upper);

    const auto lump = wv_r12lump(stats, pulses, p);
    CHECK(*lump.q12_lower == 0.0);
    CHECK((lump.clamped.q12_lower || lump.clamped.y12_lower));
    CHECK(*lump.eps_upper == 0.5);
    CHECK(lump.clamped.eps_upper);
}

TEST_CASE("y1_upper with a vacuum-equivalent decoy is zero") {
    const double y0 = 1.7e-6, nu = 0.05;
    MeasuredStats stats{0.02, 0.03, y0 * std::exp(-nu), 0.5, y0};
    ClampFlags flags;
    const double y1u = y1_upper(stats, {0.48, nu}, 0.0, y0, 0.0, flags);
    CHECK(y1u == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("one-decoy background bounds") {
    const auto& p = gys();
    SUBCASE("error-free channel has no background") {
        const MeasuredStats stats{0.02, 0.0, 0.01, 0.0, {}};
        const auto [y0u, y0l] = one_decoy_y0_bounds(stats, p, {0.5, 0.1});
        CHECK(y0u == 0.0);
        CHECK(y0l == 0.0);
    }
    SUBCASE("worked value at zero distance") {
        const auto pt = exact_point(0.0, 0.5, 0.1);
        const auto [y0u, y0l] = one_decoy_y0_bounds(pt.stats_blind, p, {0.5, 0.1});
        CHECK(y0u == doctest::Approx(2.424e-3).epsilon(5e-3));
        CHECK(y0l == 0.0);
        CHECK(y0u >= p.y0);
    }
}

TEST_CASE("gain bounds are Poisson-scaled yield bounds") {
    const auto pt = exact_point(20.0, 0.48, 0.05);
    const PulseSettings pulses{0.48, 0.05};
    const double mu = pulses.mu;
    const auto b = wv_r12sum(pt.stats, pulses, gys(), pt.y2_inf);
    CHECK(std::abs(*b.q1_lower - *b.y1_lower * mu * std::exp(-mu)) < 1e-12);
    CHECK(std::abs(*b.q2_lower - *b.y2_lower * 0.5 * mu * mu * std::exp(-mu)) < 1e-12);

    // Q2 route via its own prefactor acting on the same bracket
    const double nu = pulses.nu;
    const double mu3 = mu * mu * mu, nu3 = nu * nu * nu;
    const double bracket = pt.stats.q_nu * std::exp(nu)
                         - nu3 / mu3 * pt.stats.q_mu * std::exp(mu)
                         - (mu3 - nu3) / mu3 * gys().y0
                         - (nu * mu * mu - nu3) / (mu * mu) * *b.y1_upper;
    const double q2_direct = mu3 * std::exp(-mu) * bracket / (nu * nu * mu - nu3);
    CHECK(std::abs(*b.q2_lower - q2_direct) < 1e-12);
}

TEST_CASE("clamping is idempotent and flagged") {
    ClampFlags flags;
    const double once = detail::clamp_flagged(-0.3, 0.0, 1.0, flags.y1_lower);
    CHECK(once == 0.0);
    CHECK(flags.y1_lower);
    bool again_flag = false;
    CHECK(detail::clamp_flagged(once, 0.0, 1.0, again_flag) == once);
    CHECK_FALSE(again_flag);
    CHECK(flags.to_string() == "Y1L");

    flags.e1_upper = true;
    flags.eps_upper = true;
    CHECK(flags.to_string() == "Y1L;e1U;epsU");
    CHECK(ClampFlags{}.to_string().empty());
}

TEST_CASE("scheme-irrelevant fields stay unset") {
    const auto pt = exact_point(20.0, 0.48, 0.05);
    const PulseSettings pulses{0.48, 0.05};
    const auto sum = wv_r12sum(pt.stats, pulses, gys(), pt.y2_inf);
    CHECK_FALSE(sum.y12_lower.has_value());
    CHECK_FALSE(sum.q12_lower.has_value());
    CHECK_FALSE(sum.y0_upper.has_value());

    const auto lump = wv_r12lump(pt.stats, pulses, gys());
    CHECK_FALSE(lump.e1_upper.has_value());
    CHECK_FALSE(lump.y1_upper.has_value());

    const auto one = one_decoy_r12sum(pt.stats_blind, pulses, gys(), pt.y2_inf);
    CHECK(one.y0_upper.has_value());
    CHECK(one.y0_lower == 0.0);
}

TEST_CASE("sandwich property over random draws") {
    std::mt19937_64 rng(0x51a9u);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const auto& p = gys();
    const double tol = 1e-12;
    for (int i = 0; i < 10000; ++i) {
        const double l = 60.0 * u01(rng);
        const double mu = 0.05 + 0.95 * u01(rng);
        const double nu = 0.01 + (mu / 2.0 - 0.01) * u01(rng);
        const auto pt = exact_point(l, mu, nu);
        const PulseSettings pulses{mu, nu};

        const auto wv = wv_r12sum(pt.stats, pulses, p, pt.y2_inf);
        REQUIRE(*wv.y1_lower <= pt.y1 + tol);
        REQUIRE(*wv.y1_upper >= pt.y1 - tol);
        REQUIRE(*wv.y2_lower <= pt.y2 + tol);
        REQUIRE(*wv.q1_lower <= pt.q1 + tol);
        REQUIRE(*wv.q2_lower <= pt.q2 + tol);
        REQUIRE(*wv.e1_upper >= pt.e1 - tol);
        REQUIRE(*wv.e2_upper >= pt.e2 - tol);

        const auto wvl = wv_r12lump(pt.stats, pulses, p);
        REQUIRE(*wvl.y12_lower <= pt.y1 + pt.y2 + tol);
        const double eps_true = (pt.e1 * pt.q1 + pt.e2 * pt.q2) / (pt.q1 + pt.q2);
        REQUIRE(*wvl.eps_upper >= eps_true - tol);

        const auto one = one_decoy_r12sum(pt.stats_blind, pulses, p, pt.y2_inf);
        REQUIRE(*one.y1_lower <= pt.y1 + tol);
        REQUIRE(*one.y1_upper >= pt.y1 - tol);
        REQUIRE(*one.y2_lower <= pt.y2 + tol);
        REQUIRE(*one.e1_upper >= std::min(pt.e1, 0.5) - tol);
        REQUIRE(*one.e2_upper >= std::min(pt.e2, 0.5) - tol);
        REQUIRE(*one.y0_upper >= p.y0 - tol);

        const auto onel = one_decoy_r12lump(pt.stats_blind, pulses, p);
        REQUIRE(*onel.y12_lower <= pt.y1 + pt.y2 + tol);
        REQUIRE(*onel.eps_upper >= std::min(eps_true, 0.5) - tol);

        // knowing Y0 never hurts
        REQUIRE(*wv.q1_lower >= *one.q1_lower - tol);
        REQUIRE(*wvl.eps_upper <= *onel.eps_upper + tol);
    }
}
