#ifndef QKDLM_OPTIMIZER_HPP
#define QKDLM_OPTIMIZER_HPP

#include "qkdlm/channel_model.hpp"
#include "qkdlm/decoy_bounds.hpp"
#include "qkdlm/key_rate.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace qkdlm {

/// Search configuration for the per-distance (mu, nu) optimization. nu is
/// parameterized as a fraction of mu so the nu < mu constraint is structural.
struct OptimizeConfig {
    double mu_min = 0.01;
    double mu_max = 1.0;
    double nu_frac_min = 0.005;
    double nu_frac_max = 0.5;
    int grid_size = 60;       ///< points per axis of the coarse grid
    int refine_rounds = 3;    ///< each round shrinks the window 5x
    double refine_shrink = 5.0;
    double step_km = 1.0;     ///< distance step for sweeps

    void validate() const {
        if (!(mu_min > 0.0) || !(mu_max > mu_min))
            throw usage_error("optimize config: need 0 < mu_min < mu_max");
        if (!(nu_frac_min > 0.0) || !(nu_frac_max > nu_frac_min) || nu_frac_max >= 1.0)
            throw usage_error("optimize config: need 0 < nu_frac_min < nu_frac_max < 1");
        if (grid_size < 2 || refine_rounds < 0 || !(refine_shrink > 1.0))
            throw usage_error("optimize config: bad grid/refinement settings");
        if (!(step_km > 0.0)) throw usage_error("optimize config: step_km must be > 0");
    }
};

/// One row of a rate-vs-distance curve.
struct SweepPoint {
    double distance_km;
    Scheme scheme;
    double mu_opt;
    std::optional<double> nu_opt;  ///< absent for the infinite scheme
    double rate;
    double raw_rate;
    ClampFlags clamp_flags;
};

/// Evaluates the full formula chain for one scheme at explicit intensities.
inline RateResult evaluate_rate(double distance_km, Scheme scheme,
                                const PulseSettings& pulses,
                                const SystemParams& params,
                                ClampFlags* flags_out = nullptr) {
    const ChannelPoint cp = channel_point(distance_km, params, pulses);
    if (scheme == Scheme::Infinite) {
        if (flags_out) *flags_out = ClampFlags{};
        return rate_infinite(cp, params, pulses);
    }
    MeasuredStats stats{cp.q_mu, cp.e_mu, cp.q_nu, cp.e_nu, {}};
    if (scheme == Scheme::WvR12Sum || scheme == Scheme::WvR12Lump)
        stats.y0_known = params.y0;
    const double y2_inf = yield_i(params, cp.eta, 2);
    const BoundSet bounds = compute_bounds(scheme, stats, pulses, params, y2_inf);
    if (flags_out) *flags_out = bounds.clamped;
    if (scheme == Scheme::WvR12Sum || scheme == Scheme::OneR12Sum)
        return rate_r12sum(cp, bounds, params);
    return rate_r12lump(cp, bounds, params);
}

namespace detail {

struct GridBest {
    double raw_rate = -std::numeric_limits<double>::infinity();
    double mu = 0.0;
    double frac = 0.0;
};

/// Exhaustive grid scan over (mu, nu-fraction). Ties break toward smaller mu
/// then smaller nu by scan order with strict improvement.
inline GridBest scan_grid(double distance_km, Scheme scheme,
                          const SystemParams& params, const OptimizeConfig& cfg,
                          double mu_lo, double mu_hi, double fr_lo, double fr_hi) {
    GridBest best;
    // odd point count keeps the incumbent on the grid across refinement rounds
    const int n = cfg.grid_size % 2 ? cfg.grid_size : cfg.grid_size + 1;
    const bool has_nu = scheme != Scheme::Infinite;
    for (int i = 0; i < n; ++i) {
        const double mu = mu_lo + (mu_hi - mu_lo) * i / (n - 1);
        if (!(mu > 0.0)) continue;
        if (!has_nu) {
            // nu does not enter the infinite-decoy rate; fix a feasible value
            const double r = evaluate_rate(distance_km, scheme,
                                           {mu, 0.5 * mu * cfg.nu_frac_min}, params)
                                 .raw_rate;
            if (r > best.raw_rate) best = {r, mu, 0.0};
            continue;
        }
        for (int k = 0; k < n; ++k) {
            const double frac = fr_lo + (fr_hi - fr_lo) * k / (n - 1);
            const double nu = frac * mu;
            if (!(nu > 0.0) || !(nu < mu)) continue;
            const double r =
                evaluate_rate(distance_km, scheme, {mu, nu}, params).raw_rate;
            if (r > best.raw_rate) best = {r, mu, frac};
        }
    }
    return best;
}

} // namespace detail

/// Maximizes the key rate over source intensities at one distance: coarse grid
/// scan followed by window refinement around the incumbent. Deterministic for
/// a fixed config.
inline SweepPoint optimize_at_distance(double distance_km, Scheme scheme,
                                       const SystemParams& params,
                                       const OptimizeConfig& cfg) {
    cfg.validate();
    if (distance_km < 0.0) throw usage_error("distance must be >= 0");

    double mu_lo = cfg.mu_min, mu_hi = cfg.mu_max;
    double fr_lo = cfg.nu_frac_min, fr_hi = cfg.nu_frac_max;
    auto best = detail::scan_grid(distance_km, scheme, params, cfg,
                                  mu_lo, mu_hi, fr_lo, fr_hi);
    double mu_w = (mu_hi - mu_lo), fr_w = (fr_hi - fr_lo);
    for (int round = 0; round < cfg.refine_rounds; ++round) {
        mu_w /= cfg.refine_shrink;
        fr_w /= cfg.refine_shrink;
        const double ml = std::max(cfg.mu_min, best.mu - 0.5 * mu_w);
        const double mh = std::min(cfg.mu_max, best.mu + 0.5 * mu_w);
        const double fl = std::max(cfg.nu_frac_min, best.frac - 0.5 * fr_w);
        const double fh = std::min(cfg.nu_frac_max, best.frac + 0.5 * fr_w);
        const auto refined = detail::scan_grid(distance_km, scheme, params, cfg,
                                               ml, mh, fl, fh);
        if (refined.raw_rate > best.raw_rate) best = refined;
    }

    SweepPoint point;
    point.distance_km = distance_km;
    point.scheme = scheme;
    point.mu_opt = best.mu;
    PulseSettings pulses{best.mu, 0.5 * best.mu * cfg.nu_frac_min};
    if (scheme != Scheme::Infinite) {
        point.nu_opt = best.frac * best.mu;
        pulses.nu = *point.nu_opt;
    }
    const RateResult r =
        evaluate_rate(distance_km, scheme, pulses, params, &point.clamp_flags);
    point.rate = r.rate;
    point.raw_rate = r.raw_rate;
    return point;
}

/// Rate-vs-distance curve: steps from zero until the first zero-rate point
/// (inclusive) or max_km.
inline std::vector<SweepPoint> sweep(Scheme scheme, const SystemParams& params,
                                     const OptimizeConfig& cfg, double max_km) {
    cfg.validate();
    if (max_km < 0.0) throw usage_error("max_km must be >= 0");
    std::vector<SweepPoint> points;
    for (double l = 0.0; l <= max_km + 1e-9; l += cfg.step_km) {
        points.push_back(optimize_at_distance(l, scheme, params, cfg));
        if (points.back().rate <= 0.0) break;
    }
    return points;
}

/// Largest distance with a positive optimized rate, refined by bisection to
/// 0.1 km between the last positive and first zero grid point.
inline double max_secure_distance(Scheme scheme, const SystemParams& params,
                                  const OptimizeConfig& cfg,
                                  double hard_limit_km = 500.0) {
    cfg.validate();
    auto rate_at = [&](double l) {
        return optimize_at_distance(l, scheme, params, cfg).rate;
    };
    if (!(rate_at(0.0) > 0.0)) return 0.0;
    double lo = 0.0, hi = 0.0;
    for (double l = cfg.step_km; l <= hard_limit_km; l += cfg.step_km) {
        if (rate_at(l) > 0.0) {
            lo = l;
        } else {
            hi = l;
            break;
        }
    }
    if (hi == 0.0) return lo;  // still secure at the hard limit
    while (hi - lo > 0.1) {
        const double mid = 0.5 * (lo + hi);
        if (rate_at(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

} // namespace qkdlm

#endif
