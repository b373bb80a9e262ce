#ifndef QKDLM_DECOY_BOUNDS_HPP
#define QKDLM_DECOY_BOUNDS_HPP

#include "qkdlm/errors.hpp"
#include "qkdlm/params.hpp"
#include "qkdlm/scheme.hpp"

#include <cmath>
#include <optional>
#include <string>

namespace qkdlm {

/// Measured-level quantities a real experiment would observe. y0_known is
/// present for weak+vacuum schemes (the vacuum decoy measures the background
/// directly) and absent for one-decoy schemes.
struct MeasuredStats {
    double q_mu, e_mu;
    double q_nu, e_nu;
    std::optional<double> y0_known;
};

/// Which bound fields were pulled back into physical range.
struct ClampFlags {
    bool y1_lower = false;
    bool y1_upper = false;
    bool y2_lower = false;
    bool y12_lower = false;
    bool q12_lower = false;
    bool e1_upper = false;
    bool e2_upper = false;
    bool eps_upper = false;

    bool any() const {
        return y1_lower || y1_upper || y2_lower || y12_lower || q12_lower ||
               e1_upper || e2_upper || eps_upper;
    }

    /// Semicolon-joined tokens, empty string when nothing was clamped.
    std::string to_string() const {
        std::string out;
        auto add = [&out](bool set, const char* name) {
            if (!set) return;
            if (!out.empty()) out += ';';
            out += name;
        };
        add(y1_lower, "Y1L");
        add(y1_upper, "Y1U");
        add(y2_lower, "Y2L");
        add(y12_lower, "Y12L");
        add(q12_lower, "Q12L");
        add(e1_upper, "e1U");
        add(e2_upper, "e2U");
        add(eps_upper, "epsU");
        return out;
    }
};

/// Bounds produced by one scheme. Fields irrelevant to the scheme stay unset.
struct BoundSet {
    Scheme scheme;
    std::optional<double> y1_lower, q1_lower;
    std::optional<double> y1_upper;
    std::optional<double> y2_lower, q2_lower;
    std::optional<double> e1_upper, e2_upper;
    std::optional<double> y12_lower;
    std::optional<double> q12_lower;
    std::optional<double> eps_upper;
    std::optional<double> y0_upper, y0_lower;
    std::optional<double> y2_inf;
    ClampFlags clamped;
};

namespace detail {

inline void require_intensities(const PulseSettings& p) {
    if (!(p.nu > 0.0) || !(p.nu < p.mu)) throw invalid_intensities(p.mu, p.nu);
}

inline double clamp_flagged(double x, double lo, double hi, bool& flag) {
    if (x < lo) { flag = true; return lo; }
    if (x > hi) { flag = true; return hi; }
    return x;
}

/// The shared bracket of the single-photon bound: the bound formulas for the
/// weak+vacuum and one-decoy schemes differ only in which background estimate
/// is subtracted.
inline double y1_lower_raw(const MeasuredStats& s, const PulseSettings& p,
                           double y0_est) {
    const double mu = p.mu, nu = p.nu;
    const double bracket = s.q_nu * std::exp(nu)
                         - s.q_mu * std::exp(mu) * nu * nu / (mu * mu)
                         - (mu * mu - nu * nu) / (mu * mu) * y0_est;
    return mu / (mu * nu - nu * nu) * bracket;
}

inline double y2_lower_raw(const MeasuredStats& s, const PulseSettings& p,
                           double y0_est, double y1_upper) {
    const double mu = p.mu, nu = p.nu;
    const double mu3 = mu * mu * mu, nu3 = nu * nu * nu;
    const double bracket = s.q_nu * std::exp(nu)
                         - nu3 / mu3 * s.q_mu * std::exp(mu)
                         - (mu3 - nu3) / mu3 * y0_est
                         - (nu * mu * mu - nu3) / (mu * mu) * y1_upper;
    return 2.0 * mu * bracket / (nu * nu * mu - nu3);
}

inline double e1_upper_raw(const MeasuredStats& s, const PulseSettings& p,
                           const SystemParams& params, double y0_for_errors,
                           double y1_lower) {
    const double mu = p.mu, nu = p.nu;
    const double numerator = s.e_nu * s.q_nu * std::exp(nu) * mu * mu
                           - s.e_mu * s.q_mu * std::exp(mu) * nu * nu
                           - params.e0 * y0_for_errors * (mu * mu - nu * nu);
    return numerator / (y1_lower * (nu * mu * mu - mu * nu * nu));
}

// Numerator and denominator are both negative for nu < mu; evaluated as
// written, no sign rearrangement.
inline double e2_upper_raw(const MeasuredStats& s, const PulseSettings& p,
                           const SystemParams& params, double y0_for_errors,
                           double y2_lower) {
    const double mu = p.mu, nu = p.nu;
    const double numerator = 2.0 * (s.e_nu * s.q_nu * std::exp(nu) * mu
                                  - s.e_mu * s.q_mu * std::exp(mu) * nu
                                  - params.e0 * y0_for_errors * (mu - nu));
    return numerator / (y2_lower * (mu * nu * nu - nu * mu * mu));
}

inline double y12_lower_raw(const MeasuredStats& s, const PulseSettings& p,
                            double y0_term, double y1_lower) {
    const double mu = p.mu, nu = p.nu;
    const double mu3 = mu * mu * mu, nu3 = nu * nu * nu;
    const double denom = mu3 * (nu - 0.5 * nu3 / mu);
    if (!(denom > 0.0))
        throw degenerate_denominator("y12_lower: nonpositive outer denominator");
    const double numerator = mu3 * std::exp(nu) * s.q_nu
                           - (mu3 - nu3) * y0_term
                           - nu3 * s.q_mu * std::exp(mu)
                           + (nu3 * mu - 0.5 * nu3 * mu * mu) * y1_lower;
    return numerator / denom;
}

} // namespace detail

/// Lower bounds on the single-photon yield and gain, weak+vacuum scheme.
inline std::pair<double, double> wv_single_photon(const MeasuredStats& stats,
                                                  const PulseSettings& pulses,
                                                  ClampFlags& flags) {
    detail::require_intensities(pulses);
    if (!stats.y0_known)
        throw usage_error("weak+vacuum bounds need a measured Y0");
    double y1l = detail::y1_lower_raw(stats, pulses, *stats.y0_known);
    y1l = detail::clamp_flagged(y1l, 0.0, 1.0, flags.y1_lower);
    return {y1l, pulses.mu * std::exp(-pulses.mu) * y1l};
}

/// Upper bound on the single-photon yield. y0_bound is the measured Y0 for
/// weak+vacuum or the lower bound Y0^L (zero) for one-decoy.
inline double y1_upper(const MeasuredStats& stats, const PulseSettings& pulses,
                       double y2_inf, double y0_bound, double y1_lower,
                       ClampFlags& flags) {
    if (!(pulses.nu > 0.0)) throw invalid_intensities(pulses.mu, pulses.nu);
    const double nu = pulses.nu;
    double y1u = (2.0 * stats.q_nu * std::exp(nu) - 2.0 * y0_bound -
                  y2_inf * nu * nu) / (2.0 * nu);
    return detail::clamp_flagged(y1u, y1_lower, 1.0, flags.y1_upper);
}

/// Lower bounds on the double-photon yield and gain, weak+vacuum scheme.
inline std::pair<double, double> wv_double_photon(const MeasuredStats& stats,
                                                  const PulseSettings& pulses,
                                                  double y1_upper_value,
                                                  ClampFlags& flags) {
    detail::require_intensities(pulses);
    if (!stats.y0_known)
        throw usage_error("weak+vacuum bounds need a measured Y0");
    double y2l = detail::y2_lower_raw(stats, pulses, *stats.y0_known, y1_upper_value);
    y2l = detail::clamp_flagged(y2l, 0.0, 1.0, flags.y2_lower);
    return {y2l, 0.5 * pulses.mu * pulses.mu * std::exp(-pulses.mu) * y2l};
}

/// Upper bounds on the single- and double-photon error rates, weak+vacuum
/// scheme. A nonpositive yield bound degrades the error bound to the worst
/// case 1/2 rather than failing.
inline std::pair<double, double> wv_error_bounds(const MeasuredStats& stats,
                                                 const PulseSettings& pulses,
                                                 const SystemParams& params,
                                                 double y1_lower, double y2_lower,
                                                 ClampFlags& flags) {
    detail::require_intensities(pulses);
    if (!stats.y0_known)
        throw usage_error("weak+vacuum bounds need a measured Y0");
    const double y0 = *stats.y0_known;
    double e1u, e2u;
    if (y1_lower > 0.0) {
        e1u = detail::e1_upper_raw(stats, pulses, params, y0, y1_lower);
        e1u = detail::clamp_flagged(e1u, 0.0, 0.5, flags.e1_upper);
    } else {
        e1u = 0.5;
        flags.e1_upper = true;
    }
    if (y2_lower > 0.0) {
        e2u = detail::e2_upper_raw(stats, pulses, params, y0, y2_lower);
        e2u = detail::clamp_flagged(e2u, 0.0, 0.5, flags.e2_upper);
    } else {
        e2u = 0.5;
        flags.e2_upper = true;
    }
    return {e1u, e2u};
}

struct LumpedBounds {
    double y12_lower;
    double q12_lower;
    double eps_upper;
};

namespace detail {

inline LumpedBounds lumped_from(const MeasuredStats& s, const PulseSettings& p,
                                double y0_term, double y1_lower,
                                double eps_numerator, ClampFlags& flags) {
    const double mu = p.mu;
    double y12l = y12_lower_raw(s, p, y0_term, y1_lower);
    y12l = clamp_flagged(y12l, 0.0, 1.0, flags.y12_lower);
    double q12l = (0.5 * y12l * mu * mu +
                   (y1_lower * mu - 0.5 * y1_lower * mu * mu)) * std::exp(-mu);
    q12l = clamp_flagged(q12l, 0.0, 1.0, flags.q12_lower);
    double epsu;
    if (q12l > 0.0) {
        epsu = clamp_flagged(eps_numerator / q12l, 0.0, 0.5, flags.eps_upper);
    } else {
        epsu = 0.5;
        flags.eps_upper = true;
    }
    return {y12l, q12l, epsu};
}

} // namespace detail

/// Lumped single+double photon bounds, weak+vacuum scheme.
inline LumpedBounds wv_lumped(const MeasuredStats& stats, const PulseSettings& pulses,
                              const SystemParams& params, double y1_lower,
                              ClampFlags& flags) {
    detail::require_intensities(pulses);
    if (!stats.y0_known)
        throw usage_error("weak+vacuum bounds need a measured Y0");
    const double y0 = *stats.y0_known;
    const double eps_num = stats.e_mu * stats.q_mu -
                           params.e0 * y0 * std::exp(-pulses.mu);
    return detail::lumped_from(stats, pulses, y0, y1_lower, eps_num, flags);
}

/// Background-yield bounds available to the one-decoy schemes. Only the upper
/// bound is informative; with a single weak decoy the lower bound is zero.
inline std::pair<double, double> one_decoy_y0_bounds(const MeasuredStats& stats,
                                                     const SystemParams& params,
                                                     const PulseSettings& pulses) {
    if (!(params.e0 > 0.0)) throw domain_error("e0 must be > 0");
    const double y0u = stats.e_mu * stats.q_mu * std::exp(pulses.mu) / params.e0;
    return {y0u, 0.0};
}

/// Full weak+vacuum bound set with separate single/double photon accounting.
inline BoundSet wv_r12sum(const MeasuredStats& stats, const PulseSettings& pulses,
                          const SystemParams& params, double y2_inf) {
    BoundSet b{Scheme::WvR12Sum};
    b.y2_inf = y2_inf;
    auto [y1l, q1l] = wv_single_photon(stats, pulses, b.clamped);
    b.y1_lower = y1l;
    b.q1_lower = q1l;
    b.y1_upper = y1_upper(stats, pulses, y2_inf, *stats.y0_known, y1l, b.clamped);
    auto [y2l, q2l] = wv_double_photon(stats, pulses, *b.y1_upper, b.clamped);
    b.y2_lower = y2l;
    b.q2_lower = q2l;
    auto [e1u, e2u] = wv_error_bounds(stats, pulses, params, y1l, y2l, b.clamped);
    b.e1_upper = e1u;
    b.e2_upper = e2u;
    return b;
}

/// Full weak+vacuum bound set with lumped accounting.
inline BoundSet wv_r12lump(const MeasuredStats& stats, const PulseSettings& pulses,
                           const SystemParams& params) {
    BoundSet b{Scheme::WvR12Lump};
    auto [y1l, q1l] = wv_single_photon(stats, pulses, b.clamped);
    b.y1_lower = y1l;
    b.q1_lower = q1l;
    auto lumped = wv_lumped(stats, pulses, params, y1l, b.clamped);
    b.y12_lower = lumped.y12_lower;
    b.q12_lower = lumped.q12_lower;
    b.eps_upper = lumped.eps_upper;
    return b;
}

/// One-decoy bound set, separate accounting: the weak+vacuum algebra with the
/// measured Y0 replaced by Y0^U in the yield bounds and by Y0^L = 0 inside
/// Y1^U and the error bounds.
inline BoundSet one_decoy_r12sum(const MeasuredStats& stats,
                                 const PulseSettings& pulses,
                                 const SystemParams& params, double y2_inf) {
    detail::require_intensities(pulses);
    BoundSet b{Scheme::OneR12Sum};
    b.y2_inf = y2_inf;
    auto [y0u, y0l] = one_decoy_y0_bounds(stats, params, pulses);
    b.y0_upper = y0u;
    b.y0_lower = y0l;

    double y1l = detail::y1_lower_raw(stats, pulses, y0u);
    y1l = detail::clamp_flagged(y1l, 0.0, 1.0, b.clamped.y1_lower);
    b.y1_lower = y1l;
    b.q1_lower = pulses.mu * std::exp(-pulses.mu) * y1l;

    b.y1_upper = y1_upper(stats, pulses, y2_inf, y0l, y1l, b.clamped);

    double y2l = detail::y2_lower_raw(stats, pulses, y0u, *b.y1_upper);
    y2l = detail::clamp_flagged(y2l, 0.0, 1.0, b.clamped.y2_lower);
    b.y2_lower = y2l;
    b.q2_lower = 0.5 * pulses.mu * pulses.mu * std::exp(-pulses.mu) * y2l;

    if (y1l > 0.0) {
        double e1u = detail::e1_upper_raw(stats, pulses, params, y0l, y1l);
        b.e1_upper = detail::clamp_flagged(e1u, 0.0, 0.5, b.clamped.e1_upper);
    } else {
        b.e1_upper = 0.5;
        b.clamped.e1_upper = true;
    }
    if (y2l > 0.0) {
        double e2u = detail::e2_upper_raw(stats, pulses, params, y0l, y2l);
        b.e2_upper = detail::clamp_flagged(e2u, 0.0, 0.5, b.clamped.e2_upper);
    } else {
        b.e2_upper = 0.5;
        b.clamped.e2_upper = true;
    }
    return b;
}

/// One-decoy bound set, lumped accounting.
inline BoundSet one_decoy_r12lump(const MeasuredStats& stats,
                                  const PulseSettings& pulses,
                                  const SystemParams& params) {
    detail::require_intensities(pulses);
    BoundSet b{Scheme::OneR12Lump};
    auto [y0u, y0l] = one_decoy_y0_bounds(stats, params, pulses);
    b.y0_upper = y0u;
    b.y0_lower = y0l;

    double y1l = detail::y1_lower_raw(stats, pulses, y0u);
    y1l = detail::clamp_flagged(y1l, 0.0, 1.0, b.clamped.y1_lower);
    b.y1_lower = y1l;
    b.q1_lower = pulses.mu * std::exp(-pulses.mu) * y1l;

    const double eps_num = stats.e_mu * stats.q_mu;
    auto lumped = detail::lumped_from(stats, pulses, y0u, y1l, eps_num, b.clamped);
    b.y12_lower = lumped.y12_lower;
    b.q12_lower = lumped.q12_lower;
    b.eps_upper = lumped.eps_upper;
    return b;
}

/// Dispatch over the four finite-decoy schemes.
inline BoundSet compute_bounds(Scheme scheme, const MeasuredStats& stats,
                               const PulseSettings& pulses,
                               const SystemParams& params, double y2_inf) {
    switch (scheme) {
        case Scheme::WvR12Sum: return wv_r12sum(stats, pulses, params, y2_inf);
        case Scheme::WvR12Lump: return wv_r12lump(stats, pulses, params);
        case Scheme::OneR12Sum: return one_decoy_r12sum(stats, pulses, params, y2_inf);
        case Scheme::OneR12Lump: return one_decoy_r12lump(stats, pulses, params);
        case Scheme::Infinite: break;
    }
    throw usage_error("compute_bounds: not a finite-decoy scheme");
}

} // namespace qkdlm

#endif
