#ifndef QKDLM_KEY_RATE_HPP
#define QKDLM_KEY_RATE_HPP

#include "qkdlm/channel_model.hpp"
#include "qkdlm/decoy_bounds.hpp"
#include "qkdlm/errors.hpp"
#include "qkdlm/scheme.hpp"

#include <algorithm>
#include <cmath>

namespace qkdlm {

/// Key-rate evaluation with diagnostics. rate is floored at zero; raw_rate
/// keeps the unfloored value.
struct RateResult {
    Scheme scheme;
    double rate;
    double raw_rate;
    double ec_term;           ///< Q_mu * f_ec * H(E_mu)
    double pa_single;         ///< single-photon (or lumped) contribution
    double pa_double;         ///< double-photon contribution, 0 for lumped
};

/// Binary Shannon entropy in bits, with the 0*log(0) = 0 convention.
inline double shannon_h(double e) {
    if (e < 0.0 || e > 1.0) throw domain_error("shannon_h: probability outside [0,1]");
    if (e == 0.0 || e == 1.0) return 0.0;
    return -e * std::log2(e) - (1.0 - e) * std::log2(1.0 - e);
}

/// Privacy-amplification fraction of the two-way protocol.
inline double tau(double e) {
    if (e < 0.0 || e > 1.0) throw domain_error("tau: probability outside [0,1]");
    if (e >= 0.5) return 1.0;
    return std::log2(1.0 + 4.0 * e - 4.0 * e * e);
}

namespace detail {

inline RateResult make_rate(Scheme scheme, double ec_term, double pa_single,
                            double pa_double) {
    const double raw = -ec_term + pa_single + pa_double;
    return {scheme, std::max(raw, 0.0), raw, ec_term, pa_single, pa_double};
}

} // namespace detail

/// Key rate with separate single- and double-photon accounting.
inline RateResult rate_r12sum(const ChannelPoint& channel, const BoundSet& bounds,
                              const SystemParams& params) {
    if (bounds.scheme != Scheme::WvR12Sum && bounds.scheme != Scheme::OneR12Sum)
        throw usage_error("rate_r12sum: bound set is not a separate-accounting scheme");
    if (!bounds.q1_lower || !bounds.q2_lower || !bounds.e1_upper || !bounds.e2_upper)
        throw usage_error("rate_r12sum: bound set is incomplete");
    const double ec = channel.q_mu * params.f_ec * shannon_h(channel.e_mu);
    const double pa1 = *bounds.q1_lower * (1.0 - tau(*bounds.e1_upper));
    const double pa2 = *bounds.q2_lower * (1.0 - tau(*bounds.e2_upper));
    return detail::make_rate(bounds.scheme, ec, pa1, pa2);
}

/// Key rate with lumped accounting.
inline RateResult rate_r12lump(const ChannelPoint& channel, const BoundSet& bounds,
                               const SystemParams& params) {
    if (bounds.scheme != Scheme::WvR12Lump && bounds.scheme != Scheme::OneR12Lump)
        throw usage_error("rate_r12lump: bound set is not a lumped scheme");
    if (!bounds.q12_lower || !bounds.eps_upper)
        throw usage_error("rate_r12lump: bound set is incomplete");
    const double ec = channel.q_mu * params.f_ec * shannon_h(channel.e_mu);
    const double pa = *bounds.q12_lower * (1.0 - tau(*bounds.eps_upper));
    return detail::make_rate(bounds.scheme, ec, pa, 0.0);
}

/// Infinite-decoy reference rate: the same formula as the separate-accounting
/// case but with the exact per-photon gains and error rates of the model.
inline RateResult rate_infinite(const ChannelPoint& channel,
                                const SystemParams& params,
                                const PulseSettings& pulses) {
    const double ec = channel.q_mu * params.f_ec * shannon_h(channel.e_mu);
    const double q1 = gain_i(params, pulses.mu, channel.eta, 1);
    const double q2 = gain_i(params, pulses.mu, channel.eta, 2);
    const double e1 = error_i(params, channel.eta, 1);
    const double e2 = error_i(params, channel.eta, 2);
    const double pa1 = q1 * (1.0 - tau(std::min(e1, 0.5)));
    const double pa2 = q2 * (1.0 - tau(std::min(e2, 0.5)));
    return detail::make_rate(Scheme::Infinite, ec, pa1, pa2);
}

} // namespace qkdlm

#endif
