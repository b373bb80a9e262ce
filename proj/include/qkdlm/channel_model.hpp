#ifndef QKDLM_CHANNEL_MODEL_HPP
#define QKDLM_CHANNEL_MODEL_HPP

#include "qkdlm/errors.hpp"
#include "qkdlm/params.hpp"

#include <cmath>

namespace qkdlm {

/// Derived per-distance quantities of the analytic channel model.
struct ChannelPoint {
    double distance_km;
    double t_c;   ///< two-way channel transmittance
    double eta;   ///< overall transmittance x detection efficiency
    double q_mu, e_mu;
    double q_nu, e_nu;
};

struct GainQber {
    double gain;
    double qber;
};

struct Transmittance {
    double t_c;
    double eta;
};

/// Two-way channel transmittance. The factor of two in the exponent models the
/// round trip Alice -> Bob -> Alice over the same fiber.
inline Transmittance transmittance(double distance_km, const SystemParams& params) {
    if (distance_km < 0.0) throw domain_error("distance must be >= 0");
    const double t_c = std::pow(10.0, -2.0 * params.alpha * distance_km / 10.0);
    return {t_c, t_c * params.eta_bob};
}

/// Transmittance of an i-photon pulse: at least one of i independent photons
/// survives.
inline double eta_i(double eta, unsigned i) {
    if (eta < 0.0 || eta > 1.0) throw domain_error("eta must be in [0,1]");
    if (i == 1) return eta;  // keep the single-photon case exact
    return 1.0 - std::pow(1.0 - eta, static_cast<double>(i));
}

/// Conditional detection probability of an i-photon pulse: union of the signal
/// and background events, Y_i = Y0 + eta_i - eta_i*Y0.
inline double yield_i(const SystemParams& params, double eta, unsigned i) {
    const double h = eta_i(eta, i);
    return params.y0 + h - h * params.y0;
}

/// Gain of the i-photon class: yield weighted by the Poissonian photon-number
/// distribution of the source.
inline double gain_i(const SystemParams& params, double mu, double eta, unsigned i) {
    if (!(mu > 0.0)) throw domain_error("mu must be > 0");
    double poisson = std::exp(-mu);
    for (unsigned k = 1; k <= i; ++k) poisson *= mu / k;
    return yield_i(params, eta, i) * poisson;
}

/// Error rate of the i-photon class: background errors plus misalignment
/// errors, normalized by the class yield.
inline double error_i(const SystemParams& params, double eta, unsigned i) {
    const double yi = yield_i(params, eta, i);
    const double numerator = params.e0 * params.y0 + params.e_detector * eta_i(eta, i);
    if (yi <= 0.0)
        throw degenerate_denominator("error_i: zero yield for photon class " +
                                     std::to_string(i));
    return numerator / yi;
}

/// Overall gain and QBER at a given mean photon number. The gain is the exact
/// Poisson sum of the per-class gains, Q = Y0 + (1 - Y0)(1 - e^{-eta*x}).
inline GainQber overall_gain_qber(const SystemParams& params, double intensity,
                                  double eta) {
    if (intensity < 0.0) throw domain_error("intensity must be >= 0");
    if (eta < 0.0 || eta > 1.0) throw domain_error("eta must be in [0,1]");
    const double signal = -std::expm1(-eta * intensity);
    const double q = params.y0 + (1.0 - params.y0) * signal;
    if (q <= 0.0)
        throw degenerate_denominator("overall_gain_qber: zero gain");
    const double e = (params.e0 * params.y0 + params.e_detector * signal) / q;
    return {q, e};
}

/// Evaluates the full analytic model at one distance for a signal/decoy pair.
inline ChannelPoint channel_point(double distance_km, const SystemParams& params,
                                  const PulseSettings& pulses) {
    const auto [t_c, eta] = transmittance(distance_km, params);
    const auto sig = overall_gain_qber(params, pulses.mu, eta);
    const auto dec = overall_gain_qber(params, pulses.nu, eta);
    return {distance_km, t_c, eta, sig.gain, sig.qber, dec.gain, dec.qber};
}

} // namespace qkdlm

#endif
