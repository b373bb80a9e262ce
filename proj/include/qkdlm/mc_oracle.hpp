#ifndef QKDLM_MC_ORACLE_HPP
#define QKDLM_MC_ORACLE_HPP

#include "qkdlm/channel_model.hpp"
#include "qkdlm/decoy_bounds.hpp"
#include "qkdlm/errors.hpp"

#include <cmath>
#include <cstdint>
#include <future>
#include <random>
#include <thread>
#include <vector>

namespace qkdlm {

struct McConfig {
    std::uint64_t pulses;             ///< pulses sent per intensity
    std::uint64_t seed;
    std::vector<double> intensities;  ///< mean photon numbers to simulate
    double distance_km;
};

/// Tallies for one simulated intensity.
struct McIntensityStats {
    double intensity;
    std::uint64_t sent = 0;
    std::uint64_t detected = 0;
    std::uint64_t errors = 0;
    // per photon-number class, indexed by the hidden true n
    std::vector<std::uint64_t> sent_n;
    std::vector<std::uint64_t> detected_n;
    std::vector<std::uint64_t> errors_n;

    double q_hat() const { return static_cast<double>(detected) / sent; }
    double e_hat() const {
        return detected ? static_cast<double>(errors) / detected : 0.0;
    }
    double q_se() const {
        const double q = q_hat();
        return std::sqrt(q * (1.0 - q) / sent);
    }
    double e_se() const {
        if (!detected) return 0.0;
        const double e = e_hat();
        return std::sqrt(e * (1.0 - e) / detected);
    }
    double yield_hat(unsigned n) const {
        if (n >= sent_n.size() || sent_n[n] == 0) return 0.0;
        return static_cast<double>(detected_n[n]) / sent_n[n];
    }
    double yield_se(unsigned n) const {
        if (n >= sent_n.size() || sent_n[n] == 0) return 0.0;
        const double y = yield_hat(n);
        return std::sqrt(y * (1.0 - y) / sent_n[n]);
    }
};

struct McStats {
    McConfig config;
    double eta;
    std::vector<McIntensityStats> per_intensity;

    const McIntensityStats* find(double intensity) const {
        for (const auto& s : per_intensity)
            if (s.intensity == intensity) return &s;
        return nullptr;
    }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d49bb133111ebULL;
    return z ^ (z >> 31);
}

/// Poisson CDF truncated where the survivor probability drops below 1e-15.
inline std::vector<double> poisson_cdf(double mean) {
    std::vector<double> cdf;
    double pmf = std::exp(-mean);
    double cum = pmf;
    cdf.push_back(cum);
    unsigned n = 0;
    while (1.0 - cum > 1e-15 && n < 4096) {
        ++n;
        pmf *= mean / n;
        cum += pmf;
        cdf.push_back(cum);
    }
    cdf.back() = 1.0;
    return cdf;
}

struct ChunkTally {
    std::uint64_t detected = 0, errors = 0;
    std::vector<std::uint64_t> sent_n, detected_n, errors_n;
};

inline ChunkTally run_chunk(std::uint64_t chunk_seed, std::uint64_t pulses,
                            const std::vector<double>& cdf,
                            const std::vector<double>& eta_n,
                            const SystemParams& params) {
    std::mt19937_64 rng(chunk_seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    ChunkTally t;
    const std::size_t nmax = cdf.size();
    t.sent_n.assign(nmax, 0);
    t.detected_n.assign(nmax, 0);
    t.errors_n.assign(nmax, 0);
    for (std::uint64_t p = 0; p < pulses; ++p) {
        const double u = uni(rng);
        std::size_t n = 0;
        while (n + 1 < nmax && u > cdf[n]) ++n;
        ++t.sent_n[n];
        const bool signal = uni(rng) < eta_n[n];
        const bool background = uni(rng) < params.y0;
        if (!signal && !background) continue;
        ++t.detected;
        ++t.detected_n[n];
        // signal clicks err with e_detector; background-only clicks with e0
        const double p_err = signal ? params.e_detector : params.e0;
        if (uni(rng) < p_err) {
            ++t.errors;
            ++t.errors_n[n];
        }
    }
    return t;
}

} // namespace detail

/// Pulse-level Monte Carlo simulation of the two-way channel. Deterministic
/// given (config, params); chunks are simulated on independent substreams and
/// merged in chunk order.
inline McStats simulate(const McConfig& config, const SystemParams& params) {
    if (config.pulses == 0) throw domain_error("mc simulate: need at least one pulse");
    if (config.intensities.empty())
        throw domain_error("mc simulate: need at least one intensity");
    params.validate();

    McStats out;
    out.config = config;
    out.eta = transmittance(config.distance_km, params).eta;

    constexpr std::uint64_t kChunk = 1u << 20;
    std::uint64_t seed_state = config.seed;

    for (double intensity : config.intensities) {
        if (intensity < 0.0) throw domain_error("mc simulate: negative intensity");
        const auto cdf = detail::poisson_cdf(intensity);
        std::vector<double> eta_n(cdf.size());
        for (std::size_t n = 0; n < cdf.size(); ++n)
            eta_n[n] = eta_i(out.eta, static_cast<unsigned>(n));

        const std::uint64_t chunks = (config.pulses + kChunk - 1) / kChunk;
        std::vector<std::uint64_t> chunk_seeds(chunks);
        for (auto& s : chunk_seeds) s = detail::splitmix64(seed_state);

        std::vector<std::future<detail::ChunkTally>> futures;
        futures.reserve(chunks);
        for (std::uint64_t c = 0; c < chunks; ++c) {
            const std::uint64_t n_pulses =
                std::min(kChunk, config.pulses - c * kChunk);
            futures.push_back(std::async(std::launch::async, detail::run_chunk,
                                         chunk_seeds[c], n_pulses, cdf, eta_n,
                                         params));
        }

        McIntensityStats stats;
        stats.intensity = intensity;
        stats.sent = config.pulses;
        stats.sent_n.assign(cdf.size(), 0);
        stats.detected_n.assign(cdf.size(), 0);
        stats.errors_n.assign(cdf.size(), 0);
        for (auto& f : futures) {
            const auto t = f.get();
            stats.detected += t.detected;
            stats.errors += t.errors;
            for (std::size_t n = 0; n < cdf.size(); ++n) {
                stats.sent_n[n] += t.sent_n[n];
                stats.detected_n[n] += t.detected_n[n];
                stats.errors_n[n] += t.errors_n[n];
            }
        }
        out.per_intensity.push_back(std::move(stats));
    }
    return out;
}

/// Packages empirical gains/QBERs into MeasuredStats for the decoy bounds.
inline MeasuredStats measured_stats_from_mc(const McStats& mc, double mu, double nu,
                                            bool y0_known = true,
                                            double y0 = 0.0) {
    const McIntensityStats* s_mu = mc.find(mu);
    const McIntensityStats* s_nu = mc.find(nu);
    if (!s_mu) throw usage_error("measured_stats_from_mc: signal intensity not simulated");
    if (!s_nu) throw usage_error("measured_stats_from_mc: decoy intensity not simulated");
    MeasuredStats stats{s_mu->q_hat(), s_mu->e_hat(), s_nu->q_hat(), s_nu->e_hat(), {}};
    if (y0_known) stats.y0_known = y0;
    return stats;
}

} // namespace qkdlm

#endif
