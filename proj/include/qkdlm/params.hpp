#ifndef QKDLM_PARAMS_HPP
#define QKDLM_PARAMS_HPP

#include "qkdlm/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <string>

namespace qkdlm {

/// Physical constants of the transmission system.
struct SystemParams {
    double alpha;       ///< fiber loss coefficient, dB/km
    double eta_bob;     ///< receiver transmittance x detection efficiency
    double y0;          ///< background detection probability per pulse
    double e0;          ///< background error rate (1/2 for random noise)
    double e_detector;  ///< erroneous signal detection probability
    double f_ec;        ///< error-correction inefficiency, >= 1

    void validate() const {
        if (alpha < 0.0) throw domain_error("alpha must be >= 0");
        if (eta_bob < 0.0 || eta_bob > 1.0) throw domain_error("eta_bob must be in [0,1]");
        if (y0 < 0.0 || y0 > 1.0) throw domain_error("y0 must be in [0,1]");
        if (e_detector < 0.0 || e_detector > 1.0) throw domain_error("e_detector must be in [0,1]");
        if (e0 < 0.0 || e0 > 1.0) throw domain_error("e0 must be in [0,1]");
        if (f_ec < 1.0) throw domain_error("f_ec must be >= 1");
    }
};

/// Source intensities: signal mu, decoy nu (the second decoy is always vacuum).
struct PulseSettings {
    double mu;
    double nu;

    void validate() const {
        if (!(mu > 0.0)) throw domain_error("mu must be > 0");
        if (nu < 0.0 || nu >= mu) throw invalid_intensities(mu, nu);
    }
};

/// Parses a SystemParams from a JSON document. The schema is strict: exactly
/// the six snake_case field names, nothing more, nothing less.
inline SystemParams params_from_json(const nlohmann::json& j) {
    static const char* const required[] = {"alpha", "eta_bob", "y0",
                                           "e0",    "e_detector", "f_ec"};
    if (!j.is_object()) throw usage_error("parameter document must be a JSON object");
    for (const char* key : required) {
        if (!j.contains(key))
            throw usage_error(std::string("missing parameter field: ") + key);
        if (!j.at(key).is_number())
            throw usage_error(std::string("parameter field is not a number: ") + key);
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* key : required) known = known || it.key() == key;
        if (!known) throw usage_error("unknown parameter field: " + it.key());
    }
    SystemParams p{j.at("alpha").get<double>(), j.at("eta_bob").get<double>(),
                   j.at("y0").get<double>(),    j.at("e0").get<double>(),
                   j.at("e_detector").get<double>(), j.at("f_ec").get<double>()};
    p.validate();
    return p;
}

inline SystemParams load_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw usage_error("cannot open parameter file: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const nlohmann::json::parse_error& e) {
        throw usage_error("malformed parameter file " + path + ": " + e.what());
    }
    return params_from_json(j);
}

} // namespace qkdlm

#endif
