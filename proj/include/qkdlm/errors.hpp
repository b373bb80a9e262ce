#ifndef QKDLM_ERRORS_HPP
#define QKDLM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qkdlm {

/// Input outside the physical domain of a model function.
class domain_error : public std::domain_error {
public:
    explicit domain_error(const std::string& what) : std::domain_error(what) {}
};

/// Intensity pair violates 0 < nu < mu (every decoy bound divides by mu*nu - nu^2
/// or nu^2*(mu - nu)).
class invalid_intensities : public domain_error {
public:
    invalid_intensities(double mu, double nu)
        : domain_error("invalid intensities: require 0 < nu < mu, got mu=" +
                       std::to_string(mu) + " nu=" + std::to_string(nu)) {}
};

/// A ratio whose denominator collapsed to zero with no defined limit.
class degenerate_denominator : public domain_error {
public:
    explicit degenerate_denominator(const std::string& what) : domain_error(what) {}
};

/// API misuse: wrong scheme for an operation, missing field, etc.
class usage_error : public std::invalid_argument {
public:
    explicit usage_error(const std::string& what) : std::invalid_argument(what) {}
};

} // namespace qkdlm

#endif
