#ifndef QKDLM_SCHEME_HPP
#define QKDLM_SCHEME_HPP

#include "qkdlm/errors.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace qkdlm {

/// Decoy-state estimation scheme, plus the infinite-decoy reference.
enum class Scheme {
    Infinite,    ///< exact per-photon quantities, theoretical limit
    WvR12Sum,    ///< weak+vacuum, single and double photon terms kept separate
    WvR12Lump,   ///< weak+vacuum, single and double photon terms lumped
    OneR12Sum,   ///< one decoy state, separate terms
    OneR12Lump,  ///< one decoy state, lumped terms
};

inline constexpr Scheme kAllSchemes[] = {Scheme::Infinite, Scheme::WvR12Sum,
                                         Scheme::WvR12Lump, Scheme::OneR12Sum,
                                         Scheme::OneR12Lump};

inline std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::Infinite: return "infinite";
        case Scheme::WvR12Sum: return "wv-r12sum";
        case Scheme::WvR12Lump: return "wv-r12lump";
        case Scheme::OneR12Sum: return "one-r12sum";
        case Scheme::OneR12Lump: return "one-r12lump";
    }
    return "?";
}

inline std::optional<Scheme> scheme_from_string(std::string_view name) {
    for (Scheme s : kAllSchemes)
        if (to_string(s) == name) return s;
    return std::nullopt;
}

} // namespace qkdlm

#endif
