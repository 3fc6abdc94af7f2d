#pragma once

#include <stdexcept>
#include <string>

namespace fxcast {

/// Thrown when an algorithm fails numerically (divergence, singular system,
/// non-finite intermediate). Distinct from std::invalid_argument, which is
/// reserved for contract violations on inputs.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

/// Significance stars at the 10/5/1% levels, as used in the text reports.
inline std::string significance_stars(double p_value) {
    if (p_value < 0.01) return "***";
    if (p_value < 0.05) return "**";
    if (p_value < 0.10) return "*";
    return "";
}

}  // namespace fxcast
