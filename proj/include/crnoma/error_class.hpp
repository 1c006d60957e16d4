#pragma once

#include "crnoma/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace crnoma {

// Distribution family assumed for the normalized estimation error zeta in
// [-1, 1]. The three rows mirror the safe-approximation parameter table:
// anything bounded, bounded + unimodal, bounded + symmetric unimodal.
enum class ErrorClass {
    bounded,
    unimodal,
    symmetric_unimodal,
};

// Draw a normalized error in [-1, 1] admissible for the class. The unimodal
// row uses a triangular law peaked at -1 (an admissible extreme member);
// the symmetric row uses the symmetric triangle.
inline double draw_unit_error(ErrorClass cls, Rng& rng) {
    switch (cls) {
    case ErrorClass::bounded: return rng.uniform(-1.0, 1.0);
    case ErrorClass::unimodal: return rng.triangular(-1.0);
    case ErrorClass::symmetric_unimodal: return rng.triangular(0.0);
    }
    throw std::invalid_argument("unknown error class");
}

// Inverse CDF of the class sampler, used for quantile-margined constraint
// checks under the stochastic model.
inline double unit_error_quantile(ErrorClass cls, double p) {
    if (p < 0.0 || p > 1.0) throw std::domain_error("quantile level outside [0,1]");
    switch (cls) {
    case ErrorClass::bounded:
        return -1.0 + 2.0 * p;
    case ErrorClass::unimodal: {
        // triangle on [-1,1], mode -1: F(x) = 1 - (1-x)^2/4
        return 1.0 - 2.0 * std::sqrt(1.0 - p);
    }
    case ErrorClass::symmetric_unimodal: {
        // symmetric triangle on [-1,1], mode 0
        if (p < 0.5) return -1.0 + std::sqrt(2.0 * p);
        return 1.0 - std::sqrt(2.0 * (1.0 - p));
    }
    }
    throw std::invalid_argument("unknown error class");
}

} // namespace crnoma
