#pragma once

#include <stdexcept>
#include <string>

namespace qng {

/// Precondition violation on a numeric argument (out-of-range T, bad model
/// parameters, invalid splits, ...).
struct invalid_input : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A (p0, q0, T) triple that violates the physical bounds
/// p0 <= q0 <= 1 - T(1 - p0) by more than the clamping tolerance.
struct nonphysical_pair : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A photon-number distribution whose entries or normalization are broken.
struct invalid_distribution : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace qng
