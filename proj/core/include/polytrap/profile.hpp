#pragma once

#include <vector>

namespace polytrap {

/// Density sampled on a uniform grid. `err` is the per-bin standard error
/// when the profile comes from Monte Carlo; empty for deterministic sources.
struct DensityProfile {
    std::vector<double> y;
    std::vector<double> value;
    std::vector<double> err;
};

} // namespace polytrap
