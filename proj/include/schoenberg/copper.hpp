#pragma once

#include <array>

#include "schoenberg/geometry.hpp"

namespace schoenberg {

/// Copper concentrations (ppm) in 24 wholemeal flour samples, sorted.
/// Analytical Methods Committee (Abbey 1988); distributed as `chem` in the
/// R package MASS.
inline constexpr std::array<double, 24> kCopper = {
    2.20, 2.20, 2.40, 2.40, 2.50, 2.70, 2.80, 2.90, 3.03, 3.03, 3.10, 3.37,
    3.40, 3.40, 3.40, 3.50, 3.60, 3.70, 3.70, 3.70, 3.70, 3.77, 5.28, 28.95};

/// The raw sample as a 24 x 1 configuration labelled by value.
Configuration copper_configuration();

}  // namespace schoenberg
