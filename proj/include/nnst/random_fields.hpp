#pragma once

// Seeded random trigonometric polynomials for experiments, verification
// suites and tests.

#include <cstdint>
#include <random>

#include "nnst/field.hpp"

namespace nnst {

using Rng = std::mt19937_64;

/// Gaussian coefficients on 0 < |k| <= kmax (Euclidean), Hermitian, zero mean.
SpectralField random_band_limited(const TorusGrid& g, double kmax, Rng& rng);

/// Band-limited density affinely rescaled so its grid range is exactly [lo, hi].
GridField random_density(const TorusGrid& g, double kmax, double lo, double hi, Rng& rng);

/// Random phases with |coeff(k)| = |k|^-exponent on resolved nonzero modes,
/// normalised to unit grid max-norm.
GridField rough_field(const TorusGrid& g, double exponent, Rng& rng);

/// Leray-projected band-limited velocity with unit L^2 norm.
VelocityField random_velocity(const TorusGrid& g, double kmax, Rng& rng);

}  // namespace nnst
