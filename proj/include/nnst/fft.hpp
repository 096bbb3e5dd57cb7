#pragma once

#include <span>

#include "nnst/field.hpp"

namespace nnst {

/// Forward transform, normalised so that coeff(0) is the grid mean.
SpectralField to_spectral(const GridField& f);

/// Inverse transform. Throws NonHermitian when the coefficients do not
/// describe a real field (relative defect above 1e-10).
GridField to_grid(const SpectralField& F);

namespace fft {

/// Raw unnormalised complex transforms on an n^d array (any n >= 1, d in
/// {1,2,3}). Safe to call concurrently; plans are shared and created under a
/// lock.
void forward(int d, int n, std::span<const Complex> in, std::span<Complex> out);
void backward(int d, int n, std::span<const Complex> in, std::span<Complex> out);

/// Inverse transform without the Hermitian check. For hot loops whose input
/// is Hermitian by construction.
GridField to_grid_unchecked(const SpectralField& F);

}  // namespace fft
}  // namespace nnst
