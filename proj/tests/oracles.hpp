#pragma once

// Reference computations that share no code with the library: a direct DFT,
// fine-grid quadrature of analytic integrands and a 1D Newton minimiser for
// the reduced shear-flow problem.

#include <complex>
#include <functional>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

/// Direct O(N^2) forward DFT of n^d samples, normalised by 1/N (so entry 0 is the mean).
std::vector<cplx> direct_dft(int d, int n, const std::vector<double>& values);

/// Midpoint rule with m points per axis over [0, 2pi)^2.
double integrate_2d(const std::function<double(double, double)>& f, int m = 2000);

/// Reduced shear problem: u = (U(x2), 0), gravity along -x1, viscosity 1.
/// Minimises 2pi * h * sum_i [ (1/p)(U'(y_i)^2 / 2)^(p/2) + rho(y_i) U(y_i) ]
/// over U = sum_{m=1}^{M} a_m cos(m y) + b_m sin(m y) on the n-point grid y_i,
/// by damped Newton. Returns U on the grid.
std::vector<double> shear_profile(double p, int n, int M, const std::function<double(double)>& rho);

}  // namespace oracle
