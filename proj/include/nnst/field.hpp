#pragma once

// Field representations on the periodic torus [0, 2pi)^d.
//
// Grid values are stored row-major with axis 0 slowest. Spectral
// coefficients use the same flat layout in FFT index order: index m on an
// axis stands for wavenumber m for m <= n/2 and m - n otherwise, so the
// represented lattice is {-n/2+1, ..., n/2}^d. Coefficients are normalised
// so that coeff(0) is the mean of the field.

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace nnst {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Per-mode lookup data, shared between all grids of the same shape.
struct Mode {
  std::array<int, 3> k{0, 0, 0};  ///< signed wavevector (unused axes are 0)
  double k2 = 0.0;                ///< |k|^2 (Euclidean)
  bool resolved = true;           ///< false when any axis sits on Nyquist
  std::size_t mirror = 0;         ///< flat index of -k
};

class TorusGrid {
 public:
  /// d in {2, 3}; n a power of two, at least 8.
  TorusGrid(int d, int n);

  int dim() const noexcept { return d_; }
  int n() const noexcept { return n_; }
  std::size_t size() const noexcept { return size_; }
  double spacing() const noexcept { return kTwoPi / n_; }
  double cell_volume() const noexcept;
  double volume() const noexcept;

  /// Signed wavenumber for an FFT index on one axis.
  int wavenumber(int index) const noexcept { return index <= n_ / 2 ? index : index - n_; }

  std::span<const Mode> modes() const noexcept { return *modes_; }
  const Mode& mode(std::size_t flat) const noexcept { return (*modes_)[flat]; }

  /// Flat index of a signed wavevector (entries beyond dim() ignored).
  std::size_t index_of(std::array<int, 3> k) const;

  /// Node coordinates of a flat grid index.
  std::array<double, 3> coordinates(std::size_t flat) const noexcept;
  std::array<int, 3> unravel(std::size_t flat) const noexcept;

  friend bool operator==(const TorusGrid& a, const TorusGrid& b) noexcept {
    return a.d_ == b.d_ && a.n_ == b.n_;
  }

 private:
  int d_;
  int n_;
  std::size_t size_;
  std::shared_ptr<const std::vector<Mode>> modes_;
};

/// Real point values on the uniform grid.
struct GridField {
  TorusGrid grid;
  std::vector<double> values;

  explicit GridField(const TorusGrid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
  GridField(const TorusGrid& g, std::vector<double> v);

  static GridField from_function(const TorusGrid& g,
                                 const std::function<double(const std::array<double, 3>&)>& f);

  double mean() const;
  double min() const;
  double max() const;
  bool all_finite() const;
};

/// Complex Fourier coefficients of a real field.
struct SpectralField {
  TorusGrid grid;
  std::vector<Complex> coeffs;

  explicit SpectralField(const TorusGrid& g) : grid(g), coeffs(g.size()) {}

  Complex& at(std::array<int, 3> k) { return coeffs[grid.index_of(k)]; }
  const Complex& at(std::array<int, 3> k) const { return coeffs[grid.index_of(k)]; }

  /// max |coeff(-k) - conj(coeff(k))| relative to max |coeff|.
  double hermitian_defect() const;
  /// Restores exact Hermitian symmetry by averaging each coefficient with its mirror.
  void symmetrize();

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double s);
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

/// L^2(T^d) inner product computed from coefficients (Parseval).
double inner(const SpectralField& a, const SpectralField& b);
double l2_norm(const SpectralField& a);

/// d spectral components. The Stokes unknown: divergence-free with zero mean.
/// Construct through leray_project (spectral.hpp) to get those invariants;
/// the arithmetic below preserves them.
struct VelocityField {
  std::vector<SpectralField> components;

  static VelocityField zero(const TorusGrid& g);
  /// Spatially uniform velocity c. Violates the zero-mean invariant on
  /// purpose: it is the translation test mode accepted by the transport
  /// routines.
  static VelocityField uniform_translation(const TorusGrid& g, std::span<const double> c);

  const TorusGrid& grid() const { return components.front().grid; }
  int dim() const { return static_cast<int>(components.size()); }

  /// max_k |k . u(k)| / max |u|; zero for an exactly solenoidal field.
  double divergence_defect() const;
  /// max_i |u_i(0)|
  double mean_magnitude() const;

  VelocityField& operator+=(const VelocityField& o);
  VelocityField& operator-=(const VelocityField& o);
  VelocityField& operator*=(double s);
  /// this += s * o
  void axpy(double s, const VelocityField& o);
};

VelocityField operator+(VelocityField a, const VelocityField& b);
VelocityField operator-(VelocityField a, const VelocityField& b);
VelocityField operator*(double s, VelocityField a);

double inner(const VelocityField& a, const VelocityField& b);
double l2_norm(const VelocityField& a);

/// Symmetric d x d tensor of grid fields, packed upper triangle:
/// (00, 01, 11) in 2D and (00, 01, 02, 11, 12, 22) in 3D.
struct SymTensorField {
  TorusGrid grid;
  std::vector<GridField> packed;

  explicit SymTensorField(const TorusGrid& g);

  int dim() const { return grid.dim(); }
  static int packed_size(int d) { return d * (d + 1) / 2; }
  static int packed_index(int d, int i, int j);

  GridField& operator()(int i, int j) { return packed[packed_index(dim(), i, j)]; }
  const GridField& operator()(int i, int j) const { return packed[packed_index(dim(), i, j)]; }

  /// Pointwise Frobenius norm.
  GridField frobenius() const;
  /// Pointwise trace.
  GridField trace() const;
};

}  // namespace nnst
