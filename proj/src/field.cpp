#include "nnst/field.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <utility>

#include "nnst/error.hpp"

namespace nnst {

namespace {

std::shared_ptr<const std::vector<Mode>> build_modes(int d, int n) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const std::vector<Mode>>> cache;

  std::lock_guard lock(mutex);
  auto& slot = cache[{d, n}];
  if (slot) return slot;

  std::size_t size = 1;
  for (int a = 0; a < d; ++a) size *= static_cast<std::size_t>(n);
  auto modes = std::make_shared<std::vector<Mode>>(size);

  for (std::size_t flat = 0; flat < size; ++flat) {
    Mode& m = (*modes)[flat];
    std::size_t rest = flat;
    std::array<int, 3> idx{0, 0, 0};
    for (int a = d - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(rest % n);
      rest /= n;
    }
    std::size_t mirror = 0;
    for (int a = 0; a < d; ++a) {
      const int i = idx[a];
      m.k[a] = i <= n / 2 ? i : i - n;
      if (2 * i == n) m.resolved = false;
      m.k2 += static_cast<double>(m.k[a]) * m.k[a];
      mirror = mirror * n + static_cast<std::size_t>((n - i) % n);
    }
    m.mirror = mirror;
  }
  slot = std::move(modes);
  return slot;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

TorusGrid::TorusGrid(int d, int n) : d_(d), n_(n), size_(1) {
  if (d != 2 && d != 3) fail(ErrorKind::InvalidArgument, "grid dimension must be 2 or 3");
  if (n < 8 || !is_power_of_two(n))
    fail(ErrorKind::InvalidArgument, "points per axis must be a power of two >= 8, got " + std::to_string(n));
  for (int a = 0; a < d; ++a) size_ *= static_cast<std::size_t>(n);
  modes_ = build_modes(d, n);
}

double TorusGrid::cell_volume() const noexcept { return std::pow(spacing(), d_); }
double TorusGrid::volume() const noexcept { return std::pow(kTwoPi, d_); }

std::size_t TorusGrid::index_of(std::array<int, 3> k) const {
  std::size_t flat = 0;
  for (int a = 0; a < d_; ++a) {
    int i = k[a] % n_;
    if (i < 0) i += n_;
    flat = flat * n_ + static_cast<std::size_t>(i);
  }
  return flat;
}

std::array<int, 3> TorusGrid::unravel(std::size_t flat) const noexcept {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = d_ - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % n_);
    flat /= n_;
  }
  return idx;
}

std::array<double, 3> TorusGrid::coordinates(std::size_t flat) const noexcept {
  const auto idx = unravel(flat);
  const double h = spacing();
  return {idx[0] * h, idx[1] * h, idx[2] * h};
}

// --- GridField -------------------------------------------------------------

GridField::GridField(const TorusGrid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) fail(ErrorKind::InvalidArgument, "grid field size mismatch");
}

GridField GridField::from_function(const TorusGrid& g,
                                   const std::function<double(const std::array<double, 3>&)>& f) {
  GridField out(g);
  for (std::size_t i = 0; i < g.size(); ++i) out.values[i] = f(g.coordinates(i));
  return out;
}

double GridField::mean() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double GridField::min() const { return *std::min_element(values.begin(), values.end()); }
double GridField::max() const { return *std::max_element(values.begin(), values.end()); }

bool GridField::all_finite() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

// --- SpectralField ---------------------------------------------------------

double SpectralField::hermitian_defect() const {
  double scale = 0.0;
  double defect = 0.0;
  const auto modes = grid.modes();
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    scale = std::max(scale, std::abs(coeffs[i]));
    defect = std::max(defect, std::abs(coeffs[modes[i].mirror] - std::conj(coeffs[i])));
  }
  return scale > 0.0 ? defect / scale : 0.0;
}

void SpectralField::symmetrize() {
  const auto modes = grid.modes();
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const std::size_t j = modes[i].mirror;
    if (j < i) continue;
    const Complex avg = 0.5 * (coeffs[i] + std::conj(coeffs[j]));
    coeffs[i] = avg;
    coeffs[j] = std::conj(avg);
  }
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] += o.coeffs[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] -= o.coeffs[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& c : coeffs) c *= s;
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

double inner(const SpectralField& a, const SpectralField& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) s += (std::conj(a.coeffs[i]) * b.coeffs[i]).real();
  return a.grid.volume() * s;
}

double l2_norm(const SpectralField& a) { return std::sqrt(std::max(0.0, inner(a, a))); }

// --- VelocityField ---------------------------------------------------------

VelocityField VelocityField::zero(const TorusGrid& g) {
  VelocityField u;
  u.components.assign(g.dim(), SpectralField(g));
  return u;
}

VelocityField VelocityField::uniform_translation(const TorusGrid& g, std::span<const double> c) {
  if (static_cast<int>(c.size()) != g.dim()) fail(ErrorKind::InvalidArgument, "translation vector has wrong dimension");
  VelocityField u = zero(g);
  for (int a = 0; a < g.dim(); ++a) u.components[a].coeffs[0] = c[a];
  return u;
}

double VelocityField::divergence_defect() const {
  const auto modes = grid().modes();
  double scale = 0.0;
  double defect = 0.0;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    Complex div = 0.0;
    double kmag = std::sqrt(modes[i].k2);
    double umag = 0.0;
    for (int a = 0; a < dim(); ++a) {
      div += static_cast<double>(modes[i].k[a]) * components[a].coeffs[i];
      umag += std::norm(components[a].coeffs[i]);
    }
    umag = std::sqrt(umag);
    scale = std::max(scale, kmag * umag);
    defect = std::max(defect, std::abs(div));
  }
  return scale > 0.0 ? defect / scale : 0.0;
}

double VelocityField::mean_magnitude() const {
  double m = 0.0;
  for (const auto& c : components) m = std::max(m, std::abs(c.coeffs[0]));
  return m;
}

VelocityField& VelocityField::operator+=(const VelocityField& o) {
  for (int a = 0; a < dim(); ++a) components[a] += o.components[a];
  return *this;
}

VelocityField& VelocityField::operator-=(const VelocityField& o) {
  for (int a = 0; a < dim(); ++a) components[a] -= o.components[a];
  return *this;
}

VelocityField& VelocityField::operator*=(double s) {
  for (auto& c : components) c *= s;
  return *this;
}

void VelocityField::axpy(double s, const VelocityField& o) {
  for (int a = 0; a < dim(); ++a) {
    auto& dst = components[a].coeffs;
    const auto& src = o.components[a].coeffs;
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += s * src[i];
  }
}

VelocityField operator+(VelocityField a, const VelocityField& b) { return a += b; }
VelocityField operator-(VelocityField a, const VelocityField& b) { return a -= b; }
VelocityField operator*(double s, VelocityField a) { return a *= s; }

double inner(const VelocityField& a, const VelocityField& b) {
  double s = 0.0;
  for (int c = 0; c < a.dim(); ++c) s += inner(a.components[c], b.components[c]);
  return s;
}

double l2_norm(const VelocityField& a) { return std::sqrt(std::max(0.0, inner(a, a))); }

// --- SymTensorField --------------------------------------------------------

SymTensorField::SymTensorField(const TorusGrid& g) : grid(g), packed(packed_size(g.dim()), GridField(g)) {}

int SymTensorField::packed_index(int d, int i, int j) {
  if (i > j) std::swap(i, j);
  // row i of the upper triangle starts after sum_{r<i} (d - r) entries
  return i * d - i * (i - 1) / 2 + (j - i);
}

GridField SymTensorField::frobenius() const {
  GridField out(grid);
  const int d = dim();
  for (std::size_t p = 0; p < grid.size(); ++p) {
    double s = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        const double v = (*this)(i, j).values[p];
        s += (i == j ? 1.0 : 2.0) * v * v;
      }
    out.values[p] = std::sqrt(s);
  }
  return out;
}

GridField SymTensorField::trace() const {
  GridField out(grid);
  for (int i = 0; i < dim(); ++i)
    for (std::size_t p = 0; p < grid.size(); ++p) out.values[p] += (*this)(i, i).values[p];
  return out;
}

}  // namespace nnst
