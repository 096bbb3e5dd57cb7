#include "nnst/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "nnst/error.hpp"

namespace nnst {

namespace {

struct PlanCache {
  std::mutex mutex;
  std::map<std::tuple<int, int, int>, fftw_plan> plans;

  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }

  // Plans are created once per (d, n, sign) with scratch buffers and then
  // executed through the new-array interface, which FFTW documents as
  // thread-safe. FFTW_UNALIGNED lets us pass std::vector storage.
  fftw_plan get(int d, int n, int sign) {
    std::lock_guard lock(mutex);
    auto key = std::make_tuple(d, n, sign);
    if (auto it = plans.find(key); it != plans.end()) return it->second;
    int dims[3] = {n, n, n};
    std::size_t size = 1;
    for (int a = 0; a < d; ++a) size *= static_cast<std::size_t>(n);
    std::vector<Complex> a(size), b(size);
    fftw_plan plan = fftw_plan_dft(d, dims, reinterpret_cast<fftw_complex*>(a.data()),
                                   reinterpret_cast<fftw_complex*>(b.data()), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans.emplace(key, plan);
    return plan;
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void execute(int d, int n, int sign, std::span<const Complex> in, std::span<Complex> out) {
  fftw_plan plan = cache().get(d, n, sign);
  // FFTW takes a non-const input pointer but does not modify it for out-of-place plans.
  auto* src = const_cast<fftw_complex*>(reinterpret_cast<const fftw_complex*>(in.data()));
  fftw_execute_dft(plan, src, reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace

namespace fft {

void forward(int d, int n, std::span<const Complex> in, std::span<Complex> out) {
  execute(d, n, FFTW_FORWARD, in, out);
}

void backward(int d, int n, std::span<const Complex> in, std::span<Complex> out) {
  execute(d, n, FFTW_BACKWARD, in, out);
}

GridField to_grid_unchecked(const SpectralField& F) {
  const auto& g = F.grid;
  std::vector<Complex> buf(g.size());
  backward(g.dim(), g.n(), F.coeffs, buf);
  GridField out(g);
  for (std::size_t i = 0; i < g.size(); ++i) out.values[i] = buf[i].real();
  return out;
}

}  // namespace fft

SpectralField to_spectral(const GridField& f) {
  const auto& g = f.grid;
  std::vector<Complex> buf(f.values.begin(), f.values.end());
  SpectralField out(g);
  fft::forward(g.dim(), g.n(), buf, out.coeffs);
  const double scale = 1.0 / static_cast<double>(g.size());
  for (auto& c : out.coeffs) c *= scale;
  return out;
}

GridField to_grid(const SpectralField& F) {
  if (double defect = F.hermitian_defect(); defect > 1e-10)
    fail(ErrorKind::NonHermitian, "coefficients are not Hermitian (relative defect " + std::to_string(defect) + ")");
  return fft::to_grid_unchecked(F);
}

}  // namespace nnst
