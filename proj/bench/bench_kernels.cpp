// Serial reference vs OpenMP for each pointwise kernel.
// Range argument is the grid side n of a 2D field (n*n nodes).

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "nnst/kernels.hpp"

namespace k = nnst::kernels;

namespace {

struct Workload {
  int n;
  std::vector<double> rho, nu, out;
  std::vector<std::vector<double>> a, b, s;
  std::vector<std::vector<double>> vel;
  std::vector<std::span<const double>> a_view, b_view, vel_view;
  std::vector<std::span<double>> s_view;

  explicit Workload(int side) : n(side) {
    const std::size_t m = static_cast<std::size_t>(side) * side;
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    auto fill = [&](std::size_t len, double shift) {
      std::vector<double> v(len);
      for (double& x : v) x = shift + unit(rng);
      return v;
    };
    rho = fill(m, 2.0);
    nu = fill(m, 2.0);
    out.assign(m, 0.0);
    for (int c = 0; c < 3; ++c) {
      a.push_back(fill(m, 0.0));
      b.push_back(fill(m, 0.0));
      s.emplace_back(m, 0.0);
    }
    for (int c = 0; c < 2; ++c) vel.push_back(fill(m, 0.0));
    for (int c = 0; c < 3; ++c) {
      a_view.emplace_back(a[c]);
      b_view.emplace_back(b[c]);
      s_view.emplace_back(s[c]);
    }
    for (auto& v : vel) vel_view.emplace_back(v);
  }

  k::SemiLagrangianArgs sl_args() const { return {2, n, 0.05, rho, vel_view}; }
};

constexpr k::PowerLaw kLaw{2, 3.0, 0.0};

template <bool Parallel>
void BM_abs_power_sum(benchmark::State& st) {
  Workload w(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    const double v = Parallel ? k::abs_power_sum(w.rho, 1.5) : k::serial::abs_power_sum(w.rho, 1.5);
    benchmark::DoNotOptimize(v);
  }
}

template <bool Parallel>
void BM_viscosity(benchmark::State& st) {
  Workload w(static_cast<int>(st.range(0)));
  const nnst::ViscosityLaw law = nnst::ViscosityLaw::bounded_power(1.0, 1.5, 4.0);
  for (auto _ : st) {
    if (Parallel)
      k::viscosity(law, w.rho, w.out);
    else
      k::serial::viscosity(law, w.rho, w.out);
    benchmark::ClobberMemory();
  }
}

template <bool Parallel>
void BM_power_stress(benchmark::State& st) {
  Workload w(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    const double v = Parallel ? k::power_stress(kLaw, w.nu, w.a_view, w.s_view)
                              : k::serial::power_stress(kLaw, w.nu, w.a_view, w.s_view);
    benchmark::DoNotOptimize(v);
  }
}

template <bool Parallel>
void BM_monotonicity_gap(benchmark::State& st) {
  Workload w(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    const auto v = Parallel ? k::monotonicity_gap(kLaw, w.nu, w.a_view, w.b_view)
                            : k::serial::monotonicity_gap(kLaw, w.nu, w.a_view, w.b_view);
    benchmark::DoNotOptimize(v);
  }
}

template <bool Parallel>
void BM_semi_lagrangian(benchmark::State& st) {
  Workload w(static_cast<int>(st.range(0)));
  const auto args = w.sl_args();
  for (auto _ : st) {
    if (Parallel)
      k::semi_lagrangian(args, w.out);
    else
      k::serial::semi_lagrangian(args, w.out);
    benchmark::ClobberMemory();
  }
}

}  // namespace

#define NNST_BENCH_PAIR(fn)                                          \
  BENCHMARK(fn<false>)->Name(#fn "/serial")->RangeMultiplier(4)->Range(64, 1024); \
  BENCHMARK(fn<true>)->Name(#fn "/openmp")->RangeMultiplier(4)->Range(64, 1024)

NNST_BENCH_PAIR(BM_abs_power_sum);
NNST_BENCH_PAIR(BM_viscosity);
NNST_BENCH_PAIR(BM_power_stress);
NNST_BENCH_PAIR(BM_monotonicity_gap);
NNST_BENCH_PAIR(BM_semi_lagrangian);

BENCHMARK_MAIN();
