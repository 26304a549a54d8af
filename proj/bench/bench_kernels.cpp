#include <benchmark/benchmark.h>

#include <cmath>

#include "capsym/geometry.hpp"
#include "capsym/kernels.hpp"

using namespace capsym;

namespace {

struct Fixture {
  MaskedGrid g;
  Field u;
  DriftSamples drift;
  SolverStencil stencil;
  std::vector<double> x, grad;

  explicit Fixture(double h) : g(build_cap_grid(0.4, 2, 1.0, h)) {
    u = sample_field(g, [](const double* p) { return std::cos(1.3 * p[0]) * std::exp(-p[1] * p[1]); });
    drift = DriftSamples::from_gauge(g, GaugeDescriptor::capillary(0.4, 2));
    stencil = SolverStencil::build(g, drift);
    x.resize(stencil.cell.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = u[stencil.cell[i]];
    grad.assign(x.size(), 0.0);
  }
};

Fixture& fixture(int inv_h) {
  static Fixture f64(1.0 / 64), f256(1.0 / 256);
  return inv_h == 64 ? f64 : f256;
}

void BM_GradientEnergy(benchmark::State& st) {
  Fixture& f = fixture(static_cast<int>(st.range(0)));
  const Backend b = st.range(1) ? Backend::Parallel : Backend::Serial;
  for (auto _ : st) benchmark::DoNotOptimize(gradient_energy(f.g, f.u, f.drift, 2.0, b));
}

void BM_StencilEnergy(benchmark::State& st) {
  Fixture& f = fixture(static_cast<int>(st.range(0)));
  const Backend b = st.range(1) ? Backend::Parallel : Backend::Serial;
  for (auto _ : st) benchmark::DoNotOptimize(stencil_energy(f.stencil, f.x.data(), f.grad.data(), 2.0, 1e-3, b));
}

}  // namespace

BENCHMARK(BM_GradientEnergy)->ArgsProduct({{64, 256}, {0, 1}})->ArgNames({"inv_h", "parallel"});
BENCHMARK(BM_StencilEnergy)->ArgsProduct({{64, 256}, {0, 1}})->ArgNames({"inv_h", "parallel"});
BENCHMARK_MAIN();
