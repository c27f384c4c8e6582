#include "cardwave/fem.hpp"
#include "cardwave/ionic.hpp"
#include "cardwave/mesh.hpp"
#include "cardwave/splitting.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

namespace cw = cardwave;

namespace {

cw::AssembledOperator make_op(double lx, double ly, double h) {
  const cw::Mesh mesh = cw::build_regular_sheet(lx, ly, h, 0.0);
  const cw::DiffusionField field = cw::build_diffusion_field(mesh, 0.0017, 0.0017, 0.25);
  return cw::assemble(mesh, field);
}

void BM_assemble(benchmark::State& state) {
  const double h = 0.01;
  const cw::Mesh mesh = cw::build_regular_sheet(1.0, 1.0, h, 0.0);
  const cw::DiffusionField field = cw::build_diffusion_field(mesh, 0.0017, 0.0017, 0.25);
  for (auto _ : state) {
    auto op = cw::assemble(mesh, field);
    benchmark::DoNotOptimize(op.dt_s);
  }
  state.SetItemsProcessed(state.iterations() * mesh.element_count());
}
BENCHMARK(BM_assemble)->Unit(benchmark::kMillisecond);

void BM_diffusion_substep(benchmark::State& state) {
  const auto op = make_op(1.0, 1.0, 0.01);
  std::vector<double> v(op.rows()), out(op.rows());
  for (std::int64_t i = 0; i < op.rows(); ++i) v[i] = std::sin(0.01 * i);
  for (auto _ : state) {
    cw::diffusion_substep(op, v, op.dt_s, out);
    v.swap(out);
  }
  state.SetItemsProcessed(state.iterations() * op.rows());
}
BENCHMARK(BM_diffusion_substep)->Unit(benchmark::kMicrosecond);

void BM_rates(benchmark::State& state, const char* name) {
  const auto model = cw::make_model(name);
  std::vector<double> st = model->rest_state();
  double dv = 0.0;
  double ds[64];
  for (auto _ : state) {
    model->rates(st[0], st.data() + 1, 0.0, dv, ds);
    benchmark::DoNotOptimize(dv);
  }
}
BENCHMARK_CAPTURE(BM_rates, ohara_epi, "ohara2011-epi");
BENCHMARK_CAPTURE(BM_rates, maccannell, "maccannell2007");
BENCHMARK_CAPTURE(BM_rates, aliev_panfilov, "aliev-panfilov");

void BM_strang_step(benchmark::State& state) {
  const cw::Mesh mesh = cw::build_regular_sheet(0.5, 0.5, 0.01, 0.0);
  const cw::DiffusionField field = cw::build_diffusion_field(mesh, 0.0017, 0.0017, 0.25);
  const cw::AssembledOperator op = cw::assemble(mesh, field);
  std::vector<std::shared_ptr<const cw::CellModel>> models = {cw::make_model("ohara2011-epi")};
  cw::SimulationSetup setup;
  setup.op = &op;
  setup.models = models;
  cw::SchemeConfig cfg;
  cfg.scheme = cw::Scheme::DAETI;
  cfg.dt_ms = 0.1;
  cfg.t_end_ms = 1.0;
  cw::StrangIntegrator integrator(setup, cfg);
  cw::NodeStateArray st = cw::make_initial_state(mesh, models, {0});
  std::int64_t step = 0;
  for (auto _ : state) {
    integrator.advance(st, 0.1 * step, 0, 1000000);
    ++step;
  }
  state.SetItemsProcessed(state.iterations() * mesh.node_count());
}
BENCHMARK(BM_strang_step)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
