#include <benchmark/benchmark.h>

#include "impzone/config.hpp"
#include "impzone/sim.hpp"

using namespace impzone;

namespace {

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

ImpulsiveSystem example() {
  Matrix A(2, 2);
  A << -1.0, 1.2, 0.0, 0.2;
  Matrix B(2, 1);
  B << 3.0, -2.0;
  Vector ulo(1), uhi(1);
  ulo << -0.2;
  uhi << 0.2;
  return ImpulsiveSystem(A, B, 1.0, Polytope::box(v2(0.5, 0.0), v2(4.5, 4.0)), Polytope::box(ulo, uhi));
}

ProblemConfig example_config() {
  const ImpulsiveSystem sys = example();
  ProblemConfig c;
  c.A = sys.A;
  c.B = sys.B;
  c.state_set = SetSpec::box(v2(0.5, 0.0), v2(4.5, 4.0));
  c.input_set = SetSpec::box(Vector::Constant(1, -0.2), Vector::Constant(1, 0.2));
  c.target = SetSpec::box(v2(2.5, 1.5), v2(4.0, 3.5));
  c.Q = Matrix::Identity(2, 2);
  c.R = 10.0 * Matrix::Identity(1, 1);
  c.Q_O = 10.0 * Matrix::Identity(2, 2);
  return c;
}

const SetsResult& sets() {
  static const SetsResult s = compute_sets(example_config());
  return s;
}

void BM_Membership(benchmark::State& state) {
  const ImpulsiveSystem sys = example();
  const SpectrahedronSet S(modal_decompose(sys), sys.state_set, sys.period);
  const Vector x = v2(3.0, 0.15);
  for (auto _ : state) benchmark::DoNotOptimize(is_admissible(S, x));
}
BENCHMARK(BM_Membership)->Unit(benchmark::kMillisecond);

void BM_InnerPolytope(benchmark::State& state) {
  const ImpulsiveSystem sys = example();
  const SpectrahedronSet S(modal_decompose(sys), sys.state_set, sys.period);
  for (auto _ : state) benchmark::DoNotOptimize(inner_polytope(S, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_InnerPolytope)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_ValidateTarget(benchmark::State& state) {
  const ImpulsiveSystem sys = example();
  const Polytope target = Polytope::box(v2(2.5, 1.5), v2(4.0, 3.5));
  for (auto _ : state) benchmark::DoNotOptimize(validate_target(target, sys));
}
BENCHMARK(BM_ValidateTarget)->Unit(benchmark::kMillisecond);

void BM_ControlStep(benchmark::State& state) {
  const MpcVariant v = state.range(0) ? MpcVariant::SetBased : MpcVariant::ArtificialVariables;
  const MpcConfig cfg = make_mpc_config(example_config(), sets(), v);
  const Vector x = v2(4.45, 1.75);
  for (auto _ : state) benchmark::DoNotOptimize(control_step(x, cfg));
  state.SetLabel(std::string(to_string(v)));
}
BENCHMARK(BM_ControlStep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
  const SetsResult& s = sets();
  for (auto _ : state) {
    HoldController hold(Vector::Constant(1, 0.19));
    benchmark::DoNotOptimize(run_closed_loop(s.system, s.modal, hold, v2(3.0, 0.15), 10, 101));
  }
}
BENCHMARK(BM_Simulate)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
