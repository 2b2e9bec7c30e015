// Serial references against the OpenMP kernels. Pass --benchmark_filter to
// narrow; thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <numbers>
#include <vector>

#include "lagctrl/adjoint.hpp"
#include "lagctrl/control.hpp"
#include "lagctrl/gram.hpp"

using namespace lagctrl;

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) v[static_cast<std::size_t>(k)] = a + (b - a) * k / (n - 1);
  return v;
}

AdjointField field(int N) {
  AdjointField f;
  f.alpha = 0.3;
  f.N = N;
  return f;
}

void BM_xi_batch(benchmark::State& state, bool parallel) {
  const AdjointField f = field(static_cast<int>(state.range(0)));
  const auto t = linspace(0.0, f.T, 32), x = linspace(0.0, std::numbers::pi, 64);
  for (auto _ : state) {
    Table2D tab = parallel ? xi_batch(f, t, x) : xi_batch_serial(f, t, x);
    benchmark::DoNotOptimize(tab);
  }
}

void BM_gram(benchmark::State& state, bool parallel) {
  const ControlProblem p;
  const auto fields = p.fields(GasModel{}, static_cast<int>(state.range(0)));
  const Cutoff cut = p.cutoff();
  const auto chi = [&](double x) { return chi_eval(cut, x); };
  const QuadratureSpec q;
  for (auto _ : state) {
    Eigen::MatrixXd G = parallel ? gram_integrals(fields, chi, cut.lo, cut.hi, q)
                                 : gram_integrals_serial(fields, chi, cut.lo, cut.hi, q);
    benchmark::DoNotOptimize(G.data());
  }
}

void BM_forcing_fill(benchmark::State& state, bool parallel) {
  const ControlProblem p;
  const auto fields = p.fields(GasModel{}, 2048);
  const ControlForcing cf(fields, p.cutoff(), linspace(0.0, std::numbers::pi, static_cast<int>(state.range(0))),
                          {2.0, -1.0});
  std::vector<double> out(static_cast<std::size_t>(state.range(0)));
  double t = 0.0;
  for (auto _ : state) {
    parallel ? cf.fill(t, out) : cf.fill_serial(t, out);
    benchmark::DoNotOptimize(out.data());
    t = t < 1.9 ? t + 1e-3 : 0.0;
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_xi_batch, serial, false)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_xi_batch, openmp, true)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_gram, serial, false)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_gram, openmp, true)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_forcing_fill, serial, false)->Arg(1025)->Arg(4097)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_forcing_fill, openmp, true)->Arg(1025)->Arg(4097)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
