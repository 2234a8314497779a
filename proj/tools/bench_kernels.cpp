// OpenMP kernels against the serial reference on n = 3 and n = 5 grids.
#include <benchmark/benchmark.h>

#include "ksl/kernels.hpp"
#include "ksl/linalg.hpp"

using namespace ksl;

namespace {

GridSpec grid_for(const benchmark::State& st) { return {static_cast<int>(st.range(0)), static_cast<int>(st.range(1)), 4.0}; }

template <bool Par>
void BM_dft(benchmark::State& st) {
    const GridSpec g = grid_for(st);
    Field f = random_field(g, 1, false);
    for (auto _ : st) {
        if constexpr (Par)
            par::dft(f.v, g.n, g.N, -1);
        else
            serial::dft(f.v, g.n, g.N, -1);
        benchmark::DoNotOptimize(f.v.data());
    }
    st.SetItemsProcessed(st.iterations() * static_cast<long>(g.size()));
}

template <bool Par>
void BM_axpy(benchmark::State& st) {
    const GridSpec g = grid_for(st);
    Field x = random_field(g, 1, false), y = random_field(g, 2, false);
    for (auto _ : st) {
        if constexpr (Par)
            par::axpy(cplx(0.5, 0.1), x.v, y.v);
        else
            serial::axpy(cplx(0.5, 0.1), x.v, y.v);
        benchmark::DoNotOptimize(y.v.data());
    }
    st.SetItemsProcessed(st.iterations() * static_cast<long>(g.size()));
}

template <bool Par>
void BM_dot(benchmark::State& st) {
    const GridSpec g = grid_for(st);
    Field x = random_field(g, 1, false), y = random_field(g, 2, false);
    for (auto _ : st) {
        cplx d = Par ? par::dot(x.v, y.v) : serial::dot(x.v, y.v);
        benchmark::DoNotOptimize(d);
    }
    st.SetItemsProcessed(st.iterations() * static_cast<long>(g.size()));
}

template <bool Par>
void BM_mul(benchmark::State& st) {
    const GridSpec g = grid_for(st);
    Field x = random_field(g, 1, false);
    std::vector<double> w(g.size(), 1.0000001);
    for (auto _ : st) {
        if constexpr (Par)
            par::mul(x.v, w);
        else
            serial::mul(x.v, w);
        benchmark::DoNotOptimize(x.v.data());
    }
    st.SetItemsProcessed(st.iterations() * static_cast<long>(g.size()));
}

void sizes(benchmark::internal::Benchmark* b) {
    b->Args({3, 32})->Args({3, 64})->Args({5, 12})->Args({5, 16});
}

}  // namespace

BENCHMARK(BM_dft<true>)->Name("dft/par")->Apply(sizes);
BENCHMARK(BM_dft<false>)->Name("dft/serial")->Apply(sizes);
BENCHMARK(BM_axpy<true>)->Name("axpy/par")->Apply(sizes);
BENCHMARK(BM_axpy<false>)->Name("axpy/serial")->Apply(sizes);
BENCHMARK(BM_dot<true>)->Name("dot/par")->Apply(sizes);
BENCHMARK(BM_dot<false>)->Name("dot/serial")->Apply(sizes);
BENCHMARK(BM_mul<true>)->Name("mul/par")->Apply(sizes);
BENCHMARK(BM_mul<false>)->Name("mul/serial")->Apply(sizes);

BENCHMARK_MAIN();
