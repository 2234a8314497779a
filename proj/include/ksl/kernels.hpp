// Hot loops in two flavours: OpenMP (ksl::par) and a plain serial reference
// (ksl::serial). Tests check they agree; bench_kernels times them.
#pragma once

#include <complex>
#include <span>

#include "ksl/grid.hpp"

namespace ksl {

namespace par {
void dft(std::span<cplx> data, int n, int N, int sign);
void scale(std::span<cplx> a, double s);
void mul(std::span<cplx> a, std::span<const double> w);
void mul(std::span<cplx> a, std::span<const cplx> w);
void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y);
cplx dot(std::span<const cplx> a, std::span<const cplx> b);
double sum_abs_pow(std::span<const cplx> a, double p);
double max_abs(std::span<const cplx> a);
}  // namespace par

namespace serial {
void dft(std::span<cplx> data, int n, int N, int sign);
void scale(std::span<cplx> a, double s);
void mul(std::span<cplx> a, std::span<const double> w);
void mul(std::span<cplx> a, std::span<const cplx> w);
void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y);
cplx dot(std::span<const cplx> a, std::span<const cplx> b);
double sum_abs_pow(std::span<const cplx> a, double p);
double max_abs(std::span<const cplx> a);
}  // namespace serial

// thread count used for kernels outside a parallel region
void set_threads(int k);
int threads();

}  // namespace ksl
