#include "ksl/kernels.hpp"

#include <fftw3.h>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace ksl {

namespace {

std::mutex plan_mutex;
int g_threads = 0;

fftw_plan get_plan(int n, int N, int sign, int nthreads) {
    static std::map<std::tuple<int, int, int, int>, fftw_plan> cache;
    static bool ready = false;
    std::lock_guard<std::mutex> lock(plan_mutex);
    if (!ready) {
        fftw_init_threads();
        ready = true;
    }
    auto key = std::make_tuple(n, N, sign, nthreads);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    std::vector<int> dims(n, N);
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) total *= N;
    fftw_plan_with_nthreads(nthreads);
    // FFTW_ESTIMATE leaves the buffer untouched, so a scratch array is enough
    fftw_complex* buf = fftw_alloc_complex(total);
    fftw_plan p = fftw_plan_dft(n, dims.data(), buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    if (!p) throw std::runtime_error("fftw plan creation failed");
    cache.emplace(key, p);
    return p;
}

void run_dft(std::span<cplx> data, int n, int N, int sign, int nthreads) {
    fftw_plan p = get_plan(n, N, sign > 0 ? FFTW_BACKWARD : FFTW_FORWARD, nthreads);
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(p, ptr, ptr);
}

int active_threads() { return omp_in_parallel() ? 1 : threads(); }

}  // namespace

void set_threads(int k) {
    g_threads = std::max(1, k);
    omp_set_num_threads(g_threads);
}

int threads() { return g_threads > 0 ? g_threads : omp_get_max_threads(); }

namespace par {

void dft(std::span<cplx> data, int n, int N, int sign) { run_dft(data, n, N, sign, active_threads()); }

void scale(std::span<cplx> a, double s) {
    const std::ptrdiff_t sz = a.size();
#pragma omp parallel for schedule(static) if (sz > 4096)
    for (std::ptrdiff_t i = 0; i < sz; ++i) a[i] *= s;
}

void mul(std::span<cplx> a, std::span<const double> w) {
    const std::ptrdiff_t sz = a.size();
#pragma omp parallel for schedule(static) if (sz > 4096)
    for (std::ptrdiff_t i = 0; i < sz; ++i) a[i] *= w[i];
}

void mul(std::span<cplx> a, std::span<const cplx> w) {
    const std::ptrdiff_t sz = a.size();
#pragma omp parallel for schedule(static) if (sz > 4096)
    for (std::ptrdiff_t i = 0; i < sz; ++i) a[i] *= w[i];
}

void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
    const std::ptrdiff_t sz = x.size();
#pragma omp parallel for schedule(static) if (sz > 4096)
    for (std::ptrdiff_t i = 0; i < sz; ++i) y[i] += alpha * x[i];
}

cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
    double re = 0.0, im = 0.0;
    const std::ptrdiff_t sz = a.size();
#pragma omp parallel for schedule(static) reduction(+ : re, im) if (sz > 4096)
    for (std::ptrdiff_t i = 0; i < sz; ++i) {
        cplx t = std::conj(a[i]) * b[i];
        re += t.real();
        im += t.imag();
    }
    return {re, im};
}

double sum_abs_pow(std::span<const cplx> a, double p) {
    double s = 0.0;
    const std::ptrdiff_t sz = a.size();
    if (p == 2.0) {
#pragma omp parallel for schedule(static) reduction(+ : s) if (sz > 4096)
        for (std::ptrdiff_t i = 0; i < sz; ++i) s += std::norm(a[i]);
    } else {
#pragma omp parallel for schedule(static) reduction(+ : s) if (sz > 4096)
        for (std::ptrdiff_t i = 0; i < sz; ++i) s += std::pow(std::abs(a[i]), p);
    }
    return s;
}

double max_abs(std::span<const cplx> a) {
    double m = 0.0;
    const std::ptrdiff_t sz = a.size();
#pragma omp parallel for schedule(static) reduction(max : m) if (sz > 4096)
    for (std::ptrdiff_t i = 0; i < sz; ++i) m = std::max(m, std::abs(a[i]));
    return m;
}

}  // namespace par

namespace serial {

void dft(std::span<cplx> data, int n, int N, int sign) { run_dft(data, n, N, sign, 1); }

void scale(std::span<cplx> a, double s) {
    for (auto& x : a) x *= s;
}

void mul(std::span<cplx> a, std::span<const double> w) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] *= w[i];
}

void mul(std::span<cplx> a, std::span<const cplx> w) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] *= w[i];
}

void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

double sum_abs_pow(std::span<const cplx> a, double p) {
    double s = 0.0;
    for (const auto& x : a) s += p == 2.0 ? std::norm(x) : std::pow(std::abs(x), p);
    return s;
}

double max_abs(std::span<const cplx> a) {
    double m = 0.0;
    for (const auto& x : a) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace serial

}  // namespace ksl
