// Small numerical helpers shared by the probes: power iteration on A*A,
// least-squares slopes, seeded random fields.
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ksl/grid.hpp"

namespace ksl {

using FieldOp = std::function<Field(const Field&)>;

struct PowerOptions {
    int max_iter = 50;
    double rel_tol = 1e-6;  // Rayleigh-quotient stagnation
    std::uint64_t seed = 7;
};

struct PowerResult {
    double norm = 0.0;
    int iterations = 0;
    double residual = 0.0;  // ||A*A x - mu x|| / mu at the last iterate
    bool converged = false;
    Field vector;           // last unit iterate
};

// ||A|| from power iteration on A*A
PowerResult power_norm(const GridSpec& g, const FieldOp& A, const FieldOp& Astar,
                       const PowerOptions& opt, const Field* start = nullptr);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double width = 0.0;  // two standard errors of the slope
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

Field random_field(const GridSpec& g, std::uint64_t seed, bool real_only = true);

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(cplx s, const Field& a);
Field pointwise(const Field& a, const std::vector<double>& w);

}  // namespace ksl

namespace ksl {

// Gauss-Legendre nodes and weights on [a, b]
void gauss_legendre(int npts, double a, double b, std::vector<double>& x, std::vector<double>& w);

}  // namespace ksl
