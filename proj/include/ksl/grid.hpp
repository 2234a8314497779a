// Periodic spectral grid on [-L, L]^n, fields, unitary transforms and norms.
#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace ksl {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;

struct GridSpec {
    int n = 3;
    int N = 16;
    double L = 8.0;

    double h() const { return 2.0 * L / N; }
    double dxi() const { return pi / L; }
    std::size_t size() const;
    // cell volumes on the physical and frequency side
    double cell() const;
    double fcell() const;
    // largest |xi| on the lattice (corner k = -N/2 in every axis)
    double xi_max() const;
    double nyquist() const { return pi * N / (2.0 * L); }
    // throws std::invalid_argument; mem_cap in bytes, 0 = unchecked
    void validate(std::size_t mem_cap = 0) const;
    bool operator==(const GridSpec&) const = default;
};

enum class Rep : int { physical = 0, frequency = 1 };

struct Field {
    GridSpec grid;
    Rep rep = Rep::physical;
    std::vector<cplx> v;

    Field() = default;
    explicit Field(const GridSpec& g, Rep r = Rep::physical);
    std::size_t size() const { return v.size(); }
};

// lattice helpers
int signed_index(int idx, int N);
void multi_index(const GridSpec& g, std::size_t lin, int* out);
std::size_t linear_index(const GridSpec& g, const int* idx);
double coord(const GridSpec& g, int j);

// cached per-grid tables (thread safe, shared across calls)
const std::vector<double>& radius_table(const GridSpec& g);
const std::vector<double>& xi2_table(const GridSpec& g);
std::size_t origin_index(const GridSpec& g);

// radius of the ball whose volume equals one unit cube
double volume_ball_radius(int n);
double sphere_area(int n);  // |S^{n-1}|

Field forward_transform(const Field& f);
Field inverse_transform(const Field& f);

// sigma is sampled on the lattice; a non-finite value at xi = 0 is replaced by 0
Field apply_multiplier(const Field& f, const std::function<cplx(std::span<const double>)>& sigma);
Field apply_radial_multiplier(const Field& f, const std::function<cplx(double)>& sigma);
Field apply_symbol(const Field& f, const std::vector<cplx>& symbol);
Field apply_symbol(const Field& f, const std::vector<double>& symbol);
std::vector<cplx> radial_symbol(const GridSpec& g, const std::function<cplx(double)>& sigma);
std::vector<double> radial_symbol_real(const GridSpec& g, const std::function<double(double)>& sigma);

double norm_lp(const Field& f, double p);
double norm_l2(const Field& f);  // either representation
double weighted_l2_norm(const Field& f, const std::vector<double>& weight);
cplx inner(const Field& f, const Field& g);  // <f, g> = integral conj(f) g

// weights with the zero-cell rule at the origin
std::vector<double> power_weight(const GridSpec& g, double a);      // |x|^a
std::vector<double> bracket_weight(const GridSpec& g, double s);    // <x>^s
std::vector<double> sample_weight(const GridSpec& g,
                                  const std::function<double(std::span<const double>)>& w);

Field sample(const GridSpec& g, const std::function<cplx(std::span<const double>)>& fn);
Field sample_radial(const GridSpec& g, const std::function<cplx(double)>& fn);
Field plane_wave(const GridSpec& g, std::span<const int> k);
Field shift_cells(const Field& f, int axis, int cells);

// max |f| over boundary faces relative to max |f|
double boundary_ratio(const Field& f);

void write_field(const std::string& path, const Field& f);
Field read_field(const std::string& path);

}  // namespace ksl
