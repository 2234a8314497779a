// Sampled real potentials and their Birman-Schwinger factorisation V = v w.
#pragma once

#include <string>
#include <vector>

#include "ksl/grid.hpp"

namespace ksl {

struct Potential {
    GridSpec grid;
    std::vector<double> V, v, w;
    std::vector<std::size_t> support;  // |V| > 1e-12 max|V|
    double decay_s = 0.0;              // claimed |V| <= C <x>^{-s}
    double decay_C = 0.0;              // fitted C
    std::string family = "custom";
    std::vector<double> xgradV;        // exact x . grad V for analytic families, empty otherwise

    static Potential from_values(const GridSpec& g, std::vector<double> values, double decay_s = 0.0,
                                 std::string family = "custom");
    double max_abs() const;
    double min() const;
    double max() const;
    bool zero() const { return support.empty(); }
    Potential scaled(double g) const;
};

Potential zero_potential(const GridSpec& g);
// -coupling * depth * exp(-|x|^2 / width^2)
Potential gaussian_well(const GridSpec& g, double depth, double width, double coupling = 1.0);
// height * exp(-|x|^2 / width^2), repulsive for height > 0
Potential gaussian_bump(const GridSpec& g, double height, double width);
// c <x>^{-s}
Potential polynomial_decay(const GridSpec& g, double c, double s);
Potential potential_from_field(const Field& f, double decay_s = 0.0);

// integral of |V|^{n/(2m)} on the grid
double clr_integral(const Potential& p, int m);

}  // namespace ksl
