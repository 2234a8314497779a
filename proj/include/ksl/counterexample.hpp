// Compactly supported potentials with an eigenvalue embedded at 1, built
// from the Bessel kernel of (1 - Delta)^{-1} for even m.
#pragma once

#include <string>

#include "ksl/grid.hpp"
#include "ksl/potential.hpp"

namespace ksl {

// kernel of (1 - Delta)^{-1} in odd dimension n
double bessel_kernel(int n, double r);

struct EmbeddedOptions {
    double cap = 0.3;   // phi(0) = G(cap)
    int bump = 0;       // exponent of the cap profile (1 - r^2/delta^2)^bump; 0 = 2m + 4
};

struct EmbeddedResidual {
    double residual = 0.0;  // ||H phi - phi|| / ||phi||
    double leak = 0.0;      // max |V| outside B(0, delta + 2h) over max |V|
    double min_phi = 0.0;
    double max_V = 0.0;
};

struct EmbeddedPair {
    Potential V;
    Field phi;
    double delta = 1.0;
    int m = 2;
    int n = 3;
    EmbeddedOptions opt;
    EmbeddedResidual check;
};

EmbeddedPair build_embedded_pair(const GridSpec& g, int m, double delta, const EmbeddedOptions& opt = {});
EmbeddedResidual verify_embedded(const EmbeddedPair& pair);
// V.bin, phi.bin and manifest.json under dir
void save_embedded(const EmbeddedPair& pair, const std::string& dir);

}  // namespace ksl
