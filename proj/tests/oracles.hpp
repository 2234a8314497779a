// Generated by tools/make_oracles.py; do not edit by hand.
#pragma once

namespace oracle {

// (-Delta + 1)^{-1} kernel, n = 3, r = 1
inline constexpr double kLaplace3 = 0.02927491576215958;
// (-Delta + 1)^{-1} kernel, n = 5, r = 2, recursion
inline constexpr double kLaplace5 = 0.0006427655196611546;
// (Delta^2 + 1)^{-1} kernel, n = 5, r = 0.5
inline constexpr double kPolyharm5_0 = 0.009744243493899912;
// (Delta^2 + 1)^{-1} kernel, n = 5, r = 1
inline constexpr double kPolyharm5_1 = 0.003568431152321989;
// (Delta^2 + 1)^{-1} kernel, n = 5, r = 2
inline constexpr double kPolyharm5_2 = 0.0008329530785742948;
// (Delta^2 + 1)^{-1} kernel, n = 5, r = 3
inline constexpr double kPolyharm5_3 = 0.000211980774182624;
// Riesz constant, m = 1, n = 3
inline constexpr double kRiesz_m1_n3 = 0.07957747154594767;
// Riesz constant, m = 1, n = 5
inline constexpr double kRiesz_m1_n5 = 0.012665147955292222;
// Riesz constant, m = 2, n = 5
inline constexpr double kRiesz_m2_n5 = 0.006332573977646111;
// |D|^{-1} exp(-|x|^2), n = 3, r = 0.5
inline constexpr double kRieszGauss_0 = 0.47892517290104347;
// |D|^{-1} exp(-|x|^2), n = 3, r = 1.0
inline constexpr double kRieszGauss_1 = 0.30357885292069686;
// |D|^{-1} exp(-|x|^2), n = 3, r = 2.0
inline constexpr double kRieszGauss_2 = 0.08500655426651656;
// || |x|^{-1} exp(-|x|^2) ||_2, n = 3
inline constexpr double kWeightedGauss = 2.806208291068432;
// || exp(-|x|^2/2) ||_3, n = 3
inline constexpr double kGaussL3 = 1.4472025091165353;
// (1 - Delta)^{-1} kernel, n = 3, r = 0.5
inline constexpr double kBessel3_0 = 0.09653235263005391;
// (1 - Delta)^{-1} kernel, n = 3, r = 1.0
inline constexpr double kBessel3_1 = 0.02927491576215958;
// (1 - Delta)^{-1} kernel, n = 3, r = 2.0
inline constexpr double kBessel3_2 = 0.005384819825462158;
// (1 - Delta)^{-1} kernel, n = 5, r = 0.5
inline constexpr double kBessel5_0 = 0.09218160653617802;
// (1 - Delta)^{-1} kernel, n = 5, r = 1.0
inline constexpr double kBessel5_1 = 0.009318495104293075;
// (1 - Delta)^{-1} kernel, n = 5, r = 2.0
inline constexpr double kBessel5_2 = 0.0006427655196611546;
// Re <R0^+(1) f, f>, Gaussian width 1.5, n = 3, m = 1
inline constexpr double kBoundaryGaussRe = -24.080781796338194;
// Im <R0^+(1) f, f>, same data
inline constexpr double kBoundaryGaussIm = 23.698164571644863;
// lowest eigenvalue, -Delta - 10 exp(-|x|^2/2.25), n = 3, N = 8, L = 4
inline constexpr double kWellGround = -4.74311395528728;
// second eigenvalue of the same matrix
inline constexpr double kWellSecond = -1.4938055639823975;

}  // namespace oracle
