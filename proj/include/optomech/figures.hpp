#pragma once

#include "optomech/spectra.hpp"

#include <string>
#include <vector>

namespace optomech::figures {

/// One curve of a figure: a series plus the name of its abscissa column.
struct Curve {
    std::string name;      // file stem, e.g. "fig2_g1e+03"
    std::string abscissa;  // "zeta", "omega" or "gamma_Tm"
    spectra::SpectrumSeries series;
};

/// Curves of figure `id` (2..10) with the caption parameters built in.
///  2  stochastic-cooling energy vs zeta, g1 in {10, 1e3, 1e5, 1e7}, Q = 1e7
///  3  stochastic-cooling energy vs zeta, Q in {1e3, 1e5, 1e7}, g1 = 1e7
///  4  <Q^2> vs zeta, g1 in {1e7, 1e9}, Q = 1e4
///  5  cold-damping energy vs zeta and stationary SNR vs omega
///  6  nonstationary noise for gamma T_m in {1e-4 .. 1e-1}
///  7  nonstationary noise for g2 in {1 .. 1e3} at gamma T_m = 1e-3 and 1e-1
///  8  nonstationary SNR spectra (cooled, uncooled, stationary)
///  9  SNR at resonance vs gamma T_m, cooled and uncooled
/// 10  arrival-time averaged SNR with and without cyclic cooling
std::vector<Curve> figure(int id);

/// Log-spaced zeta grid of 200 points covering the given minima by at least
/// two decades on each side.
std::vector<double> zeta_grid(double min_opt, double max_opt);

}  // namespace optomech::figures
