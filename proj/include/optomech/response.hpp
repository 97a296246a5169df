#pragma once

#include "optomech/core.hpp"

#include <complex>

namespace optomech::response {

/// chi(t) together with its first two time derivatives, all in closed form.
struct ChiDerivatives {
    double value = 0;
    double first = 0;
    double second = 0;
};

/// Response functions at one instant. For stochastic cooling k_q and k_p are
/// the position and momentum kernels; for cold damping k_q is
/// K(t) = 1 - int_0^t chi and k_p = d chi/dt (momentum follows from P = dQ/dt).
struct KernelSet {
    double chi = 0;
    double k_q = 0;
    double k_p = 0;
};

/// Damping rate gamma_m (1 + g) of the scheme (gain ignored for Scheme::None).
double damping_rate(const SchemeParams& s);
/// Restoring constant of the position ODE; stochastic cooling renormalises it
/// to 1 + g gamma_m^2.
double stiffness(const SchemeParams& s);
/// Squared oscillation frequency of chi(t) as printed for each scheme; negative
/// in the overdamped regime.
double radicand(const SchemeParams& s);

double chi_time(const SchemeParams& s, double t);
ChiDerivatives chi_derivatives(const SchemeParams& s, double t);
KernelSet kernels(const SchemeParams& s, double t);

std::complex<double> chi_freq(const SchemeParams& s, std::complex<double> omega);
inline std::complex<double> chi_freq(const SchemeParams& s, double omega) {
    return chi_freq(s, std::complex<double>(omega, 0.0));
}
double chi_freq_abs2(const SchemeParams& s, double omega);

}  // namespace optomech::response
