#pragma once

#include "optomech/core.hpp"

#include <complex>
#include <string>
#include <vector>

// Nonstationary measurement: the oscillator is prepared in the feedback-cooled
// steady state, the loop is switched off at t = 0, and the photocurrent is
// filtered with F(t) = theta(t) exp(-t / 2 T_m).
//
// Signal and noise are both reported in units of the photocurrent calibration
// kappa = 8 G beta eta / sqrt(gamma_c), with kappa^2 = 4 eta^2 zeta gamma_m in
// working units, so every ratio below is kappa-free.

namespace optomech::nonstat {

/// f(t) = f0 exp(-(t - t1)^2 / 2 sigma^2) cos(omega_f t).
struct ForcePulse {
    double f0 = 1;
    double sigma = 1;
    double t1 = 0;
    double omega_f = 1;

    double operator()(double t) const;
    /// Full-line transform int dt f(t) exp(-p t) for complex p (Gaussian closed form).
    std::complex<double> laplace_full_line(std::complex<double> p) const;
    /// |f(omega)| on the real axis.
    double transform_abs(double omega) const;
    void validate() const;
    std::vector<std::string> warnings(double gamma_m, double t_meas) const;
};

struct MeasurementWindow {
    double t_meas = 1;  // T_m in 1/omega_m

    double filter(double t) const;
    /// int F^2 dt, equal to T_m for the exponential filter.
    double norm() const { return t_meas; }
    void validate() const;
};

/// The feedback-off susceptibility at the shifted frequency omega - i/(2 T_m).
std::complex<double> shifted_chi(const SchemeParams& s, const MeasurementWindow& win, double omega);

/// Filtered force int_0^inf f(t) exp(-(1/2T_m + i omega) t) dt by adaptive quadrature.
std::complex<double> filtered_force(const ForcePulse& f, const MeasurementWindow& win, double omega,
                                    double rel_tol = 1e-6);

/// S(omega) / kappa for a mirror evolving with the bare susceptibility. The
/// force acts from t = 0 only; far off resonance the truncated pulse tail
/// dominates for long windows.
double signal_spectrum(const SchemeParams& s, const ForcePulse& f, const MeasurementWindow& win,
                       double omega);

struct NoiseTerms {
    double dynamic = 0;  // position-correlation part of N^2 / kappa^2
    double shot = 0;     // eta T_m / kappa^2
    double total() const { return dynamic + shot; }
    /// Position-spectrum rescaling N^2 / (kappa^2 T_m).
    double rescaled(double t_meas) const { return total() / t_meas; }
};

/// N^2(omega) / kappa^2 for the cooled initial state of `init` (moments from
/// the classical closed forms) followed by feedback-off evolution.
NoiseTerms nonstationary_noise(const SchemeParams& init, const MeasurementWindow& win, double omega);

double nonstationary_snr(const SchemeParams& init, const ForcePulse& f, const MeasurementWindow& win,
                         double omega);

struct CyclicResult {
    double value = 0;        // average on the requested grid
    double refined = 0;      // average on the doubled grid
    double rel_change = 0;
    std::vector<std::string> warnings;
};

/// Arrival-time averaged SNR, (1 / (T_m + T_cool)) int_0^T_m R(omega, t1) dt1,
/// by the trapezoidal rule on n_grid intervals with a check on 2 n_grid.
/// The t1 field of the force is ignored.
CyclicResult cyclic_avg_snr(const SchemeParams& init, const ForcePulse& f, const MeasurementWindow& win,
                            double t_cool, double omega, std::size_t n_grid = 64);

}  // namespace optomech::nonstat
