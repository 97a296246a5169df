#pragma once

#include "optomech/core.hpp"

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace optomech::spectra {

/// How the Brownian term enters a spectrum: classical (theta) or the full
/// (omega/2) coth(omega/2theta).
enum class ThermalSpectrum { Classical, Coth };

// Energy and Variance label curves tabulated against zeta rather than omega.
enum class SeriesKind { PositionNoise, DetectedNoise, Signal, SNR, Energy, Variance };

std::string_view to_string(SeriesKind k);

/// Values on a frequency grid (units of omega_m) plus a tag naming the
/// formula that produced them.
struct SpectrumSeries {
    std::vector<double> omegas;
    std::vector<double> values;
    SeriesKind kind = SeriesKind::PositionNoise;
    std::string provenance;

    void validate() const;
    /// CSV with header omega,value,kind,provenance and 12 significant digits.
    void write_csv(std::ostream& os, const std::string& abscissa = "omega") const;
};

std::vector<double> log_grid(double lo, double hi, std::size_t n);
std::vector<double> linear_grid(double lo, double hi, std::size_t n);
/// Default SNR grid: 400 log-spaced points in [1e-3, 3].
std::vector<double> default_snr_grid();

SpectrumSeries tabulate(const std::vector<double>& omegas, SeriesKind kind, std::string provenance,
                        const std::function<double(double)>& f);

/// Thermal factor (omega/2) coth(omega/2theta), or theta in the classical case.
double thermal_factor(double omega, double theta, ThermalSpectrum thermal);

/// Stationary position noise spectrum with feedback and reservoir gates.
double position_noise_spectrum(const SchemeParams& s, double omega,
                               ThermalSpectrum thermal = ThermalSpectrum::Coth);

/// Position noise plus shot noise 1/(4 eta zeta gamma_m); no gate functions.
double detected_noise_spectrum(const SchemeParams& s, double omega,
                               ThermalSpectrum thermal = ThermalSpectrum::Coth);

struct OptimalNoise {
    double zeta_opt = 0;
    double n_min = 0;
};

/// Input power minimising the detected spectrum at one frequency and the
/// minimum itself. The zeta field of `s` is ignored.
OptimalNoise optimal_power_at_frequency(const SchemeParams& s, double omega,
                                        ThermalSpectrum thermal = ThermalSpectrum::Coth);

/// Stationary SNR for a force of spectral magnitude |f(omega)| measured for a
/// time T_m: |chi f| / sqrt(T_m * detected noise).
double stationary_snr(const SchemeParams& s, double force_abs, double omega, double t_meas,
                      ThermalSpectrum thermal = ThermalSpectrum::Coth);

/// Warning text when the measurement is not long compared with the relaxation time.
std::optional<std::string> stationarity_warning(const SchemeParams& s, double t_meas);

}  // namespace optomech::spectra
