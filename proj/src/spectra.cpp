#include "optomech/spectra.hpp"

#include "optomech/response.hpp"
#include "optomech/steady.hpp"

#include <cmath>
#include <cstdio>

namespace optomech::spectra {

std::string_view to_string(SeriesKind k) {
    switch (k) {
        case SeriesKind::PositionNoise: return "PositionNoise";
        case SeriesKind::DetectedNoise: return "DetectedNoise";
        case SeriesKind::Signal: return "Signal";
        case SeriesKind::SNR: return "SNR";
        case SeriesKind::Energy: return "Energy";
        case SeriesKind::Variance: return "Variance";
    }
    return "PositionNoise";
}

void SpectrumSeries::validate() const {
    if (omegas.size() != values.size()) throw InvalidParameter("spectrum grid and values differ in length");
    for (std::size_t i = 1; i < omegas.size(); ++i) {
        if (!(omegas[i] > omegas[i - 1])) throw InvalidParameter("spectrum grid not strictly increasing");
    }
    if (kind == SeriesKind::PositionNoise || kind == SeriesKind::DetectedNoise) {
        for (double v : values) {
            if (!(v >= 0)) throw InvalidParameter("negative noise spectrum value");
        }
    }
}

void SpectrumSeries::write_csv(std::ostream& os, const std::string& abscissa) const {
    os << abscissa << ",value,kind,provenance\n";
    char a[32], b[32];
    const std::string tail = "," + std::string(to_string(kind)) + "," + provenance + "\n";
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        std::snprintf(a, sizeof a, "%.12g", omegas[i]);
        std::snprintf(b, sizeof b, "%.12g", values[i]);
        os << a << ',' << b << tail;
    }
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    if (!(lo > 0 && hi > lo) || n < 2) throw InvalidParameter("log_grid needs 0 < lo < hi and n >= 2");
    std::vector<double> g(n);
    const double a = std::log(lo), b = std::log(hi);
    for (std::size_t i = 0; i < n; ++i) g[i] = std::exp(a + (b - a) * double(i) / double(n - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
    if (!(hi > lo) || n < 2) throw InvalidParameter("linear_grid needs lo < hi and n >= 2");
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = lo + (hi - lo) * double(i) / double(n - 1);
    return g;
}

std::vector<double> default_snr_grid() { return log_grid(1e-3, 3.0, 400); }

SpectrumSeries tabulate(const std::vector<double>& omegas, SeriesKind kind, std::string provenance,
                        const std::function<double(double)>& f) {
    SpectrumSeries s;
    s.omegas = omegas;
    s.kind = kind;
    s.provenance = std::move(provenance);
    s.values.reserve(omegas.size());
    for (double w : omegas) s.values.push_back(f(w));
    return s;
}

double thermal_factor(double omega, double theta, ThermalSpectrum thermal) {
    if (thermal == ThermalSpectrum::Classical) return theta;
    return 0.5 * steady::omega_coth(omega, theta);
}

namespace {

// Feedback-noise weight multiplying g^2 / (4 eta zeta): omega^2 (+ gamma^2 for
// the position-shift scheme).
double feedback_weight(const SchemeParams& s, double omega) {
    if (s.scheme == Scheme::None) return 0.0;
    const double gm = s.gamma();
    return omega * omega + (s.scheme == Scheme::StochasticCooling ? gm * gm : 0.0);
}

double bracket_terms(const SchemeParams& s, double omega, ThermalSpectrum thermal, bool gated) {
    const double g = s.gain();
    double fb = g * g / (4.0 * s.eta * s.zeta) * feedback_weight(s, omega);
    double th = thermal_factor(omega, s.theta, thermal);
    if (gated) {
        if (!s.feedback_band().contains(omega)) fb = 0;
        if (std::abs(omega) > s.cutoff_reservoir) th = 0;
    }
    return 0.25 * s.zeta + fb + th;
}

}  // namespace

double position_noise_spectrum(const SchemeParams& s, double omega, ThermalSpectrum thermal) {
    return s.gamma() * response::chi_freq_abs2(s, omega) * bracket_terms(s, omega, thermal, true);
}

double detected_noise_spectrum(const SchemeParams& s, double omega, ThermalSpectrum thermal) {
    const double gm = s.gamma();
    return gm * response::chi_freq_abs2(s, omega) * bracket_terms(s, omega, thermal, false) +
           1.0 / (4.0 * s.eta * s.zeta * gm);
}

OptimalNoise optimal_power_at_frequency(const SchemeParams& s, double omega, ThermalSpectrum thermal) {
    const double gm = s.gamma();
    const double g = s.gain();
    const double chi2 = response::chi_freq_abs2(s, omega);
    const double extra = 1.0 + gm * gm * g * g * chi2 * feedback_weight(s, omega);
    OptimalNoise o;
    o.zeta_opt = std::sqrt(extra / (s.eta * gm * gm * chi2));
    o.n_min = gm * chi2 * thermal_factor(omega, s.theta, thermal) +
              std::sqrt(chi2) / (2.0 * std::sqrt(s.eta)) * std::sqrt(extra);
    return o;
}

double stationary_snr(const SchemeParams& s, double force_abs, double omega, double t_meas,
                      ThermalSpectrum thermal) {
    if (!(t_meas > 0)) throw InvalidParameter("measurement time must be positive");
    if (force_abs == 0) return 0.0;
    const double chi = std::sqrt(response::chi_freq_abs2(s, omega));
    return force_abs * chi / std::sqrt(t_meas * detected_noise_spectrum(s, omega, thermal));
}

std::optional<std::string> stationarity_warning(const SchemeParams& s, double t_meas) {
    if (s.damping() * t_meas < 10.0) {
        return std::string("measurement time shorter than 10 relaxation times; stationary SNR is approximate");
    }
    return std::nullopt;
}

}  // namespace optomech::spectra
