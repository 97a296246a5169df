#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// Working units throughout the library: omega_m = 1. Frequencies are in units
// of omega_m, times in units of 1/omega_m, energies in units of hbar*omega_m/2.

namespace optomech {

class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a quadrature or solver misses its requested tolerance.
class NumericalError : public std::runtime_error {
public:
    NumericalError(std::string op, double tolerance, double achieved);

    const std::string& operation() const noexcept { return op_; }
    double tolerance() const noexcept { return tolerance_; }
    double achieved() const noexcept { return achieved_; }

private:
    std::string op_;
    double tolerance_;
    double achieved_;
};

enum class Scheme { None, StochasticCooling, ColdDamping };

std::string_view to_string(Scheme s);
Scheme scheme_from_string(std::string_view name);

/// Lab-unit description of the cavity, mirror, laser and feedback loop (SI).
struct PhysicalParams {
    double mass = 0;            // kg
    double omega_m = 0;         // rad/s
    double gamma_m = 0;         // rad/s
    double cavity_length = 0;   // m
    double gamma_c = 0;         // rad/s
    double laser_power = 0;     // W
    double laser_omega0 = 0;    // rad/s
    double cavity_omega_c = 0;  // rad/s
    double efficiency = 1;      // eta in (0, 1]
    double feedback_gain_raw = 0;  // g_sc or g_cd
    double reservoir_cutoff = 0;   // rad/s
    double feedback_bandwidth = 0; // rad/s, 0 selects the default band
    double temperature = 0;        // K

    /// Radiation-pressure coupling G = (omega_c / L) sqrt(hbar / 2 m omega_m).
    double coupling() const;
    /// Driving amplitude squared, E^2 = P gamma_c / (hbar omega_0).
    double drive_squared() const;
    void validate() const;
};

/// Frequency window in which the feedback loop is active. Narrow bands gate
/// |omega| in [lo, hi]; wide bands gate |omega| <= hi.
struct FeedbackBand {
    enum class Kind { Narrow, Wide };
    Kind kind = Kind::Narrow;
    double lo = 0;
    double hi = 0;

    bool contains(double omega) const;
};

/// Dimensionless working parameters of a feedback scheme.
struct SchemeParams {
    Scheme scheme = Scheme::None;
    double g = 0;       // g1 (stochastic cooling) or g2 (cold damping)
    double quality = 0; // Q = omega_m / gamma_m
    double zeta = 0;    // rescaled input power
    double theta = 0;   // k_B T / (hbar omega_m)
    double eta = 1;     // detection efficiency
    double cutoff_reservoir = 1e3;         // varpi / omega_m
    std::optional<FeedbackBand> feedback;  // unset selects the default band

    double gamma() const { return 1.0 / quality; }
    /// Gain that actually acts, i.e. zero for Scheme::None.
    double gain() const { return scheme == Scheme::None ? 0.0 : g; }
    /// Effective mechanical damping gamma_m (1 + g).
    double damping() const { return gamma() * (1.0 + gain()); }
    FeedbackBand feedback_band() const;
    /// The same parameters with the loop switched off.
    SchemeParams bare() const;
    SchemeParams with_zeta(double z) const;
    SchemeParams with_gain(double gain) const;

    void validate() const;
};

/// Default narrow band [1 - 10 gamma_m (1+g), 1 + 10 gamma_m (1+g)], clipped at 0.
FeedbackBand default_feedback_band(double quality, double gain);

struct ConversionResult {
    SchemeParams params;
    std::vector<std::string> warnings;
};

/// Maps lab parameters and a (real) steady intracavity amplitude beta onto the
/// dimensionless working set. Throws InvalidParameter on a non-positive zeta
/// or a negative mapped gain.
ConversionResult to_dimensionless(const PhysicalParams& p, Scheme scheme, double beta);

struct BistabilityResult {
    std::vector<double> roots;  // intracavity photon numbers |beta|^2, ascending
    std::vector<bool> stable;
};

/// Positive real solutions x = |beta|^2 of
///   x [ (gamma_c/2)^2 + (detuning - 2 G^2 x / omega_m)^2 ] = E^2.
/// With three roots the middle one is flagged unstable.
BistabilityResult classical_steady_amplitude(const PhysicalParams& p, double detuning);

/// Left-hand side minus right-hand side of the amplitude equation.
double amplitude_residual(const PhysicalParams& p, double detuning, double x);

}  // namespace optomech
