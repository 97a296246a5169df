#pragma once

#include "optomech/core.hpp"
#include "optomech/nonstat.hpp"
#include "optomech/steady.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

// Run configuration shared by the CLI and its tests. Times in configuration
// files and on the command line (Tm, Tcool, sigma, t1) are rescaled by gamma_m,
// as in the paper's figures: Tm = 1e-3 means gamma_m T_m = 1e-3.

namespace optomech::io {

enum class Subcommand { Steady, Spectrum, SnrStationary, SnrNonstationary, Cyclic, MonteCarlo, Figure };
enum class Format { Csv, Json };

std::string_view to_string(Subcommand c);
Subcommand subcommand_from_string(std::string_view name);

struct Sweep {
    std::string variable;
    double lo = 0;
    double hi = 0;
    std::size_t n = 50;
    bool log = true;
};

/// Parameters used when a configuration leaves them unset: the common setting
/// of the paper's figures (Q = 1e5, zeta = 10, theta = 1e5, eta = 0.8), no feedback.
SchemeParams default_params();

struct RunConfig {
    Subcommand subcommand = Subcommand::Steady;
    SchemeParams params = default_params();
    steady::ThermalModel thermal = steady::ThermalModel::ClassicalDelta;

    double gamma_tm = 1e-3;     // gamma_m T_m
    double gamma_tcool = 1e-6;  // gamma_m T_cool
    double gamma_sigma = 1e-4;  // force duration
    double gamma_t1 = 3e-4;     // force arrival
    double omega_f = 1.0;
    double f0 = 1.0;
    bool flat_force = true;       // snr-stationary: |f| = 1 instead of the pulse transform; montecarlo: no drive
    bool detected = true;         // spectrum: detected (true) or gated position noise
    std::optional<double> omega;  // single frequency; used by sweeps
    double omega_min = 1e-3;
    double omega_max = 3.0;
    std::size_t n_omega = 400;
    bool log_omega = true;
    std::optional<Sweep> sweep;

    // Monte Carlo; unset values are derived from the parameters.
    std::optional<double> dt;
    std::optional<std::uint64_t> n_steps;
    std::optional<std::uint64_t> burn_in;
    std::uint32_t n_traj = 200;
    std::uint64_t seed = 1;

    int figure = 0;
    std::string out;  // file, or directory for figures; empty: stdout
    Format format = Format::Csv;

    nonstat::ForcePulse force() const;
    nonstat::MeasurementWindow window() const;
    void validate() const;
};

/// Flat "key = value" lines; '#' starts a comment. Throws InvalidParameter
/// (naming the line) on malformed input or duplicate keys.
std::vector<std::pair<std::string, std::string>> parse_key_values(std::istream& in);

/// Applies key/value pairs to a configuration. Lab-unit keys (mass, omega_m,
/// ...) together with `beta` are converted with to_dimensionless first.
void apply(RunConfig& cfg, const std::vector<std::pair<std::string, std::string>>& kv,
           std::vector<std::string>* warnings = nullptr);
void apply(RunConfig& cfg, const std::string& key, const std::string& value);

/// Runs the configured subcommand. Returns the process exit status:
/// 0 success, 1 invalid configuration, 2 numerical failure.
int run(const RunConfig& cfg, std::ostream& err);

}  // namespace optomech::io
