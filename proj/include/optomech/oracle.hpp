#pragma once

#include "optomech/core.hpp"
#include "optomech/nonstat.hpp"
#include "optomech/spectra.hpp"
#include "optomech/steady.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

// Monte Carlo integrator of the classical-equivalent Langevin equations
//   sc:   dQ = (P - g gamma Q) dt + dW_Q,   dP = (-Q - gamma P + f) dt + dW_P
//   cd:   dQ = P dt,   dP = (-Q - gamma (1+g) P + f + xi_fb) dt + dW_P
// with <dW_P^2> = gamma (zeta/4 + theta) dt, <dW_Q^2> = gamma g^2/(4 eta zeta) dt
// and xi_fb band-limited with two-sided density gamma g^2 omega^2/(4 eta zeta).

namespace optomech::oracle {

/// Philox4x32-10 counter-based generator.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key);

/// Two standard normals for one (seed; a, b, stream) counter.
std::array<double, 2> normal_pair(std::uint64_t seed, std::uint64_t a, std::uint32_t b, std::uint32_t stream);

enum class Estimator { Moments, Spectrum };

struct SimConfig {
    double dt = 0.01;
    std::uint64_t n_steps = 10000;       // sampled steps after burn-in
    std::uint64_t burn_in_steps = 1000;
    std::uint32_t n_traj = 100;
    std::uint64_t seed = 1;
    std::optional<FeedbackBand> fb_band;  // unset: the scheme's own band
    Estimator estimator = Estimator::Moments;
    // Noise is drawn on a grid refined by this factor and summed, so runs at
    // (dt, 2) and (dt/2, 1) share one Brownian path.
    std::uint32_t noise_substeps = 1;
    bool thermal_noise = true;
    bool backaction_noise = true;
    bool feedback_noise = true;
    // Spectrum estimator: keep every `decimation`-th sample, Hann segments of
    // `segment_length` samples with 50% overlap.
    std::uint32_t decimation = 1;
    std::uint32_t segment_length = 4096;
    unsigned n_threads = 0;  // 0: hardware concurrency

    void validate(const SchemeParams& s) const;
};

struct Estimate {
    double value = 0;
    double error = 0;
};

struct EnsembleStats {
    Estimate q2, p2, qp;
    Estimate mean_q, mean_p;
    /// Normalised correlation between the back-action and feedback increments.
    Estimate noise_cross;
    std::vector<double> omegas;
    std::vector<double> spectrum;
    std::vector<double> spectrum_err;
    std::uint64_t seed = 0;
    std::uint32_t n_traj = 0;
    double dt = 0;
    std::string rng = "philox4x32-10";

    std::string to_json() const;
};

EnsembleStats simulate(const SchemeParams& s, const SimConfig& cfg,
                       const std::optional<nonstat::ForcePulse>& force = std::nullopt);

struct ZEntry {
    std::string name;
    double analytic = 0;
    double empirical = 0;
    double error = 0;
    double z = 0;
};

struct CompareReport {
    std::vector<ZEntry> entries;
    bool pass = true;
    std::vector<std::string> failures;
};

/// z-scores of the three moments; pass iff every |z| <= threshold.
CompareReport compare(const steady::MomentSet& analytic, const EnsembleStats& empirical, double threshold = 3.0);
/// z-scores of each analytic spectrum point against the empirical bin at the
/// same frequency. Throws InvalidParameter when a frequency has no bin.
CompareReport compare(const spectra::SpectrumSeries& analytic, const EnsembleStats& empirical,
                      double threshold = 3.0);

}  // namespace optomech::oracle
