#pragma once

#include "optomech/core.hpp"

#include <string>
#include <vector>

namespace optomech::steady {

enum class ThermalModel { ClassicalDelta, ClassicalPlusLog, ExactCoth };

std::string_view to_string(ThermalModel m);
ThermalModel thermal_model_from_string(std::string_view name);

/// Stationary second moments. qp is <QP + PQ>/2; energy_units is 2 U / (hbar omega_m).
struct MomentSet {
    double q2 = 0;
    double p2 = 0;
    double qp = 0;
    double energy_units = 0;
    ThermalModel thermal_model = ThermalModel::ClassicalDelta;
    std::vector<std::string> warnings;
};

/// White-noise intensities (two-sided, delta-function coefficients) driving
/// the classical-equivalent Langevin equations.
struct NoiseStrengths {
    double d_q = 0;      // position-equation noise (stochastic cooling feedback)
    double d_p = 0;      // momentum-equation noise: back-action + classical thermal
    double d_fb_cd = 0;  // cold-damping derivative noise, multiplies omega^2
};

NoiseStrengths noise_strengths(const SchemeParams& s);

MomentSet steady_moments(const SchemeParams& s,
                         ThermalModel model = ThermalModel::ClassicalDelta);

struct BrownianMoments {
    double q2 = 0;
    double p2 = 0;
    double q2_error = 0;
    double p2_error = 0;
};

/// Thermal contributions computed with the full coth spectrum over
/// [-varpi, varpi] by adaptive quadrature.
BrownianMoments brownian_exact(const SchemeParams& s, double rel_tol = 1e-8);

/// omega coth(omega / 2 theta), with the classical and zero-temperature limits
/// handled explicitly.
double omega_coth(double omega, double theta);

double steady_energy(const SchemeParams& s);

struct OptimalPower {
    double zeta_opt = 0;
    double energy = 0;
};

/// Input power minimising the stationary energy at fixed gain. The zeta field
/// of `s` is ignored.
OptimalPower optimal_input_power(const SchemeParams& s);

struct PositionMinimum {
    double zeta_opt = 0;
    double q2_min = 0;
    bool squeezed = false;
};

/// Minimum of <Q^2> over the input power for stochastic cooling.
PositionMinimum min_position_variance(double g1, double quality, double theta, double eta);

struct RegimeFlags {
    bool squeezed = false;
    bool contractive = false;
    bool thermal_like = false;
};

RegimeFlags regime_flags(const SchemeParams& s);

}  // namespace optomech::steady
