#include "optomech/core.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace optomech {

namespace {

constexpr double kHbar = 1.054571817e-34;
constexpr double kBoltzmann = 1.380649e-23;

std::string describe(const std::string& op, double tolerance, double achieved) {
    char buf[160];
    std::snprintf(buf, sizeof buf, ": tolerance %.3g not met (achieved %.3g)", tolerance, achieved);
    return op + buf;
}

void require(bool ok, const char* what) {
    if (!ok) throw InvalidParameter(what);
}

}  // namespace

NumericalError::NumericalError(std::string op, double tolerance, double achieved)
    : std::runtime_error(describe(op, tolerance, achieved)),
      op_(std::move(op)),
      tolerance_(tolerance),
      achieved_(achieved) {}

std::string_view to_string(Scheme s) {
    switch (s) {
        case Scheme::None: return "none";
        case Scheme::StochasticCooling: return "sc";
        case Scheme::ColdDamping: return "cd";
    }
    return "none";
}

Scheme scheme_from_string(std::string_view name) {
    if (name == "none" || name == "None") return Scheme::None;
    if (name == "sc" || name == "StochasticCooling") return Scheme::StochasticCooling;
    if (name == "cd" || name == "ColdDamping") return Scheme::ColdDamping;
    throw InvalidParameter("unknown scheme '" + std::string(name) + "'");
}

double PhysicalParams::coupling() const {
    return (cavity_omega_c / cavity_length) * std::sqrt(kHbar / (2.0 * mass * omega_m));
}

double PhysicalParams::drive_squared() const {
    return laser_power * gamma_c / (kHbar * laser_omega0);
}

void PhysicalParams::validate() const {
    require(mass > 0, "mass must be positive");
    require(omega_m > 0 && gamma_m > 0 && gamma_c > 0, "rates must be positive");
    require(cavity_length > 0, "cavity_length must be positive");
    require(laser_omega0 > 0 && cavity_omega_c > 0, "optical frequencies must be positive");
    require(laser_power >= 0, "laser_power must be non-negative");
    require(efficiency > 0 && efficiency <= 1, "efficiency must lie in (0, 1]");
    require(reservoir_cutoff >= 0 && feedback_bandwidth >= 0, "cutoffs must be non-negative");
    require(temperature >= 0, "temperature must be non-negative");
}

bool FeedbackBand::contains(double omega) const {
    const double w = std::abs(omega);
    if (kind == Kind::Wide) return w <= hi;
    return w >= lo && w <= hi;
}

FeedbackBand default_feedback_band(double quality, double gain) {
    const double half = 10.0 * (1.0 + gain) / quality;
    return FeedbackBand{FeedbackBand::Kind::Narrow, std::max(0.0, 1.0 - half), 1.0 + half};
}

FeedbackBand SchemeParams::feedback_band() const {
    if (feedback) return *feedback;
    return default_feedback_band(quality, gain());
}

SchemeParams SchemeParams::bare() const {
    SchemeParams b = *this;
    b.scheme = Scheme::None;
    b.g = 0;
    return b;
}

SchemeParams SchemeParams::with_zeta(double z) const {
    SchemeParams c = *this;
    c.zeta = z;
    return c;
}

SchemeParams SchemeParams::with_gain(double gain) const {
    SchemeParams c = *this;
    c.g = gain;
    return c;
}

void SchemeParams::validate() const {
    require(quality > 0, "quality factor must be positive");
    require(zeta > 0, "zeta must be positive");
    require(theta >= 0, "theta must be non-negative");
    require(eta > 0 && eta <= 1, "eta must lie in (0, 1]");
    require(g >= 0, "feedback gain must be non-negative");
    require(cutoff_reservoir > 0, "reservoir cutoff must be positive");
    if (feedback) require(feedback->hi > feedback->lo && feedback->lo >= 0, "feedback band is empty");
}

ConversionResult to_dimensionless(const PhysicalParams& p, Scheme scheme, double beta) {
    p.validate();
    require(beta > 0, "beta must be positive");
    ConversionResult out;
    const double G = p.coupling();
    SchemeParams& s = out.params;
    s.scheme = scheme;
    s.quality = p.omega_m / p.gamma_m;
    s.zeta = 16.0 * G * G * beta * beta / (p.gamma_m * p.gamma_c);
    s.theta = kBoltzmann * p.temperature / (kHbar * p.omega_m);
    s.eta = p.efficiency;
    switch (scheme) {
        case Scheme::None: s.g = 0; break;
        case Scheme::StochasticCooling:
            s.g = -4.0 * G * beta * p.feedback_gain_raw / p.gamma_m;
            break;
        case Scheme::ColdDamping:
            s.g = 4.0 * G * beta * p.omega_m * p.feedback_gain_raw / (p.gamma_m * p.gamma_c);
            break;
    }
    if (s.g == 0) s.g = 0;  // normalise -0
    require(s.zeta > 0, "mapped zeta is not positive");
    require(s.g >= 0, "mapped feedback gain is negative (check the sign of the raw gain)");
    if (p.reservoir_cutoff > 0) s.cutoff_reservoir = p.reservoir_cutoff / p.omega_m;
    if (p.feedback_bandwidth > 0) {
        const double half = 0.5 * p.feedback_bandwidth / p.omega_m;
        s.feedback = FeedbackBand{FeedbackBand::Kind::Narrow, std::max(0.0, 1.0 - half), 1.0 + half};
    }
    if (p.gamma_c < 10.0 * p.omega_m) {
        out.warnings.emplace_back("adiabatic elimination questionable: gamma_c / omega_m < 10");
    }
    if (s.theta > 0 && s.theta < 10.0) {
        out.warnings.emplace_back("theta < 10: classical thermal approximation is outside its domain");
    }
    return out;
}

double amplitude_residual(const PhysicalParams& p, double detuning, double x) {
    const double G = p.coupling();
    const double half = 0.5 * p.gamma_c;
    const double shift = detuning - 2.0 * G * G * x / p.omega_m;
    return x * (half * half + shift * shift) - p.drive_squared();
}

BistabilityResult classical_steady_amplitude(const PhysicalParams& p, double detuning) {
    p.validate();
    const double G = p.coupling();
    const double half = 0.5 * p.gamma_c;
    const double e2 = p.drive_squared();
    BistabilityResult out;
    if (e2 == 0) {
        out.roots = {0.0};
        out.stable = {true};
        return out;
    }
    const double a = 2.0 * G * G / p.omega_m;
    if (a == 0) {
        out.roots = {e2 / (half * half + detuning * detuning)};
        out.stable = {true};
        return out;
    }

    // y = a x / (gamma_c/2), d = detuning / (gamma_c/2):  y (1 + (d - y)^2) = I.
    const double d = detuning / half;
    const double intensity = a * e2 / (half * half * half);
    auto f = [&](double y) { return y * (1.0 + (d - y) * (d - y)) - intensity; };

    std::vector<double> edges{0.0};
    if (d * d > 3.0) {
        const double r = std::sqrt(d * d - 3.0);
        for (double c : {(2.0 * d - r) / 3.0, (2.0 * d + r) / 3.0}) {
            if (c > 0 && c < intensity) edges.push_back(c);
        }
    }
    edges.push_back(intensity);

    std::vector<double> ys;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        double lo = edges[i], hi = edges[i + 1];
        const double flo = f(lo), fhi = f(hi);
        if (fhi == 0) {
            ys.push_back(hi);
            continue;
        }
        if (flo == 0 || flo * fhi > 0) continue;
        std::uintmax_t iters = 200;
        auto [a0, b0] = boost::math::tools::toms748_solve(
            f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(52), iters);
        ys.push_back(0.5 * (a0 + b0));
    }
    if (ys.empty()) throw NumericalError("classical_steady_amplitude", 0.0, intensity);

    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    for (double y : ys) out.roots.push_back(y * half / a);
    out.stable.assign(out.roots.size(), true);
    if (out.roots.size() == 3) out.stable[1] = false;
    return out;
}

}  // namespace optomech
