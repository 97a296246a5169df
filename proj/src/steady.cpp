#include "optomech/steady.hpp"

#include "optomech/quadrature.hpp"
#include "optomech/response.hpp"

#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <numbers>

namespace optomech::steady {

namespace {

constexpr double kPi = std::numbers::pi;

// Cold-damping feedback contributions over a band, as multiples of the
// derivative-noise coefficient gamma g^2 / (4 eta zeta).
struct FeedbackIntegrals {
    double q2 = 0;  // int dw/2pi  w^2 |chi|^2
    double p2 = 0;  // int dw/2pi  w^4 |chi|^2
};

FeedbackIntegrals cd_feedback_integrals(const SchemeParams& s) {
    const double rate = s.damping();
    const FeedbackBand band = s.feedback_band();
    FeedbackIntegrals f;
    if (band.kind == FeedbackBand::Kind::Narrow) {
        // Resonant contribution only: w^2 ~ w^4 ~ 1 across the peak.
        f.q2 = 0.5 / rate;
        f.p2 = 0.5 / rate;
        return f;
    }
    // w^4 |chi|^2 = 1 + ((2 - rate^2) w^2 - 1) |chi|^2; tails beyond the band
    // edge W expanded to O(1/W).
    const double w = band.hi;
    f.q2 = 0.5 / rate - 1.0 / (kPi * w);
    f.p2 = w / kPi + (1.0 - rate * rate) / (2.0 * rate) - (2.0 - rate * rate) / (kPi * w);
    return f;
}

}  // namespace

std::string_view to_string(ThermalModel m) {
    switch (m) {
        case ThermalModel::ClassicalDelta: return "ClassicalDelta";
        case ThermalModel::ClassicalPlusLog: return "ClassicalPlusLog";
        case ThermalModel::ExactCoth: return "ExactCoth";
    }
    return "ClassicalDelta";
}

ThermalModel thermal_model_from_string(std::string_view name) {
    if (name == "ClassicalDelta" || name == "classical") return ThermalModel::ClassicalDelta;
    if (name == "ClassicalPlusLog" || name == "log") return ThermalModel::ClassicalPlusLog;
    if (name == "ExactCoth" || name == "coth") return ThermalModel::ExactCoth;
    throw InvalidParameter("unknown thermal model '" + std::string(name) + "'");
}

NoiseStrengths noise_strengths(const SchemeParams& s) {
    s.validate();
    const double gm = s.gamma();
    const double g = s.gain();
    NoiseStrengths n;
    n.d_p = gm * (0.25 * s.zeta + s.theta);
    const double fb = gm * g * g / (4.0 * s.eta * s.zeta);
    if (s.scheme == Scheme::StochasticCooling) n.d_q = fb;
    if (s.scheme == Scheme::ColdDamping) n.d_fb_cd = fb;
    return n;
}

double omega_coth(double omega, double theta) {
    const double w = std::abs(omega);
    if (theta <= 0) return w;
    const double x = w / (2.0 * theta);
    if (x < 1e-4) return 2.0 * theta * (1.0 + x * x / 3.0);
    if (x > 20.0) return w;
    return w / std::tanh(x);
}

BrownianMoments brownian_exact(const SchemeParams& s, double rel_tol) {
    s.validate();
    const double gm = s.gamma();
    const double g = s.gain();
    const double cutoff = s.cutoff_reservoir;
    const double w0 = std::sqrt(response::stiffness(s));
    const std::vector<double> pts = quad::peak_breakpoints(w0, 0.5 * s.damping(), 0.0, cutoff);

    // Even integrands: (gamma / 2pi) int_0^varpi.
    auto base = [&](double w) { return omega_coth(w, s.theta) * response::chi_freq_abs2(s, w); };
    const double pref = gm / (2.0 * kPi);
    const quad::Result rq = quad::integrate(base, pts, rel_tol, "brownian_exact q2");
    const double extra = s.scheme == Scheme::StochasticCooling ? gm * gm * g * g : 0.0;
    auto pfun = [&](double w) { return (w * w + extra) * base(w); };
    const quad::Result rp = quad::integrate(pfun, pts, rel_tol, "brownian_exact p2");

    BrownianMoments b;
    b.q2 = pref * rq.value;
    b.q2_error = pref * rq.error;
    b.p2 = pref * rp.value;
    b.p2_error = pref * rp.error;
    return b;
}

MomentSet steady_moments(const SchemeParams& s, ThermalModel model) {
    s.validate();
    const double Q = s.quality;
    const double g = s.gain();
    const double gm = s.gamma();
    const double fb = g * g / (8.0 * s.eta * s.zeta);  // feedback (shot-noise) strength
    const double ba = s.zeta / 8.0;                    // back-action
    const double th = s.theta / 2.0;                   // classical thermal

    MomentSet m;
    m.thermal_model = model;
    if (s.theta == 0 && model == ThermalModel::ClassicalDelta) {
        m.warnings.emplace_back("theta = 0: classical thermal approximation invalid");
    }

    // Thermal-only parts, kept separate so ExactCoth can swap them.
    double q2_th = 0, p2_th = 0, qp_th = 0;
    if (s.scheme == Scheme::ColdDamping) {
        const FeedbackIntegrals fi = cd_feedback_integrals(s);
        const double coef = gm * g * g / (4.0 * s.eta * s.zeta);
        m.q2 = coef * fi.q2 + ba / (1.0 + g);
        m.p2 = coef * fi.p2 + ba / (1.0 + g);
        q2_th = p2_th = th / (1.0 + g);
    } else {
        const double D = (1.0 + g) * (Q * Q + g);
        m.q2 = fb * (1.0 + Q * Q + g) / D + ba * Q * Q / D;
        m.p2 = fb * Q * Q / D + ba * (g * g + Q * Q + g) / D;
        m.qp = ba * g * Q / D - fb * Q / D;
        q2_th = th * Q * Q / D;
        p2_th = th * (g * g + Q * Q + g) / D;
        qp_th = th * g * Q / D;
    }

    if (model == ThermalModel::ExactCoth) {
        const BrownianMoments b = brownian_exact(s);
        q2_th = b.q2;
        p2_th = b.p2;
        // The position-shift feedback couples <QP+PQ> to <Q^2> alone.
        qp_th = s.scheme == Scheme::StochasticCooling ? g * gm * b.q2 : 0.0;
    } else if (model == ThermalModel::ClassicalPlusLog) {
        if (s.theta <= 0) throw InvalidParameter("logarithmic correction requires theta > 0");
        p2_th += gm / kPi * std::log(s.cutoff_reservoir / (2.0 * kPi * s.theta));
    }

    m.q2 += q2_th;
    m.p2 += p2_th;
    m.qp += qp_th;
    m.energy_units = 2.0 * (m.q2 + m.p2);
    return m;
}

double steady_energy(const SchemeParams& s) {
    return steady_moments(s, ThermalModel::ClassicalDelta).energy_units;
}

OptimalPower optimal_input_power(const SchemeParams& s) {
    const double g = s.gain();
    if (!(g > 0)) throw InvalidParameter("optimal_input_power requires a positive feedback gain");
    OptimalPower out;
    if (s.scheme == Scheme::ColdDamping) {
        out.zeta_opt = g / std::sqrt(s.eta);
        out.energy = steady_energy(s.with_zeta(out.zeta_opt));
        return out;
    }
    // Golden-section/Brent on log zeta around the large-Q asymptote g/sqrt(eta).
    const double seed = std::log(g / std::sqrt(s.eta));
    auto f = [&](double lz) { return steady_energy(s.with_zeta(std::exp(lz))); };
    const double span = std::log(1e4);
    std::uintmax_t iters = 500;
    const auto [lz, e] = boost::math::tools::brent_find_minima(f, seed - span, seed + span, 52, iters);
    if (std::abs(lz - seed) > 0.999 * span) throw NumericalError("optimal_input_power bracket", span, std::abs(lz - seed));
    out.zeta_opt = std::exp(lz);
    out.energy = e;
    return out;
}

PositionMinimum min_position_variance(double g1, double quality, double theta, double eta) {
    if (!(g1 > 0) || !(quality > 0) || theta < 0 || !(eta > 0 && eta <= 1)) {
        throw InvalidParameter("min_position_variance: invalid parameters");
    }
    const double Q = quality;
    const double D = (1.0 + g1) * (Q * Q + g1);
    const double root = std::sqrt(1.0 + Q * Q + g1);
    PositionMinimum m;
    m.zeta_opt = g1 * root / (Q * std::sqrt(eta));
    m.q2_min = g1 * Q * root / (4.0 * std::sqrt(eta) * D) + 0.5 * theta * Q * Q / D;
    m.squeezed = m.q2_min < 0.25;
    return m;
}

RegimeFlags regime_flags(const SchemeParams& s) {
    const MomentSet m = steady_moments(s);
    RegimeFlags f;
    f.squeezed = m.q2 < 0.25;
    f.contractive = m.qp < 0;
    f.thermal_like = std::abs(m.q2 - m.p2) / m.q2 < 1e-3 && std::abs(m.qp) < 1e-3 * m.q2;
    return f;
}

}  // namespace optomech::steady
