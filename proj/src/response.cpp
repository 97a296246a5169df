#include "optomech/response.hpp"

#include <cmath>

namespace optomech::response {

namespace {

// e^{-rate t / 2} times {sin(W t)/W, cos(W t)} with W^2 = rad, continued to
// {sinh, cosh} for rad < 0. The overdamped branch is written with the two
// decay rates separately so that neither factor overflows.
struct Modes {
    double s = 0;  // e^{-rate t/2} sin(W t)/W
    double c = 0;  // e^{-rate t/2} cos(W t)
    double minus = 0;  // c - (rate/2) s
    double plus = 0;   // c + (rate/2) s
    double second = 0;  // d^2/dt^2 of s
};

Modes modes(double rate, double rad, double stiff, double t) {
    Modes m;
    const double half = 0.5 * rate;
    if (rad > 0 && rad * t * t > 1e-10) {
        const double w = std::sqrt(rad);
        const double env = std::exp(-half * t);
        m.s = env * std::sin(w * t) / w;
        m.c = env * std::cos(w * t);
    } else if (rad < 0 && -rad * t * t > 1e-10) {
        const double k = std::sqrt(-rad);
        // half - k = stiff / (half + k) keeps the slow rate accurate.
        const double slow = stiff / (half + k);
        const double fast = half + k;
        const double es = std::exp(-slow * t), ef = std::exp(-fast * t);
        m.s = (es - ef) / (2.0 * k);
        m.c = 0.5 * (es + ef);
        m.minus = (fast * ef - slow * es) / (2.0 * k);
        m.plus = (fast * es - slow * ef) / (2.0 * k);
        m.second = (slow * slow * es - fast * fast * ef) / (2.0 * k);
        return m;
    } else {
        // |W t| tiny: series in rad t^2.
        const double env = std::exp(-half * t);
        const double x = rad * t * t;
        m.s = env * t * (1.0 - x / 6.0 + x * x / 120.0);
        m.c = env * (1.0 - x / 2.0 + x * x / 24.0);
    }
    m.minus = m.c - half * m.s;
    m.plus = m.c + half * m.s;
    m.second = -rate * m.c + (half * half - rad) * m.s;
    return m;
}

}  // namespace

double damping_rate(const SchemeParams& s) { return s.damping(); }

double stiffness(const SchemeParams& s) {
    if (s.scheme == Scheme::StochasticCooling) {
        const double gm = s.gamma();
        return 1.0 + s.g * gm * gm;
    }
    return 1.0;
}

double radicand(const SchemeParams& s) {
    const double gm = s.gamma();
    const double g = s.gain();
    const double h = s.scheme == Scheme::StochasticCooling ? 0.5 * (1.0 - g) : 0.5 * (1.0 + g);
    return 1.0 - gm * gm * h * h;
}

ChiDerivatives chi_derivatives(const SchemeParams& s, double t) {
    const double rate = damping_rate(s);
    const double rad = radicand(s);
    const Modes m = modes(rate, rad, stiffness(s), t);
    ChiDerivatives d;
    d.value = m.s;
    d.first = m.minus;
    d.second = m.second;
    return d;
}

double chi_time(const SchemeParams& s, double t) { return chi_derivatives(s, t).value; }

KernelSet kernels(const SchemeParams& s, double t) {
    const double gm = s.gamma();
    const double rate = damping_rate(s);
    const Modes m = modes(rate, radicand(s), stiffness(s), t);
    const double chi = m.s;
    const double dchi = m.minus;
    KernelSet k;
    k.chi = chi;
    if (s.scheme == Scheme::ColdDamping) {
        k.k_q = m.plus;
        k.k_p = dchi;
    } else {
        k.k_q = dchi + gm * chi;
        k.k_p = dchi + s.gain() * gm * chi;
    }
    return k;
}

std::complex<double> chi_freq(const SchemeParams& s, std::complex<double> omega) {
    const std::complex<double> i(0.0, 1.0);
    return 1.0 / (stiffness(s) - omega * omega + i * omega * damping_rate(s));
}

double chi_freq_abs2(const SchemeParams& s, double omega) {
    const double re = stiffness(s) - omega * omega;
    const double im = omega * damping_rate(s);
    return 1.0 / (re * re + im * im);
}

}  // namespace optomech::response
