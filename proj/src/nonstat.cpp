#include "optomech/nonstat.hpp"

#include "optomech/quadrature.hpp"
#include "optomech/response.hpp"
#include "optomech/steady.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace optomech::nonstat {

double ForcePulse::operator()(double t) const {
    const double x = (t - t1) / sigma;
    return f0 * std::exp(-0.5 * x * x) * std::cos(omega_f * t);
}

std::complex<double> ForcePulse::laplace_full_line(std::complex<double> p) const {
    // cos = (e^{i wf t} + e^{-i wf t}) / 2, each a shifted Gaussian transform.
    const std::complex<double> i(0.0, 1.0);
    const double amp = 0.5 * f0 * sigma * std::sqrt(2.0 * std::numbers::pi);
    std::complex<double> sum = 0.0;
    for (double sgn : {1.0, -1.0}) {
        const std::complex<double> q = p - sgn * i * omega_f;
        sum += std::exp(-q * t1 + 0.5 * q * q * sigma * sigma);
    }
    return amp * sum;
}

double ForcePulse::transform_abs(double omega) const {
    return std::abs(laplace_full_line(std::complex<double>(0.0, omega)));
}

void ForcePulse::validate() const {
    if (!(sigma > 0)) throw InvalidParameter("force duration sigma must be positive");
    if (!std::isfinite(f0) || !std::isfinite(t1) || !std::isfinite(omega_f)) {
        throw InvalidParameter("force parameters must be finite");
    }
}

std::vector<std::string> ForcePulse::warnings(double gamma_m, double t_meas) const {
    std::vector<std::string> w;
    if (sigma * gamma_m > 0.1) w.emplace_back("force is not impulsive: sigma gamma_m > 0.1");
    if (sigma > 0.1 * t_meas) w.emplace_back("force duration not short compared with T_m");
    return w;
}

double MeasurementWindow::filter(double t) const { return t < 0 ? 0.0 : std::exp(-0.5 * t / t_meas); }

void MeasurementWindow::validate() const {
    if (!(t_meas > 0)) throw InvalidParameter("measurement time must be positive");
}

std::complex<double> shifted_chi(const SchemeParams& s, const MeasurementWindow& win, double omega) {
    return response::chi_freq(s.bare(), std::complex<double>(omega, -0.5 / win.t_meas));
}

std::complex<double> filtered_force(const ForcePulse& f, const MeasurementWindow& win, double omega,
                                    double rel_tol) {
    f.validate();
    win.validate();
    const double rate = 0.5 / win.t_meas;
    const double lo = std::max(0.0, f.t1 - 12.0 * f.sigma);
    const double hi = f.t1 + 12.0 * f.sigma;
    if (!(hi > lo)) return 0.0;
    // Pieces short compared with both the envelope and the fastest oscillation.
    const double wmax = std::abs(omega) + std::abs(f.omega_f) + 1e-300;
    const double step = std::min(0.5 * f.sigma, 4.0 * std::numbers::pi / wmax);
    const std::size_t n = std::min<std::size_t>(20000, std::size_t(std::ceil((hi - lo) / step)) + 1);
    std::vector<double> pts(n + 1);
    for (std::size_t k = 0; k <= n; ++k) pts[k] = lo + (hi - lo) * double(k) / double(n);

    auto re = [&](double t) { return f(t) * std::exp(-rate * t) * std::cos(omega * t); };
    auto im = [&](double t) { return -f(t) * std::exp(-rate * t) * std::sin(omega * t); };
    // Both parts share one scale so a vanishing quadrature does not trip the check.
    const double scale = std::abs(f.f0) * f.sigma;
    auto guarded = [&](auto&& g, const char* op) {
        try {
            return quad::integrate(g, pts, rel_tol, op).value;
        } catch (const NumericalError& e) {
            const double v = quad::integrate(g, pts, 1.0, op).value;
            if (e.achieved() * std::abs(v) > rel_tol * scale) throw;
            return v;
        }
    };
    return {guarded(re, "filtered_force real part"), guarded(im, "filtered_force imaginary part")};
}

double signal_spectrum(const SchemeParams& s, const ForcePulse& f, const MeasurementWindow& win,
                       double omega) {
    if (f.f0 == 0) return 0.0;
    // The filter factorises over the convolution: with z = omega - i/2T_m,
    // int F(t) e^{-i omega t} (chi0 * f)(t) dt = chi0(z) int f(s) e^{-i z s} ds.
    return std::abs(shifted_chi(s, win, omega)) * std::abs(filtered_force(f, win, omega));
}

NoiseTerms nonstationary_noise(const SchemeParams& init, const MeasurementWindow& win, double omega) {
    win.validate();
    const steady::MomentSet m = steady::steady_moments(init);
    const double gm = init.gamma();
    const double tm = win.t_meas;
    const double a = gm + 0.5 / tm;
    const double chi2 = std::norm(shifted_chi(init, win, omega));
    double bracket = (omega * omega + a * a) * m.q2 + m.p2 + tm * gm * (0.25 * init.zeta + init.theta);
    if (init.scheme == Scheme::StochasticCooling) bracket += a * 2.0 * m.qp;
    NoiseTerms n;
    n.dynamic = chi2 * bracket;
    n.shot = tm / (4.0 * init.eta * init.zeta * gm);
    return n;
}

double nonstationary_snr(const SchemeParams& init, const ForcePulse& f, const MeasurementWindow& win,
                         double omega) {
    return signal_spectrum(init, f, win, omega) / std::sqrt(nonstationary_noise(init, win, omega).total());
}

namespace {

double trapezoid_average(const SchemeParams& init, ForcePulse f, const MeasurementWindow& win, double omega,
                         double noise, std::size_t n, double& rmin, double& rmax) {
    const double tm = win.t_meas;
    double sum = 0;
    for (std::size_t k = 0; k <= n; ++k) {
        f.t1 = tm * double(k) / double(n);
        const double r = signal_spectrum(init, f, win, omega) / noise;
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
        sum += (k == 0 || k == n) ? 0.5 * r : r;
    }
    return sum * tm / double(n);
}

}  // namespace

CyclicResult cyclic_avg_snr(const SchemeParams& init, const ForcePulse& f, const MeasurementWindow& win,
                            double t_cool, double omega, std::size_t n_grid) {
    win.validate();
    if (t_cool < 0) throw InvalidParameter("cooling time must be non-negative");
    if (n_grid < 2) throw InvalidParameter("t1 grid needs at least 2 intervals");
    const double noise = std::sqrt(nonstationary_noise(init, win, omega).total());
    const double norm = 1.0 / (win.t_meas + t_cool);
    CyclicResult out;
    double rmin = INFINITY, rmax = 0;
    out.value = norm * trapezoid_average(init, f, win, omega, noise, n_grid, rmin, rmax);
    out.refined = norm * trapezoid_average(init, f, win, omega, noise, 2 * n_grid, rmin, rmax);
    out.rel_change = out.value != 0 ? std::abs(out.refined - out.value) / std::abs(out.value) : 0.0;
    if (t_cool > 0.1 * win.t_meas) out.warnings.emplace_back("cooling time not small compared with T_m");
    if (rmax > 10.0 * rmin) out.warnings.emplace_back("SNR varies by more than 10x across the arrival-time grid");
    if (out.rel_change > 0.01) out.warnings.emplace_back("arrival-time grid not converged to 1%");
    return out;
}

}  // namespace optomech::nonstat
