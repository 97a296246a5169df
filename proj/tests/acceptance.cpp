// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "optomech/nonstat.hpp"
#include "optomech/oracle.hpp"
#include "optomech/quadrature.hpp"
#include "optomech/response.hpp"
#include "optomech/spectra.hpp"
#include "optomech/steady.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace optomech;

namespace {

constexpr double kPi = std::numbers::pi;

SchemeParams make(Scheme scheme, double g, double quality, double zeta, double theta, double eta = 0.8) {
    SchemeParams s;
    s.scheme = scheme;
    s.g = g;
    s.quality = quality;
    s.zeta = zeta;
    s.theta = theta;
    s.eta = eta;
    return s;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void run(const std::string& id, const std::string& title, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("%s %-3s %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id.c_str(), title.c_str(), o.detail.c_str(),
                secs);
    std::fflush(stdout);
}

// 1. Ground-state limit of cold damping.
Outcome ground_state() {
    const double g = 1e9;
    double worst = 0;
    for (double theta : {1.0, 1e2, 1e4, 1e6}) {
        const double e = steady::steady_energy(make(Scheme::ColdDamping, g, 1e5, g, theta, 1.0));
        worst = std::max(worst, std::abs(e - g / (1 + g) * (1 + 2 * theta / g)));
    }
    const double near = steady::steady_energy(make(Scheme::ColdDamping, g, 1e5, g, 1.0, 1.0));
    const bool ok = worst < 1e-3 && std::abs(near - 1) < 1e-3;
    return {ok, "max |E - g/(1+g)(1+2theta/g)| = " + num(worst) + " (tol 1e-3); E(theta=1) = " + num(near)};
}

// 2. Grid minimisation of the energy over the input power.
Outcome optimal_power() {
    const double eta = 0.8, theta = 1e5;
    const auto n = 6001;
    double cd_worst_steps = 0, sc_worst = 0;
    for (double g : {10.0, 1e3, 1e5, 1e7}) {
        const double target = g / std::sqrt(eta);
        const auto grid = spectra::log_grid(target * 1e-3, target * 1e3, n);
        const double step = std::log(grid[1] / grid[0]);
        auto argmin = [&](const SchemeParams& s) {
            double best = INFINITY, arg = 0;
            for (double z : grid) {
                const double e = steady::steady_energy(s.with_zeta(z));
                if (e < best) best = e, arg = z;
            }
            return arg;
        };
        cd_worst_steps =
            std::max(cd_worst_steps, std::abs(std::log(argmin(make(Scheme::ColdDamping, g, 1e5, 1, theta, eta)) / target)) / step);
        // Stochastic cooling where Q / g >= 1e3.
        const double q = std::max(1e5, 1e3 * g);
        sc_worst = std::max(sc_worst, rel(argmin(make(Scheme::StochasticCooling, g, q, 1, theta, eta)), target));
    }
    const bool ok = cd_worst_steps <= 1.0 && sc_worst < 0.05;
    return {ok, "cd grid argmin within " + num(cd_worst_steps) + " grid steps of g/sqrt(eta) (tol 1); sc max rel " +
                    num(sc_worst) + " (tol 0.05)"};
}

// 3. Squeezing threshold.
Outcome squeezing() {
    auto grid_min = [](double g) {
        double m = INFINITY;
        for (double z : spectra::log_grid(1e-2, 1e12, 14001)) {
            m = std::min(m, steady::steady_moments(make(Scheme::StochasticCooling, g, 1e4, z, 1e5, 0.8)).q2);
        }
        return m;
    };
    const double hi = grid_min(1e9), lo = grid_min(1e7);
    return {hi < 0.25 && lo > 0.25, "min q2: g=1e9 -> " + num(hi) + " (< 0.25), g=1e7 -> " + num(lo) + " (> 0.25)"};
}

// 4. Integral of the position spectrum against q2.
Outcome spectral_consistency() {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0;
    for (int i = 0; i < 10; ++i) {
        const Scheme sch = i % 2 ? Scheme::ColdDamping : Scheme::StochasticCooling;
        SchemeParams s = make(sch, std::pow(10.0, -1.0 + 3.0 * u(rng)), std::pow(10.0, 1.5 + 2.0 * u(rng)),
                              std::pow(10.0, 3.0 * u(rng)), std::pow(10.0, 3.0 + 2.0 * u(rng)), 0.5 + 0.5 * u(rng));
        // White noise up to the reservoir cutoff, which sits well above theta.
        s.cutoff_reservoir = std::max(1e3, 20.0 * s.theta);
        s.feedback = FeedbackBand{FeedbackBand::Kind::Wide, 0.0, 1e3 * std::max(1.0, s.damping())};
        const auto pts = quad::peak_breakpoints(std::sqrt(response::stiffness(s)), 0.5 * s.damping(), 0.0,
                                                s.cutoff_reservoir);
        auto f = [&](double w) { return spectra::position_noise_spectrum(s, w); };
        const double integral = quad::integrate(f, pts, 1e-9, "spectral consistency").value / kPi;
        worst = std::max(worst, rel(integral, steady::steady_moments(s).q2));
    }
    return {worst < 5e-3, "worst rel over 10 random sets " + num(worst) + " (tol 5e-3)"};
}

// 5. Stochastic cooling vs cold damping.
Outcome equivalence() {
    const SchemeParams sc = make(Scheme::StochasticCooling, 1e3, 1e4, 10, 1e5);
    const SchemeParams cd = make(Scheme::ColdDamping, 1e3, 1e4, 10, 1e5);
    double spec = 0;
    for (double w : spectra::linear_grid(0, 2, 2001)) {
        spec = std::max(spec, rel(spectra::position_noise_spectrum(sc, w), spectra::position_noise_spectrum(cd, w)));
    }
    // Moments on the boundary Q^2 = 1e3 g; qp is measured against sqrt(q2 p2) since cd has none.
    double dq = 0, dp = 0, dx = 0;
    for (double g : {1.0, 10.0, 100.0, 1e3}) {
        const double q = std::sqrt(1e3 * g);
        const auto a = steady::steady_moments(make(Scheme::StochasticCooling, g, q, 10, 1e5));
        const auto b = steady::steady_moments(make(Scheme::ColdDamping, g, q, 10, 1e5));
        dq = std::max(dq, rel(a.q2, b.q2));
        dp = std::max(dp, rel(a.p2, b.p2));
        dx = std::max(dx, std::abs(a.qp - b.qp) / std::sqrt(b.q2 * b.p2));
    }
    const bool ok = spec < 1e-3 && std::max({dq, dp, dx}) < 1e-3;
    return {ok, "spectra max rel " + num(spec) + "; moments at Q^2=1e3 g, g in 1..1e3: q2 " + num(dq) + ", p2 " +
                    num(dp) + ", qp " + num(dx) + " (tol 1e-3 each)"};
}

// 6. Stationary SNR ordering.
Outcome snr_ordering() {
    const double tm = 10 * 1e5;
    std::size_t bad = 0, n = 0;
    for (double w : spectra::default_snr_grid()) {
        const double r0 = spectra::stationary_snr(make(Scheme::None, 0, 1e5, 10, 1e5), 1.0, w, tm);
        const double r4 = spectra::stationary_snr(make(Scheme::ColdDamping, 1e4, 1e5, 10, 1e5), 1.0, w, tm);
        const double r5 = spectra::stationary_snr(make(Scheme::ColdDamping, 1e5, 1e5, 10, 1e5), 1.0, w, tm);
        bad += !(r5 < r4 && r4 < r0);
        ++n;
    }
    return {bad == 0, std::to_string(n - bad) + "/" + std::to_string(n) + " grid points ordered"};
}

// 7. Nonstationary limits.
Outcome nonstationary_limits() {
    using namespace nonstat;
    const double Q = 1e5;
    // (a) long window, feedback off: detected spectrum.
    const SchemeParams bare = make(Scheme::None, 0, Q, 10, 1e5);
    const MeasurementWindow longw{10 * Q};
    double dev = 0, at = 0;
    auto grid = spectra::linear_grid(0.0, 2.0, 401);
    grid.push_back(1.0 - 1.0 / Q);
    for (double w : grid) {
        if (w == 0) continue;
        const double d = rel(nonstationary_noise(bare, longw, w).rescaled(longw.t_meas),
                             spectra::detected_noise_spectrum(bare, w, spectra::ThermalSpectrum::Classical));
        if (d > dev) dev = d, at = w;
    }
    const bool a = dev < 0.05;
    // (b) peak of the rescaled noise grows with T_m (cold-damping init, g = 1e3, Q = 1e4).
    const SchemeParams init = make(Scheme::ColdDamping, 1e3, 1e4, 10, 1e5);
    double prev = 0;
    bool b = true;
    std::string peaks;
    for (double gt : {1e-4, 1e-3, 1e-2, 1e-1}) {
        const MeasurementWindow win{gt * 1e4};
        double peak = 0;
        for (double w : spectra::linear_grid(0.9, 1.1, 2001)) peak = std::max(peak, nonstationary_noise(init, win, w).rescaled(win.t_meas));
        b = b && peak > prev;
        prev = peak;
        peaks += (peaks.empty() ? "" : " < ") + num(peak);
    }
    // (c) cooled vs bare SNR at resonance.
    const ForcePulse f{1.0, 1e-4 * Q, 3e-4 * Q, 1.0};
    const SchemeParams cooled = make(Scheme::ColdDamping, 2e3, Q, 10, 1e5);
    bool c = true;
    double min_gain = INFINITY;
    for (double gt : {1e-4, 1e-3, 1e-2, 1e-1, 1.0}) {
        const MeasurementWindow w{gt * Q};
        const double ratio = nonstationary_snr(cooled, f, w, 1.0) / nonstationary_snr(bare, f, w, 1.0);
        min_gain = std::min(min_gain, ratio);
        c = c && ratio > 1;
    }
    const MeasurementWindow w10{10 * Q};
    const double at10 = nonstationary_snr(cooled, f, w10, 1.0) / nonstationary_snr(bare, f, w10, 1.0);
    c = c && std::abs(at10 - 1) < 0.05;
    return {a && b && c, std::string("(a) ") + (a ? "ok" : "red") + ": max rel dev " + num(dev) + " at omega=" +
                             num(at) + " (tol 0.05); (b) " + (b ? "ok" : "red") + ": peaks " + peaks + "; (c) " +
                             (c ? "ok" : "red") + ": cooled/bare min " + num(min_gain) + " for gTm<=1, " + num(at10) +
                             " at gTm=10"};
}

// 8. Cyclic-cooling improvement at resonance.
Outcome cyclic_factor() {
    using namespace nonstat;
    const double Q = 1e5;
    const ForcePulse f{1.0, 1e-4 * Q, 0.0, 1.0};
    const MeasurementWindow win{1e-3 * Q};
    const auto fb = cyclic_avg_snr(make(Scheme::ColdDamping, 2e3, Q, 10, 1e5), f, win, 1e-3 * win.t_meas, 1.0);
    const auto off = cyclic_avg_snr(make(Scheme::None, 0, Q, 10, 1e5), f, win, 0.0, 1.0);
    const double ratio = fb.value / off.value;
    return {std::abs(ratio / 16 - 1) <= 0.15, "ratio " + num(ratio) + " (target 16 +- 15%; grid refinement changes " +
                                                  num(std::max(fb.rel_change, off.rel_change)) + ")"};
}

// 9. Monte Carlo against the closed forms.
Outcome oracle_equivalence() {
    std::string detail;
    bool ok = true;
    for (Scheme sch : {Scheme::StochasticCooling, Scheme::ColdDamping}) {
        SchemeParams s = make(sch, 10, 50, 10, 1e3);
        // Cold damping with a band the integrator resolves at this timestep.
        if (sch == Scheme::ColdDamping) s.feedback = FeedbackBand{FeedbackBand::Kind::Wide, 0.0, 3.0};
        oracle::SimConfig c;
        c.dt = 0.02;
        c.burn_in_steps = 5000;
        c.n_steps = 10000;
        c.n_traj = 10000;
        c.seed = 9;
        c.noise_substeps = 2;
        const auto coarse = oracle::simulate(s, c);
        oracle::SimConfig h = c;
        h.dt /= 2;
        h.noise_substeps = 1;
        h.burn_in_steps *= 2;
        h.n_steps *= 2;
        const auto fine = oracle::simulate(s, h);
        const auto rep = oracle::compare(steady::steady_moments(s), coarse);
        double zmax = 0;
        for (const auto& e : rep.entries) zmax = std::max(zmax, std::abs(e.z));
        const double dq = std::abs(coarse.q2.value - fine.q2.value) / coarse.q2.error;
        const double dp = std::abs(coarse.p2.value - fine.p2.value) / coarse.p2.error;
        const double dx = std::abs(coarse.qp.value - fine.qp.value) / coarse.qp.error;
        const double dmax = std::max({dq, dp, dx});
        ok = ok && rep.pass && dmax < 1;
        detail += std::string(detail.empty() ? "" : "; ") + (sch == Scheme::StochasticCooling ? "sc" : "cd") +
                  " max |z| " + num(zmax) + ", halving shift " + num(dmax) + " SE";
    }
    return {ok, detail + " (tol 3 and 1)"};
}

// 10. Exact Brownian term.
Outcome brownian() {
    SchemeParams s = make(Scheme::None, 0, 1e5, 1, 1e5);
    s.cutoff_reservoir = 1e3;
    const double classical = steady::steady_moments(s).q2 - s.zeta / 8;
    const double a = rel(steady::brownian_exact(s).q2, classical);
    // Log correction in 1 << theta << varpi.
    SchemeParams t = make(Scheme::None, 0, 10, 1, 1e3);
    t.cutoff_reservoir = 1e8;
    const double gm = t.gamma();
    const double excess = steady::brownian_exact(t).p2 - (0.5 * t.theta - gm * t.theta / (kPi * t.cutoff_reservoir));
    const double printed = gm / kPi * std::log(t.cutoff_reservoir / (2 * kPi * t.theta));
    const double b = excess / printed;
    const bool ok = a < 1e-3 && excess > 0 && std::abs(b - 1) <= 0.2;
    return {ok, "(a) rel dev " + num(a) + " (tol 1e-3); (b) excess/[(gamma/pi) ln(varpi/2 pi theta)] = " + num(b) +
                    " (tol 1 +- 0.2)"};
}

std::string capture(const std::string& cmd, int& code) {
    std::string out;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) {
        code = -1;
        return out;
    }
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
    const int st = pclose(p);
    code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return out;
}

// 11. Byte-identical CLI reruns.
Outcome determinism() {
    const std::string cli = OPTOMECH_CLI_PATH;
    std::size_t same = 0, total = 0;
    for (const std::string args :
         {"steady --scheme sc --g 1e3 --Q 1e5 --zeta 10 --theta 1e5 --format json",
          "spectrum --scheme cd --g 1e3 --Q 1e4 --set n_omega=200",
          "snr-nonstationary --scheme cd --g 2e3 --Q 1e5 --Tm 1e-3 --set force=pulse --set n_omega=50",
          "montecarlo --scheme sc --g 10 --Q 50 --seed 11 --set n_traj=20 --set n_steps=5000",
          "montecarlo --scheme cd --g 10 --Q 50 --seed 11 --set n_traj=20 --set n_steps=5000 --format json"}) {
        int c1 = 0, c2 = 0;
        const std::string a = capture(cli + " " + args + " 2>/dev/null", c1);
        const std::string b = capture(cli + " " + args + " 2>/dev/null", c2);
        same += c1 == 0 && c2 == 0 && !a.empty() && a == b;
        ++total;
    }
    return {same == total, std::to_string(same) + "/" + std::to_string(total) + " commands byte-identical"};
}

}  // namespace

int main() {
    run("1", "ground-state cooling limit", ground_state);
    run("2", "optimal input power", optimal_power);
    run("3", "squeezing threshold", squeezing);
    run("4", "spectral consistency", spectral_consistency);
    run("5", "scheme equivalence", equivalence);
    run("6", "stationary SNR ordering", snr_ordering);
    run("7", "nonstationary limits", nonstationary_limits);
    run("8", "cyclic-cooling factor", cyclic_factor);
    run("9", "Monte Carlo oracle", oracle_equivalence);
    run("10", "exact vs classical Brownian term", brownian);
    run("11", "CLI determinism", determinism);
    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
