#include "optomech/figures.hpp"

#include "optomech/nonstat.hpp"
#include "optomech/steady.hpp"

#include <cmath>
#include <cstdio>

namespace optomech::figures {

namespace {

using spectra::SeriesKind;

std::string tag(const char* stem, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%.0e", stem, v);
    return buf;
}

SchemeParams params(Scheme scheme, double g, double quality, double zeta) {
    SchemeParams s;
    s.scheme = scheme;
    s.g = g;
    s.quality = quality;
    s.zeta = zeta;
    s.theta = 1e5;
    s.eta = 0.8;
    return s;
}

Curve curve(std::string name, std::string abscissa, const std::vector<double>& x, SeriesKind kind,
            std::string provenance, const std::function<double(double)>& f) {
    return {std::move(name), std::move(abscissa), spectra::tabulate(x, kind, std::move(provenance), f)};
}

double sc_zeta_opt(double g, double quality) {
    SchemeParams s = params(Scheme::StochasticCooling, g, quality, 1.0);
    return steady::optimal_input_power(s).zeta_opt;
}

std::vector<Curve> energy_vs_zeta(Scheme scheme, const std::vector<std::pair<double, double>>& gq,
                                  const char* stem, bool by_quality) {
    double lo = INFINITY, hi = 0;
    for (auto [g, q] : gq) {
        const double z = scheme == Scheme::ColdDamping ? g / std::sqrt(0.8) : sc_zeta_opt(g, q);
        lo = std::min(lo, z);
        hi = std::max(hi, z);
    }
    const std::vector<double> grid = zeta_grid(lo, hi);
    std::vector<Curve> out;
    for (auto [g, q] : gq) {
        const SchemeParams s = params(scheme, g, q, 1.0);
        out.push_back(curve(tag(stem, by_quality ? q : g), "zeta", grid, SeriesKind::Energy,
                            scheme == Scheme::ColdDamping ? "energy_cd" : "energy_sc",
                            [s](double z) { return steady::steady_energy(s.with_zeta(z)); }));
    }
    return out;
}

// Nonstationary noise rescaled to a position spectrum, cold-damping initial state.
Curve nonstat_noise_curve(std::string name, double g, double gamma_tm) {
    const SchemeParams s = params(Scheme::ColdDamping, g, 1e4, 10.0);
    const nonstat::MeasurementWindow win{gamma_tm * s.quality};
    return curve(std::move(name), "omega", spectra::linear_grid(0.0, 2.0, 401), SeriesKind::PositionNoise,
                 "nonstationary_noise_cd", [s, win](double w) {
                     return nonstat::nonstationary_noise(s, win, w).rescaled(win.t_meas);
                 });
}

// Common setting of the nonstationary SNR figures.
constexpr double kQ = 1e5;
constexpr double kGain = 2e3;

nonstat::ForcePulse pulse() { return {1.0, 1e-4 * kQ, 3e-4 * kQ, 1.0}; }

}  // namespace

std::vector<double> zeta_grid(double min_opt, double max_opt) {
    const double lo = std::pow(10.0, std::floor(std::log10(min_opt)) - 2.0);
    const double hi = std::pow(10.0, std::ceil(std::log10(max_opt)) + 2.0);
    return spectra::log_grid(lo, hi, 200);
}

std::vector<Curve> figure(int id) {
    switch (id) {
        case 2:
            return energy_vs_zeta(Scheme::StochasticCooling, {{10, 1e7}, {1e3, 1e7}, {1e5, 1e7}, {1e7, 1e7}},
                                  "fig2_g1_", false);
        case 3:
            return energy_vs_zeta(Scheme::StochasticCooling, {{1e7, 1e3}, {1e7, 1e5}, {1e7, 1e7}}, "fig3_Q_", true);
        case 4: {
            const double lo = steady::min_position_variance(1e7, 1e4, 1e5, 0.8).zeta_opt;
            const double hi = steady::min_position_variance(1e9, 1e4, 1e5, 0.8).zeta_opt;
            const std::vector<double> grid = zeta_grid(lo, hi);
            std::vector<Curve> out;
            for (double g : {1e7, 1e9}) {
                const SchemeParams s = params(Scheme::StochasticCooling, g, 1e4, 1.0);
                out.push_back(curve(tag("fig4_g1_", g), "zeta", grid, SeriesKind::Variance, "q2_sc",
                                    [s](double z) { return steady::steady_moments(s.with_zeta(z)).q2; }));
            }
            out.push_back(curve("fig4_sql", "zeta", grid, SeriesKind::Variance, "standard_quantum_limit",
                                [](double) { return 0.25; }));
            return out;
        }
        case 5: {
            std::vector<Curve> out = energy_vs_zeta(
                Scheme::ColdDamping, {{10, 1e5}, {1e3, 1e5}, {1e5, 1e5}, {1e7, 1e5}}, "fig5_energy_g2_", false);
            const std::vector<double> grid = spectra::default_snr_grid();
            for (double g : {0.0, 1e4, 1e5}) {
                const SchemeParams s = params(g == 0 ? Scheme::None : Scheme::ColdDamping, g, kQ, 10.0);
                out.push_back(curve(g == 0 ? std::string("fig5_snr_g0") : tag("fig5_snr_g", g), "omega", grid,
                                    SeriesKind::SNR, "snr_stationary",
                                    [s](double w) { return spectra::stationary_snr(s, 1.0, w, 10.0 * s.quality); }));
            }
            return out;
        }
        case 6: {
            std::vector<Curve> out;
            for (double gt : {1e-4, 1e-3, 1e-2, 1e-1}) out.push_back(nonstat_noise_curve(tag("fig6_gTm", gt), 1e3, gt));
            return out;
        }
        case 7: {
            std::vector<Curve> out;
            for (double gt : {1e-3, 1e-1}) {
                for (double g : {1.0, 10.0, 1e2, 1e3}) {
                    out.push_back(nonstat_noise_curve(tag(gt < 1e-2 ? "fig7a_g2_" : "fig7b_g2_", g), g, gt));
                }
            }
            return out;
        }
        case 8: {
            const std::vector<double> grid = spectra::linear_grid(0.5, 1.5, 401);
            const nonstat::ForcePulse f = pulse();
            std::vector<Curve> out;
            struct Case { const char* name; double g; double gamma_tm; };
            for (const Case c : {Case{"fig8_cooled", kGain, 1e-3}, Case{"fig8_uncooled", 0.0, 1e-3},
                                 Case{"fig8_stationary", 0.0, 10.0}}) {
                const SchemeParams s = params(c.g == 0 ? Scheme::None : Scheme::ColdDamping, c.g, kQ, 10.0);
                const nonstat::MeasurementWindow win{c.gamma_tm * kQ};
                out.push_back(curve(c.name, "omega", grid, SeriesKind::SNR, "snr_nonstationary",
                                    [s, f, win](double w) { return nonstat::nonstationary_snr(s, f, win, w); }));
            }
            return out;
        }
        case 9: {
            const std::vector<double> grid = spectra::log_grid(1e-4, 10.0, 200);
            const nonstat::ForcePulse f = pulse();
            std::vector<Curve> out;
            for (double g : {kGain, 0.0}) {
                const SchemeParams s = params(g == 0 ? Scheme::None : Scheme::ColdDamping, g, kQ, 10.0);
                out.push_back(curve(g == 0 ? "fig9_uncooled" : "fig9_cooled", "gamma_Tm", grid, SeriesKind::SNR,
                                    "snr_nonstationary_resonance", [s, f](double gt) {
                                        return nonstat::nonstationary_snr(s, f, {gt * kQ}, 1.0);
                                    }));
            }
            return out;
        }
        case 10: {
            const std::vector<double> grid = spectra::linear_grid(0.8, 1.2, 201);
            const nonstat::ForcePulse f = pulse();
            const nonstat::MeasurementWindow win{1e-3 * kQ};
            std::vector<Curve> out;
            for (double g : {kGain, 0.0}) {
                const SchemeParams s = params(g == 0 ? Scheme::None : Scheme::ColdDamping, g, kQ, 10.0);
                const double t_cool = g == 0 ? 0.0 : 1e-3 * win.t_meas;
                out.push_back(curve(g == 0 ? "fig10_no_feedback" : "fig10_cyclic", "omega", grid, SeriesKind::SNR,
                                    "snr_cyclic_average", [s, f, win, t_cool](double w) {
                                        return nonstat::cyclic_avg_snr(s, f, win, t_cool, w).value;
                                    }));
            }
            return out;
        }
        default:
            throw InvalidParameter("figure id must lie in 2..10");
    }
}

}  // namespace optomech::figures
