#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "optomech/response.hpp"
#include "optomech/spectra.hpp"
#include "optomech/steady.hpp"

#include <cmath>
#include <sstream>

using namespace optomech;
using namespace optomech::spectra;

namespace {

SchemeParams make(Scheme scheme, double g, double quality = 1e5, double zeta = 10, double theta = 1e5,
                  double eta = 0.8) {
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

}  // namespace

TEST_CASE("grids") {
    const auto g = log_grid(1e-3, 3, 400);
    REQUIRE(g.size() == 400);
    CHECK(g.front() == 1e-3);
    CHECK(g.back() == 3.0);
    CHECK(g[1] / g[0] == doctest::Approx(g[300] / g[299]));
    CHECK(default_snr_grid() == g);
    const auto l = linear_grid(0, 2, 5);
    CHECK(l == std::vector<double>{0, 0.5, 1, 1.5, 2});
    CHECK_THROWS_AS(log_grid(0, 1, 10), InvalidParameter);
    CHECK_THROWS_AS(linear_grid(1, 1, 10), InvalidParameter);
}

TEST_CASE("bare resonance") {
    const SchemeParams s = make(Scheme::None, 0, 1e4, 10, 1e5);
    CHECK(position_noise_spectrum(s, 1.0, ThermalSpectrum::Classical) ==
          doctest::Approx(1e4 * (2.5 + 1e5)).epsilon(1e-12));
}

TEST_CASE("thermal factor") {
    CHECK(thermal_factor(1.0, 1e5, ThermalSpectrum::Classical) == 1e5);
    CHECK(thermal_factor(1.0, 1e5, ThermalSpectrum::Coth) == doctest::Approx(1e5).epsilon(1e-9));
    CHECK(thermal_factor(4.0, 0.0, ThermalSpectrum::Coth) == 2.0);
    CHECK(thermal_factor(0.0, 3.0, ThermalSpectrum::Coth) == 3.0);
}

TEST_CASE("gate functions act on the position spectrum only") {
    SchemeParams s = make(Scheme::ColdDamping, 10, 1e3, 1, 10, 1.0);
    // Off-band the feedback noise is gated out of the position spectrum.
    const double w = 0.5;
    REQUIRE_FALSE(s.feedback_band().contains(w));
    const double gm = s.gamma();
    const double chi2 = response::chi_freq_abs2(s, w);
    CHECK(position_noise_spectrum(s, w, ThermalSpectrum::Classical) ==
          doctest::Approx(gm * chi2 * (0.25 + 10)).epsilon(1e-12));
    CHECK(detected_noise_spectrum(s, w, ThermalSpectrum::Classical) ==
          doctest::Approx(gm * chi2 * (0.25 + 100.0 / 4 * w * w + 10) + 1.0 / (4 * gm)).epsilon(1e-12));
    s.cutoff_reservoir = 0.4;
    CHECK(position_noise_spectrum(s, w, ThermalSpectrum::Classical) ==
          doctest::Approx(gm * chi2 * 0.25).epsilon(1e-12));
}

TEST_CASE("stochastic cooling and cold damping spectra coincide at large Q") {
    const SchemeParams sc = make(Scheme::StochasticCooling, 1e3, 1e4);
    const SchemeParams cd = make(Scheme::ColdDamping, 1e3, 1e4);
    double worst = 0;
    for (double w : linear_grid(0, 2, 2001)) {
        worst = std::max(worst, rel(position_noise_spectrum(sc, w), position_noise_spectrum(cd, w)));
    }
    CHECK(worst < 1e-3);
}

TEST_CASE("feedback suppresses and widens the resonance") {
    for (Scheme sch : {Scheme::StochasticCooling, Scheme::ColdDamping}) {
        double prev = INFINITY;
        for (double g : {0.0, 1.0, 10.0, 100.0, 1e3}) {
            const double v = position_noise_spectrum(make(sch, g), 1.0);
            CHECK(v < prev);
            prev = v;
        }
    }
}

TEST_CASE("peak position and height scaling") {
    const double Q = 1e3;
    std::vector<double> x, y;
    for (double g : {1.0, 3.0, 10.0, 30.0, 100.0}) {
        const SchemeParams s = make(Scheme::ColdDamping, g, Q, 10, 1e5);
        double best = -1, arg = 0;
        for (double w : linear_grid(1 - 5 / Q, 1 + 5 / Q, 200001)) {
            const double v = position_noise_spectrum(s, w, ThermalSpectrum::Classical);
            if (v > best) best = v, arg = w;
        }
        if (g <= 10) {
            CHECK(arg >= 1 - 1 / Q);
            CHECK(arg <= 1.0);
        }
        x.push_back(std::log(1 + g));
        y.push_back(std::log(best));
    }
    const double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) sx += x[i], sy += y[i], sxx += x[i] * x[i], sxy += x[i] * y[i];
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope == doctest::Approx(-2.0).epsilon(0.1));
}

TEST_CASE("detected spectrum limits") {
    SUBCASE("strong probe: back-action dominates") {
        const SchemeParams s = make(Scheme::None, 0, 1e3, 1e12, 0.0, 0.8);
        const double w = 0.9;
        const double ba = s.gamma() * response::chi_freq_abs2(s, w) * 0.25 * s.zeta;
        CHECK(rel(detected_noise_spectrum(s, w, ThermalSpectrum::Classical), ba) < 1e-6);
    }
    SUBCASE("weak probe: shot-noise floor") {
        const SchemeParams s = make(Scheme::None, 0, 1e3, 1e-12, 10.0, 0.8);
        const double floor = 1.0 / (4 * 0.8 * 1e-12 * 1e-3);
        CHECK(rel(detected_noise_spectrum(s, 0.9), floor) < 1e-6);
    }
}

TEST_CASE("frequency-wise optimal power") {
    SUBCASE("grid search and stationarity at resonance") {
        for (Scheme sch : {Scheme::None, Scheme::StochasticCooling, Scheme::ColdDamping}) {
            const SchemeParams s = make(sch, sch == Scheme::None ? 0 : 30, 1e4, 1, 1e3);
            for (double w : {0.3, 1.0, 1.7}) {
                const OptimalNoise o = optimal_power_at_frequency(s, w);
                const auto grid = log_grid(o.zeta_opt / 30, o.zeta_opt * 30, 3001);
                double best = INFINITY, arg = 0;
                for (double z : grid) {
                    const double v = detected_noise_spectrum(s.with_zeta(z), w);
                    if (v < best) best = v, arg = z;
                }
                CHECK(std::abs(std::log(arg / o.zeta_opt)) <= std::log(grid[1] / grid[0]));
                CHECK(rel(o.n_min, detected_noise_spectrum(s.with_zeta(o.zeta_opt), w)) < 1e-12);
                CHECK(o.n_min <= best * (1 + 1e-12));
                const double h = 1e-4;
                const double d = (detected_noise_spectrum(s.with_zeta(o.zeta_opt * (1 + h)), w) -
                                  detected_noise_spectrum(s.with_zeta(o.zeta_opt * (1 - h)), w)) /
                                 (2 * h);
                CHECK(std::abs(d) < 1e-6 * o.n_min);
            }
        }
    }
    SUBCASE("bare oscillator at resonance: zeta_opt = 1 / (sqrt(eta) gamma |chi|)") {
        const SchemeParams s = make(Scheme::None, 0, 1e4, 1, 1e3, 0.5);
        const double chi = std::sqrt(response::chi_freq_abs2(s, 1.0));
        CHECK(optimal_power_at_frequency(s, 1.0).zeta_opt ==
              doctest::Approx(1 / (std::sqrt(0.5) * s.gamma() * chi)).epsilon(1e-12));
    }
    SUBCASE("cold damping: minimum noise at resonance falls as 1/g") {
        // Thermal part ~ Q theta / g^2 is negligible once g >> theta.
        std::vector<double> ratios;
        for (double g : {1e7, 1e8, 1e9, 1e10}) {
            ratios.push_back(g * optimal_power_at_frequency(make(Scheme::ColdDamping, g), 1.0).n_min);
        }
        for (std::size_t i = 1; i < ratios.size(); ++i) CHECK(rel(ratios[i], ratios.back()) < 0.05);
    }
    SUBCASE("cold damping leaves the zero-frequency minimum unchanged") {
        const double n0 = optimal_power_at_frequency(make(Scheme::ColdDamping, 0), 0.0).n_min;
        for (double g : {1.0, 1e3, 1e6}) {
            CHECK(optimal_power_at_frequency(make(Scheme::ColdDamping, g), 0.0).n_min == doctest::Approx(n0));
        }
    }
}

TEST_CASE("stationary SNR") {
    const double tm = 1e5;  // gamma T_m = 1
    CHECK(stationary_snr(make(Scheme::ColdDamping, 10), 0.0, 1.0, tm) == 0.0);
    CHECK_THROWS_AS(stationary_snr(make(Scheme::ColdDamping, 10), 1.0, 1.0, 0.0), InvalidParameter);

    SUBCASE("scales as |f| / sqrt(T_m)") {
        const SchemeParams s = make(Scheme::ColdDamping, 10);
        const double a = stationary_snr(s, 1.0, 0.8, tm);
        CHECK(stationary_snr(s, 3.0, 0.8, tm) == doctest::Approx(3 * a));
        CHECK(stationary_snr(s, 1.0, 0.8, 4 * tm) == doctest::Approx(a / 2));
    }
    SUBCASE("more gain never helps a stationary measurement") {
        for (Scheme sch : {Scheme::StochasticCooling, Scheme::ColdDamping}) {
            for (double w : default_snr_grid()) {
                double prev = INFINITY;
                for (double g : {0.0, 10.0, 1e3, 1e4, 1e5}) {
                    const double r = stationary_snr(make(sch, g), 1.0, w, tm);
                    CHECK(r < prev);
                    prev = r;
                }
            }
        }
    }
    SUBCASE("stationarity warning") {
        CHECK(stationarity_warning(make(Scheme::None, 0), 10.0 * 1e5).has_value() == false);
        CHECK(stationarity_warning(make(Scheme::None, 0), 1e-3 * 1e5).has_value());
    }
}

TEST_CASE("series validation and CSV output") {
    SpectrumSeries s = tabulate({0.5, 1.0}, SeriesKind::DetectedNoise, "detected", [](double w) { return 2 * w; });
    CHECK_NOTHROW(s.validate());
    std::ostringstream os;
    s.write_csv(os);
    CHECK(os.str() == "omega,value,kind,provenance\n0.5,1,DetectedNoise,detected\n1,2,DetectedNoise,detected\n");
    s.values[0] = -1;
    CHECK_THROWS_AS(s.validate(), InvalidParameter);
    s.kind = SeriesKind::Signal;
    CHECK_NOTHROW(s.validate());
    s.omegas = {1.0, 1.0};
    CHECK_THROWS_AS(s.validate(), InvalidParameter);
    const SpectrumSeries third = tabulate({1.0 / 3}, SeriesKind::SNR, "x", [](double) { return 2.0 / 3; });
    std::ostringstream o3;
    third.write_csv(o3);
    CHECK(o3.str() == "omega,value,kind,provenance\n0.333333333333,0.666666666667,SNR,x\n");
}
