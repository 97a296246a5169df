#include "optomech/io.hpp"

#include "optomech/figures.hpp"
#include "optomech/oracle.hpp"
#include "optomech/spectra.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

namespace optomech::io {

namespace {

using json = nlohmann::ordered_json;

const std::set<std::string> kPhysicalKeys = {
    "mass", "omega_m", "gamma_m", "cavity_length", "gamma_c", "laser_power", "laser_omega0",
    "cavity_omega_c", "efficiency", "feedback_gain_raw", "reservoir_cutoff", "feedback_bandwidth",
    "temperature", "beta"};

const std::set<std::string> kSweepVariables = {"g", "zeta", "Q", "quality", "theta", "eta",
                                               "Tm", "Tcool", "omega", "sigma", "t1"};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    double x = 0;
    const char* end = v.data() + v.size();
    auto [p, ec] = std::from_chars(v.data(), end, x);
    if (ec != std::errc() || p != end || !std::isfinite(x)) {
        throw InvalidParameter("key '" + key + "': '" + v + "' is not a finite number");
    }
    return x;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
    std::uint64_t x = 0;
    const char* end = v.data() + v.size();
    auto [p, ec] = std::from_chars(v.data(), end, x);
    if (ec != std::errc() || p != end) {
        // Accept integral values written in floating notation, e.g. 1e4.
        const double d = to_double(key, v);
        if (d < 0 || d != std::floor(d) || d > 1.8e19) throw InvalidParameter("key '" + key + "' must be a non-negative integer");
        return std::uint64_t(d);
    }
    return x;
}

bool choose(const std::string& key, const std::string& v, const char* yes, const char* no) {
    if (v == yes) return true;
    if (v == no) return false;
    throw InvalidParameter("key '" + key + "' must be '" + yes + "' or '" + no + "'");
}

void set_variable(RunConfig& c, const std::string& var, double x) {
    if (var == "g") c.params.g = x;
    else if (var == "zeta") c.params.zeta = x;
    else if (var == "Q" || var == "quality") c.params.quality = x;
    else if (var == "theta") c.params.theta = x;
    else if (var == "eta") c.params.eta = x;
    else if (var == "Tm") c.gamma_tm = x;
    else if (var == "Tcool") c.gamma_tcool = x;
    else if (var == "omega") c.omega = x;
    else if (var == "sigma") c.gamma_sigma = x;
    else if (var == "t1") c.gamma_t1 = x;
    else throw InvalidParameter("unknown sweep variable '" + var + "'");
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::vector<double> sweep_grid(const Sweep& s) {
    return s.log ? spectra::log_grid(s.lo, s.hi, s.n) : spectra::linear_grid(s.lo, s.hi, s.n);
}

json moments_json(const steady::MomentSet& m) {
    json j;
    j["q2"] = m.q2;
    j["p2"] = m.p2;
    j["qp"] = m.qp;
    j["energy_units"] = m.energy_units;
    j["thermal_model"] = std::string(steady::to_string(m.thermal_model));
    j["squeezed"] = m.q2 < 0.25;
    j["contractive"] = m.qp < 0;
    j["thermal_like"] = std::abs(m.q2 - m.p2) / m.q2 < 1e-3 && std::abs(m.qp) < 1e-3 * m.q2;
    j["warnings"] = m.warnings;
    return j;
}

void write_series(std::ostream& os, const spectra::SpectrumSeries& s, const std::string& abscissa, Format f) {
    if (f == Format::Csv) {
        s.write_csv(os, abscissa);
        return;
    }
    json j;
    j["abscissa"] = abscissa;
    j["kind"] = std::string(spectra::to_string(s.kind));
    j["provenance"] = s.provenance;
    j["x"] = s.omegas;
    j["values"] = s.values;
    os << j.dump(2) << "\n";
}

void run_steady(const RunConfig& cfg, std::ostream& os, std::ostream& err) {
    if (!cfg.sweep) {
        const steady::MomentSet m = steady::steady_moments(cfg.params, cfg.thermal);
        for (const auto& w : m.warnings) err << "warning: " << w << "\n";
        if (cfg.format == Format::Json) {
            os << moments_json(m).dump(2) << "\n";
            return;
        }
        const json j = moments_json(m);
        os << "quantity,value\n";
        os << "q2," << fmt(m.q2) << "\np2," << fmt(m.p2) << "\nqp," << fmt(m.qp) << "\nenergy_units,"
           << fmt(m.energy_units) << "\n";
        for (const char* k : {"squeezed", "contractive", "thermal_like"}) os << k << "," << (j[k].get<bool>() ? 1 : 0) << "\n";
        return;
    }
    const Sweep& sw = *cfg.sweep;
    json rows = json::array();
    if (cfg.format == Format::Csv) os << sw.variable << ",q2,p2,qp,energy_units\n";
    for (double x : sweep_grid(sw)) {
        RunConfig c = cfg;
        set_variable(c, sw.variable, x);
        const steady::MomentSet m = steady::steady_moments(c.params, c.thermal);
        if (cfg.format == Format::Csv) {
            os << fmt(x) << "," << fmt(m.q2) << "," << fmt(m.p2) << "," << fmt(m.qp) << "," << fmt(m.energy_units) << "\n";
        } else {
            json j = moments_json(m);
            j[sw.variable] = x;
            rows.push_back(j);
        }
    }
    if (cfg.format == Format::Json) os << rows.dump(2) << "\n";
}

// Value of a frequency-resolved subcommand at one configuration and frequency.
std::function<double(const RunConfig&, double)> evaluator(const RunConfig& cfg, spectra::SeriesKind& kind,
                                                          std::string& provenance) {
    using K = spectra::SeriesKind;
    const auto thermal = cfg.thermal == steady::ThermalModel::ExactCoth ? spectra::ThermalSpectrum::Coth
                                                                        : spectra::ThermalSpectrum::Classical;
    switch (cfg.subcommand) {
        case Subcommand::Spectrum:
            kind = cfg.detected ? K::DetectedNoise : K::PositionNoise;
            provenance = cfg.detected ? "detected_noise" : "position_noise";
            if (cfg.detected) {
                return [thermal](const RunConfig& c, double w) { return spectra::detected_noise_spectrum(c.params, w, thermal); };
            }
            return [thermal](const RunConfig& c, double w) { return spectra::position_noise_spectrum(c.params, w, thermal); };
        case Subcommand::SnrStationary:
            kind = K::SNR;
            provenance = "snr_stationary";
            return [thermal](const RunConfig& c, double w) {
                const double f = c.flat_force ? std::abs(c.f0) : c.force().transform_abs(w);
                return spectra::stationary_snr(c.params, f, w, c.window().t_meas, thermal);
            };
        case Subcommand::SnrNonstationary:
            kind = K::SNR;
            provenance = "snr_nonstationary";
            return [](const RunConfig& c, double w) { return nonstat::nonstationary_snr(c.params, c.force(), c.window(), w); };
        case Subcommand::Cyclic:
            kind = K::SNR;
            provenance = "snr_cyclic_average";
            return [](const RunConfig& c, double w) {
                return nonstat::cyclic_avg_snr(c.params, c.force(), c.window(), c.gamma_tcool * c.params.quality, w).value;
            };
        default:
            throw InvalidParameter("subcommand has no frequency evaluator");
    }
}

void run_series(const RunConfig& cfg, std::ostream& os) {
    spectra::SeriesKind kind;
    std::string provenance;
    const auto eval = evaluator(cfg, kind, provenance);
    if (cfg.sweep) {
        const Sweep& sw = *cfg.sweep;
        const double w = cfg.omega.value_or(1.0);
        const auto s = spectra::tabulate(sweep_grid(sw), kind, provenance, [&](double x) {
            RunConfig c = cfg;
            set_variable(c, sw.variable, x);
            c.params.validate();
            return eval(c, w);
        });
        write_series(os, s, sw.variable, cfg.format);
        return;
    }
    std::vector<double> grid;
    if (cfg.omega) {
        grid = {*cfg.omega};
    } else {
        grid = cfg.log_omega ? spectra::log_grid(cfg.omega_min, cfg.omega_max, cfg.n_omega)
                             : spectra::linear_grid(cfg.omega_min, cfg.omega_max, cfg.n_omega);
    }
    const auto s = spectra::tabulate(grid, kind, provenance, [&](double w) { return eval(cfg, w); });
    write_series(os, s, "omega", cfg.format);
}

oracle::SimConfig sim_config(const RunConfig& cfg) {
    oracle::SimConfig sc;
    const double rate = cfg.params.damping();
    sc.dt = cfg.dt.value_or(std::min(1.0 / 50.0, 1.0 / (50.0 * rate)));
    sc.burn_in_steps = cfg.burn_in.value_or(std::uint64_t(std::ceil(10.0 / (rate * sc.dt))));
    sc.n_steps = cfg.n_steps.value_or(20000);
    sc.n_traj = cfg.n_traj;
    sc.seed = cfg.seed;
    return sc;
}

void run_montecarlo(const RunConfig& cfg, std::ostream& os) {
    if (cfg.sweep) throw InvalidParameter("montecarlo does not support sweeps");
    std::optional<nonstat::ForcePulse> force;
    if (!cfg.flat_force) force = cfg.force();
    const oracle::EnsembleStats st = oracle::simulate(cfg.params, sim_config(cfg), force);
    if (cfg.format == Format::Json) {
        os << st.to_json() << "\n";
        return;
    }
    os << "quantity,value,error\n";
    os << "q2," << fmt(st.q2.value) << "," << fmt(st.q2.error) << "\n";
    os << "p2," << fmt(st.p2.value) << "," << fmt(st.p2.error) << "\n";
    os << "qp," << fmt(st.qp.value) << "," << fmt(st.qp.error) << "\n";
}

void run_figure(const RunConfig& cfg) {
    const std::filesystem::path dir = cfg.out.empty() ? std::filesystem::path(".") : std::filesystem::path(cfg.out);
    std::filesystem::create_directories(dir);
    for (const auto& c : figures::figure(cfg.figure)) {
        const auto path = dir / (c.name + (cfg.format == Format::Csv ? ".csv" : ".json"));
        std::ofstream f(path, std::ios::binary);
        if (!f) throw InvalidParameter("cannot open output file " + path.string());
        write_series(f, c.series, c.abscissa, cfg.format);
    }
}

}  // namespace

std::string_view to_string(Subcommand c) {
    switch (c) {
        case Subcommand::Steady: return "steady";
        case Subcommand::Spectrum: return "spectrum";
        case Subcommand::SnrStationary: return "snr-stationary";
        case Subcommand::SnrNonstationary: return "snr-nonstationary";
        case Subcommand::Cyclic: return "cyclic";
        case Subcommand::MonteCarlo: return "montecarlo";
        case Subcommand::Figure: return "figure";
    }
    return "steady";
}

Subcommand subcommand_from_string(std::string_view name) {
    for (Subcommand c : {Subcommand::Steady, Subcommand::Spectrum, Subcommand::SnrStationary, Subcommand::SnrNonstationary,
                         Subcommand::Cyclic, Subcommand::MonteCarlo, Subcommand::Figure}) {
        if (to_string(c) == name) return c;
    }
    throw InvalidParameter("unknown subcommand '" + std::string(name) + "'");
}

SchemeParams default_params() {
    SchemeParams s;
    s.quality = 1e5;
    s.zeta = 10.0;
    s.theta = 1e5;
    s.eta = 0.8;
    return s;
}

nonstat::ForcePulse RunConfig::force() const {
    const double q = params.quality;
    return {f0, gamma_sigma * q, gamma_t1 * q, omega_f};
}

nonstat::MeasurementWindow RunConfig::window() const { return {gamma_tm * params.quality}; }

void RunConfig::validate() const {
    params.validate();
    if (!(gamma_tm > 0)) throw InvalidParameter("Tm must be positive");
    if (gamma_tcool < 0) throw InvalidParameter("Tcool must be non-negative");
    if (!(gamma_sigma > 0)) throw InvalidParameter("sigma must be positive");
    if (n_omega < 2) throw InvalidParameter("n_omega must be at least 2");
    if (!(omega_max > omega_min) || omega_min < 0 || (log_omega && !(omega_min > 0))) {
        throw InvalidParameter("invalid frequency range");
    }
    if (n_traj < 2) throw InvalidParameter("n_traj must be at least 2");
    if (subcommand == Subcommand::Figure && (figure < 2 || figure > 10)) throw InvalidParameter("figure id must lie in 2..10");
    if (sweep) {
        if (!kSweepVariables.count(sweep->variable)) throw InvalidParameter("unknown sweep variable '" + sweep->variable + "'");
        if (sweep->n < 2 || !(sweep->hi > sweep->lo) || (sweep->log && !(sweep->lo > 0))) {
            throw InvalidParameter("invalid sweep range");
        }
    }
}

std::vector<std::pair<std::string, std::string>> parse_key_values(std::istream& in) {
    std::vector<std::pair<std::string, std::string>> kv;
    std::set<std::string> seen;
    std::string line;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InvalidParameter("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) throw InvalidParameter("line " + std::to_string(lineno) + ": empty key or value");
        if (!seen.insert(key).second) throw InvalidParameter("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        kv.emplace_back(std::move(key), std::move(value));
    }
    return kv;
}

void apply(RunConfig& c, const std::string& key, const std::string& v) {
    auto num = [&] { return to_double(key, v); };
    if (key == "scheme") c.params.scheme = scheme_from_string(v);
    else if (key == "g") c.params.g = num();
    else if (key == "quality" || key == "Q") c.params.quality = num();
    else if (key == "zeta") c.params.zeta = num();
    else if (key == "theta") c.params.theta = num();
    else if (key == "eta") c.params.eta = num();
    else if (key == "cutoff_reservoir") c.params.cutoff_reservoir = num();
    else if (key == "cutoff_feedback") {
        if (v == "narrow") {
            c.params.feedback.reset();
        } else if (v == "wide") {
            c.params.feedback = FeedbackBand{FeedbackBand::Kind::Wide, 0.0, c.params.cutoff_reservoir};
        } else {
            const double half = 0.5 * num();
            c.params.feedback = FeedbackBand{FeedbackBand::Kind::Narrow, std::max(0.0, 1.0 - half), 1.0 + half};
        }
    } else if (key == "feedback_hi") {
        FeedbackBand b = c.params.feedback_band();
        b.hi = num();
        c.params.feedback = b;
    } else if (key == "feedback_lo") {
        FeedbackBand b = c.params.feedback_band();
        b.lo = num();
        c.params.feedback = b;
    } else if (key == "thermal_model") c.thermal = steady::thermal_model_from_string(v);
    else if (key == "Tm") c.gamma_tm = num();
    else if (key == "Tcool") c.gamma_tcool = num();
    else if (key == "sigma") c.gamma_sigma = num();
    else if (key == "t1") c.gamma_t1 = num();
    else if (key == "omega_f") c.omega_f = num();
    else if (key == "f0") c.f0 = num();
    else if (key == "force") c.flat_force = choose(key, v, "flat", "pulse");
    else if (key == "spectrum") c.detected = choose(key, v, "detected", "position");
    else if (key == "omega") c.omega = num();
    else if (key == "omega_min") c.omega_min = num();
    else if (key == "omega_max") c.omega_max = num();
    else if (key == "n_omega") c.n_omega = to_uint(key, v);
    else if (key == "omega_scale") c.log_omega = choose(key, v, "log", "linear");
    else if (key == "sweep_var") {
        if (!c.sweep) c.sweep = Sweep{};
        c.sweep->variable = v;
    } else if (key == "sweep_lo" || key == "sweep_hi" || key == "sweep_n" || key == "sweep_scale") {
        if (!c.sweep) c.sweep = Sweep{};
        if (key == "sweep_lo") c.sweep->lo = num();
        else if (key == "sweep_hi") c.sweep->hi = num();
        else if (key == "sweep_n") c.sweep->n = to_uint(key, v);
        else c.sweep->log = choose(key, v, "log", "linear");
    } else if (key == "dt") c.dt = num();
    else if (key == "n_steps") c.n_steps = to_uint(key, v);
    else if (key == "burn_in") c.burn_in = to_uint(key, v);
    else if (key == "n_traj") c.n_traj = std::uint32_t(to_uint(key, v));
    else if (key == "seed") c.seed = to_uint(key, v);
    else if (key == "figure") c.figure = int(to_uint(key, v));
    else if (key == "format") c.format = choose(key, v, "csv", "json") ? Format::Csv : Format::Json;
    else if (key == "out") c.out = v;
    else if (key == "subcommand") c.subcommand = subcommand_from_string(v);
    else throw InvalidParameter("unknown configuration key '" + key + "'");
}

void apply(RunConfig& cfg, const std::vector<std::pair<std::string, std::string>>& kv,
           std::vector<std::string>* warnings) {
    PhysicalParams p;
    std::optional<double> beta;
    bool physical = false;
    std::vector<std::pair<std::string, std::string>> rest;
    for (const auto& [k, v] : kv) {
        if (!kPhysicalKeys.count(k)) {
            // Band keys depend on the reservoir cutoff, so they go last.
            rest.emplace_back(k, v);
            continue;
        }
        physical = true;
        const double x = to_double(k, v);
        if (k == "mass") p.mass = x;
        else if (k == "omega_m") p.omega_m = x;
        else if (k == "gamma_m") p.gamma_m = x;
        else if (k == "cavity_length") p.cavity_length = x;
        else if (k == "gamma_c") p.gamma_c = x;
        else if (k == "laser_power") p.laser_power = x;
        else if (k == "laser_omega0") p.laser_omega0 = x;
        else if (k == "cavity_omega_c") p.cavity_omega_c = x;
        else if (k == "efficiency") p.efficiency = x;
        else if (k == "feedback_gain_raw") p.feedback_gain_raw = x;
        else if (k == "reservoir_cutoff") p.reservoir_cutoff = x;
        else if (k == "feedback_bandwidth") p.feedback_bandwidth = x;
        else if (k == "temperature") p.temperature = x;
        else if (k == "beta") beta = x;
    }
    std::stable_partition(rest.begin(), rest.end(), [](const auto& e) {
        return e.first != "cutoff_feedback" && e.first != "feedback_lo" && e.first != "feedback_hi";
    });
    // The scheme is needed before converting lab units.
    for (const auto& [k, v] : rest) {
        if (k == "scheme") apply(cfg, k, v);
    }
    if (physical) {
        if (!beta) throw InvalidParameter("lab-unit parameters require 'beta'");
        ConversionResult r = to_dimensionless(p, cfg.params.scheme, *beta);
        cfg.params = r.params;
        if (warnings) warnings->insert(warnings->end(), r.warnings.begin(), r.warnings.end());
    }
    for (const auto& [k, v] : rest) {
        if (k != "scheme") apply(cfg, k, v);
    }
}

int run(const RunConfig& cfg, std::ostream& err) {
    try {
        cfg.validate();
        if (cfg.subcommand == Subcommand::Figure) {
            run_figure(cfg);
            return 0;
        }
        std::ostringstream buf;
        switch (cfg.subcommand) {
            case Subcommand::Steady: run_steady(cfg, buf, err); break;
            case Subcommand::MonteCarlo: run_montecarlo(cfg, buf); break;
            default: run_series(cfg, buf); break;
        }
        if (cfg.out.empty()) {
            std::cout << buf.str();
        } else {
            std::ofstream f(cfg.out, std::ios::binary);
            if (!f) throw InvalidParameter("cannot open output file " + cfg.out);
            f << buf.str();
        }
        return 0;
    } catch (const InvalidParameter& e) {
        err << "invalid configuration: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        err << "numerical failure in " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace optomech::io
