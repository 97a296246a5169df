// optomech-cli: steady moments, spectra, SNRs, Monte Carlo and figure tables.

#include "optomech/io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

struct Overrides {
    std::string config;
    std::string out;
    std::string format;
    std::string seed;
    std::string g, zeta, quality, theta, eta, tm, tcool, scheme;
    std::vector<std::string> sets;
};

void add_common(CLI::App* sub, Overrides& o) {
    sub->add_option("--config", o.config, "flat key = value parameter file");
    sub->add_option("--out", o.out, "output file (directory for figure)");
    sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", o.seed, "Monte Carlo seed (u64)");
    sub->add_option("--g", o.g, "feedback gain g1 or g2");
    sub->add_option("--zeta", o.zeta, "rescaled input power");
    sub->add_option("--Q", o.quality, "mechanical quality factor");
    sub->add_option("--theta", o.theta, "k_B T / hbar omega_m");
    sub->add_option("--eta", o.eta, "detection efficiency");
    sub->add_option("--Tm", o.tm, "gamma_m T_m");
    sub->add_option("--Tcool", o.tcool, "gamma_m T_cool");
    sub->add_option("--scheme", o.scheme, "sc, cd or none")->check(CLI::IsMember({"sc", "cd", "none"}));
    sub->add_option("--set", o.sets, "extra key=value override (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optomechanical feedback cooling: moments, spectra, SNR and Monte Carlo checks"};
    app.require_subcommand(1);
    Overrides o;
    int figure_id = 0;
    const char* names[] = {"steady", "spectrum", "snr-stationary", "snr-nonstationary", "cyclic", "montecarlo", "figure"};
    for (const char* name : names) {
        CLI::App* sub = app.add_subcommand(name);
        add_common(sub, o);
        if (std::string(name) == "figure") sub->add_option("id", figure_id, "figure number 2..10")->required();
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    namespace io = optomech::io;
    io::RunConfig cfg;
    try {
        cfg.subcommand = io::subcommand_from_string(app.get_subcommands().front()->get_name());
        if (!o.config.empty()) {
            std::ifstream in(o.config);
            if (!in) throw optomech::InvalidParameter("cannot read config file " + o.config);
            std::vector<std::string> warnings;
            io::apply(cfg, io::parse_key_values(in), &warnings);
            for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
        }
        const std::pair<const char*, const std::string*> flags[] = {
            {"scheme", &o.scheme}, {"g", &o.g},       {"zeta", &o.zeta}, {"Q", &o.quality}, {"theta", &o.theta},
            {"eta", &o.eta},       {"Tm", &o.tm},     {"Tcool", &o.tcool}, {"seed", &o.seed}, {"format", &o.format},
            {"out", &o.out}};
        for (const auto& [key, value] : flags) {
            if (!value->empty()) io::apply(cfg, key, *value);
        }
        for (const auto& s : o.sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw optomech::InvalidParameter("--set expects key=value");
            io::apply(cfg, s.substr(0, eq), s.substr(eq + 1));
        }
        if (cfg.subcommand == io::Subcommand::Figure) cfg.figure = figure_id;
    } catch (const std::exception& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return 1;
    }
    return io::run(cfg, std::cerr);
}
