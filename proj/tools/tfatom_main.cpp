// tfatom command line: tf-solve, phase-sweep, wkb-verify, spectrum, aufbau.
// Exit codes: 0 ok, 2 bad input, 3 numerical failure.
#include <CLI11.hpp>

#include <cstring>
#include <iostream>
#include <map>
#include <stdexcept>

#include "tfatom/commands.hpp"
#include "tfatom/errors.hpp"

namespace {

struct Flag {
    const char* name;
    const char* help;
};

const Flag kFlags[] = {
    {"mode", "subcommand variant"},
    {"tol", "solver tolerance"},
    {"grid-points", "points of the chi grid"},
    {"tau", "tau values, comma separated"},
    {"ell", "angular momenta, comma separated"},
    {"n-max", "largest sequence index"},
    {"lambda", "coupling values, comma separated"},
    {"mu", "energies, comma separated"},
    {"interval", "x_lo,x_hi"},
    {"window", "Bessel-argument window in units of l+1/2"},
    {"ell-max", "largest l for the counterexample"},
    {"jobs", "worker threads"},
    {"format", "csv or json"},
    {"out", "output path prefix (stdout if empty)"},
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Thomas-Fermi atom toolkit"};
    app.require_subcommand(1);
    std::string config_path;
    std::map<std::string, std::map<std::string, std::string>> values;
    std::vector<CLI::App*> subs;
    for (const auto& name : tfatom::subcommand_names()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "key=value or JSON config file");
        for (const auto& f : kFlags) sub->add_option(std::string("--") + f.name, values[name][f.name], f.help);
        subs.push_back(sub);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    try {
        CLI::App* sub = app.get_subcommands().front();
        tfatom::RunConfig cfg = tfatom::default_config(sub->get_name());
        if (!config_path.empty()) tfatom::load_config_file(cfg, config_path);
        for (const auto& f : kFlags)
            if (sub->count(std::string("--") + f.name) > 0) cfg.set(f.name, values[sub->get_name()][f.name]);
        auto res = tfatom::run_command(cfg);
        for (const auto& p : tfatom::write_outputs(cfg, res)) std::cerr << "wrote " << p << "\n";
        return 0;
    } catch (const tfatom::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::logic_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}
