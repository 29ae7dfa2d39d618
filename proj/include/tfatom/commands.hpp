// Experiment drivers behind the tfatom command line.  Each command maps a
// RunConfig to a table (the CSV body) and a JSON summary; no timing or host
// information goes into either, so reruns are byte-identical.
#pragma once

#include <json.hpp>
#include <string>
#include <variant>
#include <vector>

namespace tfatom {

struct RunConfig {
    std::string subcommand;
    std::string mode;            // subcommand-specific variant
    double tol = 1e-8;
    std::size_t grid_points = 4001;
    std::vector<double> tau;
    std::vector<int> ell;
    long long n_max = 0;
    std::vector<double> lambda;
    std::vector<double> mu;
    std::vector<double> interval;  // wkb-verify: {x_lo, x_hi}
    std::vector<double> window;    // phase-sweep: Bessel-argument window in units of l + 1/2
    int ell_max = 6;
    int jobs = 1;
    std::string format = "csv";
    std::string out;

    nlohmann::json to_json() const;
    // Keys as on the command line without dashes; lists comma separated.
    void set(const std::string& key, const std::string& value);
    void apply_json(const nlohmann::json& j);
    void validate() const;  // throws DomainError
};

RunConfig default_config(const std::string& subcommand);
// key=value text (with # comments) or a JSON file; a JSON document with a
// "config" member (as written by write_outputs) is accepted too.
void load_config_file(RunConfig& cfg, const std::string& path);

using Cell = std::variant<long long, double, std::string>;

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;

    std::string to_csv() const;  // floats as %.17g
    nlohmann::json to_json() const;
};

struct CommandResult {
    Table table;
    nlohmann::json summary;
};

CommandResult run_command(const RunConfig& cfg);

CommandResult cmd_tf_solve(const RunConfig& cfg);
CommandResult cmd_phase_sweep(const RunConfig& cfg);
CommandResult cmd_wkb_verify(const RunConfig& cfg);
CommandResult cmd_spectrum(const RunConfig& cfg);
CommandResult cmd_aufbau(const RunConfig& cfg);

// Writes <out>.csv and <out>.json (format csv) or <out>.json alone (format json);
// an empty out prints to stdout.  Returns the paths written.
std::vector<std::string> write_outputs(const RunConfig& cfg, const CommandResult& res);

const std::vector<std::string>& subcommand_names();

}  // namespace tfatom
