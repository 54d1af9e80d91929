// Command-line runner: one subcommand per reproduced figure or number, plus repro-all.
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ionvac/errors.hpp"
#include "ionvac/experiments.hpp"
#include "ionvac/version.hpp"

namespace {

using ionvac::ConfigError;
using ionvac::ExperimentConfig;
using ionvac::Json;

struct Overrides {
    std::string config_path;
    int n_ions = 0;
    std::vector<int> probes;
    double duration = 0.0;
    std::string detuning_grid;
    int fock_dim = 0;
    double gauge_freq = 0.0;
    std::string sequence;
    int pairs = 0;
    int restarts = 0;
    std::uint64_t seed = 0;
    int threads = 0;
    int max_n = 0;
    std::vector<int> group_sizes;
    std::string time_slices;
    std::string ordering;
    std::string out;
    std::string format;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config_path, "JSON config file; flags override its values");
    cmd->add_option("--n-ions", o.n_ions, "number of ions");
    cmd->add_option("--probes", o.probes, "probe ion labels A B (1-based)")->expected(2);
    cmd->add_option("--duration", o.duration, "probe pulse duration T");
    cmd->add_option("--detuning-grid", o.detuning_grid, "start:stop:count or comma list");
    cmd->add_option("--fock-dim", o.fock_dim, "Fock levels per oscillator");
    cmd->add_option("--gauge-freq", o.gauge_freq, "frequency of the local number basis");
    cmd->add_option("--sequence", o.sequence, "pulse list, e.g. V:0.31,W:0.38");
    cmd->add_option("--pairs", o.pairs, "number of V/W pairs to optimise");
    cmd->add_option("--restarts", o.restarts, "optimiser restarts");
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
    cmd->add_option("--max-n", o.max_n, "largest chain for the entropy sweep");
    cmd->add_option("--group-sizes", o.group_sizes, "group sizes for the negativity sweep");
    cmd->add_option("--time-slices", o.time_slices, "start:stop:count or comma list");
    cmd->add_option("--ordering", o.ordering, "exchange amplitude: product or time_ordered");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--format", o.format, "csv or json");
}

ExperimentConfig build_config(CLI::App* cmd, const Overrides& o) {
    Json j = Json::object();
    if (!o.config_path.empty()) {
        std::ifstream f(o.config_path);
        if (!f) throw ConfigError("cannot read config file " + o.config_path, "config");
        try {
            j = Json::parse(f);
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError(std::string("config is not valid JSON: ") + e.what(), "config");
        }
        if (!j.is_object()) throw ConfigError("config must be a JSON object", "config");
    }
    auto given = [cmd](const char* flag) { return cmd->get_option(flag)->count() > 0; };
    if (given("--n-ions")) j["n_ions"] = o.n_ions;
    if (given("--probes")) j["probes"] = o.probes;
    if (given("--duration")) j["duration"] = o.duration;
    if (given("--detuning-grid")) j["detuning_grid"] = o.detuning_grid;
    if (given("--fock-dim")) j["fock_dim"] = o.fock_dim;
    if (given("--gauge-freq")) j["gauge_frequency"] = o.gauge_freq;
    if (given("--sequence")) j["sequence"] = o.sequence;
    if (given("--pairs")) j["pairs"] = o.pairs;
    if (given("--restarts")) j["restarts"] = o.restarts;
    if (given("--seed")) j["seed"] = o.seed;
    if (given("--threads")) j["threads"] = o.threads;
    if (given("--max-n")) j["max_n"] = o.max_n;
    if (given("--group-sizes")) j["group_sizes"] = o.group_sizes;
    if (given("--time-slices")) j["time_slices"] = o.time_slices;
    if (given("--ordering")) j["ordering"] = o.ordering;
    if (given("--out")) j["out"] = o.out;
    if (given("--format")) j["format"] = o.format;
    j["experiment"] = cmd->get_name();
    return ionvac::config_from_json(j);
}

int fail(const char* kind, const std::string& message, const std::string& field, int code) {
    Json err = {{"error", {{"type", kind}, {"message", message}}}};
    if (!field.empty()) err["error"]["field"] = field;
    std::cerr << err.dump() << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Vacuum entanglement in trapped-ion chains: figure reproductions"};
    app.set_version_flag("--version", ionvac::kVersion);
    app.require_subcommand(1);

    Overrides o;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"modes", "equilibrium positions and normal modes"},
        {"two-ion", "two-ion squeezing parameters lambda, e^-beta and entropy"},
        {"entropy", "half-chain entropy versus chain size"},
        {"negativity", "log-negativity between centred groups versus separation"},
        {"swap-eval", "run a pulse sequence and score the swapped qubit state"},
        {"swap-opt", "optimise V/W pulse strengths"},
        {"eta", "eta ratio versus detuning, full and truncated chain"},
        {"commutator", "displacement commutator profile from the centre ion"},
        {"propagate", "classical propagation of a kick at the centre ion"},
        {"repro-all", "every reproduction plus the acceptance manifest"},
    };
    for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), "", 2);
    }

    CLI::App* cmd = app.get_subcommands().front();
    try {
        const ExperimentConfig cfg = build_config(cmd, o);
        if (cmd->get_name() == "repro-all") {
            const Json manifest = ionvac::run_repro_all(cfg, &std::cerr);
            Json summary = {{"out", cfg.out_dir.generic_string()}, {"criteria", Json::array()}};
            for (const auto& c : manifest["criteria"]) summary["criteria"].push_back({{"id", c["id"]}, {"passed", c["passed"]}});
            std::cout << summary.dump(1) << "\n";
            return 0;
        }
        const ExperimentConfig resolved = ionvac::resolve(cfg);
        const ionvac::ExperimentOutput out = ionvac::run_experiment(resolved);
        Json files = Json::array();
        for (const auto& p : ionvac::write_outputs(out, resolved.out_dir)) files.push_back(p.generic_string());
        std::cout << Json{{"experiment", resolved.experiment}, {"summary", out.summary}, {"files", files}}.dump(1)
                  << "\n";
        return 0;
    } catch (const ConfigError& e) {
        return fail("config", e.what(), e.field(), 2);
    } catch (const ionvac::NumericalError& e) {
        return fail("numerical", e.what(), "", 3);
    } catch (const std::exception& e) {
        return fail("internal", e.what(), "", 3);
    }
}
