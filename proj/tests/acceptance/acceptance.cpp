// Prints one verdict line per acceptance criterion; exits nonzero if any fails
// or overruns its time budget. `--criterion N` runs a single one.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ionvac/acceptance.hpp"

#ifndef IONVAC_CLI_PATH
#error "IONVAC_CLI_PATH must point at the ionvac executable"
#endif

namespace fs = std::filesystem;
using ionvac::CriterionOutcome;
using ionvac::Json;

namespace {

std::map<std::string, std::string> snapshot(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        files[fs::relative(entry.path(), root).generic_string()] = ss.str();
    }
    return files;
}

CriterionOutcome determinism(std::uint64_t seed) {
    CriterionOutcome o;
    const fs::path base = fs::temp_directory_path() / "ionvac_acceptance_repro";
    fs::remove_all(base);
    std::map<std::string, std::string> runs[2];
    int codes[2] = {0, 0};
    for (int k = 0; k < 2; ++k) {
        const fs::path dir = base / ("run" + std::to_string(k));
        // different thread counts must not change a byte
        const std::string cmd = std::string("\"") + IONVAC_CLI_PATH + "\" repro-all --seed " + std::to_string(seed) +
                                " --threads " + std::to_string(k + 1) + " --out \"" + dir.string() + "\" > \"" +
                                (base / ("log" + std::to_string(k))).string() + "\" 2>&1";
        fs::create_directories(base);
        codes[k] = std::system(cmd.c_str());
        if (fs::exists(dir)) runs[k] = snapshot(dir);
    }
    Json differing = Json::array();
    for (const auto& [name, bytes] : runs[0]) {
        auto it = runs[1].find(name);
        if (it == runs[1].end() || it->second != bytes) differing.push_back(name);
    }
    for (const auto& [name, bytes] : runs[1]) {
        if (!runs[0].count(name)) differing.push_back(name);
    }
    o.measured = {{"files", runs[0].size()}, {"differing", differing}, {"exit_codes", {codes[0], codes[1]}}};
    o.passed = codes[0] == 0 && codes[1] == 0 && !runs[0].empty() && differing.empty();
    fs::remove_all(base);
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ionvac acceptance checks"};
    std::vector<int> selected;
    ionvac::AcceptanceContext ctx;
    app.add_option("--criterion", selected, "criterion id(s) to run (default: all)")
        ->check(CLI::Range(1, ionvac::kCriterionCount));
    app.add_option("--seed", ctx.seed, "master seed");
    app.add_option("--threads", ctx.threads, "worker threads (0 = all cores)");
    app.add_option("--restarts", ctx.restarts, "optimiser restarts for criterion 5");
    CLI11_PARSE(app, argc, argv);

    if (selected.empty()) {
        for (int id = 1; id <= ionvac::kCriterionCount; ++id) selected.push_back(id);
    }

    bool all_ok = true;
    for (int id : selected) {
        CriterionOutcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            if (id == 12) {
                o = determinism(ctx.seed);
            } else {
                o = ionvac::check_criterion(id, ctx);
            }
        } catch (const std::exception& e) {
            o.passed = false;
            o.measured = {{"exception", e.what()}};
        }
        o.id = id;
        o.title = ionvac::criterion_title(id);
        o.budget_seconds = ionvac::criterion_budget_seconds(id);
        o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << ionvac::describe(o) << std::endl;
        all_ok = all_ok && o.passed && o.within_budget();
    }
    return all_ok ? 0 : 1;
}
