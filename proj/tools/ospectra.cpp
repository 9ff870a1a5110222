// ospectra: solve, sweep and validate fractional Orlicz eigenproblems from a JSON config.
#include <fstream>
#include <iostream>
#include <sstream>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "ospectra/cli.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ospectra::ConfigError(path + ": cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Eigenvalues of fractional Orlicz-Laplacian problems on an interval"};
    app.allow_extras();
    std::string config_path, task, out;
    std::uint64_t seed = 0;
    bool print_config = false;
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--task", task, "solve | sweep | validate");
    auto* seed_opt = app.add_option("--seed", seed, "RNG seed (solver.rng_seed)");
    app.add_option("--out", out, "output path");
    app.add_flag("--print-config", print_config, "print the effective configuration and exit");
    app.footer("Any config field can be set with --dotted.key=value, e.g. --mesh.k=31 --levels=[1,2].");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : ospectra::kExitConfig;
    }

    try {
        ospectra::RunConfig cfg;
        if (!config_path.empty()) cfg = ospectra::parse_config(read_file(config_path));
        std::vector<std::pair<std::string, std::string>> overrides;
        if (!task.empty()) overrides.emplace_back("task", task);
        if (*seed_opt) overrides.emplace_back("solver.rng_seed", std::to_string(seed));
        if (!out.empty()) overrides.emplace_back("output", out);
        for (const std::string& extra : app.remaining()) {
            if (extra.rfind("--", 0) != 0) throw ospectra::ConfigError(extra + ": unexpected argument");
            const auto eq = extra.find('=');
            if (eq == std::string::npos) throw ospectra::ConfigError(extra + ": expected --key=value");
            overrides.emplace_back(extra.substr(2, eq - 2), extra.substr(eq + 1));
        }
        ospectra::apply_overrides(cfg, overrides);
        if (print_config) {
            std::cout << ospectra::emit_config(cfg);
            return ospectra::kExitOk;
        }
        return ospectra::run_task(cfg, std::cerr);
    } catch (const ospectra::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ospectra::kExitConfig;
    }
}
