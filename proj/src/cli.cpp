#include <cstdlib>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "doa/harness.hpp"

namespace doa {

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo     = 3;

int resolve_threads(const std::string& spec, const std::string& origin) {
    if (spec.empty() || spec == "auto") {
        return static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
    }
    std::size_t used = 0;
    int         n    = 0;
    try {
        n = std::stoi(spec, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != spec.size() || n < 1) {
        throw ConfigError(origin, "expected a positive integer or 'auto', got '" + spec + "'");
    }
    return n;
}

} // namespace

int cli_main(int argc, char** argv) {
    CLI::App app{"Monte Carlo direction-of-arrival resolution and RMSE sweeps"};

    std::string config_path;
    std::string out_path;
    std::string threads_spec;
    int         trials  = 0;
    std::uint64_t seed  = 0;
    bool        verbose = false;
    bool        timing  = false;

    app.add_option("--config", config_path, "JSON experiment description")->required();
    app.add_option("--out", out_path, "CSV output path (standard output when omitted)");
    auto* trials_opt = app.add_option("--trials", trials, "override the number of trials")->check(CLI::PositiveNumber);
    auto* seed_opt   = app.add_option("--seed", seed, "override the base seed");
    auto* threads_opt =
        app.add_option("--threads", threads_spec, "worker threads, a positive integer or 'auto' (env DOA_THREADS)");
    app.add_flag("--verbose", verbose, "progress on standard error");
    app.add_flag("--timing", timing, "record per-trial wall time in the wall_ms column");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        ExperimentConfig config = load_config(config_path);
        if (*trials_opt) {
            config.trials = trials;
        }
        if (*seed_opt) {
            config.base_seed = seed;
        }

        RunOptions run;
        run.timing = timing;
        if (*threads_opt) {
            run.threads = resolve_threads(threads_spec, "--threads");
        } else if (const char* env = std::getenv("DOA_THREADS")) {
            run.threads = resolve_threads(env, "DOA_THREADS");
        } else {
            run.threads = resolve_threads("auto", "--threads");
        }
        if (verbose) {
            run.progress = &std::cerr;
            std::cerr << "[" << config.name << "] " << config.values.size() << " sweep points x " << config.trials
                      << " trials x " << config.methods.size() << " methods on " << run.threads << " threads\n";
        }

        const std::vector<CurvePoint> table = run_experiment(config, run);
        if (verbose) {
            for (const CurvePoint& p : table) {
                if (p.faults > 0) {
                    std::cerr << "[" << config.name << "] " << p.method << " at " << p.axis << ": " << p.faults
                              << " invalid angles\n";
                }
            }
        }
        if (out_path.empty()) {
            std::cout << format_csv(table);
        } else {
            emit_csv(table, out_path);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kExitIo;
    }
    return 0;
}

} // namespace doa
