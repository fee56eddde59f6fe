#include "doa/harness.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "doa/baselines.hpp"
#include "doa/metrics.hpp"
#include "doa/scan_grid.hpp"
#include "doa/spectrum_search.hpp"

namespace doa {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t axis_index, std::uint64_t trial) {
    return base_seed ^ splitmix64(splitmix64(axis_index) ^ trial);
}

std::vector<double> trial_doas(const ExperimentConfig& config, Rng& rng) {
    std::vector<double> doas = config.scenario.doas;
    if (config.off_grid) {
        std::uniform_real_distribution<double> shift(-0.5 * config.grid_step, 0.5 * config.grid_step);
        const double s = shift(rng);
        for (double& d : doas) {
            d += s;
        }
    }
    return doas;
}

namespace {

struct MethodTrial {
    TrialOutcome outcome;
    double       mean_rank = 0.0;
    double       wall_ms   = 0.0;
    int          faults    = 0;
};

double mean_valid_rank(const SpectrumResult& s) {
    double sum   = 0.0;
    int    count = 0;
    for (std::size_t n = 0; n < s.size(); ++n) {
        if (s.valid[n]) {
            sum += s.rank_used[n];
            ++count;
        }
    }
    return count ? sum / count : 0.0;
}

MethodTrial run_method(const MethodConfig& m, const SnapshotMatrix& data, const ScanGrid& grid,
                       const std::vector<double>& truths, int assumed, bool timing) {
    const auto   start = std::chrono::steady_clock::now();
    const int    q     = static_cast<int>(truths.size());
    MethodTrial  out;
    std::vector<double> estimates;

    switch (m.kind) {
    case MethodKind::Jio:
        if (m.search == SearchMode::Rooted) {
            const ScanGrid       coarse(m.coarse_step);
            JioOptions           opt = m.jio;
            opt.keep_states          = true;
            const SpectrumResult s   = jio_family_spectrum(data, coarse, opt);
            out.faults    = s.faults;
            out.mean_rank = mean_valid_rank(s);
            estimates     = refine_peaks(s, coarse.step(), data.geometry.spacing_ratio, q);
        } else {
            const SpectrumResult s = jio_family_spectrum(data, grid, m.jio);
            out.faults    = s.faults;
            out.mean_rank = mean_valid_rank(s);
            estimates     = find_peaks(s, q);
        }
        break;
    case MethodKind::Capon:
    case MethodKind::CaponFba: {
        const SpectrumResult s = capon_spectrum(data, grid, m.forgetting, m.loading, m.kind == MethodKind::CaponFba);
        out.faults    = s.faults;
        out.mean_rank = static_cast<double>(data.sensors());
        estimates     = find_peaks(s, q);
        break;
    }
    case MethodKind::Music: {
        const int            k = m.assumed_sources.value_or(assumed);
        const SpectrumResult s = music_spectrum(data, grid, k, m.forgetting);
        out.faults    = s.faults;
        out.mean_rank = k;
        estimates     = find_peaks(s, q);
        break;
    }
    }

    out.outcome = score_trial(estimates, truths);
    if (timing) {
        out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    return out;
}

} // namespace

std::vector<CurvePoint> run_experiment(const ExperimentConfig& config, const RunOptions& options) {
    config.validate();
    const ScanGrid    grid(config.grid_step);
    const std::size_t n_axis    = config.values.size();
    const auto        n_trials  = static_cast<std::size_t>(config.trials);
    const std::size_t n_methods = config.methods.size();
    const std::size_t n_jobs    = n_axis * n_trials;

    // results[(a * trials + t) * methods + m]
    std::vector<MethodTrial> results(n_jobs * n_methods);
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex               progress_lock;

    auto worker = [&]() {
        for (std::size_t job = next++; job < n_jobs; job = next++) {
            const std::size_t a = job / n_trials;
            const std::size_t t = job % n_trials;
            Rng               rng(trial_seed(config.base_seed, a, t));

            SourceScenario scenario = config.scenario;
            scenario.doas           = trial_doas(config, rng);
            const double snr = config.axis == SweepAxis::SnrDb ? config.values[a] : config.snr_db;
            scenario.noise_power     = noise_power_for_snr(scenario.source_power, snr);
            const int assumed        = config.axis == SweepAxis::AssumedSources ? static_cast<int>(config.values[a])
                                                                                : scenario.num_sources();
            const SnapshotMatrix data = generate_snapshots(scenario, config.geometry, rng);

            for (std::size_t m = 0; m < n_methods; ++m) {
                results[job * n_methods + m] =
                    run_method(config.methods[m], data, grid, scenario.doas, assumed, options.timing);
            }
            const std::size_t finished = ++done;
            if (options.progress && (finished % 50 == 0 || finished == n_jobs)) {
                std::lock_guard<std::mutex> lock(progress_lock);
                *options.progress << "[" << config.name << "] " << finished << "/" << n_jobs << " trials\n";
            }
        }
    };

    const int threads = std::max(1, std::min<int>(options.threads, static_cast<int>(n_jobs)));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int k = 0; k < threads; ++k) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    std::vector<CurvePoint> table;
    for (std::size_t a = 0; a < n_axis; ++a) {
        SourceScenario reference = config.scenario;
        const double   snr       = config.axis == SweepAxis::SnrDb ? config.values[a] : config.snr_db;
        reference.noise_power    = noise_power_for_snr(reference.source_power, snr);
        const double   crb_db    = reference.num_sources() < config.geometry.num_sensors
                                       ? stochastic_crb(reference, config.geometry).mean_db()
                                       : std::numeric_limits<double>::quiet_NaN();

        for (std::size_t m = 0; m < n_methods; ++m) {
            std::vector<TrialOutcome> outcomes;
            outcomes.reserve(n_trials);
            CurvePoint point;
            point.axis   = config.values[a];
            point.method = config.methods[m].id;
            point.crb_db = crb_db;
            int resolved = 0;
            for (std::size_t t = 0; t < n_trials; ++t) {
                const MethodTrial& r = results[(a * n_trials + t) * n_methods + m];
                outcomes.push_back(r.outcome);
                resolved += r.outcome.resolved ? 1 : 0;
                point.mean_rank += r.mean_rank;
                point.wall_ms += r.wall_ms;
                point.faults += r.faults;
            }
            point.prob_resolution = static_cast<double>(resolved) / static_cast<double>(n_trials);
            point.rmse_db         = rmse_db(outcomes, config.rmse_resolved_only);
            point.mean_rank /= static_cast<double>(n_trials);
            point.wall_ms /= static_cast<double>(n_trials);
            table.push_back(std::move(point));
        }
    }
    return table;
}

std::string format_csv(const std::vector<CurvePoint>& table) {
    std::string out = "axis,method,prob_resolution,rmse_db,crb_db,mean_rank,wall_ms\n";
    char        buf[256];
    for (const CurvePoint& p : table) {
        std::snprintf(buf, sizeof buf, "%.6g,%s,%.6g,%.6g,%.6g,%.6g,%.6g\n", p.axis, p.method.c_str(),
                      p.prob_resolution, p.rmse_db, p.crb_db, p.mean_rank, p.wall_ms);
        out += buf;
    }
    return out;
}

void emit_csv(const std::vector<CurvePoint>& table, const std::string& path) {
    if (table.empty()) {
        throw std::invalid_argument("emit_csv: empty table");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << format_csv(table);
    out.flush();
    if (!out) {
        throw IoError("failed writing '" + path + "'");
    }
}

} // namespace doa
