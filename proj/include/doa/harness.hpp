#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "doa/jio.hpp"
#include "doa/signal_model.hpp"

namespace doa {

/// Invalid experiment description. `path()` names the offending field, e.g.
/// "methods[2].rank".
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string path, const std::string& message)
        : std::runtime_error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}
    [[nodiscard]] const std::string& path() const { return path_; }

private:
    std::string path_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SweepAxis { SnrDb, AssumedSources };
enum class SearchMode { Grid, Rooted };
enum class MethodKind { Jio, Capon, CaponFba, Music };

struct MethodConfig {
    std::string id;
    MethodKind  kind = MethodKind::Jio;
    JioOptions  jio;                       ///< JIO family only
    double      forgetting = 0.998;        ///< Capon and MUSIC
    Loading     loading    = Loading::automatic();
    std::optional<int> assumed_sources;    ///< MUSIC; defaults to the sweep value or q
    SearchMode  search      = SearchMode::Grid;
    double      coarse_step = 1.0;         ///< rooted search only
};

struct ExperimentConfig {
    std::string    name = "experiment";
    ArrayGeometry  geometry;
    SourceScenario scenario;               ///< noise_power is set per sweep point
    bool           off_grid = false;       ///< common uniform shift in [-step/2, step/2) per trial
    SweepAxis      axis     = SweepAxis::SnrDb;
    std::vector<double> values;            ///< SNR in dB, or assumed source counts
    double         snr_db   = 10.0;        ///< fixed SNR when sweeping assumed sources
    std::vector<MethodConfig> methods;
    int            trials    = 1000;
    std::uint64_t  base_seed = 1;
    double         grid_step = 0.5;
    bool           rmse_resolved_only = false;

    /// Throws ConfigError with a field path.
    void validate() const;
};

/// Parses the JSON experiment description. Unknown keys are rejected.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

struct CurvePoint {
    double      axis = 0.0;
    std::string method;
    double      prob_resolution = 0.0;
    double      rmse_db         = 0.0;
    double      crb_db          = 0.0;
    double      mean_rank       = 0.0;
    double      wall_ms         = 0.0;
    int         faults          = 0; ///< angles marked invalid, summed over trials
};

struct RunOptions {
    int  threads = 1;
    bool timing  = false; ///< record wall time; otherwise wall_ms is 0 so output is reproducible
    std::ostream* progress = nullptr;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Seed for trial t at sweep index a.
std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t axis_index, std::uint64_t trial);

/// DOAs for a trial: the configured truths, shifted when off-grid mode is on.
std::vector<double> trial_doas(const ExperimentConfig& config, Rng& rng);

std::vector<CurvePoint> run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

std::string format_csv(const std::vector<CurvePoint>& table);

/// Writes format_csv(table) to `path`. Throws IoError.
void emit_csv(const std::vector<CurvePoint>& table, const std::string& path);

int cli_main(int argc, char** argv);

} // namespace doa
