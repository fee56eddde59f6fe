#pragma once

#include <span>
#include <vector>

#include "doa/signal_model.hpp"

namespace doa {

inline constexpr double kRmseFloorDb = -120.0;

/// Error assigned to a truth when a trial produced no estimate at all.
inline constexpr double kMissingEstimateError = 90.0;

struct TrialOutcome {
    std::vector<double> estimates; ///< degrees, ascending
    std::vector<double> truths;    ///< degrees, ascending
    bool                resolved          = false;
    double              squared_error_sum = 0.0; ///< degrees^2 over all truths
    int                 num_matched       = 0;   ///< truths paired with a distinct estimate
};

/// For each truth (ascending), the estimate it is paired with. Equal-sized
/// lists are paired in sorted order; otherwise closest pairs are taken
/// greedily and any truth left over reuses its nearest estimate. The second
/// member flags truths that received a distinct estimate.
struct Matching {
    std::vector<double> paired;
    std::vector<bool>   distinct;
};
Matching match_estimates(std::span<const double> estimates, std::span<const double> truths);

/// True iff there are at least as many estimates as truths and every paired
/// error is below half the minimum truth separation (unbounded for one truth).
/// Throws std::invalid_argument on empty truths.
bool resolution_event(std::span<const double> estimates, std::span<const double> truths);

TrialOutcome score_trial(std::span<const double> estimates, std::span<const double> truths);

/// 10 log10(sum of squared errors / (trials * q)), floored at kRmseFloorDb.
/// With `resolved_only` only resolved trials enter; NaN if there are none.
double rmse_db(std::span<const TrialOutcome> outcomes, bool resolved_only = false);

struct CrbResult {
    std::vector<double> variances; ///< degrees^2 per source
    bool                bounded = true;

    /// 10 log10 of the mean per-source bound.
    [[nodiscard]] double mean_db() const;
};

/// Stochastic (unconditional) Cramer-Rao bound for the given scenario with
/// known noise power. The source covariance has sigma_s^2 on the diagonal and
/// tau sigma_s^2 between the first two sources.
CrbResult stochastic_crb(const SourceScenario& scenario, const ArrayGeometry& geometry);

} // namespace doa
