#pragma once

#include <optional>
#include <string>
#include <vector>

#include "doa/covariance.hpp"
#include "doa/scan_grid.hpp"
#include "doa/signal_model.hpp"
#include "doa/types.hpp"

namespace doa {

enum class JioVariant { Jio, JioFba, JioRls, JioRlsFba };

const char* to_string(JioVariant variant);

/// How the reduced covariance used for g and the output power is formed.
enum class ReducedCovariance {
    /// Rbar(i) = alpha Rbar(i-1) + xbar xbar^H with xbar = T(i-1)^H x(i).
    Recursive,
    /// Rbar(i) = T(i-1)^H R(i) T(i-1), with the output evaluated at the final T.
    /// Reproduces Capon's spectrum exactly for every rank. Batch variants only.
    Projected,
};

/// Adaptive rank: the state is kept at r_max. Before each snapshot's update
/// the rank minimizing the a posteriori cost of the previous (T, g) is
/// selected; g is then computed from the leading r x r block of the reduced
/// covariance and zero-padded to r_max.
struct RankRange {
    int r_min = 3;
    int r_max = 7;
};

struct JioOptions {
    JioVariant variant = JioVariant::Jio;
    int        rank    = 4;
    std::optional<RankRange> adaptive_rank; ///< when set, `rank` is ignored
    std::optional<double>    rank_weight;   ///< cost weight; defaults to `forgetting`
    double     forgetting = 0.998;

    // Batch variants.
    Loading loading         = Loading::automatic(); ///< full-rank inverse
    Loading reduced_loading = Loading::automatic(); ///< reduced-rank inverse
    double  initial_full    = 0.0;                  ///< R(0) = initial_full * I
    double  initial_reduced = 0.0;                  ///< Rbar(0) = initial_reduced * I
    ReducedCovariance reduced = ReducedCovariance::Recursive;

    // RLS variants: Phi(0) = delta I, Phibar(0) = delta_bar I.
    double delta     = 1e-3;
    double delta_bar = 1e-3;

    bool persist_across_angles = false; ///< carry (T, Rbar) from one angle to the next
    bool keep_states           = false; ///< store the per-angle output state

    void validate(Index sensors) const;
    [[nodiscard]] bool is_rls() const { return variant == JioVariant::JioRls || variant == JioVariant::JioRlsFba; }
    [[nodiscard]] bool is_fba() const { return variant == JioVariant::JioFba || variant == JioVariant::JioRlsFba; }
    [[nodiscard]] int  state_rank() const { return adaptive_rank ? adaptive_rank->r_max : rank; }
};

/// Final per-angle quantities: Q = a^H T K T^H a holds for the scanned angle.
struct AngleState {
    CMatrix T; ///< rank-reduction matrix paired with K in the output power
    CVector g; ///< auxiliary vector after the last update
    CMatrix K; ///< inverse reduced covariance used for the output power
};

struct SpectrumResult {
    std::string         method;
    std::vector<double> angles;
    std::vector<double> power;               ///< P(theta); NaN where invalid
    std::vector<double> q_values;            ///< Q(theta) = 1 / P(theta)
    std::vector<double> constraint_residual; ///< |g^H T^H a - 1| after the last update
    std::vector<int>    rank_used;
    std::vector<bool>   valid;
    std::vector<AngleState> states;          ///< filled only when requested
    int                 faults = 0;          ///< angles marked invalid

    [[nodiscard]] std::size_t size() const { return angles.size(); }
    void resize(std::size_t n);
};

/// T = f g^H / ||g||^2 with f = R_inv a / (a^H R_inv a): the minimum Frobenius
/// norm matrix with T g = f. Throws DegenerateState for g = 0 and
/// NumericalFault when a^H R_inv a is not positive.
CMatrix update_T(const CMatrix& r_inv, const CVector& a, const CVector& g_bar);

/// g = Rbar_inv abar / (abar^H Rbar_inv abar). Throws DegenerateState for
/// abar = 0 and NumericalFault for a non-positive denominator.
CVector update_g(const CMatrix& r_bar_inv, const CVector& a_bar);

/// Runs the joint (g, T) recursion over all snapshots independently for every
/// grid angle. Per-angle failures are recorded, never thrown.
SpectrumResult jio_family_spectrum(const SnapshotMatrix& data, const ScanGrid& grid, const JioOptions& options);

SpectrumResult jio_spectrum(const SnapshotMatrix& data, const ScanGrid& grid, int rank, double forgetting,
                            Loading loading = Loading::automatic());
SpectrumResult jio_fba_spectrum(const SnapshotMatrix& data, const ScanGrid& grid, int rank, double forgetting,
                                Loading loading = Loading::automatic());
SpectrumResult jio_rls_spectrum(const SnapshotMatrix& data, const ScanGrid& grid, int rank, double forgetting,
                                double delta, double delta_bar);
SpectrumResult jio_rls_fba_spectrum(const SnapshotMatrix& data, const ScanGrid& grid, int rank, double forgetting,
                                    double delta, double delta_bar);

} // namespace doa
