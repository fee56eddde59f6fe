#pragma once

#include <span>
#include <vector>

#include "doa/types.hpp"

namespace doa {

inline constexpr int kDefaultRankMin = 3;
inline constexpr int kDefaultRankMax = 7;

/// Exponentially weighted a posteriori MV costs for the nested ranks
/// r_min..r_max of one maximal (T, g) state. The rank-r filter is the leading
/// r columns of T and leading r entries of g, so only T^H x is needed.
class RankSweepState {
public:
    RankSweepState(int r_min, int r_max, double weight);

    /// cost_r <- weight * cost_r + |g_r^H T_r^H x|^2 for every r in range,
    /// given the r_max-sized T^H x and g from the previous step.
    void accumulate(const CVector& projected, const CVector& g_max);

    /// Same, from the full-size quantities.
    void accumulate(const CMatrix& t_max, const CVector& g_max, const CVector& x);

    [[nodiscard]] int                     r_min() const { return r_min_; }
    [[nodiscard]] int                     r_max() const { return r_max_; }
    [[nodiscard]] double                  weight() const { return weight_; }
    [[nodiscard]] std::span<const double> costs() const { return costs_; }
    [[nodiscard]] double                  cost(int rank) const;

    /// Smallest rank attaining the minimum cost.
    [[nodiscard]] int select() const;

private:
    int                 r_min_;
    int                 r_max_;
    double              weight_;
    std::vector<double> costs_; // index r - r_min
};

/// Recursive accumulation of sum_l weight^{i-l} |g^H T^H x(l)|^2 for a fixed
/// (T, g) pair over the columns of `snapshots`.
double posterior_mv_cost(const CMatrix& t, const CVector& g, const CMatrix& snapshots, double weight);

/// Argmin over costs indexed from r_min, ties to the smallest rank.
/// Throws std::invalid_argument on an empty range.
int select_rank(std::span<const double> costs, int r_min);

} // namespace doa
