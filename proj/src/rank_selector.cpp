#include "doa/rank_selector.hpp"

#include <stdexcept>

namespace doa {

RankSweepState::RankSweepState(int r_min, int r_max, double weight)
    : r_min_(r_min), r_max_(r_max), weight_(weight) {
    if (r_min < 1 || r_max < r_min) {
        throw std::invalid_argument("RankSweepState: need 1 <= r_min <= r_max");
    }
    if (!(weight > 0.0 && weight <= 1.0)) {
        throw std::invalid_argument("RankSweepState: weight must lie in (0, 1]");
    }
    costs_.assign(static_cast<std::size_t>(r_max - r_min + 1), 0.0);
}

void RankSweepState::accumulate(const CVector& projected, const CVector& g_max) {
    if (projected.size() < r_max_ || g_max.size() < r_max_) {
        throw std::invalid_argument("RankSweepState: state smaller than r_max");
    }
    // Running prefix sum of conj(g_k) * (T^H x)_k gives every nested rank in one pass.
    Complex prefix{0.0, 0.0};
    for (int k = 0; k < r_max_; ++k) {
        prefix += std::conj(g_max(k)) * projected(k);
        const int rank = k + 1;
        if (rank >= r_min_) {
            double& c = costs_[static_cast<std::size_t>(rank - r_min_)];
            c         = weight_ * c + std::norm(prefix);
        }
    }
}

void RankSweepState::accumulate(const CMatrix& t_max, const CVector& g_max, const CVector& x) {
    accumulate(CVector(t_max.adjoint() * x), g_max);
}

double RankSweepState::cost(int rank) const {
    if (rank < r_min_ || rank > r_max_) {
        throw std::out_of_range("RankSweepState: rank outside [r_min, r_max]");
    }
    return costs_[static_cast<std::size_t>(rank - r_min_)];
}

int RankSweepState::select() const { return select_rank(costs_, r_min_); }

double posterior_mv_cost(const CMatrix& t, const CVector& g, const CMatrix& snapshots, double weight) {
    if (t.cols() != g.size() || t.rows() != snapshots.rows()) {
        throw std::invalid_argument("posterior_mv_cost: dimension mismatch");
    }
    const CVector w    = t * g;
    double        cost = 0.0;
    for (Index l = 0; l < snapshots.cols(); ++l) {
        cost = weight * cost + std::norm(w.dot(snapshots.col(l)));
    }
    return cost;
}

int select_rank(std::span<const double> costs, int r_min) {
    if (costs.empty()) {
        throw std::invalid_argument("select_rank: empty rank range");
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < costs.size(); ++k) {
        if (costs[k] < costs[best]) {
            best = k;
        }
    }
    return r_min + static_cast<int>(best);
}

} // namespace doa
