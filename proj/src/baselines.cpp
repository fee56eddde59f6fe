#include "doa/baselines.hpp"

#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace doa {

EigenDecomposition hermitian_eigen(const CMatrix& r) {
    if (r.rows() != r.cols()) {
        throw std::invalid_argument("hermitian_eigen: matrix is not square");
    }
    if (hermitian_defect(r) > kHermitianTolerance) {
        throw std::invalid_argument("hermitian_eigen: matrix is not Hermitian");
    }
    const Eigen::SelfAdjointEigenSolver<CMatrix> es(r);
    if (es.info() != Eigen::Success) {
        throw NumericalFault("hermitian_eigen: solver did not converge");
    }
    // Ascending from the solver; flip to descending.
    return {es.eigenvalues().reverse(), es.eigenvectors().rowwise().reverse()};
}

SpectrumResult capon_spectrum(const SnapshotMatrix& data, const ScanGrid& grid, double forgetting, Loading loading,
                              bool fba) {
    if (data.snapshots() < 1) {
        throw std::invalid_argument("capon: at least one snapshot is required");
    }
    const CMatrix r   = weighted_covariance(data.data, forgetting);
    const CMatrix inv = regularized_inverse(fba ? fba_smooth(r) : r, loading).inverse;

    SpectrumResult out;
    out.method = fba ? "capon_fba" : "capon";
    out.resize(grid.size());
    for (std::size_t n = 0; n < grid.size(); ++n) {
        out.angles[n]    = grid[n];
        const CVector a  = steering_vector(data.geometry, grid[n]);
        const double  q  = a.dot(inv * a).real();
        out.rank_used[n] = static_cast<int>(data.sensors());
        if (q > 0.0 && std::isfinite(q)) {
            out.q_values[n]            = q;
            out.power[n]               = 1.0 / q;
            out.constraint_residual[n] = 0.0;
            out.valid[n]               = true;
        } else {
            ++out.faults;
        }
    }
    return out;
}

SpectrumResult music_spectrum(const SnapshotMatrix& data, const ScanGrid& grid, int assumed_sources,
                              double forgetting) {
    const Index m = data.sensors();
    if (assumed_sources < 1 || assumed_sources >= m) {
        throw std::invalid_argument("music: assumed source count must lie in [1, M - 1]");
    }
    const CMatrix            r     = weighted_covariance(data.data, forgetting);
    const EigenDecomposition eig   = hermitian_eigen(r);
    const CMatrix            noise = eig.vectors.rightCols(m - assumed_sources);

    SpectrumResult out;
    out.method = "music";
    out.resize(grid.size());
    for (std::size_t n = 0; n < grid.size(); ++n) {
        out.angles[n]    = grid[n];
        const CVector a  = steering_vector(data.geometry, grid[n]);
        const double  q  = (noise.adjoint() * a).squaredNorm();
        out.rank_used[n] = assumed_sources;
        if (q > 0.0 && std::isfinite(q)) {
            out.q_values[n]            = q;
            out.power[n]               = 1.0 / q;
            out.constraint_residual[n] = 0.0;
            out.valid[n]               = true;
        } else {
            ++out.faults;
        }
    }
    return out;
}

} // namespace doa
