#pragma once

#include "doa/covariance.hpp"
#include "doa/jio.hpp"
#include "doa/scan_grid.hpp"
#include "doa/signal_model.hpp"

namespace doa {

/// Eigenpairs of a Hermitian matrix, eigenvalues in descending order.
struct EigenDecomposition {
    RVector values;
    CMatrix vectors; ///< orthonormal columns, matching `values`
};

/// Throws std::invalid_argument for non-square or non-Hermitian input.
EigenDecomposition hermitian_eigen(const CMatrix& r);

/// P(theta) = 1 / (a^H R^-1 a) with R the weighted sample covariance (FBA
/// smoothed on request) and the same regularization policy as the JIO family.
SpectrumResult capon_spectrum(const SnapshotMatrix& data, const ScanGrid& grid, double forgetting = 1.0,
                              Loading loading = Loading::automatic(), bool fba = false);

/// P(theta) = 1 / (a^H En En^H a) with En the M - q minor eigenvectors of the
/// sample covariance. `assumed_sources` may differ from the true source count.
SpectrumResult music_spectrum(const SnapshotMatrix& data, const ScanGrid& grid, int assumed_sources,
                              double forgetting = 1.0);

} // namespace doa
