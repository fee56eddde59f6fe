#pragma once

#include <vector>

#include "doa/jio.hpp"
#include "doa/scan_grid.hpp"
#include "doa/signal_model.hpp"

namespace doa {

/// Indices of the q largest strict interior local maxima over valid angles,
/// in ascending angle order. Fewer than q are returned when fewer exist.
/// Throws std::invalid_argument if q < 1 or q exceeds the spectrum size.
std::vector<std::size_t> find_peak_indices(const SpectrumResult& spectrum, int q);

/// Angles of find_peak_indices.
std::vector<double> find_peaks(const SpectrumResult& spectrum, int q);

/// Q(z) = sum_k c_k z^-k, k = -(M-1) .. M-1, with c_k the sum of the k-th
/// subdiagonal of C = T K T^H. On the unit circle z = exp(-2 pi j d cos theta)
/// it equals a^H C a.
struct RootingPolynomial {
    CMatrix              C;
    std::vector<Complex> coefficients; ///< c_{-(M-1)} .. c_{M-1}

    [[nodiscard]] int     order() const { return static_cast<int>(C.rows()) - 1; }
    [[nodiscard]] Complex coefficient(int k) const { return coefficients[static_cast<std::size_t>(k + order())]; }
    [[nodiscard]] Complex evaluate(Complex z) const;
    [[nodiscard]] Complex evaluate_angle(double theta_deg, double spacing_ratio) const;
};

RootingPolynomial build_rooting_polynomial(const CMatrix& t, const CMatrix& r_bar_inv);

/// Same, from an explicit Hermitian M x M matrix C.
RootingPolynomial rooting_polynomial_from(const CMatrix& c);

/// Roots of the polynomial with coefficients ascending in power, via the
/// eigenvalues of its companion matrix. Leading coefficients that are zero
/// relative to the largest are dropped.
std::vector<Complex> polynomial_roots(const std::vector<Complex>& ascending);

/// All 2(M-1) roots of z^{M-1} Q(z).
std::vector<Complex> rooting_roots(const RootingPolynomial& poly);

struct RootCandidate {
    Complex z;
    double  doa;      ///< degrees
    double  distance; ///< | |z| - 1 |
};

/// Roots on or inside the unit circle that map to an angle, one per distinct
/// angle, ordered by distance to the circle.
std::vector<RootCandidate> root_candidates(const RootingPolynomial& poly, double spacing_ratio);

struct RootedDoas {
    std::vector<double> doas; ///< ascending
    bool                shortfall = false;
};

/// The q admissible roots closest to the unit circle, mapped through
/// theta = arccos(-arg z / (2 pi d)).
RootedDoas roots_to_doas(const RootingPolynomial& poly, int q, double spacing_ratio);

/// Replaces each of the q peaks of a spectrum computed with kept states by the
/// nearest root-derived DOA within `max_shift` degrees.
std::vector<double> refine_peaks(const SpectrumResult& coarse, double max_shift, double spacing_ratio, int q);

/// Coarse-grid JIO scan followed by local rooting: each of the q coarse peaks
/// is replaced by the nearest root-derived DOA within one coarse step, using
/// that angle's final (T, K). Peaks without such a root are kept.
std::vector<double> rooted_refine(const SnapshotMatrix& data, const ScanGrid& coarse_grid, JioOptions options,
                                  int q);

} // namespace doa
