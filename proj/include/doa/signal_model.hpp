#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "doa/types.hpp"

namespace doa {

using Rng = std::mt19937_64;

/// Uniform linear array. Element m sits at m * d from the reference element.
struct ArrayGeometry {
    int    num_sensors   = 40;
    double spacing_ratio = 0.5; ///< d / lambda

    void validate() const;

    /// Spacing above half a wavelength admits grating lobes.
    [[nodiscard]] bool aliasing_possible() const { return spacing_ratio > 0.5; }
};

enum class Modulation { Bpsk, Gaussian };

/// Sources impinging on the array. Amplitudes are real-valued; the complex
/// structure of the snapshots comes entirely from the steering vectors.
struct SourceScenario {
    std::vector<double> doas;                    ///< degrees, in (0, 180)
    double              source_power  = 1.0;     ///< sigma_s^2
    double              correlation   = 0.0;     ///< tau, applied to the first source pair
    Modulation          modulation    = Modulation::Bpsk;
    int                 num_snapshots = 20;
    double              noise_power   = 1.0;     ///< sigma_n^2, per complex element

    void validate(const ArrayGeometry& geometry) const;
    [[nodiscard]] int num_sources() const { return static_cast<int>(doas.size()); }
};

/// M x N array observations, one column per snapshot.
struct SnapshotMatrix {
    CMatrix       data;
    ArrayGeometry geometry;

    [[nodiscard]] Index sensors() const { return data.rows(); }
    [[nodiscard]] Index snapshots() const { return data.cols(); }
};

/// a(theta)_m = exp(-2 pi j m (d/lambda) cos theta). Throws std::domain_error
/// outside the open interval (0, 180) degrees.
CVector steering_vector(const ArrayGeometry& geometry, double theta_deg);

/// Columns are steering vectors for each angle.
CMatrix steering_matrix(const ArrayGeometry& geometry, std::span<const double> thetas_deg);

/// q x N real source amplitudes. BPSK emits +-sigma_s; Gaussian draws
/// N(0, sigma_s^2) and, for tau > 0, builds s2 = tau s1 + sqrt(1 - tau^2) s3.
RMatrix generate_sources(const SourceScenario& scenario, Rng& rng);

/// x(i) = A(theta) s(i) + n(i) with circular complex Gaussian noise.
SnapshotMatrix generate_snapshots(const SourceScenario& scenario, const ArrayGeometry& geometry, Rng& rng);

/// Noise power giving the requested per-source SNR in dB.
inline double noise_power_for_snr(double source_power, double snr_db) {
    return source_power * std::pow(10.0, -snr_db / 10.0);
}

} // namespace doa
